"""Density-induced ambient metrics: lengths, geodesic optimization,
Christoffel-type coefficient fields, acceleration residuals, Hausdorff distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import GradientTooSmall, NonFiniteObjective
from .logderiv import LogDerivBundle


@dataclass
class GeodesicPath:
    """Discrete path with pinned endpoints."""

    points: np.ndarray  # (n, D), endpoints included
    fixed_endpoints: tuple
    objective_history: list = field(default_factory=list)

    def __post_init__(self):
        a, b = self.fixed_endpoints
        if not (np.array_equal(self.points[0], a) and np.array_equal(self.points[-1], b)):
            raise ValueError("path endpoints do not match fixed_endpoints")


def degenerate_length(path, grad_log_p) -> float:
    """Length under the rank-one metric (d log P (x) d log P), midpoint rule.

    The square root of the quadratic form is |<segment, grad log P>|.
    """
    pts = np.asarray(path.points if isinstance(path, GeodesicPath) else path, dtype=float)
    if pts.shape[0] < 2:
        raise ValueError("path needs at least 2 points")
    deltas = np.diff(pts, axis=0)
    mids = 0.5 * (pts[:-1] + pts[1:])
    G = np.asarray(grad_log_p(mids), dtype=float)
    return float(np.sum(np.abs(np.einsum("ij,ij->i", deltas, G))))


def _softened_energy(pts, grad_log_p, eps):
    deltas = np.diff(pts, axis=0)
    mids = 0.5 * (pts[:-1] + pts[1:])
    G = np.asarray(grad_log_p(mids), dtype=float)
    if not np.all(np.isfinite(G)):
        raise NonFiniteObjective("grad_log_p returned non-finite values")
    cross = np.einsum("ij,ij->i", deltas, G)
    seg2 = np.einsum("ij,ij->i", deltas, deltas)
    e = float(np.sum(cross**2 + eps * seg2))
    return e, deltas, mids, G, cross


def optimize_geodesic(endpoints, n_interior: int, grad_log_p, steps: int = 2000,
                      step_size: float = 1e-2, softening: float | None = None) -> GeodesicPath:
    """Minimize the softened path energy sum(<delta, G>^2 + eps |delta|^2) by
    gradient descent on the interior points, endpoints fixed.

    The descent direction freezes G at the current midpoints; a backtracking
    line search on the true objective guarantees the objective never increases
    across accepted steps. grad_log_p must accept an (m, D) batch of points.
    """
    if n_interior < 1:
        raise ValueError("n_interior must be >= 1")
    w1 = np.asarray(endpoints[0], dtype=float)
    w2 = np.asarray(endpoints[1], dtype=float)
    ts = np.linspace(0.0, 1.0, n_interior + 2)[:, None]
    pts = (1.0 - ts) * w1[None, :] + ts * w2[None, :]
    eps = softening
    if eps is None:
        mean_seg = float(np.linalg.norm(w2 - w1)) / (n_interior + 1)
        eps = 1e-3 * max(mean_seg, 1e-12)

    energy, deltas, mids, G, cross = _softened_energy(pts, grad_log_p, eps)
    history = [energy]
    step = step_size
    for _ in range(steps):
        # d/dp_j of sum_i (<delta_i, G_i>^2 + eps |delta_i|^2) through the
        # delta terms only (G frozen): segment i contributes -grad to its left
        # endpoint and +grad to its right endpoint.
        seg_grad = 2.0 * cross[:, None] * G + 2.0 * eps * deltas  # (n_seg, D)
        grad_interior = seg_grad[:-1] - seg_grad[1:]              # points 1..n_interior
        if not np.all(np.isfinite(grad_interior)):
            raise NonFiniteObjective("non-finite descent direction")
        gnorm2 = float(np.sum(grad_interior**2))
        if gnorm2 == 0.0:
            break
        accepted = False
        trial = step
        for _bt in range(40):
            cand = pts.copy()
            cand[1:-1] -= trial * grad_interior
            e_new, d_new, m_new, G_new, c_new = _softened_energy(cand, grad_log_p, eps)
            if e_new < energy:
                pts, energy = cand, e_new
                deltas, mids, G, cross = d_new, m_new, G_new, c_new
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            break
        history.append(energy)
        # Mild step adaptation: start the next search near the accepted scale.
        step = min(step_size, trial * 2.0)
        if len(history) >= 2:
            prev = history[-2]
            if abs(prev - energy) <= 1e-8 * max(abs(prev), 1e-30):
                break
    return GeodesicPath(points=pts, fixed_endpoints=(w1, w2), objective_history=history)


def christoffel_degenerate(ld: LogDerivBundle) -> np.ndarray:
    """Coefficients of the acceleration equation of the degenerate metric
    (d log P) (x) (d log P): Gamma[k, i, j] = H_ij G_k / |G|^2."""
    gnorm2 = float(ld.g @ ld.g)
    if gnorm2 <= 1e-16:
        raise GradientTooSmall("grad log P vanishes; degenerate-metric coefficients undefined")
    return np.einsum("ij,k->kij", ld.h, ld.g) / gnorm2


def christoffel_conformal(ld: LogDerivBundle, d: int) -> np.ndarray:
    """Christoffel symbols of the conformal metric P^(4/d) g_E, with
    f = (2/d) log P: Gamma[k, i, j] = delta_ki df_j + delta_kj df_i - delta_ij df_k."""
    df = (2.0 / d) * ld.g
    D = df.size
    eye = np.eye(D)
    return (np.einsum("ki,j->kij", eye, df) + np.einsum("kj,i->kij", eye, df)
            - np.einsum("ij,k->kij", eye, df))


def acceleration_residual(points, velocities, accelerations, christoffel_field) -> float:
    """max_t | gamma'' + Gamma(gamma)(gamma', gamma') | over the curve samples.

    christoffel_field maps a point to the (D, D, D) coefficient array.
    """
    points = np.asarray(points, dtype=float)
    velocities = np.asarray(velocities, dtype=float)
    accelerations = np.asarray(accelerations, dtype=float)
    worst = 0.0
    for p, v, acc in zip(points, velocities, accelerations):
        gamma = christoffel_field(p)
        res = acc + np.einsum("kij,i,j->k", gamma, v, v)
        worst = max(worst, float(np.linalg.norm(res)))
    return worst


def hausdorff(path_a, path_b) -> float:
    """Symmetric Hausdorff distance between two discretized point sets."""
    A = np.asarray(path_a.points if isinstance(path_a, GeodesicPath) else path_a, dtype=float)
    B = np.asarray(path_b.points if isinstance(path_b, GeodesicPath) else path_b, dtype=float)
    if A.size == 0 or B.size == 0:
        raise ValueError("paths must be nonempty")
    dm = cdist(A, B)
    return float(max(dm.min(axis=1).max(), dm.min(axis=0).max()))


def densify_polyline(points, factor: int) -> np.ndarray:
    """Insert factor-1 evenly spaced points on each segment (path unchanged)."""
    pts = np.asarray(points, dtype=float)
    if factor <= 1 or pts.shape[0] < 2:
        return pts.copy()
    out = [pts[:1]]
    ts = np.arange(1, factor + 1) / factor
    for i in range(pts.shape[0] - 1):
        seg = pts[i] + ts[:, None] * (pts[i + 1] - pts[i])
        out.append(seg)
    return np.concatenate(out, axis=0)
