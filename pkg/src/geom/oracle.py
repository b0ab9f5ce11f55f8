"""Population-level density P_sigma and its derivative tensors by quadrature.

Tensor-product trapezoid rule on the periodic parameter domains (spectrally
accurate for smooth periodic integrands); the sphere uses Gauss-Legendre in
the polar angles. Derivative integrands are the closed-form Gaussian
derivative factors in w = (x - y) / sigma^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import NoCrossing, QuadratureUnderResolved
from .manifolds import ManifoldSpec, embed, project, tangent_frame

TWO_PI = 2.0 * math.pi


@dataclass
class DerivativeBundle:
    """P_sigma and its ambient derivatives of orders 1-3 at one point."""

    p: float
    g1: np.ndarray  # (D,)
    g2: np.ndarray  # (D, D), symmetric
    g3: np.ndarray  # (D, D, D), fully symmetric
    point: np.ndarray
    sigma: float


def _sym3(t: np.ndarray) -> np.ndarray:
    """Symmetrize a rank-3 tensor over all index permutations."""
    return (t + t.transpose(0, 2, 1) + t.transpose(1, 0, 2)
            + t.transpose(1, 2, 0) + t.transpose(2, 0, 1) + t.transpose(2, 1, 0)) / 6.0


@lru_cache(maxsize=32)
def quadrature_grid(spec: ManifoldSpec, grid_res: int):
    """Nodes (M, D) and weights (M,) with sum(weights) = volume of M."""
    if grid_res < 64:
        raise ValueError("grid_res must be >= 64")
    n = grid_res
    if spec.kind == "circle":
        th = TWO_PI * np.arange(n) / n
        pts = embed(spec, th[:, None])
        wts = np.full(n, spec.a * TWO_PI / n)
        return pts, wts
    if spec.kind == "torus":
        th = TWO_PI * np.arange(n) / n
        ph = TWO_PI * np.arange(n) / n
        TH, PH = np.meshgrid(th, ph, indexing="ij")
        pts = embed(spec, np.stack([TH.ravel(), PH.ravel()], axis=-1))
        area = spec.r * (spec.R + spec.r * np.cos(TH.ravel()))
        wts = area * (TWO_PI / n) ** 2
        return pts, wts
    if spec.kind == "clifford":
        th = TWO_PI * np.arange(n) / n
        TH, PH = np.meshgrid(th, th, indexing="ij")
        pts = embed(spec, np.stack([TH.ravel(), PH.ravel()], axis=-1))
        wts = np.full(n * n, spec.a**2 * (TWO_PI / n) ** 2)
        return pts, wts
    # Sphere: Gauss-Legendre in each polar angle (weight sin^{d-k} theta_k),
    # trapezoid in the final azimuthal angle.
    d = spec.sphere_dim
    nodes_1d, weights_1d = [], []
    for k in range(d - 1):
        t, w = np.polynomial.legendre.leggauss(n)
        theta = 0.5 * math.pi * (t + 1.0)
        w = w * 0.5 * math.pi
        power = d - 1 - k
        nodes_1d.append(theta)
        weights_1d.append(w * np.sin(theta) ** power)
    nodes_1d.append(TWO_PI * np.arange(n) / n)
    weights_1d.append(np.full(n, TWO_PI / n))
    grids = np.meshgrid(*nodes_1d, indexing="ij")
    params = np.stack([g.ravel() for g in grids], axis=-1)
    wt = weights_1d[0]
    for w in weights_1d[1:]:
        wt = np.multiply.outer(wt, w)
    pts = embed(spec, params)
    wts = spec.a**d * wt.ravel()
    return pts, wts


def _bundle_from_nodes(y, sigma, pts, wts, volume):
    y = np.asarray(y, dtype=float)
    D = y.size
    diff = pts - y[None, :]
    q = np.einsum("ki,ki->k", diff, diff)
    gauss = np.exp(-q / (2.0 * sigma**2))
    norm = volume * (TWO_PI * sigma**2) ** (D / 2.0)
    base = wts * gauss
    s0 = float(np.sum(base))
    W = diff / sigma**2
    s1 = base @ W
    s2 = np.einsum("k,ki,kj->ij", base, W, W) - (s0 / sigma**2) * np.eye(D)
    s3 = np.einsum("k,ki,kj,kl->ijl", base, W, W, W)
    eye = np.eye(D)
    corr = (np.einsum("ij,l->ijl", eye, s1) + np.einsum("il,j->ijl", eye, s1)
            + np.einsum("jl,i->ijl", eye, s1)) / sigma**2
    s3 = s3 - corr
    p = s0 / norm
    g1 = s1 / norm
    g2 = 0.5 * (s2 + s2.T) / norm
    g3 = _sym3(s3) / norm
    return p, g1, g2, g3


def oracle_bundle(spec: ManifoldSpec, y, sigma: float, grid_res: int = 256,
                  self_check: bool = False) -> DerivativeBundle:
    """Quadrature values of P_sigma and its derivatives of orders 1-3 at y."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    pts, wts = quadrature_grid(spec, grid_res)
    p, g1, g2, g3 = _bundle_from_nodes(y, sigma, pts, wts, spec.volume)
    if self_check:
        pts2, wts2 = quadrature_grid(spec, 2 * grid_res)
        p2, _, _, _ = _bundle_from_nodes(y, sigma, pts2, wts2, spec.volume)
        if abs(p2 - p) > 1e-8 * abs(p2):
            raise QuadratureUnderResolved(
                f"p changed by {abs(p2 - p) / abs(p2):.3g} when doubling grid_res={grid_res}")
    return DerivativeBundle(p=p, g1=g1, g2=g2, g3=g3,
                            point=np.asarray(y, dtype=float), sigma=sigma)


def density_at(spec: ManifoldSpec, ys, sigma: float, grid_res: int = 256) -> np.ndarray:
    """P_sigma at a batch of points (density only, no derivatives)."""
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    pts, wts = quadrature_grid(spec, grid_res)
    D = ys.shape[1]
    norm = spec.volume * (TWO_PI * sigma**2) ** (D / 2.0)
    # (T, M) squared distances; T and M are small enough to hold in memory.
    q = np.sum((ys[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    return (np.exp(-q / (2.0 * sigma**2)) @ wts) / norm


def suggested_grid_res(spec: ManifoldSpec, sigma: float) -> int:
    """Grid resolution giving quadrature error below ~1e-12 relative at this sigma.

    The integrand's angular feature width is sigma divided by the largest
    metric radius of a coordinate circle, so the node count scales with its
    inverse (periodic trapezoid error decays like exp(-(n*width)^2/2)).
    """
    max_radius = (spec.R + spec.r) if spec.kind == "torus" else spec.a
    need = 10.0 * max_radius / sigma
    return int(max(128, 64 * math.ceil(need / 64.0)))


def level_set_probe(spec: ManifoldSpec, sigma: float, x, direction,
                    grid_res: int = 256, t_max: float | None = None,
                    strict: bool = False) -> float:
    """Distance along a normal ray to the first re-crossing of the level P_sigma(x).

    Returns 0.0 when the density is monotone decreasing along the ray (no
    re-crossing); with strict=True that case raises NoCrossing instead.
    """
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    frame = tangent_frame(spec, x)  # also validates that x is on M
    if np.linalg.norm(frame.basis.T @ direction) > 1e-8:
        raise ValueError("probe direction must lie in the normal space at x")
    if t_max is None:
        t_max = 0.45 * spec.reach
    level = density_at(spec, x, sigma, grid_res)[0]

    def f(t):
        return density_at(spec, x + t * direction, sigma, grid_res)[0] - level

    # Coarse bracket: geometric sweep resolves crossings at scale ~ sigma^2.
    ts = np.geomspace(sigma**2 / 50.0, t_max, 80)
    vals = np.array([f(t) for t in ts])
    above = vals > 0
    if not above.any():
        if strict:
            raise NoCrossing("density stays below the level along the probed ray")
        return 0.0
    # First index where the sign returns to <= 0 after the positive excursion.
    first_up = int(np.argmax(above))
    for j in range(first_up + 1, len(ts)):
        if vals[j] <= 0.0:
            return brentq(f, ts[j - 1], ts[j], xtol=1e-14)
    if strict:
        raise NoCrossing("density stays above the level up to t_max")
    return 0.0
