"""Analytic ground-truth manifolds: circle, sphere, torus, Clifford torus.

Each manifold ships closed-form embeddings, uniform sampling, nearest-point
projection, tangent frames, curvature tensors, and (for circle/sphere)
geodesics, so the rest of the library can be tested against exact geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateProjection, NonUniqueGeodesic

TWO_PI = 2.0 * math.pi

# Relative tolerance for detecting points on the degenerate set of the
# projection (axis / core circle / origin), where nearest points are not unique.
_PROJ_TOL = 1e-12
_ON_MANIFOLD_TOL = 1e-9


@dataclass(frozen=True)
class ManifoldSpec:
    """Which manifold, with its shape parameters.

    kind: "circle" | "sphere" | "torus" | "clifford"
    a: radius (circle, sphere, per-circle radius of the Clifford torus)
    R, r: torus major/minor radii (requires R > r > 0)
    sphere_dim: intrinsic dimension of the sphere (ambient = sphere_dim + 1)
    """

    kind: str
    a: float = 1.0
    R: float = 2.0
    r: float = 1.0
    sphere_dim: int = 2

    def __post_init__(self):
        if self.kind not in ("circle", "sphere", "torus", "clifford"):
            raise ValueError(f"unknown manifold kind: {self.kind!r}")
        if self.kind == "torus" and not (self.R > self.r > 0):
            raise ValueError("torus requires R > r > 0")
        if self.kind in ("circle", "sphere", "clifford") and self.a <= 0:
            raise ValueError("radius must be positive")
        if self.kind == "sphere" and self.sphere_dim < 1:
            raise ValueError("sphere_dim must be >= 1")

    @property
    def intrinsic_dim(self) -> int:
        return {"circle": 1, "sphere": self.sphere_dim, "torus": 2, "clifford": 2}[self.kind]

    @property
    def ambient_dim(self) -> int:
        return {"circle": 2, "sphere": self.sphere_dim + 1, "torus": 3, "clifford": 4}[self.kind]

    @property
    def reach(self) -> float:
        if self.kind == "torus":
            return min(self.r, self.R - self.r)
        return self.a

    @property
    def volume(self) -> float:
        """Riemannian volume of the manifold."""
        if self.kind == "circle":
            return TWO_PI * self.a
        if self.kind == "torus":
            return 4.0 * math.pi**2 * self.R * self.r
        if self.kind == "clifford":
            return 4.0 * math.pi**2 * self.a**2
        d = self.sphere_dim
        return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0) * self.a**d

    def to_json(self) -> dict:
        if self.kind == "torus":
            return {"kind": "torus", "R": self.R, "r": self.r}
        if self.kind == "sphere":
            return {"kind": "sphere", "a": self.a, "d": self.sphere_dim}
        return {"kind": self.kind, "a": self.a}

    @classmethod
    def from_json(cls, obj: dict) -> "ManifoldSpec":
        kind = obj["kind"]
        if kind == "torus":
            return torus(obj.get("R", 2.0), obj.get("r", 1.0))
        if kind == "sphere":
            return sphere(obj.get("a", 1.0), obj.get("d", 2))
        if kind == "circle":
            return circle(obj.get("a", 1.0))
        if kind == "clifford":
            return clifford(obj.get("a", 1.0))
        raise ValueError(f"unknown manifold kind: {kind!r}")


def circle(a: float = 1.0) -> ManifoldSpec:
    return ManifoldSpec("circle", a=a)


def sphere(a: float = 1.0, d: int = 2) -> ManifoldSpec:
    return ManifoldSpec("sphere", a=a, sphere_dim=d)


def torus(R: float = 2.0, r: float = 1.0) -> ManifoldSpec:
    return ManifoldSpec("torus", R=R, r=r)


def clifford(a: float = 1.0) -> ManifoldSpec:
    return ManifoldSpec("clifford", a=a)


@dataclass(frozen=True)
class TangentFrame:
    """Column-orthonormal tangent basis at a base point."""

    base_point: np.ndarray
    basis: np.ndarray  # D x d

    def __post_init__(self):
        gram = self.basis.T @ self.basis
        if not np.allclose(gram, np.eye(self.basis.shape[1]), atol=1e-12):
            raise ValueError("tangent basis is not column-orthonormal")

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def tangent_projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def normal_projector(self) -> np.ndarray:
        D = self.basis.shape[0]
        return np.eye(D) - self.basis @ self.basis.T

    def normal_basis(self) -> np.ndarray:
        """Column-orthonormal basis of the normal space (D x (D-d))."""
        D, d = self.basis.shape
        # Full QR of the tangent basis; trailing columns span the complement.
        q, _ = np.linalg.qr(self.basis, mode="complete")
        return q[:, d:]


@dataclass(frozen=True)
class SffTensor:
    """Second fundamental form tabulated on a frame.

    values[i, j] is the ambient (normal) vector Pi(e_i, e_j); symmetric in (i, j).
    """

    frame: TangentFrame
    values: np.ndarray  # d x d x D, symmetric in the first two axes

    def __post_init__(self):
        sym = 0.5 * (self.values + np.swapaxes(self.values, 0, 1))
        object.__setattr__(self, "values", sym)

    def mean_curvature(self) -> np.ndarray:
        d = self.values.shape[0]
        return np.einsum("iik->k", self.values) / d


def _wrap(angles):
    return np.mod(angles, TWO_PI)


def embed(spec: ManifoldSpec, params) -> np.ndarray:
    """Map intrinsic angles (shape [..., d]) to ambient points (shape [..., D])."""
    t = _wrap(np.asarray(params, dtype=float))
    if spec.kind == "circle":
        th = t[..., 0]
        return np.stack([spec.a * np.cos(th), spec.a * np.sin(th)], axis=-1)
    if spec.kind == "torus":
        th, ph = t[..., 0], t[..., 1]
        rho = spec.R + spec.r * np.cos(th)
        return np.stack([rho * np.cos(ph), rho * np.sin(ph), spec.r * np.sin(th)], axis=-1)
    if spec.kind == "clifford":
        th, ph = t[..., 0], t[..., 1]
        a = spec.a
        return np.stack(
            [a * np.cos(th), a * np.sin(th), a * np.cos(ph), a * np.sin(ph)], axis=-1
        )
    # Hyperspherical: x_1 = a cos t_1, x_k = a sin t_1 ... sin t_{k-1} cos t_k,
    # last coordinate with sin in place of cos.
    d = spec.sphere_dim
    out = np.empty(t.shape[:-1] + (d + 1,))
    prod = np.ones(t.shape[:-1])
    for k in range(d):
        out[..., k] = spec.a * prod * np.cos(t[..., k])
        prod = prod * np.sin(t[..., k])
    out[..., d] = spec.a * prod
    return out


def embed_jacobian(spec: ManifoldSpec, params) -> np.ndarray:
    """Partial derivatives of the embedding, shape [..., D, d]."""
    t = _wrap(np.asarray(params, dtype=float))
    if spec.kind == "circle":
        th = t[..., 0]
        jac = np.stack([-spec.a * np.sin(th), spec.a * np.cos(th)], axis=-1)
        return jac[..., :, None]
    if spec.kind == "torus":
        th, ph = t[..., 0], t[..., 1]
        rho = spec.R + spec.r * np.cos(th)
        d_th = np.stack(
            [-spec.r * np.sin(th) * np.cos(ph), -spec.r * np.sin(th) * np.sin(ph),
             spec.r * np.cos(th)], axis=-1)
        d_ph = np.stack([-rho * np.sin(ph), rho * np.cos(ph), np.zeros_like(ph)], axis=-1)
        return np.stack([d_th, d_ph], axis=-1)
    if spec.kind == "clifford":
        th, ph = t[..., 0], t[..., 1]
        a, z = spec.a, np.zeros_like(th)
        d_th = np.stack([-a * np.sin(th), a * np.cos(th), z, z], axis=-1)
        d_ph = np.stack([z, z, -a * np.sin(ph), a * np.cos(ph)], axis=-1)
        return np.stack([d_th, d_ph], axis=-1)
    # Sphere: differentiate the hyperspherical product form. Coordinate k is
    # a * (sines of angles < k) * cos t_k; the m-th partial replaces the m-th
    # factor in the product by its derivative.
    d = spec.sphere_dim
    jac = np.zeros(t.shape[:-1] + (d + 1, d))
    for m in range(d):
        prod = np.ones(t.shape[:-1])
        for k in range(d):
            if k == m:
                jac[..., k, m] = spec.a * prod * (-np.sin(t[..., k]))
            elif k > m:
                jac[..., k, m] = spec.a * prod * np.cos(t[..., k])
            prod = prod * (np.cos(t[..., k]) if k == m else np.sin(t[..., k]))
        jac[..., d, m] = spec.a * prod
    return jac


def params_of(spec: ManifoldSpec, x) -> np.ndarray:
    """Recover intrinsic angles of an on-manifold point (inverse of embed)."""
    x = np.asarray(x, dtype=float)
    if spec.kind == "circle":
        return _wrap(np.array([math.atan2(x[1], x[0])]))
    if spec.kind == "torus":
        ph = math.atan2(x[1], x[0])
        rho = math.hypot(x[0], x[1])
        th = math.atan2(x[2], rho - spec.R)
        return _wrap(np.array([th, ph]))
    if spec.kind == "clifford":
        return _wrap(np.array([math.atan2(x[1], x[0]), math.atan2(x[3], x[2])]))
    d = spec.sphere_dim
    angles = np.zeros(d)
    u = x / spec.a
    for k in range(d - 1):
        tail = math.sqrt(max(0.0, float(np.dot(u[k + 1:], u[k + 1:]))))
        angles[k] = math.atan2(tail, u[k])
    angles[d - 1] = math.atan2(u[d], u[d - 1])
    return _wrap(angles)


def sample_uniform(spec: ManifoldSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. points from the induced volume measure. Returns (n, D)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if spec.kind == "circle":
        return embed(spec, rng.uniform(0.0, TWO_PI, size=(n, 1)))
    if spec.kind == "clifford":
        return embed(spec, rng.uniform(0.0, TWO_PI, size=(n, 2)))
    if spec.kind == "sphere":
        g = rng.standard_normal((n, spec.ambient_dim))
        return spec.a * g / np.linalg.norm(g, axis=1, keepdims=True)
    # Torus: area element is r (R + r cos th) dth dph; reject on th with
    # acceptance weight (R + r cos th) / (R + r).
    thetas = np.empty(0)
    while thetas.size < n:
        m = max(64, int(1.3 * (n - thetas.size)))
        cand = rng.uniform(0.0, TWO_PI, size=m)
        u = rng.uniform(0.0, 1.0, size=m)
        keep = u < (spec.R + spec.r * np.cos(cand)) / (spec.R + spec.r)
        thetas = np.concatenate([thetas, cand[keep]])
    thetas = thetas[:n]
    phis = rng.uniform(0.0, TWO_PI, size=n)
    return embed(spec, np.stack([thetas, phis], axis=-1))


def project(spec: ManifoldSpec, y) -> np.ndarray:
    """Nearest point of M to y. Raises DegenerateProjection off the uniqueness tube."""
    y = np.asarray(y, dtype=float)
    scale = max(spec.a, spec.R)
    tol = _PROJ_TOL * scale
    if spec.kind in ("circle", "sphere"):
        nrm = np.linalg.norm(y)
        if nrm <= tol:
            raise DegenerateProjection("point at the center is equidistant to all of M")
        return spec.a * y / nrm
    if spec.kind == "clifford":
        n1 = math.hypot(y[0], y[1])
        n2 = math.hypot(y[2], y[3])
        if n1 <= tol or n2 <= tol:
            raise DegenerateProjection("a coordinate pair vanishes; nearest point not unique")
        return np.array([spec.a * y[0] / n1, spec.a * y[1] / n1,
                         spec.a * y[2] / n2, spec.a * y[3] / n2])
    rho = math.hypot(y[0], y[1])
    if rho <= tol:
        raise DegenerateProjection("point on the torus axis")
    # Work in the half-plane cross-section: tube center at (R, 0).
    u = np.array([rho - spec.R, y[2]])
    un = np.linalg.norm(u)
    if un <= tol:
        raise DegenerateProjection("point on the torus core circle")
    ct, st = u[0] / un, u[1] / un
    rho_m = spec.R + spec.r * ct
    return np.array([rho_m * y[0] / rho, rho_m * y[1] / rho, spec.r * st])


def _assert_on_manifold(spec: ManifoldSpec, x):
    px = project(spec, x)
    if np.linalg.norm(px - np.asarray(x, dtype=float)) > _ON_MANIFOLD_TOL:
        raise ValueError("point is not on the manifold (within 1e-9 after projection)")
    return px


def tangent_frame(spec: ManifoldSpec, x) -> TangentFrame:
    """Orthonormal tangent basis from the normalized parameterization partials."""
    x = np.asarray(x, dtype=float)
    _assert_on_manifold(spec, x)
    jac = embed_jacobian(spec, params_of(spec, x))
    q, rmat = np.linalg.qr(jac)
    diag = np.diagonal(rmat)
    if np.min(np.abs(diag)) < 1e-8 * spec.a:
        # Chart pole (sphere only): fall back to the orthogonal complement of
        # the radial direction.
        u = x / np.linalg.norm(x)
        full, _ = np.linalg.qr(np.concatenate([u[:, None], np.eye(len(x))], axis=1)[:, : len(x)])
        basis = full[:, 1:]
        return TangentFrame(base_point=x, basis=basis)
    q = q * np.sign(diag)[None, :]
    return TangentFrame(base_point=x, basis=q)


def sff_true(spec: ManifoldSpec, x) -> SffTensor:
    """Closed-form second fundamental form on the frame at x."""
    x = np.asarray(x, dtype=float)
    frame = tangent_frame(spec, x)
    d, D = spec.intrinsic_dim, spec.ambient_dim
    values = np.zeros((d, d, D))
    if spec.kind in ("circle", "sphere"):
        # Pi(u, v) = -<u, v> x / a^2 for any sphere.
        for i in range(d):
            values[i, i] = -x / spec.a**2
        return SffTensor(frame, values)
    if spec.kind == "clifford":
        rad1 = np.array([x[0], x[1], 0.0, 0.0]) / spec.a
        rad2 = np.array([0.0, 0.0, x[2], x[3]]) / spec.a
        # Frame columns come from QR of (d_theta, d_phi) partials in this order.
        values[0, 0] = -rad1 / spec.a
        values[1, 1] = -rad2 / spec.a
        return SffTensor(frame, values)
    # Torus: diagonal in the (theta, phi) frame with principal curvatures
    # 1/r and cos(theta)/(R + r cos theta) against the outward tube normal.
    th, ph = params_of(spec, x)
    rho = spec.R + spec.r * math.cos(th)
    nrm_out = np.array([math.cos(th) * math.cos(ph), math.cos(th) * math.sin(ph), math.sin(th)])
    values[0, 0] = -(1.0 / spec.r) * nrm_out
    values[1, 1] = -(math.cos(th) / rho) * nrm_out
    return SffTensor(frame, values)


def mean_curvature_true(spec: ManifoldSpec, x) -> np.ndarray:
    return sff_true(spec, x).mean_curvature()


def sff_fd_oracle(spec: ManifoldSpec, x, step: float | None = None) -> SffTensor:
    """Second fundamental form by central differences of the projector field.

    Independent oracle: Pi(u, v) ~ [P_T(x + s u) - P_T(x - s u)] / (2 s) applied
    to v, with projectors taken at the nearest-point projections.
    """
    x = np.asarray(x, dtype=float)
    if step is None:
        step = 1e-4 * spec.reach
    if step <= 0:
        raise ValueError("step must be positive")
    frame = tangent_frame(spec, x)
    d, D = frame.dim, spec.ambient_dim
    values = np.zeros((d, d, D))
    for i in range(d):
        u = frame.basis[:, i]
        pp = tangent_frame(spec, project(spec, x + step * u)).tangent_projector()
        pm = tangent_frame(spec, project(spec, x - step * u)).tangent_projector()
        dxp = (pp - pm) / (2.0 * step)
        for j in range(d):
            values[i, j] = dxp @ frame.basis[:, j]
    return SffTensor(frame, values)


def a_matrix(spec: ManifoldSpec, y) -> np.ndarray:
    """Matrix of A_y = I - <v_y, Pi> in the tangent frame at the projection of y."""
    y = np.asarray(y, dtype=float)
    x = project(spec, y)
    v = y - x
    sff = sff_true(spec, x)
    d = sff.values.shape[0]
    return np.eye(d) - sff.values @ v


def geodesic_arc(spec: ManifoldSpec, x1, x2, n_pts: int) -> np.ndarray:
    """Points along the shorter constant-speed arc from x1 to x2 (endpoints included)."""
    pts, _, _ = geodesic_arc_dynamics(spec, x1, x2, n_pts)
    return pts


def geodesic_arc_dynamics(spec: ManifoldSpec, x1, x2, n_pts: int):
    """Arc points plus exact velocities and accelerations of the constant-speed
    parameterization t in [0, 1]. Circle and sphere only."""
    if spec.kind not in ("circle", "sphere"):
        raise ValueError("analytic geodesics are available for circle and sphere only")
    if n_pts < 1:
        raise ValueError("n_pts must be >= 1")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    a = spec.a
    ts = np.linspace(0.0, 1.0, n_pts)
    if np.linalg.norm(x1 - x2) < 1e-14 * a:
        pts = np.repeat(x1[None, :], n_pts, axis=0)
        zeros = np.zeros_like(pts)
        return pts, zeros, zeros
    cosang = float(np.dot(x1, x2)) / a**2
    if spec.kind == "sphere" and cosang <= -1.0 + 1e-12:
        raise NonUniqueGeodesic("antipodal endpoints on the sphere")
    if spec.kind == "circle":
        t1 = math.atan2(x1[1], x1[0])
        t2 = math.atan2(x2[1], x2[0])
        dt = (t2 - t1 + math.pi) % TWO_PI - math.pi
        ang = t1 + ts * dt
        pts = np.stack([a * np.cos(ang), a * np.sin(ang)], axis=-1)
        tang = np.stack([-a * np.sin(ang), a * np.cos(ang)], axis=-1)
        vel = dt * tang
        acc = -(dt**2) * pts
        return pts, vel, acc
    alpha = math.acos(min(1.0, max(-1.0, cosang)))
    p_hat = x1 / a
    q = x2 / a - cosang * p_hat
    q_hat = q / np.linalg.norm(q)
    ang = ts * alpha
    pts = a * (np.cos(ang)[:, None] * p_hat + np.sin(ang)[:, None] * q_hat)
    vel = a * alpha * (-np.sin(ang)[:, None] * p_hat + np.cos(ang)[:, None] * q_hat)
    acc = -(alpha**2) * pts
    return pts, vel, acc
