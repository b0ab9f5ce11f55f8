"""Log-density derivatives G, H, T from a raw derivative bundle.

Plug-in algebra:
    G = grad P / P
    H = hess P / P - G (x) G
    T = third P / P - sym(H (x) G) - G (x) G (x) G
with sym(A (x) b)_{ijk} = A_ij b_k + A_ik b_j + A_jk b_i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DensityUnderflow
from .oracle import DerivativeBundle, _sym3

DEFAULT_FLOOR = 1e-300


@dataclass
class LogDerivBundle:
    g: np.ndarray  # (D,)
    h: np.ndarray  # (D, D), symmetric
    t: np.ndarray  # (D, D, D), fully symmetric
    point: np.ndarray
    sigma: float


def _sym_outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(A (x) b)_{ijk} = A_ij b_k + A_ik b_j + A_jk b_i."""
    return (np.einsum("ij,k->ijk", a, b) + np.einsum("ik,j->ijk", a, b)
            + np.einsum("jk,i->ijk", a, b))


def log_bundle(db: DerivativeBundle, floor: float = DEFAULT_FLOOR) -> LogDerivBundle:
    """Convert density derivatives into log-density derivatives."""
    if not np.isfinite(db.p) or db.p <= floor:
        raise DensityUnderflow(f"density {db.p:.3g} at or below floor {floor:.3g}")
    g = db.g1 / db.p
    h = db.g2 / db.p - np.outer(g, g)
    h = 0.5 * (h + h.T)
    t = db.g3 / db.p - _sym_outer(h, g) - np.einsum("i,j,k->ijk", g, g, g)
    t = _sym3(t)
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(h)) and np.all(np.isfinite(t))):
        raise DensityUnderflow("non-finite log-derivatives")
    return LogDerivBundle(g=g, h=h, t=t, point=db.point, sigma=db.sigma)
