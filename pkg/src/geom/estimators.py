"""Geometric estimators from log-density derivatives.

Tangent space and intrinsic dimension come from the spectral splitting of the
log-density Hessian; the second fundamental form has three constructions of
increasing generality (totally umbilical, hypersurface, arbitrary codimension).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigengapCollapse, GradientTooSmall
from .logderiv import LogDerivBundle
from .manifolds import SffTensor, TangentFrame

LOW_CONFIDENCE_RATIO = 2.0


@dataclass
class TangentEstimate:
    """Eigen-structure of the log-density Hessian at one point."""

    frame: TangentFrame
    eigenvalues: np.ndarray  # descending
    gap_index: int           # 1-based argmax of consecutive eigenvalue gaps
    gap_confidence: float    # max gap / median gap

    @property
    def low_confidence(self) -> bool:
        return self.gap_confidence < LOW_CONFIDENCE_RATIO


def _eig_descending(h: np.ndarray):
    vals, vecs = np.linalg.eigh(h)
    return vals[::-1], vecs[:, ::-1]


def tangent_estimate(ld: LogDerivBundle, d: int) -> TangentEstimate:
    """Top-d eigenspace of the Hessian, plus the consecutive-gap statistics."""
    D = ld.h.shape[0]
    if not 0 < d < D:
        raise ValueError("need 0 < d < D")
    vals, vecs = _eig_descending(ld.h)
    gaps = np.abs(np.diff(vals))
    gap_index = int(np.argmax(gaps)) + 1
    med = float(np.median(gaps))
    confidence = float(gaps.max() / med) if med > 0 else float("inf")
    frame = TangentFrame(base_point=ld.point, basis=vecs[:, :d])
    return TangentEstimate(frame=frame, eigenvalues=vals,
                           gap_index=gap_index, gap_confidence=confidence)


def dimension_estimate(ld: LogDerivBundle) -> int:
    """Location of the largest consecutive spectral gap of the Hessian."""
    vals, _ = _eig_descending(ld.h)
    return int(np.argmax(np.abs(np.diff(vals)))) + 1


def sff_umbilical(ld: LogDerivBundle, d: int, frame: TangentFrame) -> SffTensor:
    """Pi(u, v) = (2/d) <u, v> G; valid for totally umbilical M at on-manifold points."""
    dd = frame.dim
    values = np.zeros((dd, dd, ld.g.size))
    for i in range(dd):
        values[i, i] = (2.0 / d) * ld.g
    return SffTensor(frame, values)


def sff_hypersurface(ld: LogDerivBundle, frame: TangentFrame, c0: float = 1e-3) -> SffTensor:
    """Pi(u, v) = -<H P_T u, P_T v> G / |G|^2 for codimension-one M."""
    gnorm = np.linalg.norm(ld.g)
    if gnorm < c0:
        raise GradientTooSmall(f"|grad log p| = {gnorm:.3g} below threshold {c0:.3g}")
    B = frame.basis
    coeff = -(B.T @ ld.h @ B) / gnorm**2  # (d, d)
    values = np.einsum("ij,k->ijk", 0.5 * (coeff + coeff.T), ld.g)
    return SffTensor(frame, values)


def projector_derivative(ld: LogDerivBundle, d: int, u: np.ndarray) -> np.ndarray:
    """Directional derivative of the top-d spectral projector of the Hessian.

    Unique solution X of the Sylvester-type system
        H X - X H = P K - K P,  P X + X P = X,  K = T(u, ., .)
    computed in the eigenbasis of H.
    """
    vals, vecs = _eig_descending(ld.h)
    D = vals.size
    gap = vals[d - 1] - vals[d]
    if gap <= 1e-6 * abs(vals[-1]):
        raise EigengapCollapse(f"eigengap {gap:.3g} has collapsed")
    K = np.einsum("ijk,i->jk", ld.t, u)
    E_t, E_n = vecs[:, :d], vecs[:, d:]
    lam_t, lam_n = vals[:d], vals[d:]
    C = (E_t.T @ K @ E_n) / (lam_t[:, None] - lam_n[None, :])
    return E_t @ C @ E_n.T + E_n @ C.T @ E_t.T


def sff_general(ld: LogDerivBundle, d: int, frame_for_output: TangentFrame) -> SffTensor:
    """Pi(u, v) = (d/du P_T) v via the spectral-projector derivative; any codimension."""
    B = frame_for_output.basis
    dd = B.shape[1]
    values = np.zeros((dd, dd, B.shape[0]))
    for i in range(dd):
        X = projector_derivative(ld, d, B[:, i])
        for j in range(dd):
            values[i, j] = X @ B[:, j]
    return SffTensor(frame_for_output, values)


def mean_curvature_from_sff(sff: SffTensor) -> np.ndarray:
    """(1/d) trace of the second fundamental form."""
    return sff.mean_curvature()
