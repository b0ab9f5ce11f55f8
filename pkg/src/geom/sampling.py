"""Noisy observations and annulus evaluation points with attached ground truth."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import AnnulusExceedsReach
from .manifolds import (ManifoldSpec, SffTensor, TangentFrame, mean_curvature_true,
                        sample_uniform, sff_true, tangent_frame)

DEFAULT_C1 = 0.5
DEFAULT_C2 = 2.0
DEFAULT_NBAR = 50


@dataclass
class SampleSet:
    """Noisy point cloud y_i = x_i + xi_i with its generation metadata."""

    points: np.ndarray  # (N, D)
    sigma: float
    spec: ManifoldSpec | None = None
    seed: int = 0

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


@dataclass
class AnnulusPoint:
    """Evaluation point w = x + rho * nu with exact geometry at x = pi(w)."""

    w: np.ndarray
    base: np.ndarray
    frame: TangentFrame
    mean_curv: np.ndarray
    offset: float
    direction: np.ndarray

    def sff(self, spec: ManifoldSpec) -> SffTensor:
        return sff_true(spec, self.base)


def add_noise(clean, sigma: float, rng: np.random.Generator,
              spec: ManifoldSpec | None = None, seed: int = 0) -> SampleSet:
    """Add isotropic Gaussian noise N(0, sigma^2 I) to each point."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    clean = np.asarray(clean, dtype=float)
    if sigma == 0:
        noisy = clean.copy()
    else:
        noisy = clean + sigma * rng.standard_normal(clean.shape)
    return SampleSet(points=noisy, sigma=sigma, spec=spec, seed=seed)


def annulus_radii(sigma: float, c1: float = DEFAULT_C1, c2: float = DEFAULT_C2):
    """Inner and outer offsets c * sigma^2 log(1/sigma) of the evaluation annulus."""
    if not (0 < c1 < c2):
        raise ValueError("need 0 < c1 < c2")
    if not (0 < sigma < 1):
        raise ValueError("annulus radii require 0 < sigma < 1")
    scale = sigma**2 * math.log(1.0 / sigma)
    return c1 * scale, c2 * scale


def annulus_offset_point(spec: ManifoldSpec, x, direction, rho: float) -> AnnulusPoint:
    """Evaluation point at a prescribed normal offset, with its ground truth."""
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    frame = tangent_frame(spec, x)
    return AnnulusPoint(
        w=x + rho * direction,
        base=x,
        frame=frame,
        mean_curv=mean_curvature_true(spec, x),
        offset=rho,
        direction=direction,
    )


def random_normal_direction(spec: ManifoldSpec, frame: TangentFrame,
                            rng: np.random.Generator) -> np.ndarray:
    """Uniform direction on the unit sphere of the normal space at frame.base_point."""
    nb = frame.normal_basis()
    g = rng.standard_normal(nb.shape[1])
    nrm = np.linalg.norm(g)
    while nrm < 1e-12:  # pragma: no cover - probability zero
        g = rng.standard_normal(nb.shape[1])
        nrm = np.linalg.norm(g)
    return nb @ (g / nrm)


def eval_annulus(spec: ManifoldSpec, sigma: float, c1: float = DEFAULT_C1,
                 c2: float = DEFAULT_C2, nbar: int = DEFAULT_NBAR,
                 rng: np.random.Generator | None = None) -> list[AnnulusPoint]:
    """Evaluation points w = x + rho*nu with x uniform on M, nu uniform normal,
    rho uniform in [c1, c2] * sigma^2 log(1/sigma)."""
    if rng is None:
        rng = np.random.default_rng(0)
    lo, hi = annulus_radii(sigma, c1, c2)
    if hi >= spec.reach:
        raise AnnulusExceedsReach(
            f"outer annulus radius {hi:.4g} reaches beyond the reach {spec.reach:.4g}")
    bases = sample_uniform(spec, nbar, rng)
    out = []
    for x in bases:
        frame = tangent_frame(spec, x)
        nu = random_normal_direction(spec, frame, rng)
        rho = rng.uniform(lo, hi)
        out.append(AnnulusPoint(
            w=x + rho * nu, base=x, frame=frame,
            mean_curv=mean_curvature_true(spec, x), offset=rho, direction=nu))
    return out


def save_samples(path, samples: SampleSet):
    """Point file with a one-line JSON header followed by CSV rows."""
    header = {
        "D": samples.ambient_dim,
        "d": samples.spec.intrinsic_dim if samples.spec else None,
        "sigma": samples.sigma,
        "seed": samples.seed,
        "kind": samples.spec.kind if samples.spec else None,
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for row in samples.points:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def load_samples(path) -> SampleSet:
    with open(path) as fh:
        header = json.loads(fh.readline())
        pts = np.array([[float(v) for v in line.split(",")] for line in fh if line.strip()])
    # Header stores kind only; shape parameters are reconstructed as defaults.
    spec = ManifoldSpec.from_json({"kind": header["kind"]}) if header.get("kind") else None
    return SampleSet(points=pts, sigma=header["sigma"], spec=spec, seed=header["seed"])
