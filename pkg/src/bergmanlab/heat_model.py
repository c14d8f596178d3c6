"""Model heat kernels for powers of a positive line bundle.

Two ingredients:

* the scaled large-``k`` limit of the diagonal heat kernel, a product of
  ``alpha / (4 pi sinh(alpha t))`` over the curvature eigenvalues;
* synthetic spectral heat kernels ``sum exp(-2 t lam / k) w`` built from
  explicit eigenvalue/mass lists, whose zero modes give the Bergman
  kernel.  These are the objects on which the inequality
  ``Bergman <= heat`` and the ``t -> oo`` limit are checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

LOG_FOUR_PI = math.log(4.0 * math.pi)


@dataclass(frozen=True)
class SpectrumModel:
    """Curvature eigenvalues ``alpha_1, ..., alpha_n`` at a point."""

    alphas: tuple[float, ...]

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas:
            raise ValueError("SpectrumModel needs at least one eigenvalue")
        if any(not (a > 0.0 and math.isfinite(a)) for a in alphas):
            raise ValueError("curvature eigenvalues must be finite and > 0")
        object.__setattr__(self, "alphas", alphas)

    @property
    def n(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class SyntheticSpectrum:
    """Eigenvalues ``lam_m`` with pointwise eigenfunction masses ``w_m``."""

    eigenvalues: tuple[float, ...]
    masses: tuple[float, ...]
    k: float

    def __post_init__(self):
        lam = tuple(float(v) for v in self.eigenvalues)
        w = tuple(float(v) for v in self.masses)
        if len(lam) != len(w) or not lam:
            raise ValueError("need equally many (nonzero count) eigenvalues and masses")
        if any(v < 0 for v in lam) or any(v < 0 for v in w):
            raise ValueError("eigenvalues and masses must be nonnegative")
        if list(lam) != sorted(lam):
            raise ValueError("eigenvalues must be sorted ascending")
        if not self.k > 0:
            raise ValueError("k must be positive")
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "masses", w)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]], k: float) -> "SyntheticSpectrum":
        pairs = sorted(pairs, key=lambda p: p[0])
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), k)

    @property
    def lambda_min_positive(self) -> float:
        pos = [v for v in self.eigenvalues if v > 0.0]
        return min(pos) if pos else math.inf


def _log_sinh(x: float) -> float:
    # log(sinh x) without overflow for large x
    if x > 20.0:
        return x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x))
    return math.log(math.sinh(x))


def log_bouche_density(model: SpectrumModel, t: float) -> float:
    if not t > 0:
        raise ValueError("t must be positive")
    return sum(math.log(a) - LOG_FOUR_PI - _log_sinh(a * t) for a in model.alphas)


def bouche_density(model: SpectrumModel, t: float) -> float:
    """Limit of ``H_k(t; z, z) / k**n`` in the product-of-factors model.

    Each factor contributes ``alpha / (4 pi sinh(alpha t))``.  Evaluated in
    log space; returns an exact ``0.0`` when the value underflows (see
    :func:`bouche_underflows`).
    """
    log_val = log_bouche_density(model, t)
    if log_val < _LOG_TINY:
        return 0.0
    return math.exp(log_val)


_LOG_TINY = math.log(np.finfo(float).tiny)


def bouche_underflows(model: SpectrumModel, t: float) -> bool:
    """True when :func:`bouche_density` clamps to zero."""
    return log_bouche_density(model, t) < _LOG_TINY


def synthetic_heat(spec: SyntheticSpectrum, t: float) -> float:
    """Spectral heat kernel ``sum_m exp(-2 t lam_m / k) w_m``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return math.fsum(math.exp(-2.0 * t * lam / spec.k) * w for lam, w in zip(spec.eigenvalues, spec.masses))


def bergman_from_spectrum(spec: SyntheticSpectrum) -> float:
    """Zero-mode mass: the Bergman kernel of the synthetic spectrum."""
    return math.fsum(w for lam, w in zip(spec.eigenvalues, spec.masses) if lam == 0.0)


def heat_tail_bound(spec: SyntheticSpectrum, t: float) -> float:
    """Upper bound for ``synthetic_heat(spec, t) - bergman_from_spectrum(spec)``."""
    lam = spec.lambda_min_positive
    if math.isinf(lam):
        return 0.0
    return math.exp(-2.0 * t * lam / spec.k) * math.fsum(spec.masses)


def random_spectrum(rng: np.random.Generator, max_modes: int = 30) -> SyntheticSpectrum:
    """Seeded random synthetic spectrum, with zero modes about half the time."""
    m = int(rng.integers(1, max_modes + 1))
    lam = np.sort(rng.exponential(5.0, size=m))
    n_zero = int(rng.integers(0, min(3, m) + 1)) if rng.random() < 0.5 else 0
    lam[:n_zero] = 0.0
    w = rng.random(m) * 3.0
    k = float(rng.integers(1, 50))
    return SyntheticSpectrum(tuple(lam.tolist()), tuple(w.tolist()), k)
