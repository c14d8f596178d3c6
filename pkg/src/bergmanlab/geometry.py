"""Hyperbolic geometry on products of upper half-planes.

All (1,1)-forms here are diagonal multiples of the hyperbolic form
``(i/2) dz ^ dzbar / y**2`` on each factor, so they are represented by
their scalar coefficient against that frame.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import StepSizeError

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class HPoint:
    """Point ``x + iy`` of the upper half-plane."""

    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0.0) or not math.isfinite(self.y) or not math.isfinite(self.x):
            raise ValueError(f"HPoint needs finite x and y > 0, got ({self.x}, {self.y})")

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(float(z.real), float(z.imag))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class HnPoint:
    """Point of H^n, one :class:`HPoint` per factor."""

    coords: tuple[HPoint, ...]

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("HnPoint needs at least one factor")
        for c in coords:
            if not isinstance(c, HPoint):
                raise TypeError("HnPoint coordinates must be HPoint instances")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_complex(cls, zs: Sequence[complex]) -> "HnPoint":
        return cls(tuple(HPoint.from_complex(z) for z in zs))

    @property
    def n(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class CurvatureSpec:
    """Weight-``w`` Petersson line bundle on an ``n``-fold product.

    The metric is ``prod(y_i**w) |f|**2``, i.e. the potential is
    ``phi = -w * sum(log y_i)``.  ``w = 1/2`` and ``w = 2`` give the
    half-integral and the weight-two bundles; tensor powers scale ``w``.
    """

    weight_per_factor: Fraction
    n: int

    def __post_init__(self):
        w = Fraction(self.weight_per_factor)
        if w < 0:
            raise ValueError("weight must be nonnegative")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "weight_per_factor", w)

    def potential(self, y: float) -> float:
        """Metric potential on a single factor."""
        return -float(self.weight_per_factor) * math.log(y)


def hyp_density(p: HPoint) -> float:
    """Density ``1/y**2`` of the hyperbolic form."""
    return 1.0 / (p.y * p.y)


def hypn_volume_density(p: HnPoint) -> float:
    """Density of the product volume form, ``prod 1/y_i**2``."""
    return math.prod(hyp_density(c) for c in p.coords)


def curvature_density(spec: CurvatureSpec, p: HnPoint) -> list[float]:
    """Coefficient of the first Chern form against the hyperbolic form, per factor.

    Equals ``w / (4 pi)`` independently of the point; ``w = 1/2`` gives
    ``1/(8 pi)``.
    """
    if p.n != spec.n:
        raise ValueError(f"point has {p.n} factors, spec expects {spec.n}")
    c = float(spec.weight_per_factor) / FOUR_PI
    return [c] * spec.n


def det_curvature(spec: CurvatureSpec) -> float:
    """Determinant of the Chern form relative to the product hyperbolic metric."""
    return (float(spec.weight_per_factor) / FOUR_PI) ** spec.n


def _laplacian_coefficient(phi, x: float, y: float, h: float) -> float:
    # five-point central stencil; (i/2pi) d dbar phi = (y^2 lap phi / 4pi) * hyp
    lap = (phi(x + h, y) + phi(x - h, y) + phi(x, y + h) + phi(x, y - h) - 4.0 * phi(x, y)) / (h * h)
    return lap * y * y / FOUR_PI


def fd_curvature_raw(spec: CurvatureSpec, p: HnPoint, h: float) -> list[float]:
    """Plain central-difference curvature coefficients (no extrapolation)."""
    if p.n != spec.n:
        raise ValueError(f"point has {p.n} factors, spec expects {spec.n}")
    w = float(spec.weight_per_factor)

    def phi(x, y):
        return -w * math.log(y)

    return [_laplacian_coefficient(phi, c.x, c.y, h) for c in p.coords]


def fd_curvature_check(
    spec: CurvatureSpec,
    p: HnPoint,
    h: float,
    trunc_tol: float = 1e-2,
    noise_tol: float = 1e-6,
) -> list[float]:
    """Finite-difference curvature coefficients with one Richardson step.

    Central second differences of the potential at steps ``h`` and
    ``h/2`` are combined as ``(4 D(h/2) - D(h)) / 3``.  A third level
    ``h/4`` feeds the step diagnostics: the step is rejected as too large
    when ``|D(h) - D(h/2)|`` exceeds ``trunc_tol`` (relative), and as too
    small when the rounding estimate of the result exceeds ``noise_tol`` or
    the successive differences stop shrinking like ``h**2``.
    """
    if p.n != spec.n:
        raise ValueError(f"point has {p.n} factors, spec expects {spec.n}")
    if not h > 0:
        raise ValueError("step must be positive")
    for c in p.coords:
        if not h < c.y / 10.0:
            raise ValueError(f"step {h} violates h < y/10 at y={c.y}")
    w = float(spec.weight_per_factor)
    eps = sys.float_info.epsilon
    expected_scale = max(w / FOUR_PI, 1e-300)

    def phi(x, y):
        return -w * math.log(y)

    out = []
    for c in p.coords:
        d0 = _laplacian_coefficient(phi, c.x, c.y, h)
        d1 = _laplacian_coefficient(phi, c.x, c.y, h / 2)
        d2 = _laplacian_coefficient(phi, c.x, c.y, h / 4)
        richardson = (4.0 * d1 - d0) / 3.0
        scale = max(abs(richardson), expected_scale)
        # rounding in the extrapolated value: 8|phi| eps / (h/2)^2 per stencil, weighted (4 + 1/4)/3
        hh = h / 2
        magnitude = 8.0 * max(abs(phi(c.x, c.y + hh)), abs(phi(c.x, c.y - hh)), abs(phi(c.x, c.y)))
        noise = eps * magnitude / (hh * hh) * c.y * c.y / FOUR_PI * (17.0 / 12.0)
        if w != 0.0 and noise > noise_tol * scale:
            raise StepSizeError(f"step {h} too small: rounding estimate {noise:.3e} at y={c.y}")
        diff_coarse = abs(d0 - d1)
        diff_fine = abs(d1 - d2)
        if diff_coarse > trunc_tol * scale:
            raise StepSizeError(f"step {h} too large: truncation estimate {diff_coarse:.3e} at y={c.y}")
        # h^2 behaviour means diff_coarse ~ 4 diff_fine; noise breaks that
        if diff_fine > 40 * noise and diff_fine > 0.5 * diff_coarse:
            raise StepSizeError(f"step {h} too small: differences not converging at y={c.y}")
        out.append(richardson)
    return out


def mobius(a: float, b: float, c: float, d: float, z: complex) -> complex:
    """Fractional linear transformation ``(az + b)/(cz + d)``."""
    return (a * z + b) / (c * z + d)


def reduce_to_fundamental_domain(z: complex, max_steps: int = 1000) -> complex:
    """Move ``z`` into ``{|x| <= 1/2, |z| >= 1}`` using ``T`` and ``S``."""
    if z.imag <= 0:
        raise ValueError("point must lie in the upper half-plane")
    for _ in range(max_steps):
        z = complex(z.real - math.floor(z.real + 0.5), z.imag)
        if abs(z) >= 1.0 - 1e-15:
            return z
        z = -1.0 / z
    raise RuntimeError("reduction did not terminate")
