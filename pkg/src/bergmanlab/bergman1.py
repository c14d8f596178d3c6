"""Bergman kernels of weight-k cusp forms for PSL_2(Z).

The kernel ``B_k(z) = sum_i y^k |f_i(z)|^2`` over a Petersson-orthonormal
basis is computed two independent ways:

* :func:`gram` + :func:`orthonormalize` + :func:`bergman_point`: Petersson
  Gram matrix by tensor Gauss-Legendre quadrature over the fundamental
  domain (plus an exact termwise integral above ``y = Y``), then Cholesky;
* :func:`bergman_series`: the automorphic average of the weight-k Bergman
  kernel of the upper half-plane over ``PSL_2(Z)``.

Inner products use ``<f, g> = int_F f conj(g) y^k dx dy / y^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaincc, gammaln

from .errors import (
    CutoffInsufficient,
    DegenerateSamples,
    DimensionZero,
    NonRealResult,
    NotPositiveDefinite,
    RefinementNonconvergent,
    RegionEmpty,
    TruncationError,
)
from .geometry import HPoint
from .modforms1 import (
    CuspBasis,
    QExpansion,
    dim_cusp,
    product_basis,
    required_truncation,
    series_values,
    tail_bound,
)

FOUR_PI = 4.0 * math.pi
SQRT3_2 = math.sqrt(3.0) / 2.0
VOLUME = math.pi / 3.0


def kernel_scale(k: int) -> float:
    """Natural size ``(k-1)/(4 pi)`` of ``B_k``; absolute tolerances are relative to it."""
    return (k - 1) / FOUR_PI


def default_truncation(k: int, y_floor: float = 0.8, rel_tol: float = 1e-18) -> int:
    """Truncation order certifying every product-basis element down to ``y_floor``."""
    d = dim_cusp(k)
    N = max(2 * d + 5, k + 40)
    while True:
        basis = product_basis(k, N)
        ok = True
        need = N
        for j, f in enumerate(basis.forms, start=1):
            C = f.coefficient_bound()
            tol = rel_tol * math.exp(-2 * math.pi * j * y_floor)
            if tail_bound(C, k, y_floor, N) >= tol:
                ok = False
                need = max(need, required_truncation(C, k, y_floor, tol, start=N))
        if ok:
            return N
        N = max(need, 2 * N)


def cusp_basis_for(k: int, N: int | None = None) -> CuspBasis:
    """Numerically preferred basis of ``S_k`` (products ``Delta^j E_4^a E_6^b``)."""
    return product_basis(k, default_truncation(k) if N is None else N)


# --------------------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadratureParams:
    nx: int = 40
    ny: int = 40
    Y: float = 1.0
    double_check: bool = True

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ValueError("quadrature orders must be >= 8")
        if self.Y < 1.0:
            raise ValueError("Y must be >= 1 so the tail region spans a full period")


@dataclass(frozen=True)
class GramMatrix:
    weight: int
    entries: np.ndarray
    quad_error: np.ndarray
    params: QuadratureParams

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def fundamental_domain_nodes(nx: int, ny: int, Y: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes on ``{|x| <= 1/2, sqrt(1-x^2) <= y <= Y}``.

    The lower limit is a smooth function of ``x`` on ``[-1/2, 1/2]``, so
    each column is an interval in ``y``.  Returns flattened ``x, y`` and
    weights (for ``dx dy``).
    """
    gx, wx = np.polynomial.legendre.leggauss(nx)
    gy, wy = np.polynomial.legendre.leggauss(ny)
    x = 0.5 * gx
    wx = 0.5 * wx
    lo = np.sqrt(1.0 - x * x)
    half = 0.5 * (Y - lo)
    yy = lo[:, None] + half[:, None] * (gy[None, :] + 1.0)
    ww = wx[:, None] * half[:, None] * wy[None, :]
    xx = np.broadcast_to(x[:, None], yy.shape)
    return xx.ravel().copy(), yy.ravel(), ww.ravel()


def scaled_values(basis: CuspBasis, x: np.ndarray, y: np.ndarray, power: float) -> np.ndarray:
    """Rows ``y^power f_j(x + iy)`` for each basis element."""
    logy = np.log(y)
    return np.array([series_values(f, x, y, power * logy) for f in basis.forms])


def _tail_integrals(k: int, N: int, Y: float) -> np.ndarray:
    # log of int_Y^oo y^(k-2) exp(-4 pi n y) dy, n = 0..N (n = 0 unused)
    n = np.arange(1, N + 1, dtype=float)
    lam = FOUR_PI * n
    with np.errstate(divide="ignore"):
        logs = gammaln(k - 1) + np.log(gammaincc(k - 1, lam * Y)) - (k - 1) * np.log(lam)
    return np.concatenate([[-np.inf], logs])


def _quadrature_part(basis: CuspBasis, nx: int, ny: int, Y: float) -> np.ndarray:
    x, y, w = fundamental_domain_nodes(nx, ny, Y)
    F = scaled_values(basis, x, y, basis.weight / 2.0 - 1.0)
    return (F * w[None, :]) @ F.conj().T


def _tail_part(basis: CuspBasis, Y: float) -> np.ndarray:
    k = basis.weight
    N = basis.N
    logI = _tail_integrals(k, N, Y)
    data = [f.log_abs_and_sign() for f in basis.forms]
    d = basis.dim
    G = np.zeros((d, d))
    for i in range(d):
        li, si = data[i][0][: N + 1], data[i][1][: N + 1]
        for j in range(i, d):
            lj, sj = data[j][0][: N + 1], data[j][1][: N + 1]
            with np.errstate(invalid="ignore", under="ignore"):
                terms = np.exp(li + lj + logI) * si * sj
            terms = terms[np.isfinite(terms)]
            order = np.argsort(-np.abs(terms))
            G[i, j] = G[j, i] = math.fsum(terms[order])
    return G


def _truncation_error(basis: CuspBasis, G: np.ndarray) -> np.ndarray:
    # Cauchy-Schwarz: |<delta_i, f_j>| <= ||delta_i|| ||f_j||, with the dropped
    # tail delta_i(y) <= t_i(y0) exp(-2 pi (N+1)(y - y0)) on F (y >= y0)
    k = basis.weight
    y0 = SQRT3_2
    norms = []
    for f in basis.forms:
        t0 = tail_bound(f.coefficient_bound(), k, y0, f.N)
        lam = FOUR_PI * (f.N + 1)
        log_int = lam * y0 + gammaln(k - 1) + math.log(max(gammaincc(k - 1, lam * y0), 1e-300)) - (k - 1) * math.log(lam)
        norms.append(t0 * math.exp(0.5 * log_int) if t0 > 0 else 0.0)
    delta = np.array(norms)
    fn = np.sqrt(np.abs(np.real(np.diag(G))))
    return np.outer(delta, fn) + np.outer(fn, delta) + np.outer(delta, delta)


def gram(basis: CuspBasis, quad: QuadratureParams | None = None) -> GramMatrix:
    """Petersson Gram matrix ``<f_i, f_j>`` over the standard fundamental domain.

    ``y <= Y`` is integrated by tensor Gauss-Legendre with the lower limit
    following the arc ``|z| = 1``; ``y > Y`` is integrated exactly term by
    term (full period in ``x``, incomplete gamma in ``y``).  The error
    estimate is the change under doubling both orders plus a truncation
    bound.
    """
    quad = quad or QuadratureParams()
    if basis.dim == 0:
        raise DimensionZero(f"S_{basis.weight} is zero-dimensional")
    tail = _tail_part(basis, quad.Y)
    G = _quadrature_part(basis, quad.nx, quad.ny, quad.Y) + tail
    if quad.double_check:
        G2 = _quadrature_part(basis, 2 * quad.nx, 2 * quad.ny, quad.Y) + tail
        err = np.abs(G2 - G)
        G = G2
    else:
        err = np.zeros(G.shape)
    G = 0.5 * (G + G.conj().T)
    err = err + _truncation_error(basis, G)
    g = GramMatrix(basis.weight, G, err, quad)
    _equilibrated_cholesky(g.entries)
    return g


# --------------------------------------------------------------------------- orthonormal basis


def _equilibrated_cholesky(G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    diag = np.real(np.diag(G))
    if np.any(diag <= 0) or not np.all(np.isfinite(G)):
        raise NotPositiveDefinite("Gram matrix has nonpositive diagonal")
    s = 1.0 / np.sqrt(diag)
    Gs = G * s[:, None] * s[None, :]
    try:
        L = np.linalg.cholesky(Gs)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Cholesky failed; refine the quadrature") from exc
    return L, s


@dataclass(frozen=True)
class OrthonormalBasis:
    """``f~ = transform @ f`` is Petersson-orthonormal."""

    weight: int
    transform: np.ndarray
    basis: CuspBasis
    residual: float
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    @property
    def dim(self) -> int:
        return self.transform.shape[0]


def orthonormalize(basis: CuspBasis, g: GramMatrix) -> OrthonormalBasis:
    L, s = _equilibrated_cholesky(g.entries)
    T = np.linalg.solve(L, np.diag(s).astype(complex))
    R = T @ g.entries @ T.conj().T - np.eye(len(s))
    return OrthonormalBasis(basis.weight, T, basis, float(np.abs(R).max()))


def remix(onb: OrthonormalBasis, U: np.ndarray) -> OrthonormalBasis:
    """Apply a unitary ``U`` to an orthonormal basis (still orthonormal)."""
    return OrthonormalBasis(onb.weight, U @ onb.transform, onb.basis, onb.residual)


def build_onb(k: int, quad: QuadratureParams | None = None, basis: CuspBasis | None = None) -> OrthonormalBasis:
    basis = basis or cusp_basis_for(k)
    return orthonormalize(basis, gram(basis, quad))


def _floor_error(onb: OrthonormalBasis, ymin: float) -> float:
    k = onb.weight
    key = ("floor", ymin)
    if key not in onb._cache:
        delta = np.array(
            [tail_bound(f.coefficient_bound(), k, ymin, f.N) for f in onb.basis.forms]
        ) * math.exp(0.5 * k * math.log(ymin))
        e = np.linalg.norm(onb.transform) * np.linalg.norm(delta)
        bmax = max(k ** 1.5, kernel_scale(k))
        onb._cache[key] = 2.0 * e * math.sqrt(bmax) + e * e
    return onb._cache[key]


def bergman_values(onb: OrthonormalBasis, x, y, tol: float = 1e-10) -> np.ndarray:
    """``B_k`` at many points; ``tol`` is relative to :func:`kernel_scale`."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    ymin = float(y.min())
    err = _floor_error(onb, ymin)
    if err > tol * kernel_scale(onb.weight):
        raise TruncationError(
            f"evaluation floor violated at y={ymin}: truncation error {err:.2e} exceeds tolerance", required=None
        )
    V = onb.transform @ scaled_values(onb.basis, x, y, onb.weight / 2.0)
    return np.sum(np.abs(V) ** 2, axis=0)


def bergman_point(k: int, z: HPoint | complex, onb: OrthonormalBasis, tol: float = 1e-10) -> float:
    """``sum_i y^k |f_i(z)|^2`` for the orthonormal basis ``onb``."""
    if onb.weight != k:
        raise ValueError("weight mismatch")
    if isinstance(z, HPoint):
        z = z.z
    return float(bergman_values(onb, [z.real], [z.imag], tol)[0])


# --------------------------------------------------------------------------- automorphic series


def _coprime_pairs(M: int) -> np.ndarray:
    pairs = [(0, 1)]
    for c in range(1, M + 1):
        for d in range(-M, M + 1):
            if math.gcd(c, d) == 1:
                pairs.append((c, d))
    return np.array(pairs, dtype=np.int64)


def _series_cutoff_error(k: int, z: complex, M: int) -> float:
    y = z.imag
    r0 = M * min(y, 1.0 - min(abs(z.real), 0.999))
    if r0 <= 2.0:
        return math.inf
    tfac = 1.0 + y * math.sqrt(math.pi) * math.exp(gammaln((k - 1) / 2) - gammaln(k / 2))
    log_err = math.log(math.pi / y) + k * math.log(2.0) + (2 - k) * math.log(r0) - math.log(k - 2) + math.log(tfac)
    return kernel_scale(k) * math.exp(log_err)


def series_cutoff(k: int, z: complex, tol: float) -> int:
    """Smallest ``M`` whose box-truncation error estimate is below ``tol * scale``."""
    M = 4
    while _series_cutoff_error(k, z, M) > tol * kernel_scale(k):
        M = int(M * 1.2) + 1
    return M


def bergman_series(k: int, z: HPoint | complex, M: int | None = None, tol: float = 1e-12) -> float:
    """``B_k(z)`` from the automorphic kernel series.

    ``(k-1)/(4 pi) y^k sum_gamma ((gamma z - conj z)/(2i))^(-k) (cz+d)^(-k)``,
    with cosets enumerated by coprime ``(c, d)``, ``max(|c|, |d|) <= M`` and
    the translation family summed directly for each coset.
    """
    if k < 8 or k % 2:
        raise ValueError("series needs even k >= 8")
    if isinstance(z, HPoint):
        z = z.z
    z = complex(z)
    y = z.imag
    if M is None:
        M = series_cutoff(k, z, tol)
    cut_err = _series_cutoff_error(k, z, M)
    scale = kernel_scale(k)
    if cut_err > tol * scale:
        raise CutoffInsufficient(f"M={M} leaves error estimate {cut_err:.2e} at k={k}, z={z}")
    pairs = _coprime_pairs(M)
    c = pairs[:, 0].astype(float)
    d = pairs[:, 1].astype(float)
    a = np.array([pow(int(dd), -1, int(cc)) if cc > 1 else (0 if cc == 1 else 1) for cc, dd in pairs], dtype=float)
    b = np.where(c == 0, 0.0, (a * d - 1.0) / np.where(c == 0, 1.0, c))
    J = c * z + d
    w = (a * z + b) / J - z.conjugate()
    # |term| <= A |w + t|^-k with A = (2y)^k |J|^-k
    logA = k * math.log(2 * y) - k * np.log(np.abs(J))
    pair_tol = 1e-3 * tol / len(pairs)
    reach = np.exp((math.log(2.0 / (k - 1)) + logA - math.log(pair_tol)) / (k - 1))
    T = np.ceil(1.0 + reach).astype(np.int64)
    t0 = -np.rint(w.real)
    Tmax = int(T.max())
    offs = np.arange(-Tmax, Tmax + 1)
    log_pref = k * np.log(2j * y) - k * np.log(J)
    terms = []
    for lo in range(0, len(pairs), 2048):
        sl = slice(lo, lo + 2048)
        tt = t0[sl, None] + offs[None, :]
        mask = np.abs(offs)[None, :] <= T[sl, None]
        vals = np.exp(log_pref[sl, None] - k * np.log(w[sl, None] + tt))
        terms.append(vals[mask])
    terms = np.concatenate(terms) * scale
    order = np.argsort(-np.abs(terms))
    re = math.fsum(terms.real[order])
    im = math.fsum(terms.imag[order])
    if abs(im) > 1e-10 * max(abs(re), scale):
        raise NonRealResult(f"imaginary residue {im:.3e} at k={k}, z={z}")
    return re


def identity_translation_part(k: int, z: complex, T: int = 200) -> float:
    """Contribution of the identity coset: ``(k-1)/(4 pi) sum_t (1 - i t/(2y))^(-k)``."""
    y = z.imag
    t = np.arange(-T, T + 1)
    vals = (1.0 - 1j * t / (2 * y)) ** (-k)
    order = np.argsort(-np.abs(vals))
    return kernel_scale(k) * math.fsum(vals.real[order])


# --------------------------------------------------------------------------- scans and fits


@dataclass(frozen=True)
class ScanReport:
    weight: int
    region: tuple[float, float]
    grid: tuple[int, int]
    sup: float
    argmax: tuple[float, float]
    refined: bool
    grid_sup: float
    interior: bool


def y_auto(k: int) -> float:
    """Height cap for the full-domain proxy; the cusp peak sits near ``k / (4 pi)``."""
    return max(4.0, k / 2.0)


def region_grid(nx: int, ny: int, y_min: float, y_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Curvilinear grid on ``F`` restricted to ``y_min <= y <= y_max``, boundary included."""
    xs = np.linspace(-0.5, 0.5, nx)
    lo = np.maximum(np.sqrt(1.0 - xs * xs), y_min)
    if np.any(lo > y_max):
        raise RegionEmpty(f"no points of F with {y_min} <= y <= {y_max}")
    s = np.linspace(0.0, 1.0, ny)
    ys = lo[:, None] + (y_max - lo)[:, None] * s[None, :]
    return np.broadcast_to(xs[:, None], ys.shape).copy(), ys


def _golden_max(fn, lo: float, hi: float, iters: int = 40) -> tuple[float, float]:
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - g * (b - a)
    c2 = a + g * (b - a)
    f1, f2 = fn(c1), fn(c2)
    for _ in range(iters):
        if f1 >= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - g * (b - a)
            f1 = fn(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + g * (b - a)
            f2 = fn(c2)
    return (c1, f1) if f1 >= f2 else (c2, f2)


def sup_scan(
    k: int,
    onb: OrthonormalBasis,
    y_max: float | None = None,
    nx: int = 50,
    ny: int = 50,
    y_min: float = 0.0,
    top: int = 5,
    refine: bool = True,
) -> ScanReport:
    """Supremum of ``B_k`` over ``F`` cut at ``y_min <= y <= y_max``.

    ``y_max=None`` selects the full-domain proxy :func:`y_auto`.  The grid
    maximum is refined by golden-section sweeps in ``x`` and ``y`` around
    each of the ``top`` best grid cells.
    """
    if nx < 2 or ny < 2:
        raise ValueError("grid resolution must be at least 2x2")
    Y = y_auto(k) if y_max is None else float(y_max)
    X, Yg = region_grid(nx, ny, y_min, Y)
    vals = bergman_values(onb, X.ravel(), Yg.ravel()).reshape(X.shape)
    flat = np.argsort(-vals.ravel(), kind="stable")
    i0, j0 = np.unravel_index(flat[0], vals.shape)
    best = (float(vals[i0, j0]), float(X[i0, j0]), float(Yg[i0, j0]))
    grid_sup = best[0]
    dx = 1.0 / (nx - 1)
    if refine:
        for idx in flat[:top]:
            i, j = np.unravel_index(idx, vals.shape)
            x, y = float(X[i, j]), float(Yg[i, j])
            dy = (Y - max(math.sqrt(1 - x * x), y_min)) / (ny - 1)
            fx = lambda t, yy: float(bergman_values(onb, [t], [max(yy, math.sqrt(max(0.0, 1 - t * t)), y_min)])[0])
            v = float(vals[i, j])
            for _ in range(2):
                x, v = _golden_max(lambda t: fx(t, y), max(-0.5, x - dx), min(0.5, x + dx))
                lo = max(math.sqrt(1 - x * x), y_min, y - dy)
                hi = min(Y, y + dy)
                if hi > lo:
                    y, v = _golden_max(lambda s: fx(x, s), lo, hi)
                y = max(y, math.sqrt(1 - x * x), y_min)
            if not (np.isfinite(v)):
                raise RefinementNonconvergent("refinement produced a non-finite value")
            if v > best[0]:
                best = (v, x, y)
    interior = best[2] < Y - 0.5 * (Y - SQRT3_2) / (ny - 1)
    return ScanReport(k, (y_min, Y), (nx, ny), best[0], (best[1], best[2]), refine, grid_sup, interior)


@dataclass(frozen=True)
class FitReport:
    exponent: float
    constant: float
    residual: float
    k_range: tuple[float, float]


def scaling_fit(samples: Sequence[tuple[float, float]]) -> FitReport:
    """Least-squares fit ``log value = exponent log k + constant``.

    ``residual`` is the sum of squared residuals in log space.
    """
    ks = np.array([s[0] for s in samples], dtype=float)
    vs = np.array([s[1] for s in samples], dtype=float)
    if len(ks) < 4 or len(np.unique(ks)) != len(ks):
        raise DegenerateSamples("need at least 4 samples with distinct k")
    if np.any(ks <= 0) or np.any(vs <= 0):
        raise DegenerateSamples("log-log fit needs positive k and values")
    A = np.column_stack([np.log(ks), np.ones_like(ks)])
    coef, *_ = np.linalg.lstsq(A, np.log(vs), rcond=None)
    res = np.log(vs) - A @ coef
    return FitReport(float(coef[0]), float(coef[1]), float(res @ res), (float(ks.min()), float(ks.max())))


@dataclass(frozen=True)
class EquidistRecord:
    z: complex
    bergman: float
    ratio: float
    deviation: float


def equidist_check(k: int, points: Iterable[HPoint | complex], onb: OrthonormalBasis | None = None) -> list[EquidistRecord]:
    """``B_k(z) vol / j_k`` at each point, with its deviation from 1."""
    j = dim_cusp(k)
    if j == 0:
        raise DimensionZero(f"S_{k} = 0")
    onb = onb or build_onb(k)
    out = []
    for p in points:
        z = p.z if isinstance(p, HPoint) else complex(p)
        b = bergman_point(k, z, onb)
        r = b * VOLUME / j
        out.append(EquidistRecord(z, b, r, abs(r - 1.0)))
    return out
