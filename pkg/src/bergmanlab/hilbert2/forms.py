"""Parallel even weight Hilbert modular forms for SL_2(O_K), K = Q(sqrt 5).

Fourier expansions are indexed by totally positive ``nu`` in the inverse
different; everything up to :func:`evaluate_hmf` is exact rational.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from ..errors import SpanDegenerate, TruncationError, ZetaUnavailable, DimensionZero
from ..geometry import HnPoint
from ..modforms1 import bernoulli, dim_cusp, eisenstein, miller_basis
from .field import TotPosIndex, enumerate_indices, sigma_ideal

TWO_PI = 2.0 * math.pi
DISC = 5


@dataclass(frozen=True)
class HilbertExpansion:
    """``constant + sum_{nu >> 0, Tr nu <= T} coeffs[nu] q^nu`` of parallel weight ``k``."""

    weight: int
    T: int
    constant: Fraction
    coeffs: Mapping[TotPosIndex, Fraction]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "constant", Fraction(self.constant))
        full = {idx: Fraction(0) for idx in _indices(self.T)}
        for idx, c in self.coeffs.items():
            if idx.trace > self.T:
                continue
            if idx not in full:
                raise ValueError(f"{idx} is not a totally positive index")
            full[idx] = Fraction(c)
        object.__setattr__(self, "coeffs", full)

    def __getitem__(self, idx: TotPosIndex) -> Fraction:
        return self.coeffs[idx]

    def is_cusp(self) -> bool:
        return self.constant == 0

    def is_zero(self) -> bool:
        return self.constant == 0 and not any(self.coeffs.values())

    def scale(self, c) -> "HilbertExpansion":
        c = Fraction(c)
        return HilbertExpansion(self.weight, self.T, c * self.constant, {i: c * v for i, v in self.coeffs.items()})

    def __add__(self, other: "HilbertExpansion") -> "HilbertExpansion":
        if self.weight != other.weight:
            raise ValueError("weights differ")
        T = min(self.T, other.T)
        return HilbertExpansion(
            self.weight, T, self.constant + other.constant, {i: self.coeffs[i] + other.coeffs[i] for i in _indices(T)}
        )

    def __sub__(self, other: "HilbertExpansion") -> "HilbertExpansion":
        return self + other.scale(-1)

    def __mul__(self, other: "HilbertExpansion") -> "HilbertExpansion":
        T = min(self.T, other.T)
        idx = _indices(T)
        pos = {i: n for n, i in enumerate(idx)}
        fa, da = _integerise(self, idx)
        fb, db = _integerise(other, idx)
        out = [0] * (len(idx) + 1)
        # slot 0 is the constant term; sums of totally positive elements stay totally positive
        keys = [None] + idx
        for p, ca in enumerate(fa):
            if not ca:
                continue
            ip = keys[p]
            tp = 0 if ip is None else ip.trace
            for q, cb in enumerate(fb):
                if not cb:
                    continue
                iq = keys[q]
                if iq is None:
                    out[p] += ca * cb
                    continue
                if tp + iq.trace > T:
                    continue
                if ip is None:
                    out[q] += ca * cb
                else:
                    out[pos[TotPosIndex(ip.a + iq.a, ip.b + iq.b)] + 1] += ca * cb
        den = da * db
        return HilbertExpansion(
            self.weight + other.weight, T, Fraction(out[0], den), {i: Fraction(out[n + 1], den) for n, i in enumerate(idx)}
        )

    def __pow__(self, e: int) -> "HilbertExpansion":
        if e < 1:
            raise ValueError("positive powers only")
        result = self
        for _ in range(e - 1):
            result = result * self
        return result

    def leading_index(self) -> TotPosIndex | None:
        for i in _indices(self.T):
            if self.coeffs[i]:
                return i
        return None

    def is_galois_symmetric(self) -> bool:
        return all(v == self.coeffs[i.conj()] for i, v in self.coeffs.items())

    def to_json(self) -> dict:
        entries = []
        for i in _indices(self.T):
            nu = i.nu
            entries.append([[str(nu.a), str(nu.b)], str(self.coeffs[i])])
        return {"weight": self.weight, "T": self.T, "constant": str(self.constant), "entries": entries}

    @classmethod
    def from_json(cls, data: dict) -> "HilbertExpansion":
        from .field import FieldElem, ROOT5

        coeffs = {}
        for (a, b), c in data["entries"]:
            x = FieldElem(Fraction(a), Fraction(b)) * ROOT5
            if not x.is_integral():
                raise ValueError("index not in the inverse different")
            coeffs[TotPosIndex(int(x.a), int(x.b))] = Fraction(c)
        return cls(int(data["weight"]), int(data["T"]), Fraction(data["constant"]), coeffs)

    def float_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if "arr" not in self._cache:
            idx = [i for i in _indices(self.T) if self.coeffs[i]]
            emb = np.array([i.embeddings() for i in idx]).reshape(-1, 2)
            c = np.array([float(self.coeffs[i]) for i in idx])
            tr = np.array([i.trace for i in idx], dtype=float)
            self._cache["arr"] = (emb, c, tr)
        return self._cache["arr"]


@lru_cache(maxsize=None)
def _indices_tuple(T: int) -> tuple[TotPosIndex, ...]:
    return tuple(enumerate_indices(T))


def _indices(T: int) -> list[TotPosIndex]:
    return list(_indices_tuple(T))


def _integerise(f: HilbertExpansion, idx: list[TotPosIndex]) -> tuple[list[int], int]:
    vals = [f.constant] + [f.coeffs[i] for i in idx]
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return [int(v.numerator * (den // v.denominator)) for v in vals], den


# ----------------------------------------------------------------- zeta values


def _chi5(a: int) -> int:
    return {0: 0, 1: 1, 2: -1, 3: -1, 4: 1}[a % 5]


def bernoulli_poly(k: int, x: Fraction) -> Fraction:
    return sum(math.comb(k, j) * bernoulli(j) * x ** (k - j) for j in range(k + 1))


def dedekind_zeta_neg(k: int) -> Fraction:
    """``zeta_K(1 - k)`` for even ``k >= 2`` via ``zeta(1-k) L(1-k, chi_5)``.

    ``= B_k B_{k,chi} / k^2`` with the generalised Bernoulli number
    ``B_{k,chi} = 5^(k-1) sum_{a=1}^{5} chi(a) B_k(a/5)``.
    """
    if k < 2 or k % 2:
        raise ValueError("k must be even >= 2")
    bkchi = DISC ** (k - 1) * sum(_chi5(a) * bernoulli_poly(k, Fraction(a, DISC)) for a in range(1, DISC + 1))
    return bernoulli(k) * bkchi / (k * k)


def restricted_coefficients(k: int, m_max: int) -> list[int]:
    """``c_m = sum_{Tr nu = m} sigma_{k-1}((nu) d)`` for ``m = 1..m_max``."""
    out = [0] * (m_max + 1)
    for idx in enumerate_indices(m_max):
        out[idx.trace] += sigma_ideal(idx, k)
    return out


def zeta_from_restriction(k: int) -> Fraction:
    """``zeta_K(1 - k)`` from modularity of the diagonal restriction.

    ``E_k(tau, tau) = 1 + kappa sum_m c_m q^m`` must equal ``E_{2k}`` plus a
    cusp form of weight ``2k`` for ``SL_2(Z)``.  Writing the cusp part in the
    echelon basis ``g_1..g_d`` fixes it from the first ``d`` coefficients;
    coefficient ``d+1`` then determines ``kappa = 4 / zeta_K(1-k)`` and
    coefficient ``d+2`` is checked.
    """
    if k < 2 or k % 2:
        raise ValueError("k must be even >= 2")
    d = dim_cusp(2 * k)
    m = d + 2
    c = restricted_coefficients(k, m)
    e = eisenstein(2 * k, m).coeffs
    g = miller_basis(2 * k, m).forms if d else ()

    def reduced(vec, n):
        return vec[n] - sum(vec[j + 1] * g[j].coeffs[n] for j in range(d))

    denom = reduced(c, d + 1)
    if denom == 0:
        raise ZetaUnavailable(f"restriction does not determine the constant at k={k}")
    kappa = Fraction(reduced(e, d + 1)) / denom
    if kappa * reduced(c, d + 2) != reduced(e, d + 2):
        raise ZetaUnavailable(f"restriction check failed at k={k}")
    return Fraction(4) / kappa


@lru_cache(maxsize=None)
def _zeta_table() -> dict[int, Fraction]:
    text = resources.files("bergmanlab.hilbert2").joinpath("zeta_q5.json").read_text()
    return {int(k): Fraction(v) for k, v in json.loads(text)["zeta_1_minus_k"].items()}


def zeta_k(k: int) -> Fraction:
    """Stored exact ``zeta_K(1 - k)``."""
    try:
        return _zeta_table()[k]
    except KeyError:
        raise ZetaUnavailable(f"zeta_K(1-{k}) not in the stored table") from None


# ----------------------------------------------------------------- forms


@lru_cache(maxsize=None)
def eisenstein_hmf(k: int, T: int) -> HilbertExpansion:
    """``E_k = 1 + (4 / zeta_K(1-k)) sum sigma_{k-1}((nu) d) q^nu``."""
    if k < 2 or k % 2:
        raise ValueError("k must be even >= 2")
    kappa = Fraction(4) / zeta_k(k)
    return HilbertExpansion(k, T, Fraction(1), {i: kappa * sigma_ideal(i, k) for i in _indices(T)})


def exact_rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        p = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        piv = mat[r][col]
        mat[r] = [v / piv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                c = mat[i][col]
                mat[i] = [a - c * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def _rows(forms: Sequence[HilbertExpansion]) -> tuple[list[list[Fraction]], list[TotPosIndex]]:
    if not forms:
        raise SpanDegenerate("no forms given")
    k, T = forms[0].weight, forms[0].T
    if any(f.weight != k or f.T != T for f in forms):
        raise SpanDegenerate("forms must share weight and trace cutoff")
    idx = _indices(T)
    return [[f.constant] + [f.coeffs[i] for i in idx] for f in forms], idx


def span_rank(forms: Sequence[HilbertExpansion]) -> int:
    rows, _ = _rows(forms)
    return len(exact_rref(rows)[0])


def cusp_project(forms: Sequence[HilbertExpansion]) -> list[HilbertExpansion]:
    """Echelon basis of the cusp forms in the span of ``forms``.

    Row reduction with the constant term as the first column: at most one
    reduced row keeps a constant term, the others span the kernel of the
    constant-term functional and are normalised to leading coefficient 1.
    """
    rows, idx = _rows(forms)
    k, T = forms[0].weight, forms[0].T
    reduced, pivots = exact_rref(rows)
    out = []
    for row, col in zip(reduced, pivots):
        if col == 0:
            continue
        out.append(HilbertExpansion(k, T, Fraction(0), dict(zip(idx, row[1:]))))
    return out


def dim_hilbert_series(k: int) -> tuple[int, int]:
    """``(dim M_k, dim S_k)`` of symmetric parallel even weight forms.

    Coefficients of ``1/((1-t^2)(1-t^6)(1-t^10))``; one cusp (class
    number one) so ``dim S_k = dim M_k - 1`` for ``k >= 2``.
    """
    if k < 0 or k % 2:
        raise ValueError("k must be even and nonnegative")
    m = sum(1 for c in range(k // 10 + 1) for b in range((k - 10 * c) // 6 + 1) if (k - 10 * c - 6 * b) % 2 == 0)
    return m, (m - 1 if k >= 2 else 0)


def weight6_cusp_form(T: int) -> HilbertExpansion:
    """The cusp form spanning ``S_6``, leading coefficient 1."""
    e2 = eisenstein_hmf(2, T)
    forms = cusp_project([e2 * e2 * e2, e2 * eisenstein_hmf(4, T), eisenstein_hmf(6, T)])
    if len(forms) != 1:
        raise SpanDegenerate(f"expected a one-dimensional cusp space, got {len(forms)}")
    return forms[0]


# ----------------------------------------------------------------- evaluation


def _growth_constant(F: HilbertExpansion, safety: float) -> float:
    p = 2 * (F.weight - 1)
    C = 0.0
    for i, v in F.coeffs.items():
        if v:
            C = max(C, abs(float(v)) / i.trace**p)
    return C * safety


def hmf_tail_bound(F: HilbertExpansion, y_min: float, safety: float = 10.0, T: int | None = None) -> float:
    """Bound on the dropped terms ``Tr nu > T`` at points with ``min(y) >= y_min``.

    Uses ``|b_nu| <= C Tr(nu)^(2k-2)`` with ``C`` the empirical maximum over
    computed coefficients times ``safety``, at most ``sqrt5 t + 1`` indices
    of trace ``t``, and ``|q^nu| <= exp(-2 pi Tr(nu) y_min)``.  ``T``
    defaults to the cutoff of ``F``.
    """
    p = 2 * (F.weight - 1)
    C = _growth_constant(F, safety)
    if C == 0.0:
        return 0.0
    total = 0.0
    t = (F.T if T is None else T) + 1
    accept = max(0.5, 0.5 * (1.0 + math.exp(-TWO_PI * y_min)))
    while True:
        log_term = math.log(C) + p * math.log(t) + math.log(math.sqrt(5) * t + 1) - TWO_PI * t * y_min
        term = math.exp(log_term) if log_term > -745 else 0.0
        ratio = ((t + 1) / t) ** (p + 1) * math.exp(-TWO_PI * y_min)
        if ratio < accept:
            return total + term / (1 - ratio)
        total += term
        t += 1


def required_trace(F: HilbertExpansion, y_min: float, tol: float) -> int:
    """Smallest cutoff whose tail bound (same growth constant) is below ``tol``."""
    T = F.T
    while hmf_tail_bound(F, y_min, T=T) >= tol:
        T += max(1, T // 8)
    return T


def evaluate_hmf(F: HilbertExpansion, z: HnPoint, tail_tol: float = 1e-12) -> complex:
    """``F(z_1, z_2)`` with certified truncation error below ``tail_tol``."""
    if z.n != 2:
        raise ValueError("Hilbert modular forms over Q(sqrt5) live on H^2")
    y_min = min(c.y for c in z.coords)
    bound = hmf_tail_bound(F, y_min)
    if bound >= tail_tol:
        need = required_trace(F, y_min, tail_tol)
        raise TruncationError(f"tail bound {bound:.2e} at min y {y_min}; need T >= {need}", required=need)
    emb, c, _ = F.float_arrays()
    z1, z2 = z.coords[0].z, z.coords[1].z
    arg = emb[:, 0] * z1 + emb[:, 1] * z2
    terms = c * np.exp(2j * math.pi * arg)
    order = np.argsort(-np.abs(terms))
    re = math.fsum(terms.real[order])
    im = math.fsum(terms.imag[order])
    return complex(float(F.constant) + re, im)


def petersson_density(F: HilbertExpansion, z: HnPoint, tail_tol: float = 1e-14) -> float:
    """``y_1^k y_2^k |F(z)|^2``."""
    v = evaluate_hmf(F, z, tail_tol)
    k = F.weight
    return math.exp(k * sum(math.log(c.y) for c in z.coords)) * abs(v) ** 2


def bergman_ratio_1dim(f: HilbertExpansion, z1: HnPoint, z2: HnPoint, tail_tol: float = 1e-14) -> float:
    """``B_k(z1) / B_k(z2)`` when ``S_k`` is spanned by ``f`` (norm cancels)."""
    dim_s = dim_hilbert_series(f.weight)[1]
    if dim_s != 1:
        raise DimensionZero(f"ratio needs dim S_{f.weight} = 1, got {dim_s}")
    if not f.is_cusp() or f.is_zero():
        raise ValueError("f must be a nonzero cusp form")
    num = petersson_density(f, z1, tail_tol)
    den = petersson_density(f, z2, tail_tol)
    if den < 1e-290 or den <= 1e6 * tail_tol * abs(evaluate_hmf(f, z2, tail_tol)):
        raise ArithmeticError(f"denominator underflow at {z2}")
    return num / den


def _even_partitions(k: int, largest: int | None = None):
    largest = k if largest is None else largest
    if k == 0:
        yield ()
        return
    for p in range(min(k, largest), 1, -1):
        if p % 2 == 0:
            for rest in _even_partitions(k - p, p):
                yield (p,) + rest


def eisenstein_monomials(k: int, T: int) -> list[HilbertExpansion]:
    """All products ``E_{k_1} ... E_{k_m}`` with ``sum k_i = k``."""
    out = []
    for parts in _even_partitions(k):
        f = eisenstein_hmf(parts[0], T)
        for p in parts[1:]:
            f = f * eisenstein_hmf(p, T)
        out.append(f)
    return out


def hilbert_series_coefficients(k_max: int) -> list[int]:
    """Coefficients of ``1/((1-t^2)(1-t^6)(1-t^10))`` up to ``t^k_max``.

    Computed by expanding the geometric series one generator at a time, as an
    independent check on the lattice-point count of :func:`dim_hilbert_series`.
    """
    c = [1] + [0] * k_max
    for g in (2, 6, 10):
        for n in range(g, k_max + 1):
            c[n] += c[n - g]
    return c
