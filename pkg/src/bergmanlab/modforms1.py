"""Exact q-expansions of level-one modular forms.

Coefficients are kept as :class:`fractions.Fraction` throughout; floating
point only enters in :func:`evaluate` (and the vectorised helpers used by
the Bergman kernel code).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import TruncationError
from .geometry import HPoint

TWO_PI = 2.0 * math.pi


@lru_cache(maxsize=None)
def _bernoulli_table(m: int) -> tuple[Fraction, ...]:
    # sum_{j=0}^{m} C(m+1, j) B_j = 0, B_0 = 1
    table = [Fraction(1)]
    for n in range(1, m + 1):
        s = sum(math.comb(n + 1, j) * table[j] for j in range(n))
        table.append(-s / (n + 1))
    return tuple(table)


def bernoulli(m: int) -> Fraction:
    """Bernoulli number ``B_m`` (convention ``B_1 = -1/2``)."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return _bernoulli_table(m)[m]


@lru_cache(maxsize=None)
def divisor_sigma_table(power: int, n_max: int) -> tuple[int, ...]:
    """``sigma_power(n)`` for ``0 <= n <= n_max`` (entry 0 is 0)."""
    sig = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dp = d**power
        for m in range(d, n_max + 1, d):
            sig[m] += dp
    return tuple(sig)


def _to_int_vector(coeffs: Sequence[Fraction]) -> tuple[np.ndarray, int]:
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    nums = np.array([int(c.numerator * (den // c.denominator)) for c in coeffs], dtype=object)
    return nums, den


@dataclass(frozen=True)
class QExpansion:
    """Truncated Fourier expansion ``sum_{n<=N} a_n q^n`` of a weight-``k`` form."""

    weight: int
    coeffs: tuple[Fraction, ...]
    _float_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("empty expansion")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def truncate(self, N: int) -> "QExpansion":
        if N > self.N:
            raise TruncationError(f"cannot extend expansion from {self.N} to {N}", required=N)
        return QExpansion(self.weight, self.coeffs[: N + 1])

    def __add__(self, other: "QExpansion") -> "QExpansion":
        if self.weight != other.weight:
            raise ValueError("weights differ")
        N = min(self.N, other.N)
        return QExpansion(self.weight, tuple(a + b for a, b in zip(self.coeffs[: N + 1], other.coeffs[: N + 1])))

    def __sub__(self, other: "QExpansion") -> "QExpansion":
        return self + other.scale(-1)

    def scale(self, c) -> "QExpansion":
        c = Fraction(c)
        return QExpansion(self.weight, tuple(c * a for a in self.coeffs))

    def __mul__(self, other: "QExpansion") -> "QExpansion":
        if not isinstance(other, QExpansion):
            return self.scale(other)
        N = min(self.N, other.N)
        a, da = _to_int_vector(self.coeffs[: N + 1])
        b, db = _to_int_vector(other.coeffs[: N + 1])
        prod = np.convolve(a, b)[: N + 1]
        den = da * db
        return QExpansion(self.weight + other.weight, tuple(Fraction(int(p), den) for p in prod))

    def __pow__(self, e: int) -> "QExpansion":
        if e < 0:
            raise ValueError("negative powers unsupported")
        result = one_series(self.N)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def leading_index(self) -> int | None:
        for n, c in enumerate(self.coeffs):
            if c != 0:
                return n
        return None

    def coefficient_bound(self, safety: float = 10.0) -> float:
        """Empirical ``C`` with ``|a_n| <= C n^(k-1)``, times a safety factor."""
        k = self.weight
        best = 0.0
        for n in range(1, self.N + 1):
            a = self.coeffs[n]
            if a:
                best = max(best, math.exp(_log_abs(a) - (k - 1) * math.log(n)))
        return safety * best

    def log_abs_and_sign(self) -> tuple[np.ndarray, np.ndarray]:
        """``log|a_n|`` (``-inf`` for zeros) and sign arrays, cached."""
        if "log" not in self._float_cache:
            logs = np.array([_log_abs(c) if c else -np.inf for c in self.coeffs])
            signs = np.array([float((c > 0) - (c < 0)) for c in self.coeffs])
            self._float_cache["log"] = (logs, signs)
        return self._float_cache["log"]

    def to_json(self) -> dict:
        return {"weight": self.weight, "N": self.N, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "QExpansion":
        coeffs = tuple(Fraction(s) for s in data["coeffs"])
        if len(coeffs) != data["N"] + 1:
            raise ValueError("coefficient count does not match N")
        return cls(int(data["weight"]), coeffs)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _log_abs(a: Fraction) -> float:
    return math.log(abs(a.numerator)) - math.log(a.denominator)


def one_series(N: int) -> QExpansion:
    return QExpansion(0, (Fraction(1),) + (Fraction(0),) * N)


@lru_cache(maxsize=None)
def eisenstein(k: int, N: int) -> QExpansion:
    """``E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n``."""
    if k < 4 or k % 2:
        raise ValueError("Eisenstein series need even k >= 4")
    c = Fraction(-2 * k) / bernoulli(k)
    sig = divisor_sigma_table(k - 1, N)
    return QExpansion(k, (Fraction(1),) + tuple(c * sig[n] for n in range(1, N + 1)))


@lru_cache(maxsize=None)
def delta(N: int) -> QExpansion:
    """Discriminant form ``(E_4^3 - E_6^2) / 1728``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    e4, e6 = eisenstein(4, N), eisenstein(6, N)
    return (e4**3 - e6**2).scale(Fraction(1, 1728))


@lru_cache(maxsize=None)
def _power(kind: str, e: int, N: int) -> QExpansion:
    base = {"E4": lambda: eisenstein(4, N), "E6": lambda: eisenstein(6, N), "D": lambda: delta(N)}[kind]()
    if e == 0:
        return one_series(N)
    if e == 1:
        return base
    half = _power(kind, e // 2, N)
    sq = half * half
    return sq * base if e % 2 else sq


def dim_modular(k: int) -> int:
    """``dim M_k(SL_2(Z))``."""
    if k < 0 or k % 2:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


def dim_cusp(k: int) -> int:
    """``dim S_k(SL_2(Z))``."""
    if k < 12 or k % 2:
        return 0
    return dim_modular(k) - 1


def _e4e6_exponents(w: int) -> tuple[int, int]:
    # some (a, b) with 4a + 6b = w; w even, w != 2
    b = 1 if w % 4 == 2 else 0
    return (w - 6 * b) // 4, b


def monomial(k: int, j: int, N: int) -> QExpansion:
    """``Delta^j E_4^a E_6^b`` of weight ``k``."""
    a, b = _e4e6_exponents(k - 12 * j)
    f = _power("D", j, N)
    if a:
        f = f * _power("E4", a, N)
    if b:
        f = f * _power("E6", b, N)
    return f


@dataclass(frozen=True)
class CuspBasis:
    """Basis of ``S_k``; ``echelon`` means ``a_i(f_j) = delta_ij`` for ``i, j <= d``."""

    weight: int
    forms: tuple[QExpansion, ...]
    echelon: bool

    @property
    def dim(self) -> int:
        return len(self.forms)

    @property
    def N(self) -> int:
        return min(f.N for f in self.forms) if self.forms else 0


def _check_truncation(k: int, N: int) -> int:
    if k % 2 or k < 0:
        raise ValueError("weight must be a nonnegative even integer")
    d = dim_cusp(k)
    if N < d:
        raise TruncationError(f"truncation N={N} below dim S_{k}={d}", required=d)
    return d


def product_basis(k: int, N: int) -> CuspBasis:
    """Basis ``Delta^j E_4^a E_6^b`` (``j = 1..d``); leading term ``q^j``.

    Coefficients stay moderate for large ``k``, which keeps Petersson Gram
    matrices well conditioned after diagonal scaling.
    """
    d = _check_truncation(k, N)
    return CuspBasis(k, tuple(monomial(k, j, N) for j in range(1, d + 1)), echelon=False)


def miller_basis(k: int, N: int) -> CuspBasis:
    """Echelon basis of ``S_k``: ``f_j = q^j + O(q^(d+1))``."""
    base = product_basis(k, N)
    d = base.dim
    rows = [list(f.coeffs) for f in base.forms]
    # row j has leading coefficient 1 at index j+1; clear entries above pivots
    for j in range(d - 1, -1, -1):
        pj = j + 1
        for i in range(j):
            c = rows[i][pj]
            if c:
                rows[i] = [a - c * b for a, b in zip(rows[i], rows[j])]
    forms = tuple(QExpansion(k, tuple(r)) for r in rows)
    return CuspBasis(k, forms, echelon=True)


def is_echelon(basis: CuspBasis) -> bool:
    d = basis.dim
    for j, f in enumerate(basis.forms):
        if f.coeffs[0] != 0:
            return False
        for i in range(1, d + 1):
            if f.coeffs[i] != (1 if i == j + 1 else 0):
                return False
    return True


def exact_rank(rows: Iterable[Sequence[Fraction]]) -> int:
    """Row rank over Q by fraction-exact elimination."""
    mat = [list(map(Fraction, r)) for r in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        p = mat[rank]
        for i in range(rank + 1, len(mat)):
            c = mat[i][col] / p[col]
            if c:
                mat[i] = [a - c * b for a, b in zip(mat[i], p)]
        rank += 1
    return rank


def cusp_rank_bruteforce(k: int) -> int:
    """Dimension of ``S_k`` from the span of all ``E_4^a E_6^b`` monomials.

    Independent of :func:`dim_cusp`: the rank of the monomial span minus the
    Eisenstein line.
    """
    if k % 2 or k < 4:
        return 0
    N = k // 6 + 6
    mons = [_power("E4", a, N) * _power("E6", b, N) for b in range(k // 6 + 1) for a in [(k - 6 * b) // 4] if 4 * a + 6 * b == k]
    if not mons:
        return 0
    full = exact_rank([f.coeffs for f in mons])
    return full - 1


def tail_bound(C: float, k: int, y: float, N: int) -> float:
    """Bound for ``sum_{n>N} C n^(k-1) exp(-2 pi n y)``."""
    if C == 0.0:
        return 0.0
    logC = math.log(C)
    total = 0.0
    n = N + 1
    # the term ratio decreases to exp(-2 pi y) < 1; stop once it is safely below 1
    accept = max(0.5, 0.5 * (1.0 + math.exp(-TWO_PI * y)))
    while True:
        log_term = logC + (k - 1) * math.log(n) - TWO_PI * n * y
        ratio = math.exp((k - 1) * math.log1p(1.0 / n) - TWO_PI * y)
        term = math.exp(log_term) if log_term > -745 else 0.0
        if ratio < accept:
            # terms beyond n are dominated by a geometric series of ratio <= ratio
            return total + term / (1.0 - ratio)
        total += term
        n += 1


def required_truncation(C: float, k: int, y: float, tol: float, start: int = 1) -> int:
    N = max(start, 1)
    while tail_bound(C, k, y, N) >= tol:
        N = int(N * 1.25) + 1
    # tighten
    lo, hi = max(start, 1), N
    while lo < hi:
        mid = (lo + hi) // 2
        if tail_bound(C, k, y, mid) < tol:
            hi = mid
        else:
            lo = mid + 1
    return lo


def certified_tail(f: QExpansion, y: float) -> float:
    return tail_bound(f.coefficient_bound(), f.weight, y, f.N)


def evaluate(f: QExpansion, p: HPoint, tail_tol: float = 1e-12) -> complex:
    """Value of ``f`` at ``p`` with certified absolute truncation error ``< tail_tol``."""
    C = f.coefficient_bound()
    bound = tail_bound(C, f.weight, p.y, f.N)
    if bound >= tail_tol:
        need = required_truncation(C, f.weight, p.y, tail_tol, start=f.N)
        raise TruncationError(
            f"tail bound {bound:.3e} >= {tail_tol:.1e} at y={p.y}; need N >= {need}", required=need
        )
    return complex(series_values(f, np.array([p.x]), np.array([p.y]))[0])


def series_values(f: QExpansion, x: np.ndarray, y: np.ndarray, log_prefactor: np.ndarray | float = 0.0) -> np.ndarray:
    """``exp(log_prefactor) * f(x + iy)`` at many points, no tail check.

    Terms are formed in log space so that large coefficients and tiny
    ``|q|^n`` do not overflow separately.
    """
    logs, signs = f.log_abs_and_sign()
    n = np.arange(f.N + 1)
    x = np.asarray(x, dtype=float)[:, None]
    y = np.asarray(y, dtype=float)[:, None]
    lp = np.asarray(log_prefactor, dtype=float)
    if lp.ndim:
        lp = lp[:, None]
    with np.errstate(under="ignore"):
        mag = np.exp(logs[None, :] - TWO_PI * n[None, :] * y + lp) * signs[None, :]
        phase = np.exp(1j * TWO_PI * n[None, :] * x)
    return (mag * phase).sum(axis=1)
