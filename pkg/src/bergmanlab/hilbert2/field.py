"""Arithmetic in K = Q(sqrt 5) with integral basis {1, phi}, phi = (1 + sqrt 5)/2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from ..errors import FactorizationOverflow

SQRT5 = math.sqrt(5.0)
PHI1 = (1.0 + SQRT5) / 2.0
PHI2 = (1.0 - SQRT5) / 2.0
FACTOR_BOUND = 10**12


@dataclass(frozen=True)
class FieldElem:
    """``a + b*phi`` with rational ``a, b``."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def __add__(self, o: "FieldElem") -> "FieldElem":
        o = as_elem(o)
        return FieldElem(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "FieldElem":
        return FieldElem(-self.a, -self.b)

    def __sub__(self, o: "FieldElem") -> "FieldElem":
        return self + (-as_elem(o))

    def __mul__(self, o: "FieldElem") -> "FieldElem":
        o = as_elem(o)
        # phi^2 = phi + 1
        bb = self.b * o.b
        return FieldElem(self.a * o.a + bb, self.a * o.b + self.b * o.a + bb)

    __rmul__ = __mul__

    def conj(self) -> "FieldElem":
        return FieldElem(self.a + self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a + self.a * self.b - self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a + self.b

    def inverse(self) -> "FieldElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero has no inverse")
        c = self.conj()
        return FieldElem(c.a / n, c.b / n)

    def __truediv__(self, o: "FieldElem") -> "FieldElem":
        return self * as_elem(o).inverse()

    def embeddings(self) -> tuple[float, float]:
        return float(self.a) + float(self.b) * PHI1, float(self.a) + float(self.b) * PHI2

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_totally_positive(self) -> bool:
        return is_totally_positive(self)


def as_elem(v) -> FieldElem:
    if isinstance(v, FieldElem):
        return v
    return FieldElem(Fraction(v), Fraction(0))


PHI = FieldElem(0, 1)
ROOT5 = FieldElem(-1, 2)  # 2 phi - 1 = sqrt 5


def norm(x: FieldElem) -> Fraction:
    return x.norm()


def trace(x: FieldElem) -> Fraction:
    return x.trace()


def conj(x: FieldElem) -> FieldElem:
    return x.conj()


def _sign_first(a: Fraction, b: Fraction) -> int:
    # sign of a + b (1 + sqrt5)/2 = (2a + b + b sqrt5)/2, exactly
    u, v = 2 * a + b, b
    return _sign_u_plus_v_sqrt5(u, v)


def _sign_u_plus_v_sqrt5(u: Fraction, v: Fraction) -> int:
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return (v > 0) - (v < 0)
    if (u > 0) == (v > 0):
        return 1 if u > 0 else -1
    # opposite signs: compare u^2 with 5 v^2
    s = u * u - 5 * v * v
    if s == 0:
        return 0
    return (1 if u > 0 else -1) if s > 0 else (1 if v > 0 else -1)


def is_totally_positive(x: FieldElem) -> bool:
    """Both real embeddings positive; decided exactly."""
    return _sign_first(x.a, x.b) > 0 and _sign_first(x.conj().a, x.conj().b) > 0


# ----------------------------------------------------------------- Fourier indices


@dataclass(frozen=True, order=True)
class TotPosIndex:
    """Totally positive ``nu = (a + b phi)/sqrt5`` in the inverse different.

    Stored through the integral element ``x = nu * sqrt5 = a + b phi``; then
    ``Tr(nu) = b`` and ``(nu) * different = (x)``.
    """

    a: int
    b: int

    @property
    def x(self) -> FieldElem:
        return FieldElem(self.a, self.b)

    @property
    def nu(self) -> FieldElem:
        return self.x / ROOT5

    @property
    def trace(self) -> int:
        return self.b

    @property
    def norm(self) -> Fraction:
        return self.nu.norm()

    def embeddings(self) -> tuple[float, float]:
        x1, x2 = self.x.embeddings()
        return x1 / SQRT5, -x2 / SQRT5

    def conj(self) -> "TotPosIndex":
        return TotPosIndex(-self.a - self.b, self.b)

    def sort_key(self) -> tuple:
        return (self.b, self.norm, self.a)


def _a_range(b: int) -> list[int]:
    # a + b phi > 0 and a + b phi' < 0, i.e. -b phi < a < -b phi'
    lo = math.floor(-b * PHI1) - 1
    hi = math.ceil(-b * PHI2) + 1
    return [a for a in range(lo, hi + 1) if is_totally_positive(FieldElem(a, b) / ROOT5)]


def enumerate_indices(T: float) -> list[TotPosIndex]:
    """Totally positive ``nu`` in ``(1/sqrt5) O_K`` with ``Tr(nu) <= T``, sorted by (trace, norm)."""
    out = []
    for b in range(1, int(math.floor(T)) + 1):
        out.extend(TotPosIndex(a, b) for a in _a_range(b))
    out.sort(key=TotPosIndex.sort_key)
    return out


def enumerate_indices_bruteforce(T: float) -> list[TotPosIndex]:
    """Independent box scan with floating embeddings (for testing)."""
    B = int(math.floor(T))
    found = []
    for a, b in product(range(-3 * B - 3, 3 * B + 4), range(-B - 2, B + 3)):
        n1 = (a + b * PHI1) / SQRT5
        n2 = -(a + b * PHI2) / SQRT5
        if n1 > 1e-12 and n2 > 1e-12 and n1 + n2 <= T + 1e-9:
            found.append(TotPosIndex(a, b))
    return sorted(found, key=TotPosIndex.sort_key)


# ----------------------------------------------------------------- ideals and divisor sums


def factorize(n: int) -> dict[int, int]:
    if n <= 0:
        raise ValueError("factorize needs a positive integer")
    if n > FACTOR_BOUND:
        raise FactorizationOverflow(f"{n} exceeds factor bound {FACTOR_BOUND}")
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0 and n:
        n //= p
        v += 1
    return v


def prime_ideal_valuations(x: FieldElem) -> list[tuple[int, int]]:
    """``(N(p), v_p(x))`` over the prime ideals dividing the integral ``x``.

    Splitting in Q(sqrt5): 5 ramifies, ``p = +-1 mod 5`` splits,
    ``p = +-2 mod 5`` is inert.  For split ``p`` the content ``g = gcd(a, b)``
    contributes to both primes and the primitive part to exactly one.
    """
    if not x.is_integral():
        raise ValueError("element must be integral")
    a, b = int(x.a), int(x.b)
    if a == 0 and b == 0:
        raise ValueError("zero element")
    g = math.gcd(a, b)
    a0, b0 = a // g, b // g
    n_prim = abs(a0 * a0 + a0 * b0 - b0 * b0)
    primes = set(factorize(g)) if g > 1 else set()
    if n_prim > 1:
        primes |= set(factorize(n_prim))
    out = []
    for p in sorted(primes):
        vg = _valuation(g, p)
        vn = _valuation(n_prim, p)
        if p == 5:
            out.append((5, 2 * vg + vn))
        elif p % 5 in (2, 3):
            out.append((p * p, vg))
        else:
            out.append((p, vg + vn))
            out.append((p, vg))
    return [(q, v) for q, v in out if v > 0]


def sigma_ideal(nu: TotPosIndex | FieldElem, k: int) -> int:
    """``sum_{c | (nu) d} N(c)^(k-1)`` over integral ideals ``c``."""
    if k < 2 or k % 2:
        raise ValueError("k must be even >= 2")
    x = nu.x if isinstance(nu, TotPosIndex) else nu
    total = 1
    for q, v in prime_ideal_valuations(x):
        total *= sum(q ** (i * (k - 1)) for i in range(v + 1))
    return total


def _lattice_contains(m: int, s: int, t: int, a: int, b: int) -> bool:
    # lattice spanned by (m, 0) and (s, t) in coordinates of {1, phi}
    if b % t:
        return False
    return (a - (b // t) * s) % m == 0


def ideals_containing(x: FieldElem) -> list[tuple[int, int, int]]:
    """All ideals of ``Z[phi]`` containing ``x``, as Hermite normal forms ``(m, s, t)``.

    Brute-force enumeration used as an oracle for :func:`sigma_ideal`.
    """
    a, b = int(x.a), int(x.b)
    n = abs(a * a + a * b - b * b)
    out = []
    for t in range(1, n + 1):
        if n % t:
            continue
        for m in range(t, n // t + 1, t):
            if n % (m * t):
                continue
            for s in range(m):
                # closed under multiplication by phi: phi*(m) = (0, m), phi*(s + t phi) = (t, s + t)
                if not _lattice_contains(m, s, t, 0, m) or not _lattice_contains(m, s, t, t, s + t):
                    continue
                if _lattice_contains(m, s, t, a, b):
                    out.append((m, s, t))
    return out


def sigma_ideal_bruteforce(x: FieldElem, k: int) -> int:
    return sum((m * t) ** (k - 1) for m, s, t in ideals_containing(x))
