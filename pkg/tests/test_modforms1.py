import math
from fractions import Fraction

import numpy as np
import pytest

from bergmanlab.errors import TruncationError
from bergmanlab.geometry import HPoint
from bergmanlab.modforms1 import (
    QExpansion,
    bernoulli,
    cusp_rank_bruteforce,
    delta,
    dim_cusp,
    eisenstein,
    evaluate,
    is_echelon,
    miller_basis,
    product_basis,
)


def test_bernoulli_values():
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(12) == Fraction(-691, 2730)


def test_bernoulli_recurrence():
    for m in range(1, 30):
        assert sum(math.comb(m + 1, j) * bernoulli(j) for j in range(m + 1)) == 0


def test_eisenstein_leading_coefficients():
    assert eisenstein(4, 5)[1] == 240
    assert eisenstein(6, 5)[1] == -504
    for k in range(4, 30, 2):
        assert eisenstein(k, 3)[0] == 1


def test_eisenstein_divisor_sums():
    for k in (4, 8, 14):
        e = eisenstein(k, 30)
        c = Fraction(-2 * k) / bernoulli(k)
        for n in range(1, 31):
            assert e[n] == c * sum(d ** (k - 1) for d in range(1, n + 1) if n % d == 0)


def _jacobi_delta(N):
    # q prod (1 - q^n)^24 with integer polynomials
    p = np.zeros(N + 1, dtype=object)
    p[0] = 1
    for n in range(1, N + 1):
        for _ in range(24):
            p[n:] = p[n:] - p[: N + 1 - n]
    out = np.zeros(N + 1, dtype=object)
    out[1:] = p[:N]
    return out


def test_delta_against_product_formula():
    N = 60
    d = delta(N)
    assert d[0] == 0 and d[1] == 1 and d[2] == -24
    ref = _jacobi_delta(N)
    assert all(d[n] == ref[n] for n in range(N + 1))


def test_tau_multiplicative():
    d = delta(400)
    for m in range(1, 21):
        for n in range(1, 21):
            if math.gcd(m, n) == 1:
                assert d[m * n] == d[m] * d[n]


def test_dim_cusp_examples_and_oracle():
    assert dim_cusp(12) == 1
    assert dim_cusp(24) == 2
    assert dim_cusp(2) == 0
    for k in range(2, 62, 2):
        assert dim_cusp(k) == cusp_rank_bruteforce(k)


def test_miller_basis_examples():
    b12 = miller_basis(12, 20)
    assert b12.forms[0].coeffs == delta(20).coeffs
    b16 = miller_basis(16, 20)
    ref = delta(20) * eisenstein(4, 20)
    assert b16.dim == 1 and b16.forms[0].coeffs == ref.coeffs and b16.forms[0][1] == 1
    for k in range(12, 101, 8):
        assert is_echelon(miller_basis(k, dim_cusp(k) + 3))


def test_miller_truncation_error():
    with pytest.raises(TruncationError) as err:
        miller_basis(48, 2)
    assert err.value.required == dim_cusp(48)


def test_product_basis_spans_cusp_space():
    b = product_basis(36, 12)
    m = miller_basis(36, 12)
    # both bases are cusp forms with the same span: leading q^j and echelon reduction agree
    assert all(f[0] == 0 for f in b.forms)
    assert [f.leading_index() for f in b.forms] == list(range(1, b.dim + 1))
    assert m.dim == b.dim


def test_arithmetic_and_json_roundtrip():
    e4 = eisenstein(4, 20)
    e8 = eisenstein(8, 20)
    assert (e4 * e4).coeffs == e8.coeffs
    f = delta(10).scale(Fraction(3, 7)) + delta(10)
    assert QExpansion.from_json(f.to_json()).coeffs == f.coeffs
    assert (f - f).coeffs == (0,) * 11


def test_delta_at_i():
    v = evaluate(delta(60), HPoint(0, 1))
    assert v.real > 0 and abs(v.imag) <= 1e-18
    assert abs(v.real - 0.0017853698506421524) < 1e-15


def test_delta_periodic():
    d = delta(60)
    z = complex(0.3, 1.2)
    a = evaluate(d, HPoint.from_complex(z))
    b = evaluate(d, HPoint.from_complex(z + 1))
    assert abs(a - b) <= 1e-12


def _density(f, z):
    return z.imag ** f.weight * abs(evaluate(f, HPoint.from_complex(z), 1e-16)) ** 2


def test_petersson_density_modular_invariance():
    # y^k |f|^2 at z and at -1/z (and -1/zbar, its reflection image)
    rng = np.random.default_rng(2)
    for k in (12, 24, 36):
        for f in miller_basis(k, 120).forms:
            for _ in range(3):
                z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 1.3))
                base = _density(f, z)
                for w in (-1 / z, -1 / z.conjugate(), z + 1):
                    if w.imag < 0:
                        w = w.conjugate()
                    assert abs(_density(f, w) - base) <= 1e-9 * max(base, 1e-30) + 1e-300


def test_evaluate_reports_required_truncation():
    d = delta(10)
    with pytest.raises(TruncationError) as err:
        evaluate(d, HPoint(0, 0.1), 1e-12)
    assert err.value.required > 10
    need = err.value.required
    evaluate(delta(need), HPoint(0, 0.1), 1e-12)
