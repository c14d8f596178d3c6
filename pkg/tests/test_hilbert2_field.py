import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergmanlab.errors import FactorizationOverflow
from bergmanlab.hilbert2.field import (
    PHI,
    ROOT5,
    FieldElem,
    TotPosIndex,
    enumerate_indices,
    enumerate_indices_bruteforce,
    factorize,
    is_totally_positive,
    sigma_ideal,
    sigma_ideal_bruteforce,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=20)
elems = st.builds(FieldElem, rationals, rationals)


def test_field_examples():
    assert PHI.norm() == -1 and PHI.trace() == 1
    assert not is_totally_positive(PHI)
    assert is_totally_positive(FieldElem(2, 1))
    assert ROOT5 * ROOT5 == FieldElem(5, 0)
    assert PHI * PHI == PHI + 1


@settings(max_examples=200)
@given(elems, elems)
def test_norm_trace_homomorphisms(x, y):
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    assert x.conj().conj() == x
    assert (x * y).conj() == x.conj() * y.conj()
    e1, e2 = x.embeddings()
    assert math.isclose(e1 * e2, float(x.norm()), rel_tol=1e-9, abs_tol=1e-9)
    if x.norm() != 0:
        assert x * x.inverse() == FieldElem(1, 0)


@settings(max_examples=200)
@given(elems)
def test_total_positivity_matches_embeddings(x):
    e1, e2 = x.embeddings()
    if min(abs(e1), abs(e2)) > 1e-9:
        assert is_totally_positive(x) == (e1 > 0 and e2 > 0)


def test_enumeration():
    assert enumerate_indices(0.5) == []
    idx = enumerate_indices(10)
    assert idx == enumerate_indices_bruteforce(10)
    assert len(idx) == 123
    s = set(idx)
    assert all(i.conj() in s for i in idx)
    keys = [(i.trace, i.norm) for i in idx]
    assert keys == sorted(keys)
    for i in idx:
        assert i.nu.is_totally_positive() and i.trace <= 10
        assert (i.nu * ROOT5).is_integral()


def test_sigma_examples():
    unit = TotPosIndex(0, 1)  # (nu) d = (phi), a unit
    assert sigma_ideal(unit, 2) == 1
    assert sigma_ideal(FieldElem(2, 0), 2) == 5
    assert sigma_ideal(FieldElem(5, 0), 2) == 1 + 5 + 25
    assert sigma_ideal(FieldElem(11, 0), 2) == (1 + 11) ** 2


def test_sigma_against_ideal_enumeration():
    for i in enumerate_indices(12):
        for k in (2, 4):
            assert sigma_ideal(i, k) == sigma_ideal_bruteforce(i.x, k)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(-12, 12), st.integers(1, 12), st.integers(-12, 12))
def test_sigma_multiplicative(a1, b1, a2, b2):
    x, y = FieldElem(a1, b1), FieldElem(a2, b2)
    if x.norm() == 0 or y.norm() == 0 or math.gcd(int(abs(x.norm())), int(abs(y.norm()))) != 1:
        return
    assert sigma_ideal(x * y, 4) == sigma_ideal(x, 4) * sigma_ideal(y, 4)
    assert sigma_ideal(x * y, 2) == sigma_ideal_bruteforce(x * y, 2)


def test_factorization_bound():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    with pytest.raises(FactorizationOverflow):
        factorize(10**13)


def test_sigma_rejects_odd_weight():
    with pytest.raises(ValueError):
        sigma_ideal(TotPosIndex(0, 1), 3)
