import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergmanlab.heat_model import (
    SpectrumModel,
    SyntheticSpectrum,
    bergman_from_spectrum,
    bouche_density,
    bouche_underflows,
    heat_tail_bound,
    random_spectrum,
    synthetic_heat,
)


def test_small_t_law_n1():
    m = SpectrumModel((1.0,))
    assert abs(4 * math.pi * 1e-4 * bouche_density(m, 1e-4) - 1) < 1e-8


def test_closed_form_t1():
    mpmath.mp.dps = 30
    ref = 1 / (4 * mpmath.pi * mpmath.sinh(1))
    assert abs(bouche_density(SpectrumModel((1.0,)), 1.0) - float(ref)) < 1e-16
    assert bouche_density(SpectrumModel((1.0, 1.0)), 1.0) == pytest.approx(float(ref) ** 2, rel=1e-14)


def test_small_t_law_all_n():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        for _ in range(10):
            m = SpectrumModel(tuple(rng.uniform(0.1, 5.0, n)))
            assert abs((4 * math.pi * 1e-3) ** n * bouche_density(m, 1e-3) - 1) <= 1e-4


def test_bouche_underflow_flag():
    m = SpectrumModel((50.0, 50.0))
    assert bouche_density(m, 100.0) == 0.0
    assert bouche_underflows(m, 100.0)
    assert not bouche_underflows(m, 0.1)


def test_bouche_monotone_on_grid():
    ts = np.logspace(-2, 1, 40)
    for alphas in ((1.0,), (0.5, 2.0), (1.0, 2.0, 3.0)):
        vals = [bouche_density(SpectrumModel(alphas), t) for t in ts]
        assert all(b < a for a, b in zip(vals, vals[1:]))
    for t in (0.1, 1.0):
        vals = [bouche_density(SpectrumModel((a, 1.0)), t) for a in np.linspace(0.2, 5, 20)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_spectrum_validation():
    with pytest.raises(ValueError):
        SpectrumModel((0.0,))
    with pytest.raises(ValueError):
        SyntheticSpectrum((1.0, 0.0), (1.0, 1.0), 2.0)
    with pytest.raises(ValueError):
        SyntheticSpectrum((0.0,), (-1.0,), 2.0)


def test_synthetic_examples():
    assert synthetic_heat(SyntheticSpectrum((0.0,), (3.0,), 4.0), 0.7) == 3.0
    k = 6.0
    s = SyntheticSpectrum((0.0, k / 2), (1.0, 1.0), k)
    for t in (0.1, 1.0, 3.0):
        assert synthetic_heat(s, t) == pytest.approx(1 + math.exp(-t), rel=1e-15)
    assert bergman_from_spectrum(SyntheticSpectrum.from_pairs([(0, 1), (5, 7)], 3.0)) == 1.0
    assert bergman_from_spectrum(SyntheticSpectrum((1.0, 2.0), (1.0, 1.0), 3.0)) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_spectrum_properties(seed):
    spec = random_spectrum(np.random.default_rng(seed))
    b = bergman_from_spectrum(spec)
    ts = np.logspace(-2, 2, 20)
    heats = [synthetic_heat(spec, t) for t in ts]
    assert all(b <= h for h in heats)
    assert all(h1 <= h0 for h0, h1 in zip(heats, heats[1:]))
    assert synthetic_heat(spec, 2.0) <= synthetic_heat(spec, 1.0)
    gap = synthetic_heat(spec, 50.0) - b
    slack = 2 * np.finfo(float).eps * synthetic_heat(spec, 50.0)
    assert abs(gap) <= math.exp(-100 * spec.lambda_min_positive / spec.k) * sum(spec.masses) + slack
    assert heat_tail_bound(spec, 50.0) >= 0
