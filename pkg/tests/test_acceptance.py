"""Acceptance criteria, one test and one PASS/FAIL line each."""

import math
from fractions import Fraction

import numpy as np
import pytest

from bergmanlab import bergman1, cli, heat_model
from bergmanlab.geometry import CurvatureSpec, HnPoint, HPoint, det_curvature, fd_curvature_check
from bergmanlab.hilbert2 import forms as hf
from bergmanlab.hilbert2.field import PHI1, PHI2, enumerate_indices
from bergmanlab.modforms1 import dim_cusp

from conftest import record_criterion

_ONB = {}


def onb(k):
    if k not in _ONB:
        _ONB[k] = bergman1.build_onb(k)
    return _ONB[k]


def test_criterion_1_curvature_constants():
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for w in (Fraction(1, 2), Fraction(2)):
        for n in (1, 2, 3):
            spec = CurvatureSpec(w, n)
            for _ in range(20):
                coords = tuple(HPoint(float(x), float(y)) for x, y in zip(rng.uniform(-0.5, 0.5, n), rng.uniform(0.5, 5.0, n)))
                p = HnPoint(coords)
                vals = fd_curvature_check(spec, p, min(c.y for c in coords) / 50)
                worst = max(worst, max(abs(v / (float(w) / (4 * math.pi)) - 1) for v in vals))
    exact = all(
        det_curvature(CurvatureSpec(Fraction(1, 2), n)) == (1 / (8 * math.pi)) ** n
        and det_curvature(CurvatureSpec(2, n)) == (1 / (2 * math.pi)) ** n
        for n in (1, 2, 3)
    )
    ok = worst <= 1e-6 and exact
    record_criterion(1, ok, f"max rel dev {worst:.2e} (tol 1e-6), determinant constants exact: {exact}")
    assert ok


def test_criterion_2_heat_bergman_inequalities():
    rng = np.random.default_rng(7)
    ts = np.logspace(-2, 2, 20)
    dominance = monotone = tail = True
    for _ in range(100):
        spec = heat_model.random_spectrum(rng)
        b = heat_model.bergman_from_spectrum(spec)
        heats = [heat_model.synthetic_heat(spec, float(t)) for t in ts]
        dominance &= all(b <= h for h in heats)
        monotone &= all(h1 <= h0 for h0, h1 in zip(heats, heats[1:]))
        # analytic tail bound, plus the rounding unit of the float difference
        bound = heat_model.heat_tail_bound(spec, float(ts[-1])) + 2 * np.finfo(float).eps * heats[-1]
        tail &= abs(heats[-1] - b) <= bound
    small_t = max(
        abs((4 * math.pi * 1e-3) ** n * heat_model.bouche_density(heat_model.SpectrumModel(tuple(rng.uniform(0.1, 5.0, n))), 1e-3) - 1)
        for n in (1, 2, 3)
    )
    ok = dominance and monotone and tail and small_t <= 1e-4
    record_criterion(2, ok, f"B<=H {dominance}, monotone {monotone}, tail bound {tail}, small-t dev {small_t:.2e} (tol 1e-4)")
    assert ok


def test_criterion_3_two_oracle_agreement():
    worst, failures = 0.0, []
    for k in (12, 16, 18, 20, 22, 26):
        for z in (1j, 2j, 0.25 + 1.1j):
            q = bergman1.bergman_point(k, z, onb(k))
            s = bergman1.bergman_series(k, z)
            rel = abs(q - s) / abs(s)
            worst = max(worst, rel)
            if rel > 1e-3:
                failures.append(f"k={k} z={z} quad={q:.3e} series={s:.3e}")
    ok = not failures
    record_criterion(3, ok, f"max rel dev {worst:.2e} (tol 1e-3); failing cases: {failures or 'none'}")
    assert ok


def test_criterion_4_pointwise_bound():
    bound = 1 / (2 * math.pi)
    violations = []
    for k in range(20, 61, 2):
        r = bergman1.sup_scan(k, onb(k), y_max=2.0)
        if r.sup / k > bound:
            violations.append(f"k={k}: {r.sup / k:.4f} at {r.argmax[0]:+.3f}+{r.argmax[1]:.3f}i")
    ok = not violations
    record_criterion(4, ok, f"{len(violations)} violations of B_k/k <= 1/(2 pi) = {bound:.4f}: {violations or 'none'}")
    assert ok


def test_criterion_5_scaling_exponents():
    compact, full = [], []
    for k in range(20, 81, 2):
        compact.append((k, bergman1.sup_scan(k, onb(k), y_max=2.0).sup))
        full.append((k, bergman1.sup_scan(k, onb(k)).sup))
    a = bergman1.scaling_fit(compact).exponent
    b = bergman1.scaling_fit(full).exponent
    ok = 0.8 <= a <= 1.2 and 1.25 <= b <= 1.75
    record_criterion(5, ok, f"compact exponent {a:.3f} (want [0.8,1.2]), full-domain exponent {b:.3f} (want [1.25,1.75])")
    assert ok


def test_criterion_6_equidistribution_trend():
    pts = (1j, 0.3 + 1.5j, 2j)
    worst = {k: max(r.deviation for r in bergman1.equidist_check(k, pts, onb(k))) for k in (20, 60)}
    ok = worst[60] < worst[20] and worst[60] <= 0.25
    record_criterion(6, ok, f"max deviation k=20: {worst[20]:.3f}, k=60: {worst[60]:.3f} (want decrease and <= 0.25)")
    assert ok


def test_criterion_7_hilbert_dimensions():
    series = hf.hilbert_series_coefficients(80)
    table_ok = all(hf.dim_hilbert_series(k) == (series[k], series[k] - 1) for k in range(2, 41, 2))
    enum_ok = all(
        hf.dim_hilbert_series(k)[0] == sum(1 for a in range(k // 2 + 1) for b in range(k // 6 + 1) for c in range(k // 10 + 1) if 2 * a + 6 * b + 10 * c == k)
        for k in range(0, 41, 2)
    )
    fit = bergman1.scaling_fit([(k, hf.dim_hilbert_series(k)[1]) for k in range(20, 81, 2)])
    ok = table_ok and enum_ok and 1.9 <= fit.exponent <= 2.1
    record_criterion(7, ok, f"table matches enumeration: {table_ok and enum_ok}; j_k exponent {fit.exponent:.3f} (want [1.9,2.1])")
    assert ok


def test_criterion_8_hilbert_eisenstein():
    T = 20
    e2, e4, e6 = (hf.eisenstein_hmf(k, T) for k in (2, 4, 6))
    sq = e2 * e2
    identity = sq.constant == e4.constant and all(sq[i] == e4[i] for i in enumerate_indices(T))
    galois = all(hf.eisenstein_hmf(k, T).is_galois_symmetric() for k in (2, 4, 6, 8, 10, 12))
    cusp = hf.cusp_project([e2 * e2 * e2, e2 * e4, e6])
    unique = len(cusp) == 1 and cusp[0].constant == 0 and cusp[0].is_galois_symmetric()
    f = hf.weight6_cusp_form(25)
    z1, ref = (0.13 + 0.85j, -0.21 + 1.9j), HnPoint.from_complex([0.31 + 1.2j, 0.05 + 0.95j])
    base = hf.bergman_ratio_1dim(f, HnPoint.from_complex(z1), ref)
    moves = [(z1[0] + PHI1, z1[1] + PHI2), (PHI1**2 * z1[0], PHI2**2 * z1[1]), (-1 / z1[0], -1 / z1[1])]
    dev = max(abs(hf.bergman_ratio_1dim(f, HnPoint.from_complex(w), ref) / base - 1) for w in moves)
    ok = identity and galois and unique and dev <= 1e-6
    record_criterion(8, ok, f"E_2^2=E_4 exact: {identity}; Galois: {galois}; S_6 one-dim: {unique}; ratio invariance dev {dev:.1e} (tol 1e-6)")
    assert ok


def test_criterion_9_reproducibility(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 2024\nweights = 12, 20\npoints = 2j, 0.25+1.1j\n")
    same = True
    for exp in ("heat-model", "oracle-compare", "hilbert-invariance"):
        args_cfg = [] if exp == "hilbert-invariance" else ["--config", str(cfg)]
        for run in ("a", "b"):
            cli.main([exp, *args_cfg, "--out", str(tmp_path / run)])
        for ext in ("csv", "json"):
            same &= (tmp_path / "a" / f"{exp}.{ext}").read_bytes() == (tmp_path / "b" / f"{exp}.{ext}").read_bytes()
    record_criterion(9, same, f"two consecutive runs bit-identical: {same}")
    assert same
