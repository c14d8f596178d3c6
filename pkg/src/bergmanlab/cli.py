"""Command-line experiment runner.

Every subcommand writes ``<out>/<experiment>.csv`` (columns :data:`COLUMNS`)
and ``<out>/<experiment>.json`` and exits with 0 when every declared
tolerance holds, 1 otherwise and 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import bergman1, heat_model
from .errors import BergmanLabError, ConfigInvalid
from .geometry import CurvatureSpec, HnPoint, HPoint, det_curvature, fd_curvature_check
from .modforms1 import cusp_rank_bruteforce, dim_cusp, is_echelon, miller_basis

COLUMNS = (
    "experiment",
    "k",
    "z1_x",
    "z1_y",
    "z2_x",
    "z2_y",
    "label",
    "value",
    "oracle",
    "abs_dev",
    "rel_dev",
    "tolerance",
    "passed",
)

EXPERIMENTS = (
    "curvature-check",
    "heat-model",
    "miller",
    "gram",
    "bergman-scan",
    "bergman-fit",
    "oracle-compare",
    "equidist",
    "hilbert-dims",
    "hilbert-eisenstein",
    "hilbert-invariance",
)

# per-experiment defaults for keys left unset
DEFAULTS: dict[str, dict] = {
    "curvature-check": {"w_values": (Fraction(1, 2), Fraction(2)), "n_values": (1, 2, 3), "n_points": 20, "tolerance": 1e-6},
    "heat-model": {"n_spectra": 100, "n_values": (1, 2, 3), "tolerance": 1e-4},
    "miller": {"weights": tuple(range(12, 41, 2))},
    "gram": {"weights": (12, 16, 20, 24), "tolerance": 1e-8},
    "bergman-scan": {"weights": tuple(range(20, 61, 2)), "y_max": 2.0},
    "bergman-fit": {"weights": tuple(range(20, 81, 2)), "y_max": 2.0},
    "oracle-compare": {
        "weights": (12, 16, 18, 20, 22, 26),
        "points": (1j, 2j, 0.25 + 1.1j),
        "tolerance": 1e-3,
    },
    "equidist": {"weights": (20, 60), "points": (1j, 0.3 + 1.5j, 2j), "tolerance": 0.25},
    "hilbert-dims": {"k_max": 40, "fit_min": 20, "fit_max": 80},
    "hilbert-eisenstein": {"T": 20, "weights": (2, 4, 6, 8, 10, 12)},
    "hilbert-invariance": {
        "T": 25,
        "points": ((0.13 + 0.85j, -0.21 + 1.9j), (0.31 + 1.2j, 0.05 + 0.95j)),
        "tolerance": 1e-6,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved parameters of one run; unset fields take per-experiment defaults."""

    experiment: str
    weights: tuple[int, ...] = ()
    points: tuple = ()
    w_values: tuple[Fraction, ...] = ()
    n_values: tuple[int, ...] = ()
    n_points: int = 20
    n_spectra: int = 100
    nx: int = 50
    ny: int = 50
    quad_nx: int = 40
    quad_ny: int = 40
    quad_y: float = 1.0
    y_max: float = 2.0
    T: int = 20
    k_max: int = 40
    fit_min: int = 20
    fit_max: int = 80
    tolerance: float = 1e-6
    seed: int = 0
    out: str = "results"
    jobs: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigInvalid(f"unknown experiment {self.experiment!r}")
        uses_weights = self.experiment in ("miller", "gram", "bergman-scan", "bergman-fit", "oracle-compare", "equidist", "hilbert-eisenstein")
        if uses_weights and not self.weights:
            raise ConfigInvalid("weight list is empty")
        if any(k < 2 or k % 2 for k in self.weights):
            raise ConfigInvalid("weights must be even and >= 2")
        if self.experiment in ("oracle-compare", "equidist", "hilbert-invariance") and not self.points:
            raise ConfigInvalid("point list is empty")
        if self.jobs < 1 or self.nx < 2 or self.ny < 2 or self.n_points < 1 or self.n_spectra < 1:
            raise ConfigInvalid("jobs, grid sizes and sample counts must be positive")
        if self.quad_nx < 8 or self.quad_ny < 8 or self.quad_y < 1.0:
            raise ConfigInvalid("quadrature needs orders >= 8 and quad_y >= 1")
        if not self.tolerance > 0 or self.T < 1 or self.k_max < 2:
            raise ConfigInvalid("tolerance, T and k_max must be positive")
        if self.experiment == "curvature-check" and any(w <= 0 for w in self.w_values):
            raise ConfigInvalid("curvature weights must be positive")
        if self.experiment in ("curvature-check", "heat-model") and any(n < 1 for n in self.n_values):
            raise ConfigInvalid("n_values must be positive")
        if self.experiment == "hilbert-invariance" and any(len(p) != 2 for p in self.points):
            raise ConfigInvalid("hilbert points need two coordinates")
        if self.experiment in ("oracle-compare", "equidist") and any(isinstance(p, tuple) or p.imag <= 0 for p in self.points):
            raise ConfigInvalid("points must lie in the upper half-plane")
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d["w_values"] = [str(w) for w in self.w_values]
        d["points"] = [_point_str(p) for p in self.points]
        # neither affects results
        d.pop("jobs")
        d.pop("out")
        return d


def _point_str(p) -> str:
    if isinstance(p, tuple):
        return ";".join(_point_str(q) for q in p)
    return f"{p.real!r}{p.imag:+}j"


# --------------------------------------------------------------------------- config parsing


def _parse_list(text: str, conv: Callable) -> tuple:
    items = [s.strip() for s in text.replace("\n", ",").split(",")]
    return tuple(conv(s) for s in items if s)


def _parse_point(text: str):
    parts = [s.strip() for s in text.split(";")]
    if len(parts) == 1:
        return complex(parts[0].replace(" ", ""))
    return tuple(complex(s.replace(" ", "")) for s in parts)


def _parse_weights(text: str) -> tuple[int, ...]:
    # "20..60" expands to the even weights in the range
    out = []
    for item in _parse_list(text, str):
        if ".." in item:
            lo, hi = (int(v) for v in item.split(".."))
            out.extend(range(lo + (lo % 2), hi + 1, 2))
        else:
            out.append(int(item))
    return tuple(out)


PARSERS: dict[str, Callable[[str], object]] = {
    "weights": _parse_weights,
    "points": lambda s: _parse_list(s, _parse_point),
    "w_values": lambda s: _parse_list(s, Fraction),
    "n_values": lambda s: _parse_list(s, int),
    "n_points": int,
    "n_spectra": int,
    "nx": int,
    "ny": int,
    "quad_nx": int,
    "quad_ny": int,
    "quad_y": float,
    "y_max": float,
    "T": int,
    "k_max": int,
    "fit_min": int,
    "fit_max": int,
    "tolerance": float,
    "seed": int,
    "out": str,
}


def read_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` file; ``#`` comments, lists comma separated."""
    parser = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    try:
        text = Path(path).read_text(encoding="utf-8")
        parser.read_string("[config]\n" + text)
    except (OSError, configparser.Error) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    return dict(parser["config"])


def parse_values(raw: dict) -> dict:
    out = {}
    for key, text in raw.items():
        if key not in PARSERS:
            raise ConfigInvalid(f"unknown config key {key!r}")
        try:
            out[key] = PARSERS[key](text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigInvalid(f"bad value for {key}: {text!r}") from exc
    return out


def build_config(experiment: str, file_values: dict, overrides: dict) -> ExperimentConfig:
    values = dict(DEFAULTS.get(experiment, {}))
    values.update(file_values)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(experiment=experiment, **values).validate()


# --------------------------------------------------------------------------- records


@dataclass(frozen=True)
class Record:
    label: str
    value: float
    oracle: float | None = None
    tolerance: float | None = None
    passed: bool = True
    k: int | None = None
    z1: complex | None = None
    z2: complex | None = None
    relative: bool = True

    def deviations(self) -> tuple[float | None, float | None]:
        if self.oracle is None:
            return None, None
        a = abs(self.value - self.oracle)
        r = a / abs(self.oracle) if self.oracle != 0 else (0.0 if a == 0 else math.inf)
        return a, r


def compare(label, value, oracle, tolerance, relative=True, **kw) -> Record:
    """Record with ``passed`` from the relative (or absolute) deviation."""
    value, oracle = float(value), float(oracle)
    rec = Record(label, value, oracle, tolerance, True, relative=relative, **kw)
    a, r = rec.deviations()
    dev = r if relative else a
    return replace(rec, passed=bool(dev <= tolerance))


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list[Record] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.records:
            a, rel = r.deviations()
            w.writerow(
                [
                    self.config.experiment,
                    _fmt(r.k),
                    _fmt(None if r.z1 is None else r.z1.real),
                    _fmt(None if r.z1 is None else r.z1.imag),
                    _fmt(None if r.z2 is None else r.z2.real),
                    _fmt(None if r.z2 is None else r.z2.imag),
                    r.label,
                    _fmt(r.value),
                    _fmt(r.oracle),
                    _fmt(a),
                    _fmt(rel),
                    _fmt(r.tolerance),
                    "true" if r.passed else "false",
                ]
            )
        return buf.getvalue()

    def json_obj(self) -> dict:
        return {
            "experiment": self.config.experiment,
            "seed": self.config.seed,
            "config": self.config.echo(),
            "n_records": len(self.records),
            "n_failed": sum(not r.passed for r in self.records),
            "passed": self.passed,
            "summary": _jsonable(self.summary),
        }

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        name = self.config.experiment
        csv_path = out / f"{name}.csv"
        json_path = out / f"{name}.json"
        csv_path.write_text(self.csv_text(), encoding="utf-8")
        json_path.write_text(json.dumps(self.json_obj(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
        return csv_path, json_path


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return _point_str(obj)
    return obj


def _pmap(fn, items: Sequence, jobs: int) -> list:
    # ordered results regardless of the worker count
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# --------------------------------------------------------------------------- experiments


def run_curvature(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg)
    rng = np.random.default_rng(cfg.seed)
    for w in cfg.w_values:
        for n in cfg.n_values:
            spec = CurvatureSpec(w, n)
            expected = float(w) / bergman1.FOUR_PI
            for _ in range(cfg.n_points):
                xs = rng.uniform(-0.5, 0.5, n)
                ys = rng.uniform(0.5, 5.0, n)
                p = HnPoint(tuple(HPoint(float(a), float(b)) for a, b in zip(xs, ys)))
                h = float(ys.min()) / 50.0
                vals = fd_curvature_check(spec, p, h)
                for c, v in zip(p.coords, vals):
                    rep.records.append(compare(f"c1 w={w} n={n}", v, expected, cfg.tolerance, z1=c.z))
            # exact constant
            closed = {Fraction(1, 2): 1.0 / (8.0 * math.pi), Fraction(2): 1.0 / (2.0 * math.pi)}.get(w, expected)
            det = det_curvature(spec)
            rep.records.append(
                Record(f"det w={w} n={n}", det, closed**n, 0.0, det == closed**n, relative=False)
            )
    rep.summary = {"max_rel_dev": max((r.deviations()[1] for r in rep.records), default=0.0)}
    return rep


def run_heat(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg)
    rng = np.random.default_rng(cfg.seed)
    ts = np.logspace(-2, 2, 20)
    worst = {"dominance": -math.inf, "monotone": -math.inf, "tail_slack": math.inf}
    for s in range(cfg.n_spectra):
        spec = heat_model.random_spectrum(rng)
        b = heat_model.bergman_from_spectrum(spec)
        heats = [heat_model.synthetic_heat(spec, float(t)) for t in ts]
        excess = max(b - h for h in heats)
        rise = max(h1 - h0 for h0, h1 in zip(heats, heats[1:]))
        gap = heats[-1] - b
        # analytic tail plus the rounding unit of the two float sums being differenced
        bound = heat_model.heat_tail_bound(spec, float(ts[-1])) + 2.0 * sys.float_info.epsilon * heats[-1]
        worst["dominance"] = max(worst["dominance"], excess)
        worst["monotone"] = max(worst["monotone"], rise)
        worst["tail_slack"] = min(worst["tail_slack"], bound - gap)
        rep.records.append(Record(f"spectrum {s}: max(B - H)", excess, 0.0, 0.0, excess <= 0.0, relative=False))
        rep.records.append(Record(f"spectrum {s}: max rise of H", rise, 0.0, 0.0, rise <= 0.0, relative=False))
        rep.records.append(Record(f"spectrum {s}: H(t_max) - B", gap, 0.0, bound, 0.0 <= gap <= bound, relative=False))
    t0 = 1e-3
    for n in cfg.n_values:
        model = heat_model.SpectrumModel(tuple(rng.uniform(0.1, 5.0, n).tolist()))
        scaled = (4.0 * math.pi * t0) ** n * heat_model.bouche_density(model, t0)
        rep.records.append(compare(f"small-t law n={n}", scaled, 1.0, cfg.tolerance, relative=False))
    rep.summary = worst
    return rep


def run_miller(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg)
    for k in cfg.weights:
        d = dim_cusp(k)
        basis = miller_basis(k, max(d + 5, 2 * d + 2))
        rank = cusp_rank_bruteforce(k)
        rep.records.append(Record("dim S_k vs monomial rank", d, rank, 0.0, d == rank, k=k, relative=False))
        ok = is_echelon(basis)
        rep.records.append(Record("echelon", float(ok), 1.0, 0.0, ok, k=k, relative=False))
    return rep


def _gram_worker(args):
    k, quad = args
    basis = bergman1.cusp_basis_for(k)
    g = bergman1.gram(basis, quad)
    onb = bergman1.orthonormalize(basis, g)
    rel = float(np.max(g.quad_error / np.sqrt(np.outer(np.diag(g.entries).real, np.diag(g.entries).real))))
    return k, g.dim, rel, onb.residual, float(np.linalg.cond(g.entries))


def _quad(cfg: ExperimentConfig) -> bergman1.QuadratureParams:
    return bergman1.QuadratureParams(cfg.quad_nx, cfg.quad_ny, cfg.quad_y)


def run_gram(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg)
    quad = _quad(cfg)
    for k, d, rel, resid, cond in _pmap(_gram_worker, [(k, quad) for k in cfg.weights if dim_cusp(k)], cfg.jobs):
        rep.records.append(Record("normalised quadrature error", rel, None, cfg.tolerance, rel <= cfg.tolerance, k=k))
        rep.records.append(Record("orthonormality residual", resid, 0.0, cfg.tolerance, resid <= cfg.tolerance, k=k, relative=False))
        rep.summary[str(k)] = {"dim": d, "condition": cond}
    return rep


def _scan_worker(args):
    k, quad, y_max, nx, ny, both = args
    onb = bergman1.build_onb(k, quad)
    compact = bergman1.sup_scan(k, onb, y_max=y_max, nx=nx, ny=ny)
    full = bergman1.sup_scan(k, onb, y_max=None, nx=nx, ny=ny) if both else None
    return k, compact, full


def run_bergman_scan(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg)
    bound = 1.0 / (2.0 * math.pi)
    jobs = [(k, _quad(cfg), cfg.y_max, cfg.nx, cfg.ny, False) for k in cfg.weights if dim_cusp(k)]
    for k, sc, _ in _pmap(_scan_worker, jobs, cfg.jobs):
        v = sc.sup / k
        z = complex(*sc.argmax)
        rep.records.append(Record("sup B_k / k over y <= y_max", v, None, bound, v <= bound, k=k, z1=z))
    rep.summary = {"bound": bound, "violations": sum(not r.passed for r in rep.records)}
    return rep


def run_bergman_fit(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg)
    jobs = [(k, _quad(cfg), cfg.y_max, cfg.nx, cfg.ny, True) for k in cfg.weights if dim_cusp(k)]
    compact, full = [], []
    for k, sc, sf in _pmap(_scan_worker, jobs, cfg.jobs):
        compact.append((k, sc.sup))
        full.append((k, sf.sup))
        rep.records.append(Record("sup over y <= y_max", sc.sup, k=k, z1=complex(*sc.argmax)))
        rep.records.append(Record("sup over full-domain proxy", sf.sup, k=k, z1=complex(*sf.argmax)))
    fc = bergman1.scaling_fit(compact)
    ff = bergman1.scaling_fit(full)
    rep.records.append(compare("exponent compact", fc.exponent, 1.0, 0.2, relative=False))
    rep.records.append(compare("exponent full", ff.exponent, 1.5, 0.25, relative=False))
    rep.summary = {"compact": asdict(fc), "full": asdict(ff)}
    return rep


def _oracle_worker(args):
    k, quad, points = args
    onb = bergman1.build_onb(k, quad)
    return k, [(z, bergman1.bergman_point(k, z, onb), bergman1.bergman_series(k, z)) for z in points]


def run_oracle_compare(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg)
    jobs = [(k, _quad(cfg), cfg.points) for k in cfg.weights if dim_cusp(k)]
    for k, rows in _pmap(_oracle_worker, jobs, cfg.jobs):
        for z, quad_val, series_val in rows:
            rep.records.append(compare("quadrature vs series", quad_val, series_val, cfg.tolerance, k=k, z1=z))
    return rep


def _equidist_worker(args):
    k, quad, points = args
    return k, bergman1.equidist_check(k, points, bergman1.build_onb(k, quad))


def run_equidist(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg)
    jobs = [(k, _quad(cfg), cfg.points) for k in cfg.weights]
    worst = {}
    for k, recs in _pmap(_equidist_worker, jobs, cfg.jobs):
        for r in recs:
            rep.records.append(Record("B_k vol / j_k", r.ratio, 1.0, None, True, k=k, z1=r.z))
        worst[k] = max(r.deviation for r in recs)
    ks = sorted(worst)
    last = ks[-1]
    rep.records.append(Record("max deviation at largest k", worst[last], 0.0, cfg.tolerance, worst[last] <= cfg.tolerance, k=last, relative=False))
    if len(ks) > 1:
        trend = worst[last] < worst[ks[0]]
        rep.records.append(Record("deviation decreases", worst[last] - worst[ks[0]], 0.0, 0.0, trend, k=last, relative=False))
    rep.summary = {"max_deviation": worst}
    return rep


def run_hilbert_dims(cfg: ExperimentConfig) -> ExperimentReport:
    from .hilbert2.forms import dim_hilbert_series, hilbert_series_coefficients

    rep = ExperimentReport(cfg)
    top = max(cfg.k_max, cfg.fit_max)
    series = hilbert_series_coefficients(top)
    table = []
    for k in range(2, cfg.k_max + 1, 2):
        m, s = dim_hilbert_series(k)
        table.append((k, m, s))
        rep.records.append(Record("dim M_k", m, series[k], 0.0, m == series[k], k=k, relative=False))
        rep.records.append(Record("dim S_k", s, series[k] - 1, 0.0, s == series[k] - 1, k=k, relative=False))
    samples = [(k, dim_hilbert_series(k)[1]) for k in range(cfg.fit_min + cfg.fit_min % 2, cfg.fit_max + 1, 2)]
    fit = bergman1.scaling_fit(samples)
    rep.records.append(compare("exponent of j_k", fit.exponent, 2.0, 0.1, relative=False))
    rep.summary = {"table": table, "fit": asdict(fit)}
    return rep


def run_hilbert_eisenstein(cfg: ExperimentConfig) -> ExperimentReport:
    from .hilbert2 import forms as hf

    rep = ExperimentReport(cfg)
    T = cfg.T
    e2, e4 = hf.eisenstein_hmf(2, T), hf.eisenstein_hmf(4, T)
    sq = e2 * e2
    bad = sum(sq.coeffs[i] != e4.coeffs[i] for i in e4.coeffs) + (sq.constant != e4.constant)
    rep.records.append(Record("E_2^2 - E_4 mismatches", bad, 0.0, 0.0, bad == 0, k=4, relative=False))
    for k in cfg.weights:
        z = hf.zeta_k(k)
        ok = z == hf.dedekind_zeta_neg(k)
        rep.records.append(Record("zeta_K(1-k) table vs Bernoulli", float(z), float(hf.dedekind_zeta_neg(k)), 0.0, ok, k=k, relative=False))
        sym = hf.eisenstein_hmf(k, T).is_galois_symmetric()
        rep.records.append(Record("Galois symmetry", float(sym), 1.0, 0.0, sym, k=k, relative=False))
    ranks = {}
    for k in (4, 6, 8, 10, 12):
        r = hf.span_rank(hf.eisenstein_monomials(k, min(T, 12)))
        m = hf.dim_hilbert_series(k)[0]
        ranks[k] = r
        rep.records.append(Record("rank of Eisenstein products", r, m, 0.0, r == m, k=k, relative=False))
    e6 = hf.eisenstein_hmf(6, T)
    cusp = hf.cusp_project([e2 * e2 * e2, e2 * e4, e6])
    n = len(cusp)
    rep.records.append(Record("dim of weight-6 cusp span", n, 1.0, 0.0, n == 1, k=6, relative=False))
    if cusp:
        f = cusp[0]
        ok = f.constant == 0 and f.leading_index() is not None and f[f.leading_index()] == 1 and f.is_galois_symmetric()
        rep.records.append(Record("weight-6 cusp form normalised", float(ok), 1.0, 0.0, ok, k=6, relative=False))
        rep.summary["cusp6_head"] = [[str(i.nu.a), str(i.nu.b), str(f[i])] for i in list(f.coeffs)[:8]]
    rep.summary["ranks"] = ranks
    return rep


def run_hilbert_invariance(cfg: ExperimentConfig) -> ExperimentReport:
    from .hilbert2 import forms as hf
    from .hilbert2.field import PHI1, PHI2

    rep = ExperimentReport(cfg)
    f = hf.weight6_cusp_form(cfg.T)

    def P(z1, z2):
        return HnPoint.from_complex([z1, z2])

    ref = P(*cfg.points[-1])
    moves = {
        "translate by 1": lambda a, b: (a + 1, b + 1),
        "translate by phi": lambda a, b: (a + PHI1, b + PHI2),
        "unit scaling phi^2": lambda a, b: (PHI1**2 * a, PHI2**2 * b),
        "inversion": lambda a, b: (-1 / a, -1 / b),
    }
    for z1, z2 in cfg.points[:-1]:
        base = hf.bergman_ratio_1dim(f, P(z1, z2), ref)
        for name, mv in moves.items():
            w1, w2 = mv(z1, z2)
            r = hf.bergman_ratio_1dim(f, P(w1, w2), ref)
            rep.records.append(compare(f"ratio under {name}", r, base, cfg.tolerance, k=6, z1=w1, z2=w2))
        v0 = hf.evaluate_hmf(f, P(z1, z2))
        vt = hf.evaluate_hmf(f, P(z1 + PHI1, z2 + PHI2))
        rep.records.append(compare("f under translation by phi", abs(vt - v0), 0.0, 1e-10, relative=False, k=6, z1=z1, z2=z2))
    a = hf.evaluate_hmf(hf.eisenstein_hmf(2, 15), P(1j, 1j))
    b = hf.evaluate_hmf(hf.eisenstein_hmf(2, 25), P(1j, 1j))
    rep.records.append(compare("E_2(i,i) cutoff 15 vs 25", a.real, b.real, 1e-8, k=2, z1=1j, z2=1j))
    return rep


RUNNERS: dict[str, Callable[[ExperimentConfig], ExperimentReport]] = {
    "curvature-check": run_curvature,
    "heat-model": run_heat,
    "miller": run_miller,
    "gram": run_gram,
    "bergman-scan": run_bergman_scan,
    "bergman-fit": run_bergman_fit,
    "oracle-compare": run_oracle_compare,
    "equidist": run_equidist,
    "hilbert-dims": run_hilbert_dims,
    "hilbert-eisenstein": run_hilbert_eisenstein,
    "hilbert-invariance": run_hilbert_invariance,
}


def run(cfg: ExperimentConfig) -> ExperimentReport:
    return RUNNERS[cfg.experiment](cfg)


# --------------------------------------------------------------------------- entry point


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bergmanlab", description="Bergman kernel experiments for modular and Hilbert modular forms.")
    sub = ap.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help="output directory (default: results)")
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--weights", help="comma list of even weights, ranges as lo..hi")
        p.add_argument("--points", help="comma list of points; Hilbert points as z1;z2")
        p.add_argument("--k-max", dest="k_max", type=int)
        p.add_argument("--T", dest="T", type=int, help="trace cutoff for Hilbert expansions")
        p.add_argument("--tolerance", type=float)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        file_values = parse_values(read_config_file(args.config)) if args.config else {}
        raw = {k: getattr(args, k) for k in ("weights", "points") if getattr(args, k) is not None}
        overrides = parse_values(raw)
        overrides.update({"seed": args.seed, "out": args.out, "k_max": args.k_max, "T": args.T, "tolerance": args.tolerance})
        overrides["jobs"] = args.jobs
        cfg = build_config(args.experiment, file_values, overrides)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TypeError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(cfg)
    except BergmanLabError as exc:
        print(f"{cfg.experiment}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    csv_path, json_path = report.write(cfg.out)
    n_fail = sum(not r.passed for r in report.records)
    print(f"{cfg.experiment}: {len(report.records)} records, {n_fail} failed -> {csv_path}, {json_path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
