import csv
import json

import pytest

from bergmanlab import cli
from bergmanlab.errors import ConfigInvalid


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_curvature_check_default_passes(tmp_path):
    assert cli.main(["curvature-check", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "curvature-check.csv")
    assert rows and all(r["passed"] == "true" for r in rows)
    assert tuple(rows[0].keys()) == cli.COLUMNS


def test_hilbert_dims_table(tmp_path):
    assert cli.main(["hilbert-dims", "--k-max", "12", "--out", str(tmp_path)]) in (0, 1)
    rows = _rows(tmp_path / "hilbert-dims.csv")
    table = {}
    for r in rows:
        if r["label"] in ("dim M_k", "dim S_k"):
            table.setdefault(int(r["k"]), {})[r["label"]] = int(r["value"])
            assert r["passed"] == "true"
    got = [(k, v["dim M_k"], v["dim S_k"]) for k, v in sorted(table.items())]
    assert got == [(2, 1, 0), (4, 1, 0), (6, 2, 1), (8, 2, 1), (10, 3, 2), (12, 4, 3)]


def test_empty_weight_list_is_config_invalid(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("weights =\n")
    assert cli.main(["miller", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    with pytest.raises(ConfigInvalid):
        cli.build_config("gram", {"weights": ()}, {})


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key = 3\n")
    assert cli.main(["miller", "--config", str(bad)]) == 2
    bad.write_text("weights = 12, 13\n")
    assert cli.main(["miller", "--config", str(bad)]) == 2
    assert cli.main(["miller", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert cli.main(["not-an-experiment"]) == 2


def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comment\nweights = 12, 16..20  # inline\npoints = 1j, 0.25+1.1j\nseed = 7\ntolerance = 1e-3\n"
    )
    values = cli.parse_values(cli.read_config_file(cfg))
    c = cli.build_config("oracle-compare", values, {"seed": None})
    assert c.weights == (12, 16, 18, 20)
    assert c.points == (1j, 0.25 + 1.1j)
    assert c.seed == 7 and c.tolerance == 1e-3


def test_overrides_take_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("k_max = 20\n")
    assert cli.main(["hilbert-dims", "--config", str(cfg), "--k-max", "8", "--out", str(tmp_path)]) in (0, 1)
    data = json.loads((tmp_path / "hilbert-dims.json").read_text())
    assert data["config"]["k_max"] == 8


def test_exit_status_reflects_tolerances(tmp_path):
    assert cli.main(["miller", "--weights", "12..30", "--out", str(tmp_path)]) == 0
    # equidistribution at k=20 alone is far from its limit
    assert cli.main(["equidist", "--weights", "20", "--out", str(tmp_path)]) == 1


def test_reproducible_and_job_independent(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    args = ["heat-model", "--seed", "11"]
    cli.main(args + ["--out", str(a)])
    cli.main(args + ["--out", str(b)])
    assert (a / "heat-model.csv").read_bytes() == (b / "heat-model.csv").read_bytes()
    assert (a / "heat-model.json").read_bytes() == (b / "heat-model.json").read_bytes()
    args = ["oracle-compare", "--weights", "12,16", "--points", "2j, 0.25+1.1j"]
    cli.main(args + ["--out", str(a), "--jobs", "1"])
    cli.main(args + ["--out", str(c), "--jobs", "2"])
    assert (a / "oracle-compare.csv").read_bytes() == (c / "oracle-compare.csv").read_bytes()
    assert (a / "oracle-compare.json").read_bytes() == (c / "oracle-compare.json").read_bytes()


def test_seed_recorded(tmp_path):
    cli.main(["heat-model", "--seed", "5", "--out", str(tmp_path)])
    data = json.loads((tmp_path / "heat-model.json").read_text())
    assert data["seed"] == 5 and data["config"]["seed"] == 5
