import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from cmclab.cli import CSV_COLUMNS, main, read_mesh, read_table, validate_config, write_json
from cmclab.errors import SchemaError

ROUND_RUN = """
[group]
c = [2.0, 2.0, 2.0]

[mesh]
level = 3
coarse_level = 2

[continuation]
H_start = 20.0
H_targets = [2.0, 0.0]
step = 2.0
max_step = 6.0

[output]
directory = "{out}"
formats = ["off", "obj"]
"""


def write_config(tmp_path, text, name="run.toml", **fmt):
    path = tmp_path / name
    path.write_text(text.format(out=tmp_path / "out", **fmt))
    return path


@pytest.fixture(scope="module")
def round_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("round")
    cfg = write_config(tmp, ROUND_RUN)
    code = main(["run", str(cfg)])
    return code, cfg, tmp / "out"


# ---------------------------------------------------------------------------
# configuration schema
# ---------------------------------------------------------------------------


def test_minimal_config_gets_defaults():
    cfg = validate_config({"group": {"c": [2, 2, 1]}, "continuation": {"H_start": 20.0, "H_targets": [1.0]}})
    assert cfg.level == 4 and cfg.coarse_level == 3
    assert cfg.formats == ["off", "obj"]
    assert cfg.certificates["qh"] is True


@pytest.mark.parametrize(
    "raw, fragment",
    [
        ({"group": {"c": [1, -1, -1]}, "continuation": {"H_start": 20.0, "H_targets": [1.0]}}, "negative"),
        ({"group": {"c": [2, 2, 2]}, "continuation": {"H_start": 20.0, "H_targets": [1.0]}, "foo": {}}, "foo"),
        ({"group": {"c": [2, 2, 2], "foo": 1}, "continuation": {"H_start": 20.0, "H_targets": [1.0]}}, "group.foo"),
        ({"group": {"c": [2, 2, 2]}, "continuation": {"H_targets": [1.0]}}, "H_start"),
        ({"group": {"c": [2, 2, 2]}, "continuation": {"H_start": "20", "H_targets": [1.0]}}, "number"),
        ({"continuation": {"H_start": 20.0, "H_targets": [1.0]}}, "group"),
    ],
)
def test_schema_errors_name_the_problem(raw, fragment):
    with pytest.raises(SchemaError) as info:
        validate_config(raw)
    assert fragment in str(info.value)
    assert info.value.exit_code == 2


def test_config_hash_ignores_key_order():
    a = validate_config({"group": {"c": [2, 2, 1]}, "continuation": {"H_start": 20.0, "H_targets": [1.0]}})
    b = validate_config({"continuation": {"H_targets": [1.0], "H_start": 20.0}, "group": {"c": [2, 2, 1]}})
    assert a.config_hash == b.config_hash


def test_schema_error_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, ROUND_RUN.replace("[mesh]", "[mesh]\nfoo = 1"))
    assert main(["run", str(cfg)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert "foo" in json.dumps(err)


def test_malformed_toml_is_a_schema_error(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[group\nc = 1")
    assert main(["classify", str(cfg)]) == 2


def test_missing_config_file(tmp_path):
    assert main(["classify", str(tmp_path / "nope.toml")]) == 2


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


def test_classify_berger(tmp_path, capsys):
    cfg = write_config(tmp_path, "[group]\nc = [1.0, 2.0, 2.0]\n[continuation]\nH_start = 20.0\nH_targets = [1.0, 0.0]\n")
    assert main(["classify", str(cfg)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["canonical"]["c"] == [2.0, 2.0, 1.0]
    assert out["lie_type"] == "SU(2)"
    assert out["isometry_dimension"] == 4
    assert all(out["potential_nonvanishing"].values())
    assert out["reachable_limit"] is None


def test_classify_reports_unreachable_range(tmp_path, capsys):
    cfg = write_config(tmp_path, "[group]\nc = [1.0, -1.0, 0.0]\n[continuation]\nH_start = 20.0\nH_targets = [0.0]\n")
    assert main(["classify", str(cfg)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["potential_nonvanishing"]["0"] is False
    assert out["reachable_limit"] is not None


def test_classify_nonunimodular(tmp_path, capsys):
    cfg = write_config(tmp_path, "[group]\na = 0.0\nb = 0.0\n[continuation]\nH_start = 20.0\nH_targets = [2.0]\n")
    assert main(["classify", str(cfg)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["isometry_dimension"] == 6


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def test_run_succeeds_and_writes_artifacts(round_run):
    code, _, out = round_run
    assert code == 0
    names = {p.name for p in out.iterdir()}
    assert {"family_table.csv", "certificates.json"} <= names
    assert any(n.endswith(".off") for n in names) and any(n.endswith(".obj") for n in names)


def test_table_columns_and_rows(round_run):
    _, _, out = round_run
    with open(out / "family_table.csv") as fh:
        lines = [l for l in fh if not l.startswith("#")]
    reader = csv.DictReader(lines)
    assert reader.fieldnames == CSV_COLUMNS
    rows = list(reader)
    Hs = [float(r["H"]) for r in rows]
    assert Hs[0] == 20.0 and Hs[-1] == 0.0
    assert np.all(np.diff(Hs) < 0)
    assert len(read_table(out / "family_table.csv")) == len(rows)


def test_certificates_content(round_run):
    _, _, out = round_run
    rep = json.loads((out / "certificates.json").read_text())
    assert rep["status"] == "ok"
    recorded = [s for s in rep["spheres"] if s["recorded"]]
    assert len(recorded) == 2
    for s in recorded:
        assert s["level"] == 3
        assert s["gauss_degree"]["degree"] == 1
        assert s["embedded"]["embedded"]
        assert s["symmetry"]["passed"]
    minimal = [s for s in recorded if s["H"] == 0.0][0]
    assert minimal["minimal_structure"]["composition_residual"] < 1e-10


def test_off_header_and_counts(round_run):
    _, _, out = round_run
    path = next(out.glob("*.off"))
    lines = path.read_text().splitlines()
    assert lines[0] in ("OFF", "4OFF")
    V, F, comments = read_mesh(path)
    assert V.shape == (642, 4) and F.shape == (1280, 3)
    assert any(c.startswith("config_sha256=") for c in comments)
    V2, F2, _ = read_mesh(path.with_suffix(".obj"))
    assert np.array_equal(F, F2)
    assert np.allclose(V[:, :3], V2[:, :3], atol=1e-9) or V2.shape[1] == 3


def test_json_round_trip(tmp_path):
    payload = {"x": np.float64(1.5), "v": np.arange(3), "nested": {"ok": np.bool_(True)}}
    write_json(tmp_path / "a.json", payload)
    back = json.loads((tmp_path / "a.json").read_text())
    assert back == {"x": 1.5, "v": [0, 1, 2], "nested": {"ok": True}}


def test_run_is_deterministic(round_run, tmp_path):
    _, cfg, out = round_run
    text = cfg.read_text().replace(str(out), str(tmp_path / "again"))
    cfg2 = tmp_path / "run.toml"
    cfg2.write_text(text)
    # identical raw config apart from the output directory
    assert main(["run", str(cfg2)]) == 0
    a = [l for l in (out / "family_table.csv").read_text().splitlines() if not l.startswith("#")]
    b = [l for l in (tmp_path / "again" / "family_table.csv").read_text().splitlines() if not l.startswith("#")]
    assert a == b
    off = next(out.glob("*.off")).name
    strip = lambda p: [l for l in p.read_text().splitlines() if "config_sha256" not in l]
    assert strip(out / off) == strip(tmp_path / "again" / off)


def test_numerical_failure_exit_code(tmp_path, capsys):
    text = "[group]\nc = [1.0, -1.0, 0.0]\n[mesh]\nlevel = 2\ncoarse_level = 2\n[continuation]\nH_start = 20.0\nH_targets = [0.0]\n[output]\ndirectory = \"{out}\"\n"
    cfg = write_config(tmp_path, text)
    assert main(["run", str(cfg)]) == 3
    err = json.loads(capsys.readouterr().err)
    assert "diagnostics" in err
    rep = json.loads((tmp_path / "out" / "certificates.json").read_text())
    assert rep["status"] == "failed"


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


def test_certify_written_mesh(round_run, capsys):
    _, cfg, out = round_run
    mesh = next(out.glob("*.off"))
    assert main(["certify", str(mesh), str(cfg)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["embedded"]["embedded"]
    assert res["symmetry"]["passed"]


def test_certify_rejects_foreign_mesh(round_run, tmp_path):
    _, cfg, _ = round_run
    bad = tmp_path / "tri.off"
    bad.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
    assert main(["certify", str(bad), str(cfg)]) == 2


# ---------------------------------------------------------------------------
# console script and environment
# ---------------------------------------------------------------------------


def run_console(args, **env):
    full = dict(os.environ, **env)
    return subprocess.run([sys.executable, "-m", "cmclab.cli", *args], capture_output=True, text=True, env=full)


def test_console_classify_with_threads(round_run):
    _, cfg, _ = round_run
    proc = run_console(["classify", str(cfg)], CMCLAB_THREADS="1")
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["lie_type"] == "SU(2)"


@pytest.mark.parametrize("value", ["0", "two", "-3"])
def test_invalid_thread_count_is_a_schema_error(round_run, value):
    _, cfg, _ = round_run
    proc = run_console(["classify", str(cfg)], CMCLAB_THREADS=value)
    assert proc.returncode == 2
    assert "CMCLAB_THREADS" in proc.stderr
