import csv
import io
import json
import os
import shutil
import xml.etree.ElementTree as ET

import pytest

from getgrasp import cli
from getgrasp.scenario_file import ScenarioFileError, example_suite_path, parse_scenario_text

HERE = os.path.dirname(__file__)
GOLDEN = os.path.join(HERE, "golden")
SVG = "{http://www.w3.org/2000/svg}"

SMALL = """\
config:
  cone_edges: 8
grippers:
  - name: get
    arrangement: v_pair_plus_single
    finger: {length: 80.0, width_base: 12.0, width_tip: 6.0}
    v_half_angle: 15.0
    base_separation: 60.0
    jaw_opening_max: 90.0
    f_max: 15.0
  - name: flat
    arrangement: flat_pair
    finger: {length: 80.0, width_base: 12.0, width_tip: 12.0}
    jaw_opening_max: 90.0
    f_max: 15.0
objects:
  - name: ball
    shape: {type: sphere, r: 20.0}
    mass: 0.2
    mu: 0.5
scenarios:
  - name: ball
    object: ball
"""


def write(tmp_path, text, name="suite.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# --- analyze ----------------------------------------------------------------


def test_analyze_strict_success(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["analyze", write(tmp_path, SMALL), "--out", str(out), "--strict"]) == 0
    assert sorted(os.listdir(out)) == ["report.csv", "report.jsonl", "summary.json"]
    rows = [json.loads(line) for line in (out / "report.jsonl").read_text().splitlines()]
    assert [(r["scenario"], r["gripper"]) for r in rows] == [("ball", "get"), ("ball", "flat")]
    assert all(len(r["hash"]) == 16 for r in rows)


def test_analyze_format_subsets(tmp_path):
    p = write(tmp_path, SMALL)
    assert cli.main(["analyze", p, "--out", str(tmp_path / "j"), "--format", "json"]) == 0
    assert sorted(os.listdir(tmp_path / "j")) == ["report.jsonl", "summary.json"]
    assert cli.main(["analyze", p, "--out", str(tmp_path / "c"), "--format", "csv"]) == 0
    assert os.listdir(tmp_path / "c") == ["report.csv"]


def test_unknown_key_reports_name_and_line(tmp_path, capsys):
    bad = SMALL.replace("    mu: 0.5\n", "    frictionn: 0.5\n")
    assert cli.main(["analyze", write(tmp_path, bad), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    line = bad.splitlines().index("    frictionn: 0.5") + 1
    assert "frictionn" in err and f"line {line}:" in err
    assert not (tmp_path / "o").exists()


def test_schema_lists_every_error():
    bad = SMALL.replace("    mu: 0.5\n", "    frictionn: 0.5\n").replace("r: 20.0", "r: big")
    with pytest.raises(ScenarioFileError) as e:
        parse_scenario_text(bad)
    msgs = e.value.errors
    assert len(msgs) == 2
    assert any("frictionn" in m for m in msgs) and any("shape.r" in m for m in msgs)


@pytest.mark.parametrize("mutate, fragment", [
    (lambda t: t.replace("object: ball", "object: bat"), "unknown object 'bat'"),
    (lambda t: t.replace("type: sphere", "type: torus"), "unknown shape 'torus'"),
    (lambda t: t.replace("arrangement: flat_pair", "arrangement: trio"), "unknown arrangement"),
    (lambda t: t.replace("    f_max: 15.0\n  - name: flat", "    f_max: -1\n  - name: flat"), "invalid value"),
    (lambda t: t.replace("  - name: flat\n", "  - name: get\n"), "duplicate name"),
    (lambda t: t.replace("    shape: {type: sphere, r: 20.0}\n", ""), "missing required key 'shape'"),
])
def test_semantic_errors(mutate, fragment):
    with pytest.raises(ScenarioFileError) as e:
        parse_scenario_text(mutate(SMALL))
    assert any(fragment in m for m in e.value.errors)
    assert all(m.startswith("line ") for m in e.value.errors)


def test_missing_file(tmp_path, capsys):
    assert cli.main(["analyze", str(tmp_path / "nope.yaml")]) == 2
    assert "nope.yaml" in capsys.readouterr().err


def test_invalid_yaml(tmp_path):
    assert cli.main(["analyze", write(tmp_path, "grippers: [\n"), "--out", str(tmp_path / "o")]) == 2


def test_usage_errors_exit_2(tmp_path):
    assert cli.main([]) == 2
    assert cli.main(["analyze", write(tmp_path, SMALL), "--cone-edges", "2"]) == 2


def test_row_failure_exit_3_only_when_strict(tmp_path):
    text = SMALL.replace("r: 20.0", "r: 55.0")
    p = write(tmp_path, text)
    assert cli.main(["analyze", p, "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["analyze", p, "--out", str(tmp_path / "b"), "--strict"]) == 3
    rows = read_csv(tmp_path / "b" / "report.csv")
    assert [r["status"] for r in rows] == ["object_exceeds_capacity"] * 2


def test_byte_identical_reruns(tmp_path):
    p = example_suite_path()
    for d in ("a", "b"):
        assert cli.main(["analyze", p, "--out", str(tmp_path / d)]) == 0
    for f in ("report.jsonl", "report.csv", "summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_golden_outputs(tmp_path):
    assert cli.main(["analyze", example_suite_path(), "--out", str(tmp_path), "--strict"]) == 0
    got = read_csv(tmp_path / "report.csv")
    want = read_csv(os.path.join(GOLDEN, "report.csv"))
    assert list(got[0]) == list(cli.CSV_FIELDS)
    assert len(got) == len(want)
    for g, w in zip(got, want):
        for k in cli.CSV_FIELDS:
            try:
                assert float(g[k]) == pytest.approx(float(w[k]), rel=1e-6, abs=1e-9), (g["scenario"], k)
            except ValueError:
                assert g[k] == w[k], (g["scenario"], k)
    s_got = json.loads((tmp_path / "summary.json").read_text())
    s_want = json.loads(open(os.path.join(GOLDEN, "summary.json")).read())
    assert s_got == s_want


def test_no_temp_files_left(tmp_path):
    cli.main(["analyze", write(tmp_path, SMALL), "--out", str(tmp_path / "o")])
    assert not [f for f in os.listdir(tmp_path / "o") if f.startswith(".tmp-")]


def test_write_atomic_replaces(tmp_path):
    p = tmp_path / "x" / "f.txt"
    cli.write_atomic(str(p), "one")
    cli.write_atomic(str(p), "two")
    assert p.read_text() == "two"


# --- render -----------------------------------------------------------------


def contact_markers(path):
    root = ET.parse(path).getroot()
    return [c for c in root.iter(f"{SVG}circle") if c.get("class") == "contact"]


def test_render_marker_counts(tmp_path):
    out = tmp_path / "r"
    assert cli.main(["render", write(tmp_path, SMALL), "--out", str(out)]) == 0
    svg = out / "svg"
    assert sorted(os.listdir(svg)) == ["ball__flat.svg", "ball__get.svg", "envelope.svg"]
    assert len(contact_markers(svg / "ball__flat.svg")) == 2
    assert len(contact_markers(svg / "ball__get.svg")) == 3
    root = ET.parse(svg / "ball__get.svg").getroot()
    assert len([p for p in root.iter(f"{SVG}polygon") if p.get("class") == "cone"]) == 3
    bars = [r for r in ET.parse(svg / "envelope.svg").getroot().iter(f"{SVG}rect") if r.get("class") == "bar"]
    assert len(bars) == 6


def test_analyze_render_flag(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["analyze", write(tmp_path, SMALL), "--out", str(out), "--render"]) == 0
    for f in os.listdir(out / "svg"):
        ET.parse(out / "svg" / f)


def test_render_skips_failed_rows(tmp_path):
    out = tmp_path / "r"
    assert cli.main(["render", write(tmp_path, SMALL.replace("r: 20.0", "r: 55.0")), "--out", str(out)]) == 0
    assert os.listdir(out / "svg") == ["envelope.svg"]


# --- sweep ------------------------------------------------------------------


def sweep(tmp_path, *args):
    out = tmp_path / "s"
    code = cli.main(["sweep", write(tmp_path, SMALL), "--out", str(out), *args])
    return code, out


def test_sweep_mu_ratios(tmp_path):
    text = SMALL.replace("arrangement: flat_pair\n    finger: {length: 80.0, width_base: 12.0, width_tip: 12.0}",
                         "arrangement: flat_pair\n    finger: {length: 80.0, width_base: 12.0, width_tip: 12.0,"
                         " gel_thickness_base: 0.0, gel_thickness_tip: 0.0}")
    p = write(tmp_path, text)
    out = tmp_path / "s"
    assert cli.main(["sweep", p, "--out", str(out), "--param", "mu", "--values", "0.25,0.5,1.0",
                     "--gripper", "get"]) == 0
    rows = read_csv(out / "sweep_mu.csv")
    tz = [float(r["tau_z_max"]) for r in rows]
    assert tz[1] / tz[0] == pytest.approx(2.0, rel=0.02)
    assert tz[2] / tz[0] == pytest.approx(4.0, rel=0.02)


def test_sweep_f_max_linear(tmp_path):
    # rigid pads keep the contact geometry fixed and a massless object adds no offset
    text = (SMALL.replace("width_tip: 6.0}", "width_tip: 6.0, gel_thickness_base: 0.0, gel_thickness_tip: 0.0}")
            .replace("width_tip: 12.0}", "width_tip: 12.0, gel_thickness_base: 0.0, gel_thickness_tip: 0.0}")
            .replace("{type: sphere, r: 20.0}", "{type: box, a: 30.0, b: 30.0, c: 30.0}")
            .replace("mass: 0.2", "mass: 0.0"))
    out = tmp_path / "s"
    assert cli.main(["sweep", write(tmp_path, text), "--out", str(out), "--param", "f_max",
                     "--values", "5,10,20", "--strict"]) == 0
    rows = read_csv(out / "sweep_f_max.csv")
    for g in ("get", "flat"):
        sel = [r for r in rows if r["gripper"] == g]
        for k in ("tau_x_max", "tau_y_max", "tau_z_max", "force_min"):
            v = [float(r[k]) for r in sel]
            assert v[0] > 0
            assert v[1] == pytest.approx(2 * v[0], rel=1e-6) and v[2] == pytest.approx(4 * v[0], rel=1e-6)


def test_sweep_range_syntax(tmp_path):
    code, out = sweep(tmp_path, "--param", "site_s", "--range", "30:50:3", "--gripper", "flat")
    assert code == 0
    assert [r["value"] for r in read_csv(out / "sweep_site_s.csv")] == ["30", "40", "50"]


@pytest.mark.parametrize("args", [
    ["--param", "mu", "--values", ""],
    ["--param", "mu", "--range", "0:1:0"],
    ["--param", "mu"],
    ["--param", "colour", "--values", "1"],
    ["--param", "mu", "--values", "a,b"],
    ["--param", "mu", "--values", "1", "--gripper", "nobody"],
])
def test_sweep_usage_errors(tmp_path, args):
    code, _ = sweep(tmp_path, *args)
    assert code == 2


def test_sweep_L_rejects_flat_rows(tmp_path):
    code, out = sweep(tmp_path, "--param", "L", "--values", "20,40", "--strict")
    assert code == 3
    rows = read_csv(out / "sweep_L.csv")
    assert {r["status"] for r in rows if r["gripper"] == "flat"} == {"no_lever_arm"}
    assert {r["status"] for r in rows if r["gripper"] == "get"} == {"ok"}


def test_example_suite_copy_matches_package():
    repo = os.path.join(os.path.dirname(HERE), "scenarios", "example_suite.yaml")
    if not os.path.exists(repo):
        pytest.skip("repository scenarios directory not present")
    with open(repo) as a, open(example_suite_path()) as b:
        assert a.read() == b.read()
