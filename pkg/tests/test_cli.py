import csv
import os
import xml.etree.ElementTree as ET
from importlib import resources

import numpy as np
import pytest

from graphsom import cli, svg
from graphsom._io import atomic_write

SVG_NS = "{http://www.w3.org/2000/svg}"


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Synthetic panel plus one trained strings run, shared by the module."""
    root = tmp_path_factory.mktemp("ws")
    assert run("synth", "--out", root, "--individuals", 120, "--periods", 2, "--seed", 3) == 0
    cfg = root / "config.ini"
    text = cfg.read_text().replace("epochs = 20", "epochs = 2")
    cfg.write_text(text)
    assert run("train", "--config", cfg, "--out", root / "run") == 0
    return root, cfg


def _files(d):
    return {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def _svg_ok(path):
    root = ET.parse(path).getroot()
    assert root.tag == SVG_NS + "svg"
    assert float(root.get("width")) > 0 and float(root.get("height")) > 0
    return root


def test_synth_writes_panel_and_config(workspace):
    root, cfg = workspace
    rows = list(csv.DictReader((root / "samples.csv").open()))
    assert len(rows) == 600
    assert {"gender", "component"} <= set(rows[0])
    assert "features = f1,f2,f3,f4,f5,f6,f7,f8" in cfg.read_text()


def test_train_outputs(workspace):
    root, _ = workspace
    run_dir = root / "run"
    lines = (run_dir / "codebook.csv").read_text().splitlines()
    assert lines[0].startswith("# K=40 D=8 topology=strings:5x8")
    assert len(lines) == 2 + 40
    labels = list(csv.DictReader((run_dir / "labels.csv").open()))
    assert len(labels) == 600 and set(labels[0]) == {"id", "time", "period", "unit", "class"}
    q = dict(line.split("=") for line in (run_dir / "quality.txt").read_text().splitlines())
    assert {"rqe", "rqe_ext", "rqe_macro"} <= set(q)
    assert (run_dir / "partition.csv").read_text().startswith("# S=5 provenance=components")


def test_train_and_transitions_deterministic(workspace, tmp_path):
    root, cfg = workspace
    for name in ("a", "b"):
        assert run("train", "--config", cfg, "--out", tmp_path / name) == 0
        assert run("transitions", "--config", cfg, "--out", tmp_path / name) == 0
    a, b = _files(tmp_path / "a"), _files(tmp_path / "b")
    assert a == b
    assert any(k.startswith("transitions_p1") for k in a)
    assert a["codebook.csv"] == (root / "run" / "codebook.csv").read_bytes()


@pytest.mark.parametrize("argv, code", [
    (["train", "--topology", "strings 0x8"], 2),
    (["train", "--config", "/nonexistent/config.ini"], 2),
    (["train", "--data", "/nonexistent/samples.csv"], 1),
    (["train", "--set", "nosuchformat"], 2),
    (["train", "--macro", "star_rays"], 2),
])
def test_exit_codes(workspace, tmp_path, argv, code, capsys):
    _, cfg = workspace
    extra = [] if "--config" in argv or "--data" in argv else ["--config", cfg]
    assert run(*argv, *extra, "--out", tmp_path) == code
    assert "graphsom train" in capsys.readouterr().err


def test_argparse_usage_error_exits_2():
    with pytest.raises(SystemExit) as info:
        cli.main(["train", "--epochs", "many"])
    assert info.value.code == 2


def test_bad_data_is_runtime_error(tmp_path):
    (tmp_path / "d.csv").write_text("id,time,period,a\n1,1984,1,oops\n")
    assert run("train", "--data", tmp_path / "d.csv", "--out", tmp_path / "o") == 1


def test_missing_artifacts_is_runtime_error(workspace, tmp_path):
    _, cfg = workspace
    assert run("report", "--config", cfg, "--out", tmp_path / "empty") == 1


def test_compare(workspace, tmp_path):
    _, cfg = workspace
    assert run("compare", "--config", cfg, "--out", tmp_path, "--epochs", 1,
               "--topologies", "strings 5x8", "grid 5x8", "star 5x8") == 0
    rows = list(csv.DictReader((tmp_path / "compare.csv").open()))
    assert [r["topology"] for r in rows] == ["strings:5x8", "grid:5x8", "star:5x8"]
    assert [r["macro"] for r in rows] == ["components", "hac(5)", "star_rays"]
    for r in rows:
        for key in ("rqe_pct", "rqe_ext_pct", "rqe_macro_pct"):
            assert len(r[key].split(".")[1]) == 2


def test_compare_percent_matches_train(workspace, tmp_path):
    root, cfg = workspace
    assert run("compare", "--config", cfg, "--out", tmp_path,
               "--topologies", "strings 5x8", "strings 5x8") == 0
    rows = list(csv.DictReader((tmp_path / "compare.csv").open()))
    q = dict(line.split("=") for line in (root / "run" / "quality.txt").read_text().splitlines())
    assert rows[0]["rqe_macro_pct"] == f"{100 * float(q['rqe_macro']):.2f}"


def test_compare_needs_two(workspace, tmp_path, capsys):
    _, cfg = workspace
    assert run("compare", "--config", cfg, "--out", tmp_path, "--topologies", "grid 5x8") == 2
    assert "need >=2" in capsys.readouterr().err


def test_compare_mismatched_data(workspace, tmp_path):
    root, cfg = workspace
    other = tmp_path / "other.ini"
    other.write_text(cfg.read_text().replace("path = samples.csv", f"path = {root / 'run' / 'labels.csv'}"))
    assert run("compare", cfg, other, "--out", tmp_path) == 2


def test_hac_curve(workspace, capsys):
    root, cfg = workspace
    out = root / "run"
    assert run("hac-curve", "--config", cfg, "--out", out, "--topology", "strings 5x8") == 0
    rows = list(csv.DictReader((out / "hac_curve.csv").open()))
    values = [float(r["rqe_macro"]) for r in rows]
    assert [int(r["S"]) for r in rows] == list(range(1, 41))
    assert values[0] == 1.0
    assert all(a >= b for a, b in zip(values, values[1:]))
    _svg_ok(out / "hac_curve.svg")
    assert len(list(csv.DictReader((out / "hac_merges.csv").open()))) == 39


def test_transitions_rows_sum_to_100(workspace):
    root, cfg = workspace
    out = root / "run"
    assert run("transitions", "--config", cfg, "--out", out) == 0
    for period in (1, 2):
        rows = list(csv.reader((out / f"transitions_p{period}_percent.csv").open()))[1:]
        assert len(rows) == 5
        for r in rows:
            if int(r[1]) > 0:
                assert abs(sum(float(v) for v in r[2:]) - 100) <= 0.01
        _svg_ok(out / f"transitions_p{period}.svg")
    dist = list(csv.reader((out / "distributions.csv").open()))
    assert dist[0][:2] == ["period", "distribution"] and len(dist) == 5


def test_transitions_slice_without_members(workspace, tmp_path, capsys):
    root, _ = workspace
    data = tmp_path / "men.csv"
    text = (root / "samples.csv").read_text().replace(",women", ",men")
    data.write_text(text)
    cfg = tmp_path / "c.ini"
    cfg.write_text((root / "config.ini").read_text().replace("path = samples.csv", f"path = {data}"))
    assert run("train", "--config", cfg, "--out", tmp_path / "o") == 0
    assert run("transitions", "--config", cfg, "--out", tmp_path / "o", "--slice", "gender=women") == 0
    assert "empty set" in capsys.readouterr().out
    assert (tmp_path / "o" / "transitions_p1_gender-women_diagnostic.txt").is_file()


def test_transitions_replay(tmp_path, capsys):
    matrix = resources.files("graphsom") / "data" / "transitions_period1.txt"
    assert run("transitions", "--percent", "--matrix", matrix, "--out", tmp_path) == 0
    limit = [float(v) for v in capsys.readouterr().out.split()[1:]]
    assert np.allclose(limit, (0.14, 0.33, 0.04, 0.12, 0.37), atol=0.02)
    assert (tmp_path / "replay_limit.csv").read_text().startswith("distribution,class_1")


def test_tables_and_assign(workspace, tmp_path):
    root, cfg = workspace
    out = root / "run"
    assert run("tables", "--config", cfg, "--out", out, "--against", out) == 0
    means = list(csv.reader((out / "class_means.csv").open()))
    assert means[0][-2:] == ["whole_sample", "max_class"] and len(means) == 2 + 8
    for key in ("period", "gender", "component"):
        for r in list(csv.reader((out / f"slices_{key}.csv").open()))[1:]:
            assert abs(sum(float(v) for v in r[1:-1]) - 100) < 0.05
    ct = list(csv.reader((out / "crosstab.csv").open()))
    assert ct[-1][-1] == "600"
    assert run("assign", "--config", cfg, "--out", out, "--labels-out", tmp_path / "l.csv") == 0
    assert (tmp_path / "l.csv").read_bytes() == (out / "labels.csv").read_bytes()


def test_report_bundle(workspace):
    root, cfg = workspace
    out = root / "run"
    assert run("report", "--config", cfg, "--out", out, "--max-lines", 20) == 0
    files = sorted(p.name for p in (out / "report").iterdir())
    assert len([f for f in files if f.startswith("plane_")]) == 8
    assert len([f for f in files if f.startswith("profile_class_")]) == 5
    assert len([f for f in files if f.startswith("content_class_")]) == 5
    for f in files:
        _svg_ok(out / "report" / f)
    # member lines capped per unit
    content = ET.parse(out / "report" / "content_class_1.svg").getroot()
    assert len(content.findall(f"{SVG_NS}polyline")) <= 8 * (20 + 1)


def test_heatmap_constant_field_is_mid_gray():
    doc = svg.heatmap(np.full(6, 2.5), np.array([(0, c) for c in range(6)]), "flat")
    root = ET.fromstring(doc)
    fills = {r.get("fill") for r in root.findall(f"{SVG_NS}rect")[1:]}
    assert fills == {svg.gray(0.5)}
    assert "constant value 2.5" in doc


def test_heatmap_black_is_lowest():
    doc = svg.heatmap(np.array([1.0, 5.0, 3.0]), np.array([(0, 0), (0, 1), (0, 2)]))
    fills = [r.get("fill") for r in ET.fromstring(doc).findall(f"{SVG_NS}rect")[1:]]
    assert fills == ["#000000", "#ffffff", svg.gray(0.5)]


def test_atomic_write_leaves_no_temp(tmp_path):
    atomic_write(tmp_path / "x.txt", "hello\n")
    atomic_write(tmp_path / "x.txt", "again\n")
    assert os.listdir(tmp_path) == ["x.txt"]
    assert (tmp_path / "x.txt").read_text() == "again\n"


def test_config_flags_override_file(workspace, tmp_path):
    _, cfg = workspace
    args = cli.build_parser().parse_args(["train", "--config", str(cfg), "--epochs", "7",
                                          "--set", "training.kernel=indicator"])
    for attr in ("seed", "out", "data", "topology", "alpha_start", "alpha_end", "sigma_start",
                 "sigma_end", "kernel", "macro", "classes", "max_lines"):
        setattr(args, attr, getattr(args, attr, None))
    conf = cli.resolve_config(args)
    assert conf.training.epochs == 7 and conf.training.kernel == "indicator"
    assert conf.data_path.name == "samples.csv" and conf.data_path.is_absolute()
