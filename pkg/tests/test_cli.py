import json

import pytest

from linecover.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_parabola_csv(capsys):
    code, out, _ = run(["gen", "parabola", "--grid", "1"], capsys)
    assert code == 0
    assert out.splitlines() == ["x,f_lo,f_hi,F_lo,F_hi", "0,0,0,0,0", "0.5,1,1,0.25,0.25", "1,2,2,1,1"]


def test_gen_tcantc_stage_widths(capsys):
    code, out, _ = run(["gen", "tcantc", "--grid", "2", "--stage", "6"], capsys)
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 5
    for row in rows[1:]:
        _, flo, fhi, _, _ = row.split(",")
        assert 0 < float(fhi) - float(flo) <= 2**-5 + 2**-30


def test_gen_stage_rejected_for_other_curves(capsys):
    code, _, err = run(["gen", "tbinc", "--stage", "3"], capsys)
    assert code == 2 and "tcantc only" in err


def test_lines_boxcount_plot_pipeline(tmp_path, capsys):
    fam = tmp_path / "fam.json"
    segs = tmp_path / "segs.csv"
    assert main(["lines", "tbinc", "--count", "8", "-o", str(fam), "--segments", str(segs)]) == 0
    obj = json.loads(fam.read_text())
    assert obj["curve"] == "tbinc" and len(obj["lines"]) == 8
    assert segs.read_text().splitlines()[0] == "x0,y0,x1,y1"
    capsys.readouterr()

    code, out, _ = run(["boxcount", "--family", str(fam), "--scales", "2:6", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,count" and len(lines) == 6
    counts = [int(l.split(",")[1]) for l in lines[1:]]
    assert all(b >= a for a, b in zip(counts, counts[1:]))

    code, out, _ = run(["boxcount", "--family", str(fam), "--scales", "2:6"], capsys)
    assert json.loads(out)["counts"] == counts

    code, out, _ = run(["plot", "--family", str(fam), "--grid", "3"], capsys)
    assert code == 0 and out.startswith("<svg") and out.count("<path") == 9


def test_lines_cantor_points(capsys):
    code, out, _ = run(["lines", "tcantc", "--scheme", "points", "--points", "1/2,1/4"], capsys)
    assert code == 0
    assert [l["kind"] for l in json.loads(out)["lines"]] == ["tangent", "vertical"]


def test_outputs_are_deterministic(capsys):
    argv = ["lines", "tcantc", "--scheme", "seeded-random", "--sides", "mixed", "--count", "20", "--seed", "5"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["lines", "tbinc", "--count", "6"], "power of 2"),
        (["lines", "tbinc", "--scheme", "points"], "needs --points"),
        (["boxcount", "--family", "/nonexistent.json"], "cannot read family"),
        (["gen", "parabola", "--grid", "40"], "--grid"),
    ],
)
def test_bad_input_exit_two(argv, needle, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2 and out == ""
    assert err.startswith("lcl: error:") and needle in err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["boxcount", "--family", "x", "--scales", "5:2"])
    assert exc.value.code == 2
    assert "bad scale range" in capsys.readouterr().err


def test_malformed_family_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(["plot", "--family", str(bad)], capsys)
    assert code == 2 and "malformed family" in err


def test_config_file_sets_defaults(tmp_path, capsys):
    cfg = tmp_path / "lcl.conf"
    cfg.write_text("# defaults\ncount = 4\nsides = left\n")
    code, out, _ = run(["--config", str(cfg), "lines", "tbinc"], capsys)
    assert code == 0
    lines = json.loads(out)["lines"]
    # the left end has no left slope, so only the first line falls back to the right side
    assert len(lines) == 4 and [l["side"] for l in lines] == ["right", "left", "left", "left"]
    # flags still win over the file
    _, out, _ = run(["--config", str(cfg), "lines", "tbinc", "--count", "2"], capsys)
    assert len(json.loads(out)["lines"]) == 2


@pytest.mark.parametrize(
    "text, needle",
    [("count = -3\n", "config count"), ("colour = red\n", "unknown config key"), ("justtext\n", "expected key=value"), ("sides = up\n", "not one of")],
)
def test_invalid_config(tmp_path, capsys, text, needle):
    cfg = tmp_path / "lcl.conf"
    cfg.write_text(text)
    code, _, err = run(["--config", str(cfg), "lines", "tbinc"], capsys)
    assert code == 2 and needle in err


def test_missing_config_file(tmp_path, capsys):
    code, _, err = run(["--config", str(tmp_path / "none.conf"), "lines", "tbinc"], capsys)
    assert code == 2 and "cannot read config" in err


@pytest.mark.parametrize("value, needle", [("abc", "must be an integer"), ("3", "at least 8")])
def test_invalid_precision_env(monkeypatch, capsys, value, needle):
    monkeypatch.setenv("LCL_PRECISION", value)
    code, _, err = run(["gen", "parabola"], capsys)
    assert code == 2 and needle in err


def test_precision_env_applies(monkeypatch, capsys):
    monkeypatch.setenv("LCL_PRECISION", "60")
    code, out, _ = run(["gen", "tbinc", "--grid", "0"], capsys)
    assert code == 0
    _, flo, fhi, _, _ = out.splitlines()[2].split(",")
    assert float(fhi) - float(flo) <= 2**-59


def test_verify_single_suites(tmp_path, capsys):
    rep = tmp_path / "gap.json"
    code, out, _ = run(["verify", "gapbound", "--max-ni", "6", "--report", str(rep)], capsys)
    assert code == 0 and out.strip() == "PASS gap-image-bound"
    assert json.loads(rep.read_text())["passed"] is True
    code, out, _ = run(["verify", "lipschitz", "--curve", "tbinc", "--samples", "30"], capsys)
    assert code == 0 and out.strip().startswith("PASS ")
