import re

import pytest

from tmfmi.cli import main

ERROR = re.compile(r"^error: [a-z-]+: [^\n]+\n$")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def assert_error(code, err):
    assert code != 0
    assert ERROR.match(err), err


def test_ext_fixture_shows_alpha_and_beta(capsys):
    code, out, _ = run(capsys, "ext", "f2_a1", "--bounds", "6,16")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "s\tt\tname"
    assert "3\t7\talpha" in lines and "4\t12\tbeta" in lines
    keys = [(int(a), int(b), c) for a, b, c in (l.split("\t") for l in lines[1:])]
    assert keys == sorted(keys)


def test_ext_empty_chart_is_header_only(capsys):
    code, out, _ = run(capsys, "ext", "f2_a1", "--bounds", "0,-1")
    assert code == 0 and out == "s\tt\tname\n"


def test_ext_svg_layout(capsys):
    code, out, _ = run(capsys, "ext", "f2_a1", "--bounds", "4,12", "--format", "svg")
    assert code == 0 and out.startswith("<svg")
    # alpha sits in stem 4, filtration 3
    assert "alpha (3,7)" in out


def test_ext_errors(capsys, tmp_path):
    assert_error(*run(capsys, "ext", "no_such_fixture")[::2])
    bad = tmp_path / "bad.txt"
    bad.write_text("profile 1\nwindow 0 1\ngen a 0\nact Sq(1) a = zz\n")
    assert_error(*run(capsys, "ext", str(bad))[::2])
    assert_error(*run(capsys, "ext", "f2_a1", "--bounds", "3")[::2])
    assert_error(*run(capsys, "ext", "sigma_p_m9_a1", "--bounds", "4,60")[::2])
    assert_error(*run(capsys, "ext", "f2_a1", "--format", "png")[::2])


def test_koszul(capsys):
    code, out, _ = run(capsys, "koszul", "f2_a1", "--bounds", "3,10")
    assert code == 0 and out.startswith("s\tt\tsigma\tdim\n")
    assert_error(*run(capsys, "koszul", "f2_a0")[::2])


def test_stunted_roundtrip(capsys, tmp_path):
    out = tmp_path / "p.txt"
    code, _, _ = run(capsys, "stunted", "-5", "6", "--out", str(out))
    assert code == 0
    code, chart, _ = run(capsys, "ext", str(out), "--bounds", "3,4")
    assert code == 0 and chart.startswith("s\tt\tname\n")
    assert_error(*run(capsys, "stunted", "4", "1")[::2])


def test_mi_alg(capsys):
    code, out, _ = run(capsys, "mi-alg", "h0", "h0^2", "--profile", "1")
    assert code == 0
    assert "h0\t2\t1\t2\th1\t0" in out.splitlines()
    assert_error(*run(capsys, "mi-alg", "nonsense")[::2])


def test_ahss_window(capsys):
    code, out, _ = run(capsys, "ahss", "--window", "-7,0")
    assert code == 0
    assert "-5\t3\teps\t0" in out.splitlines()


def test_ahss_empty_ring_file(capsys, tmp_path):
    empty = tmp_path / "ring.txt"
    empty.write_text("")
    assert_error(*run(capsys, "ahss", "--ring-data", str(empty))[::2])
    assert_error(*run(capsys, "ahss", "--ring-data", str(tmp_path / "missing.txt"))[::2])
    assert_error(*run(capsys, "ahss", "--window", "0,-7")[::2])


def test_ahss_svg_to_file(capsys, tmp_path):
    out = tmp_path / "sub" / "e8.svg"
    code, _, _ = run(capsys, "ahss", "--window", "-7,0", "--format", "svg", "--out", str(out))
    assert code == 0 and out.read_text().startswith("<svg")
    assert [p.name for p in out.parent.iterdir()] == ["e8.svg"]  # no temporary left behind


def test_mi_verify_shipped(capsys, tmp_path):
    out = tmp_path / "report.tsv"
    code, _, _ = run(capsys, "mi-verify", "--out", str(out))
    assert code == 0
    text = out.read_text()
    assert text.startswith("key\tstep\tkind\tverdict\tclaim\tevidence\n")
    assert "\tsummary\tfail\t" not in text


def test_mi_verify_failures(capsys, tmp_path):
    assert_error(*run(capsys, "mi-verify", "--scripts", str(tmp_path / "nope"))[::2])
    d = tmp_path / "scripts"
    d.mkdir()
    (d / "x.txt").write_text("row 4\nstep Frobnicate => kbar[-12]\n")
    assert_error(*run(capsys, "mi-verify", "--scripts", str(d))[::2])
    # a directory with no scripts leaves every row unproven
    (d / "x.txt").unlink()
    code, out, _ = run(capsys, "mi-verify", "--scripts", str(d), "--extend-to", "31")
    assert code == 1 and "no script" in out


def test_config_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('bounds = "2,6"\n[ext]\nformat = "tsv"\n')
    code, out, _ = run(capsys, "ext", "f2_a1", "--config", str(cfg))
    assert code == 0 and "3\t7\talpha" not in out
    code, out, _ = run(capsys, "ext", "f2_a1", "--config", str(cfg), "--bounds", "4,8")
    assert code == 0 and "3\t7\talpha" in out


def test_config_errors(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("colour = 3\n")
    assert_error(*run(capsys, "ext", "f2_a1", "--config", str(cfg))[::2])
    cfg.write_text("bounds = [\n")
    assert_error(*run(capsys, "ext", "f2_a1", "--config", str(cfg))[::2])


def test_usage_errors_are_single_line(capsys):
    assert_error(*run(capsys)[::2])
    assert_error(*run(capsys, "frobnicate")[::2])
