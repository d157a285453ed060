import json

import pytest

from hodgebench.cli import dumps, load_spec, main
from hodgebench.gallery import gallery_names, gallery_spec
from hodgebench.specfile import SpecError, format_specfile, parse_specfile


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


# ---------------------------------------------------------------------------
# spec files


def test_gallery_round_trip():
    for name in gallery_names():
        spec = gallery_spec(name)
        text = format_specfile(spec)
        again = parse_specfile(text)
        assert format_specfile(again) == text, name


def test_specfile_errors():
    with pytest.raises(SpecError):
        parse_specfile("[chart]\ndim = 2\n")  # missing sections
    with pytest.raises(SpecError):
        parse_specfile(
            "[chart]\ndim = 2\n[boundary]\nr = \"x1\"\n[algebroid]\nkind = nope\n"
        )
    with pytest.raises(Exception):
        parse_specfile(
            "[chart]\ndim = 2\n[boundary]\nr = \"x1 +* 2\"\n[algebroid]\nkind = tangent\n"
        )


def test_load_spec_rejects_unknown():
    with pytest.raises(SpecError):
        load_spec("not_a_gallery_name_or_file")


def test_dumps_17_digits():
    text = dumps({"x": 1.0 / 3.0})
    assert text == '{"x": 0.33333333333333331}'
    assert json.loads(text)["x"] == pytest.approx(1 / 3)


# ---------------------------------------------------------------------------
# commands and exit codes


def test_classify_tangent_sphere(capsys):
    code, out = run_cli(
        capsys, "classify", "--spec", "tangent_sphere", "--samples", "64"
    )
    assert code == 0
    report = json.loads(out)
    assert report["elliptic_fraction"] == 1.0


def test_classify_ball_all_nonelliptic(capsys):
    code, out = run_cli(
        capsys, "classify", "--spec", "ball_c2_dbar", "--samples", "64"
    )
    report = json.loads(out)
    assert code == 0
    assert report["non_elliptic"] == report["samples"]


def test_convexity_ball_exit_codes(capsys):
    code, out = run_cli(
        capsys,
        "convexity",
        "--spec",
        "ball_c2_dbar",
        "--samples",
        "16",
        "--require-q",
        "1",
    )
    assert code == 0
    report = json.loads(out)
    assert report["q_set"] == [1, 2]
    code2, _ = run_cli(
        capsys,
        "convexity",
        "--spec",
        "ball_c2_dbar",
        "--samples",
        "16",
        "--require-q",
        "0",
    )
    assert code2 == 2


def test_levi_explicit_point(capsys):
    code, out = run_cli(
        capsys,
        "levi",
        "--spec",
        "ball_c2_dbar",
        "--point",
        "1,0,0,0",
    )
    assert code == 0
    report = json.loads(out)
    entry = report["points"][0]
    assert entry["signature"] == [1, 0, 0]


def test_dsq_demo_nonzero(capsys):
    code, out = run_cli(capsys, "dsq", "--spec", "graph_bivector_demo")
    assert code == 0
    report = json.loads(out)
    assert report["d_squared_residual"] > 1e-6
    assert report["is_lie_algebroid_on_sample"] is False


def test_dsq_tangent_zero(capsys):
    code, out = run_cli(capsys, "dsq", "--spec", "tangent_sphere")
    report = json.loads(out)
    assert report["d_squared_residual"] == 0.0


def test_sobolev_determinism(capsys):
    args = ("sobolev", "--suite", "A.ii", "--grid", "64", "--seed", "7", "--trials", "3")
    code1, out1 = run_cli(capsys, *args)
    code2, out2 = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2  # byte identical


def test_sobolev_kernel_suite(capsys):
    code, out = run_cli(
        capsys, "sobolev", "--suite", "kernel.ii", "--quad-order", "8"
    )
    assert code == 0
    report = json.loads(out)
    assert report["result"]["pass"] is True


def test_hodge_command(capsys):
    code, out = run_cli(
        capsys,
        "hodge",
        "--n-theta",
        "16",
        "--n-r",
        "32",
        "--trials",
        "4",
    )
    assert code == 0
    report = json.loads(out)
    assert report["result"]["harmonic_dim_deg1"] == 0


def test_error_exit_code(capsys):
    code = main(["classify", "--spec", "definitely_missing.spec"])
    assert code == 1


def test_csv_output(tmp_path, capsys):
    out_file = tmp_path / "table.csv"
    code = main(
        [
            "classify",
            "--spec",
            "tangent_sphere",
            "--samples",
            "8",
            "--format",
            "csv",
            "--out",
            str(out_file),
        ]
    )
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0].split(",")[:2] == ["point", "classification"]
    assert len(lines) == 9


def test_classify_poisson_locus_fraction(capsys):
    # generic sphere samples are all elliptic; only the forced locus points
    # classify NonElliptic, so the non-elliptic count equals locus_samples
    code, out = run_cli(capsys, "classify", "--spec", "poisson_c4")
    report = json.loads(out)
    assert code == 0
    assert report["samples"] == 1020
    assert report["non_elliptic"] == 20


def test_threaded_classification_matches_serial(capsys, monkeypatch):
    code1, out1 = run_cli(
        capsys, "classify", "--spec", "ball_c2_dbar", "--samples", "32"
    )
    monkeypatch.setenv("WORKBENCH_THREADS", "4")
    code2, out2 = run_cli(
        capsys, "classify", "--spec", "ball_c2_dbar", "--samples", "32"
    )
    assert out1 == out2
