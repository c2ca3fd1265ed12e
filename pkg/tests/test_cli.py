import json

import pytest

from nodalab.cli import (
    EXIT_GATE_FAIL,
    EXIT_INVALID,
    EXIT_PASS,
    _parse_domain,
    _parse_floats,
    _parse_modes,
    main,
    read_config_file,
)
from nodalab.errors import ValidationError


def test_parse_helpers():
    assert _parse_modes("3,4;5,5") == ((3, 4), (5, 5))
    assert _parse_modes("10") == ((10,),)
    assert _parse_floats("0.05,0.1") == (0.05, 0.1)
    with pytest.raises(ValidationError):
        _parse_modes("3,x")
    with pytest.raises(ValidationError):
        _parse_floats("a,b")


def test_parse_domain():
    assert _parse_domain("interval", None).n == 1
    assert _parse_domain("torus2", None).alpha == (1.0, 1.0)
    box = _parse_domain("box", "1,1.5")
    assert box.alpha == (1.0, 1.5) and not box.periodic
    with pytest.raises(ValidationError):
        _parse_domain("torus2", "1,2")
    with pytest.raises(ValidationError):
        _parse_domain("klein", None)


def test_density_pass_and_report_verify(tmp_path):
    out = tmp_path / "r"
    code = main(["density", "--domain", "torus2", "--modes", "3,3", "--out", str(out)])
    assert code == EXIT_PASS
    (jp,) = out.glob("density_*.json")
    assert main(["report", str(jp)]) == EXIT_PASS
    doc = json.loads(jp.read_text())
    doc["cells"][0]["measured"]["product"] = 99.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["report", str(bad)]) == EXIT_GATE_FAIL


def test_negative_delta_is_invalid(tmp_path):
    code = main(["tube", "--delta", "-0.1", "--out", str(tmp_path)])
    assert code == EXIT_INVALID


def test_unknown_flag_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["density", "--bogus", "1", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_empty_spectrum_warns_exit_zero(tmp_path, capsys):
    code = main([
        "spectrum", "--domain", "box", "--alpha", "1,1",
        "--mu-max", "0.5", "--out", str(tmp_path),
    ])
    assert code == EXIT_PASS
    captured = capsys.readouterr()
    assert "warning" in captured.err
    assert "0 modes" in captured.out


def test_config_file_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=7\nk_max=400\nn_points=60\nk0=40\n")
    out = tmp_path / "r"
    code = main([
        "borel-cantelli", "--config", str(cfg), "--seed", "9", "--out", str(out),
    ])
    assert code == EXIT_PASS
    (jp,) = out.glob("approx_theorem_*.json")
    doc = json.loads(jp.read_text())
    assert doc["seed"] == 9  # flag beats file
    assert doc["config"]["k_max"] == 400  # file fills the rest
    assert doc["config"]["n_points"] == 60


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus_key=1\n")
    assert main(["boxes", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_INVALID


def test_config_file_syntax_and_comments(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\n\nm = 30  # trailing\n")
    assert read_config_file(cfg) == {"m": "30"}
    cfg.write_text("just a line\n")
    with pytest.raises(ValidationError):
        read_config_file(cfg)


def test_gate_failure_exit_code(tmp_path, capsys):
    code = main([
        "tube", "--domain", "torus2", "--modes", "3,4;2,7",
        "--mu-delta", "0.05,0.3", "--no-grid", "--band-cap", "1.01",
        "--out", str(tmp_path),
    ])
    assert code == EXIT_GATE_FAIL
    assert "failed gate band_ratio" in capsys.readouterr().out


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    argv = ["density", "--domain", "torus2", "--modes", "4,1"]
    assert main(argv + ["--out", str(a)]) == EXIT_PASS
    assert main(argv + ["--out", str(b)]) == EXIT_PASS
    (ja,) = a.glob("*.json")
    (jb,) = b.glob("*.json")
    assert ja.read_bytes() == jb.read_bytes()
    (ca,) = a.glob("*.csv")
    (cb,) = b.glob("*.csv")
    assert ca.read_bytes() == cb.read_bytes()


def test_cache_is_numerically_transparent(tmp_path, monkeypatch):
    monkeypatch.setenv("NODALAB_CACHE_DIR", str(tmp_path / "cache"))
    out1, out2, out3 = (tmp_path / n for n in "abc")
    argv = ["density", "--domain", "torus2", "--modes", "3,3"]
    assert main(argv + ["--out", str(out1)]) == EXIT_PASS  # cold cache
    assert main(argv + ["--out", str(out2)]) == EXIT_PASS  # warm cache
    assert main(argv + ["--no-cache", "--out", str(out3)]) == EXIT_PASS
    blobs = [next(d.glob("*.json")).read_bytes() for d in (out1, out2, out3)]
    assert blobs[0] == blobs[1] == blobs[2]
    assert list((tmp_path / "cache").glob("dist_*.npy"))
