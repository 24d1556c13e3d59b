import subprocess
import sys

import pytest

from bell_lab.cli import UsageError, emit_csv, main, parse_config, read_config_file, run


def _run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    status = main([*argv, "--out", str(out)])
    return status, out


def test_chsh_quantum_summary(tmp_path, capsys):
    status, out = _run(tmp_path, "chsh", "--model", "quantum_singlet", "--angles", "0,90,45,135")
    assert status == 0
    assert "S = 2.828427, VIOLATED (bound 2)" in capsys.readouterr().out
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# bell-lab") and "model=quantum_singlet" in lines[0] and "seed=42" in lines[0]
    assert lines[1] == "quantity,value"


def test_bell_sign_sphere_summary(tmp_path, capsys):
    status, _ = _run(tmp_path, "bell", "--model", "sign_sphere", "--angles", "0,45,90")
    assert status == 0
    assert "LHS = 0.5000, RHS = 0.5000, SATISFIED" in capsys.readouterr().out


def test_audit_bell_signaling_exit_2(tmp_path, capsys):
    status, _ = _run(tmp_path, "audit-bell", "--model", "signaling_demo", "--angles", "0,45,90")
    assert status == 2
    assert "PREMISE VIOLATED" in capsys.readouterr().err


def test_audit_commands_succeed(tmp_path, capsys):
    assert _run(tmp_path, "audit-bell", "--model", "sign_sphere", "--angles", "0,45,90")[0] == 0
    status, out = _run(tmp_path, "audit-chsh", "--model", "sign_sphere", "--angles", "0,90,45,135")
    assert status == 0
    text = out.read_text()
    assert "four_term_value" in text and "max_residual" in text
    assert "SATISFIED (bound 2)" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["correlate", "--model", "quantum_singlet", "--angles", "0,45"], "bound |E| <= 1"),
        (["local-bound"], "S_max = 2, SATISFIED (bound 2)"),
        (["local-bound", "--functional", "bell"], "SATISFIED (bound 0)"),
        (["optimize", "--angles", "10,100,55,145"], "S = 2.828427, VIOLATED (bound 2)"),
        (["sweep", "--model", "quantum_singlet", "--step", "30"], "VIOLATED (bound 2)"),
        (["sweep", "--model", "sign_sphere", "--step", "30", "--functional", "bell"], "SATISFIED"),
        (["mc-scan", "--model", "sign_sphere", "--angles", "0,60", "--n", "20000"], "SATISFIED (bound 5 stderr)"),
    ],
)
def test_every_command_summary(tmp_path, capsys, argv, needle):
    status, out = _run(tmp_path, *argv)
    assert status == 0
    summary = capsys.readouterr().out
    assert needle in summary
    assert ("SATISFIED" in summary) or ("VIOLATED" in summary)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("#") and len(lines) >= 3


def test_unknown_model_exit_1(tmp_path, capsys):
    status, _ = _run(tmp_path, "chsh", "--model", "pilot_wave", "--angles", "0,90,45,135")
    assert status == 1
    assert "unknown model" in capsys.readouterr().err


def test_bad_arity_exit_1(capsys):
    assert main(["chsh", "--angles", "0,90,45"]) == 1
    assert "expects 4 angles" in capsys.readouterr().err


def test_unwritable_path_exit_1(tmp_path, capsys):
    status = main(["chsh", "--angles", "0,90,45,135", "--out", str(tmp_path / "missing" / "x.csv")])
    assert status == 1
    assert "missing" in capsys.readouterr().err


def test_parse_flags_only():
    cfg = parse_config(["correlate", "--model", "sign_sphere", "--angles", "0,45", "--n", "1000",
                        "--seed", "7", "--quad", "32,48", "--out", "x.csv"])
    assert cfg.command == "correlate" and cfg.angles_deg == (0.0, 45.0)
    assert (cfg.n_samples, cfg.seed, cfg.quad, cfg.output_path) == (1000, 7, (32, 48), "x.csv")


def test_parse_defaults():
    cfg = parse_config(["chsh", "--angles", "0,90,45,135"])
    assert (cfg.seed, cfg.n_samples, cfg.quad) == (42, 100_000, (64, 64))


def test_file_and_flag_precedence(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text("# experiment\ncommand = chsh\nmodel = sign_sphere\nangles = 0, 90, 45, 135\nseed = 3\n")
    cfg = parse_config(["--config", str(path), "--seed", "9"])
    assert cfg.command == "chsh" and cfg.model == "sign_sphere"
    assert cfg.seed == 9


def test_chsh_arity_message():
    with pytest.raises(UsageError, match="expects 4"):
        parse_config(["chsh", "--angles", "0,90,45"])


def test_malformed_file_names_line(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("command = chsh\nthis line is wrong\n")
    with pytest.raises(UsageError, match=r"bad.ini:2"):
        read_config_file(path)


def test_missing_command(tmp_path):
    path = tmp_path / "nocmd.ini"
    path.write_text("model = sign_sphere\n")
    with pytest.raises(UsageError, match="command"):
        parse_config(["--config", str(path)])


def test_emit_csv_format(tmp_path):
    path = tmp_path / "t.csv"
    emit_csv([{"x": 1 / 3, "ok": True}], path, ["x", "ok"])
    assert path.read_bytes() == b"x,ok\n0.333333333,true\n"
    emit_csv([], path, ["x", "ok"])
    assert path.read_text() == "x,ok\n"


def test_rerun_is_byte_identical(tmp_path, monkeypatch):
    argv = ["correlate", "--model", "local_noise", "--angles", "0,33", "--n", "200000", "--seed", "5"]
    monkeypatch.setenv("BELL_LAB_WORKERS", "1")
    _, first = _run(tmp_path, *argv, name="a.csv")
    monkeypatch.setenv("BELL_LAB_WORKERS", "4")
    _, second = _run(tmp_path, *argv, name="b.csv")
    assert first.read_bytes() == second.read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "bell_lab", "chsh", "--model", "quantum_singlet",
         "--angles", "0,90,45,135", "--out", str(tmp_path / "c.csv")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "S = 2.828427, VIOLATED (bound 2)" in proc.stdout
