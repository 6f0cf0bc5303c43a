"""Command-line entry point: subcommands, exit codes, config expansion."""

import json

import pytest

from arcjet.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_derive_preset(capsys):
    code, out = run(capsys, "derive", "--kind", "A", "--n", "1", "--level", "3")
    assert code == 0
    assert "f_2 = " in out and "z1^2" in out.replace(" ", "").replace("z1^2", "z1^2")


def test_derive_raw_equation_with_reduction(capsys):
    code, out = run(
        capsys,
        "derive",
        "--equation",
        "z^2 + x*y",
        "--level",
        "2",
        "--reduce",
        "x0,y0,z0",
    )
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith("f_")]
    assert lines[0] == "f_0 = 0"
    assert lines[2].replace(" ", "") in ("f_2=x1*y1+z1^2", "f_2=z1^2+x1*y1")


def test_components_json(capsys, tmp_path):
    out_file = tmp_path / "components.json"
    code, _ = run(
        capsys, "components", "--kind", "A", "--n", "2", "--out", str(out_file)
    )
    assert code == 0
    payload = json.loads(out_file.read_text())
    assert len(payload["components"]) == 2


def test_graph_dot_and_json(capsys):
    code, dot = run(capsys, "graph", "--kind", "A", "--n", "1", "--max-level", "6")
    assert code == 0
    assert dot.lstrip().startswith("digraph")
    code, js = run(
        capsys, "graph", "--kind", "A", "--n", "1", "--max-level", "6",
        "--format", "json",
    )
    assert code == 0
    assert json.loads(js)["schema"].startswith("jet-component-graph/")


def test_oracle_counts(capsys):
    code, out = run(
        capsys, "oracle", "--kind", "A", "--n", "1", "--char", "2",
        "--level", "2", "--check", "counts",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["points"] == 32 and payload["ok"] is True


def test_oracle_coverage(capsys):
    code, out = run(
        capsys, "oracle", "--kind", "D", "--n", "2", "--char", "3", "--level", "2",
    )
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_verify_single_preset(capsys):
    code, out = run(capsys, "verify", "--kind", "A", "--n", "2", "--char", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    assert payload["preset"] == "A2(char 3)"
    assert payload["components"]["ok"] is True
    assert payload["congruences"]["ok"] is True
    assert payload["noninclusion"]["ok"] is True
    assert all(c["ok"] for c in payload["coverage"])


def test_verify_single_preset_deterministic(capsys):
    _, a = run(capsys, "verify", "--kind", "A", "--n", "1", "--char", "2")
    _, b = run(capsys, "verify", "--kind", "A", "--n", "1", "--char", "2")
    assert a == b


def test_bad_preset_is_a_clean_failure(capsys):
    code, out = run(capsys, "verify", "--kind", "E6", "--char", "2")
    assert code == 1
    payload = json.loads(out)
    assert payload["ok"] is False and "error" in payload


def test_missing_arguments_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["components"])  # --kind is required


def test_config_file_expansion(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kind = A\nn = 2\nchar = 3\n# comment\n")
    code, out = run(capsys, "verify", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_config_explicit_flags_win(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kind = A\nn = 1\nchar = 0\n")
    code, out = run(capsys, "verify", "--config", str(cfg), "--n", "3")
    assert code == 0
    assert json.loads(out)["preset"] == "A3(char 0)"
