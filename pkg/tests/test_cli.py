from __future__ import annotations

import json
from pathlib import Path

import pytest

from pylightlike.cli import main
from tests.utils import MINKOWSKI_PLANE, write_fixture

# Gamma^1_{01} = 1 alone is not symmetric, so D has torsion.
NOT_STATISTICAL = """\
format_version = 1
name = "broken"

[chart]
coordinates = ["t", "x"]
box = [[-1.0, 1.0], [-1.0, 1.0]]

[metric]
index = 1
entries = [[-1, 0], [0, 1]]

[connection]
kind = "christoffel"
symmetric = false

[[connection.entries]]
index = [1, 0, 1]
expr = "1"

[expect]
default = "pass"
"""


@pytest.fixture(autouse=True)
def _config_home(_no_user_settings: None, monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "config"))


def _run_cli(capsys: pytest.CaptureFixture[str], *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_control_passes(capsys: pytest.CaptureFixture[str]) -> None:
    code, out, err = _run_cli(capsys, "run", "--fixture", "ctrl_sasaki", "--points", "6")
    assert code == 0, err
    assert out.startswith("fixture: ctrl_sasaki\n")
    assert "summary:" in out
    assert "failed" not in err


def test_run_json_to_file(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    target = tmp_path / "reports" / "ex3.json"
    code, out, _ = _run_cli(
        capsys,
        "run",
        "--fixture",
        "ex3_graph",
        "--suite",
        "section2",
        "--points",
        "4",
        "--format",
        "json",
        "--out",
        str(target),
    )
    assert code == 0
    assert out == ""
    data = json.loads(target.read_text(encoding="utf-8"))
    assert data["suites"] == ["section2"]
    assert data["settings"]["points"] == 4
    assert all(row["suite"] == "section2" for row in data["rows"])


def test_run_failure_exits_two(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    path = write_fixture(tmp_path, NOT_STATISTICAL, "broken")
    code, _, err = _run_cli(capsys, "run", "--fixture", str(path), "--points", "4")
    assert code == 2
    assert "lightlike: broken: connection: connection.D.torsion failed (max residual" in err


def test_run_param_override(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    path = write_fixture(tmp_path, MINKOWSKI_PLANE.format(name="mink"), "mink")
    code, out, err = _run_cli(
        capsys,
        "run",
        "--fixture",
        str(path),
        "--suite",
        "connection",
        "--points",
        "4",
        "--param",
        "c=2.5",
        "--format",
        "json",
    )
    assert code == 0, err
    assert json.loads(out)["settings"]["parameters"] == {"c": 2.5}


def test_run_bad_param(capsys: pytest.CaptureFixture[str]) -> None:
    code, out, err = _run_cli(capsys, "run", "--fixture", "ctrl_sasaki", "--param", "lam")
    assert code == 1
    assert out == ""
    assert err.startswith("lightlike: error: fixture 'ctrl_sasaki', suite all:")
    assert "KEY=VALUE" in err


def test_run_unknown_fixture(capsys: pytest.CaptureFixture[str]) -> None:
    code, _, err = _run_cli(capsys, "run", "--fixture", "nope")
    assert code == 1
    assert "unknown fixture 'nope'" in err


def test_run_inapplicable_suite(capsys: pytest.CaptureFixture[str]) -> None:
    code, _, err = _run_cli(capsys, "run", "--fixture", "ctrl_sasaki", "--suite", "ssi")
    assert code == 1
    assert "suite ssi" in err
    assert "does not apply" in err


def test_list(capsys: pytest.CaptureFixture[str]) -> None:
    code, out, _ = _run_cli(capsys, "list")
    assert code == 0
    assert "ex3_graph" in out
    assert "(needs contact, hypersurface)" in out

    code, out, _ = _run_cli(capsys, "list", "--json")
    data = json.loads(out)
    assert set(data["suites"]) == {"connection", "section2", "section3", "contact", "ssi"}
    assert data["suites"]["section2"]["requires"] == ["hypersurface"]
    assert "hyp_x2y2" in data["fixtures"]


def test_show_fixture(capsys: pytest.CaptureFixture[str]) -> None:
    code, out, _ = _run_cli(capsys, "show", "ctrl_sasaki", "--param", "lam=3")
    assert code == 0
    assert 'name = "ctrl_sasaki"' in out
    assert "lam = 3.0" in out


def test_paths_json(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    code, out, _ = _run_cli(capsys, "paths", "--json")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"user_config", "user_settings", "user_cache", "core_defaults", "fixtures"}
    assert Path(data["user_config"]) == (tmp_path / "config" / "pylightlike").resolve()


def test_config_show(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    user_dir = tmp_path / "config" / "pylightlike"
    user_dir.mkdir(parents=True)
    (user_dir / "settings.ini").write_text("[run]\npoints = 12\n")
    code, out, _ = _run_cli(capsys, "config", "show", "--as", "json")
    assert code == 0
    data = json.loads(out)
    assert data["settings"]["run"]["points"] == "12"
    assert data["layers"][1].startswith("user:")

    code, out, _ = _run_cli(capsys, "config", "show")
    assert "[run]" in out and "points = 12" in out


def test_config_show_bad_file(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    code, _, err = _run_cli(capsys, "config", "show", "--config", str(tmp_path / "nope.ini"))
    assert code == 1
    assert "cannot read config file" in err
