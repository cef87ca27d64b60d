from __future__ import annotations

import json
from pathlib import Path

import pytest

from pylightlike.fixtures import available, load_fixture
from pylightlike.suites import ALL, RunSettings, run_suites, settings_from

GOLDEN_DIR = Path(__file__).parent / "golden"
# same settings as tools/regen_golden.py
GOLDEN_SETTINGS = RunSettings(points=16)


@pytest.mark.parametrize("name", available())
def test_report_matches_golden(name: str) -> None:
    path = GOLDEN_DIR / f"{name}.json"
    if not path.is_file():
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(run_suites(load_fixture(name), [ALL], GOLDEN_SETTINGS).to_json(), encoding="utf-8")
        pytest.fail(f"no golden report for {name}; wrote {path}, review it and commit")
    golden = json.loads(path.read_text(encoding="utf-8"))
    fixture = load_fixture(name, parameters=golden["settings"].get("parameters"))
    report = run_suites(fixture, [ALL], settings_from(golden["settings"]))
    current = json.loads(report.to_json())

    assert current["schema_version"] == golden["schema_version"]
    assert current["suites"] == golden["suites"]
    assert current["settings"] == golden["settings"]
    assert [r["check_id"] for r in current["rows"]] == [r["check_id"] for r in golden["rows"]]
    for now, then in zip(current["rows"], golden["rows"]):
        cid = now["check_id"]
        assert now["status"] == then["status"], cid
        assert now["expected"] == then["expected"], cid
        if then["max_residual"] is None:
            assert now["max_residual"] is None, cid
        else:
            assert now["max_residual"] == pytest.approx(then["max_residual"], rel=1e-6, abs=1e-9), cid


@pytest.mark.parametrize("name", ["ex3_graph", "ctrl_sasaki_indef"])
def test_json_is_byte_identical_across_runs(name: str) -> None:
    settings = settings_from({"points": 5})
    first = run_suites(load_fixture(name), [ALL], settings).to_json()
    second = run_suites(load_fixture(name), [ALL], settings).to_json()
    assert first == second
