"""Rewrite the golden reports under ``tests/golden/``.

Usage: ``python tools/regen_golden.py [FIXTURE ...]`` (default: every bundled
fixture).  Review the diff before committing.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from pylightlike.fixtures import available, load_fixture  # noqa: E402
from pylightlike.suites import ALL, RunSettings, run_suites  # noqa: E402

GOLDEN_DIR = ROOT / "tests" / "golden"
GOLDEN_SETTINGS = RunSettings(points=16)

logger = logging.getLogger("regen_golden")


def regenerate(name: str, out_dir: Path = GOLDEN_DIR) -> Path:
    report = run_suites(load_fixture(name), [ALL], GOLDEN_SETTINGS)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.json"
    path.write_text(report.to_json(), encoding="utf-8")
    logger.info("%s: %s", name, ", ".join(f"{n} {s}" for s, n in report.counts().items()))
    return path


def main(argv: list[str]) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("fixtures", nargs="*", help="Fixture names (default: all)")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    unknown = sorted(set(args.fixtures) - set(available()))
    if unknown:
        print(f"unknown fixture(s): {', '.join(unknown)}", file=sys.stderr)
        return 1
    for name in args.fixtures or available():
        print(regenerate(name))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
