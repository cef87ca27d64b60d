"""Residual collection, row statuses and report rendering."""

from __future__ import annotations

import fnmatch
import json
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

PASS = "pass"
FAIL = "fail"
REPORT_ONLY = "report-only"
NOT_EVALUATED = "not-evaluated"
STATUSES = (PASS, FAIL, REPORT_ONLY, NOT_EVALUATED)

IDENTITY = "identity"
REPORT = "report"
CONDITIONAL = "conditional"
PATTERN = "pattern"
ROW_KINDS = (IDENTITY, REPORT, CONDITIONAL, PATTERN)

__all__ = [
    "Check",
    "CheckReport",
    "CheckRow",
    "Expectations",
    "SuiteResult",
    "SCHEMA_VERSION",
    "STATUSES",
    "ROW_KINDS",
]


@dataclass(frozen=True)
class Check:
    """Declaration of one report row.

    ``identity`` is the human-readable formula whose residual is measured.
    Conditional rows name the ``gate`` row whose maximum must be below the
    tolerance before the row is judged.
    """

    check_id: str
    identity: str
    kind: str = IDENTITY
    gate: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ROW_KINDS:
            raise ValueError(f"unknown row kind {self.kind!r}")
        if (self.kind == CONDITIONAL) != (self.gate is not None):
            raise ValueError(f"{self.check_id}: conditional rows need exactly one gate")


@dataclass(frozen=True)
class Expectations:
    """Expected outcome per check id: ``pass`` or ``report-only``.

    Glob patterns in ``report_only`` take precedence over ``passing``;
    unmatched ids get ``default``.
    """

    default: str = PASS
    passing: tuple[str, ...] = ()
    report_only: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.default not in (PASS, REPORT_ONLY):
            raise ValueError(f"default expectation must be pass or report-only, not {self.default!r}")

    def expected(self, check_id: str) -> str:
        if any(fnmatch.fnmatchcase(check_id, pat) for pat in self.report_only):
            return REPORT_ONLY
        if any(fnmatch.fnmatchcase(check_id, pat) for pat in self.passing):
            return PASS
        return self.default


@dataclass(frozen=True)
class CheckRow:
    check_id: str
    suite: str
    identity: str
    kind: str
    max_residual: float
    argmax_point: tuple[float, ...] | None
    sample_count: int
    tolerance: float
    within_tolerance: bool
    expected: str
    status: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "check_id": self.check_id,
            "suite": self.suite,
            "identity": self.identity,
            "kind": self.kind,
            "max_residual": self.max_residual if math.isfinite(self.max_residual) else None,
            "argmax_point": list(self.argmax_point) if self.argmax_point is not None else None,
            "sample_count": self.sample_count,
            "tolerance": self.tolerance,
            "within_tolerance": self.within_tolerance,
            "expected": self.expected,
            "status": self.status,
        }


@dataclass
class _Track:
    check: Check
    worst: float = 0.0
    point: tuple[float, ...] | None = None
    samples: int = 0


class SuiteResult:
    """Maximum absolute residual per check, accumulated over sample sites."""

    def __init__(self, suite: str) -> None:
        self.suite = suite
        self._tracks: dict[str, _Track] = {}

    def __contains__(self, check_id: object) -> bool:
        return check_id in self._tracks

    def __iter__(self):
        return iter(sorted(self._tracks))

    @property
    def checks(self) -> list[Check]:
        return [self._tracks[cid].check for cid in sorted(self._tracks)]

    def declare(
        self,
        check_id: str,
        identity: str,
        kind: str = IDENTITY,
        gate: str | None = None,
    ) -> None:
        if check_id in self._tracks:
            raise ValueError(f"check {check_id!r} declared twice")
        self._tracks[check_id] = _Track(Check(check_id, identity, kind, gate))

    def record(self, check_id: str, point: Sequence[float], values: object) -> None:
        track = self._tracks[check_id]
        arr = np.abs(np.asarray(values, dtype=float))
        worst = float(arr.max()) if arr.size else 0.0
        if not math.isfinite(worst):
            worst = math.inf
        track.samples += 1
        if track.point is None or worst > track.worst:
            track.worst = worst
            track.point = tuple(float(c) for c in point)

    def record_pattern(
        self,
        check_id: str,
        point: Sequence[float],
        lhs: np.ndarray,
        rhs: np.ndarray,
        tol: float,
    ) -> None:
        """Record how many pairs disagree on whether both sides vanish."""
        mismatches = (np.asarray(lhs) < tol) != (np.asarray(rhs) < tol)
        self.record(check_id, point, float(np.count_nonzero(mismatches)))

    def max_residual(self, check_id: str) -> float:
        return self._tracks[check_id].worst

    def merge(self, other: SuiteResult) -> SuiteResult:
        for cid, track in other._tracks.items():
            if cid in self._tracks:
                raise ValueError(f"check {cid!r} present in both results")
            self._tracks[cid] = track
        return self

    def _gate_open(self, check: Check, tol: float) -> bool:
        if check.gate is None:
            return True
        return self._tracks[check.gate].worst < tol

    def failing(self, tol: float) -> list[str]:
        """Ids of judged rows whose residual reaches *tol*."""
        bad = []
        for cid in sorted(self._tracks):
            track = self._tracks[cid]
            if track.check.kind == REPORT or not self._gate_open(track.check, tol):
                continue
            if not track.worst < tol:
                bad.append(cid)
        return bad

    def passed(self, tol: float) -> bool:
        return not self.failing(tol)

    def rows(self, tol: float, expectations: Expectations | None = None) -> list[CheckRow]:
        expectations = expectations or Expectations()
        result = []
        for cid in sorted(self._tracks):
            track = self._tracks[cid]
            check = track.check
            within = track.worst < tol
            expected = expectations.expected(cid)
            if check.kind == REPORT:
                status = REPORT_ONLY
            elif not self._gate_open(check, tol):
                status = NOT_EVALUATED
            elif expected == REPORT_ONLY:
                status = REPORT_ONLY
            else:
                status = PASS if within else FAIL
            result.append(
                CheckRow(
                    check_id=cid,
                    suite=self.suite,
                    identity=check.identity,
                    kind=check.kind,
                    max_residual=track.worst,
                    argmax_point=track.point,
                    sample_count=track.samples,
                    tolerance=tol,
                    within_tolerance=within,
                    expected=expected,
                    status=status,
                )
            )
        return result


@dataclass
class CheckReport:
    fixture: str
    suites: tuple[str, ...]
    settings: Mapping[str, Any]
    sample_points: Mapping[str, np.ndarray] = field(default_factory=dict)
    rows: list[CheckRow] = field(default_factory=list)

    def add(self, rows: Iterable[CheckRow]) -> None:
        self.rows.extend(rows)
        self.rows.sort(key=lambda r: r.check_id)

    def row(self, check_id: str) -> CheckRow:
        for row in self.rows:
            if row.check_id == check_id:
                return row
        raise KeyError(check_id)

    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if r.expected == PASS and r.status == FAIL]

    def exit_code(self) -> int:
        return 2 if self.failures() else 0

    def counts(self) -> dict[str, int]:
        counts = dict.fromkeys(STATUSES, 0)
        for row in self.rows:
            counts[row.status] += 1
        return counts

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "fixture": self.fixture,
            "suites": list(self.suites),
            "settings": dict(self.settings),
            "sample_points": {
                role: np.asarray(points).tolist() for role, points in sorted(self.sample_points.items())
            },
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [
            f"fixture: {self.fixture}",
            f"suites: {', '.join(self.suites)}",
            "settings: " + ", ".join(f"{k}={v}" for k, v in sorted(self.settings.items())),
            "",
            f"{'STATUS':<14} {'MAX RESIDUAL':>12}  CHECK",
        ]
        for row in self.rows:
            value = f"{row.max_residual:.3e}" if math.isfinite(row.max_residual) else "inf"
            lines.append(f"{row.status:<14} {value:>12}  {row.check_id}  [{row.identity}]")
        counts = self.counts()
        lines.append("")
        lines.append("summary: " + ", ".join(f"{counts[s]} {s}" for s in STATUSES))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "text":
            return self.to_text()
        raise ValueError(f"unknown report format {fmt!r}")
