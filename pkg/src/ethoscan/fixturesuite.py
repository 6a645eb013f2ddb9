"""Offline fixture corpus runner.

A manifest lists cases; each case names one or more snapshot files, the
expected violation count per detector, an optional known-false-positive
label, and optional config overrides.  The suite loads every case fully
offline, runs exactly the detectors it names, and returns a pass/fail
matrix with one row per (case, detector) plus a diagnostics row when
the case pins a diagnostics count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path
from typing import Mapping, Optional

from .detectors import DetectorConfig
from .errors import MissingFixtureError
from .runner import RunRequest, execute
from .snapshot import load_snapshot, to_fact_store

_CONFIG_KEYS = {
    "s1Threshold": "s1_threshold",
    "s2RequireExact": "s2_require_exact",
    "s9StaleDays": "s9_stale_days",
    "s8ExcludedPathSegments": "s8_excluded_path_segments",
    "soLinkPattern": "so_link_pattern",
}


@dataclass(frozen=True)
class FixtureCase:
    name: str
    snapshot_paths: tuple[str, ...]
    expected: Mapping[str, int]  # detector tag -> violation count
    fp_class: Optional[str] = None
    config: Mapping[str, object] = field(default_factory=dict)
    expected_diagnostics: Optional[int] = None

    def detector_config(self) -> DetectorConfig:
        cfg = DetectorConfig()
        overrides = dict(self.config)
        if overrides.pop("s1FullLinksOnly", False):
            cfg = cfg.with_strict_so_links()
        mapped = {}
        for key, value in overrides.items():
            if key not in _CONFIG_KEYS:
                raise MissingFixtureError(f"{self.name}: unknown config key {key!r}")
            if key == "s8ExcludedPathSegments":
                value = tuple(value)
            mapped[_CONFIG_KEYS[key]] = value
        return replace(cfg, **mapped) if mapped else cfg


@dataclass(frozen=True)
class FixtureResult:
    case: str
    detector: str
    expected: int
    actual: int

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


def load_manifest(manifest_path: Path | str) -> tuple[date, list[FixtureCase]]:
    path = Path(manifest_path)
    if not path.exists():
        raise MissingFixtureError(str(path))
    doc = json.loads(path.read_text(encoding="utf-8"))
    cases = [
        FixtureCase(
            name=c["name"],
            snapshot_paths=tuple(c["snapshots"]),
            expected=dict(c["expected"]),
            fp_class=c.get("fpClass"),
            config=dict(c.get("config", {})),
            expected_diagnostics=c.get("expectedDiagnostics"),
        )
        for c in doc["cases"]
    ]
    return date.fromisoformat(doc["evaluationDate"]), cases


def run_case(case: FixtureCase, fixtures_root: Path, evaluation_date: date) -> list[FixtureResult]:
    snapshots = []
    for rel in case.snapshot_paths:
        path = fixtures_root / rel
        if not path.exists():
            raise MissingFixtureError(str(path))
        snapshots.append(load_snapshot(path))
    store = to_fact_store(*snapshots)
    primary = snapshots[0]
    types = tuple(sorted(case.expected))
    pair = snapshots[1].repo.full_name if "s2" in types and len(snapshots) > 1 else None

    report = execute(RunRequest(
        store=store,
        primary=primary.repo.full_name,
        types=types,
        evaluation_date=evaluation_date,
        cfg=case.detector_config(),
        issues_available=primary.has_issue_scope,
        pair=pair,
    ))

    counts: dict[str, int] = {t: 0 for t in types}
    for v in report.violations:
        counts[v.behavior_type.lower()] += 1
    rows = [
        FixtureResult(case.name, t, case.expected[t], counts[t])
        for t in types
    ]
    if case.expected_diagnostics is not None:
        rows.append(FixtureResult(case.name, "diagnostics", case.expected_diagnostics, len(report.diagnostics)))
    return rows


def run_fixture_suite(manifest_path: Path | str) -> list[FixtureResult]:
    manifest_path = Path(manifest_path)
    evaluation_date, cases = load_manifest(manifest_path)
    root = manifest_path.parent
    results: list[FixtureResult] = []
    for case in cases:
        results.extend(run_case(case, root, evaluation_date))
    return results


def format_matrix(results: list[FixtureResult]) -> str:
    width = max(len(r.case) for r in results) if results else 10
    lines = [f"{'case'.ljust(width)}  detector     expected  actual  status"]
    for r in results:
        status = "ok" if r.passed else "MISMATCH"
        lines.append(
            f"{r.case.ljust(width)}  {r.detector.ljust(11)}  {str(r.expected).rjust(8)}  {str(r.actual).rjust(6)}  {status}"
        )
    return "\n".join(lines)
