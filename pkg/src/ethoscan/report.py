"""Run reports: stable JSON and human-readable text renderings.

The JSON rendering is schema-stable and key-sorted so reports diff
cleanly and two runs over identical inputs with a fixed evaluation date
are byte-identical.  Timings vary between runs, so JSON includes them
only on request; the text rendering always shows them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from typing import Mapping

from .detectors import Diagnostic
from .facts import Violation

EXIT_CLEAN = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3

# Findings of these types cannot rule out an in-prose disclosure and
# always need a human reader.
HUMAN_CONFIRMATION_TYPES = frozenset({"S8"})
HUMAN_CONFIRMATION_NOTE = "requires human confirmation"


@dataclass(frozen=True)
class RunReport:
    tool_version: str
    evaluation_date: date
    inputs: tuple[str, ...]
    violations: tuple[Violation, ...]
    diagnostics: tuple[Diagnostic, ...]
    timings_ms: Mapping[str, float]

    def __post_init__(self):
        def violation_key(v: Violation):
            return (v.subject, v.behavior_type, [(e.label, e.value, e.location or "") for e in v.evidence])

        object.__setattr__(
            self, "violations",
            tuple(sorted(self.violations, key=violation_key)),
        )
        object.__setattr__(
            self, "diagnostics",
            tuple(sorted(self.diagnostics, key=lambda d: (d.subject, d.detector, d.reason, d.detail))),
        )
        object.__setattr__(self, "timings_ms", dict(self.timings_ms))

    def exit_code(self) -> int:
        if self.violations:
            return EXIT_VIOLATIONS
        if self.diagnostics:
            return EXIT_PARTIAL
        return EXIT_CLEAN


def _violation_to_dict(v: Violation) -> dict:
    out = {
        "behaviorType": v.behavior_type,
        "subject": v.subject,
        "evidence": [
            {"label": e.label, "value": e.value, "location": e.location} for e in v.evidence
        ],
        "ruleTrace": list(v.rule_trace),
    }
    if v.behavior_type in HUMAN_CONFIRMATION_TYPES:
        out["note"] = HUMAN_CONFIRMATION_NOTE
    return out


def report_to_dict(report: RunReport, include_timings: bool = False) -> dict:
    out = {
        "toolVersion": report.tool_version,
        "evaluationDate": report.evaluation_date.isoformat(),
        "inputs": list(report.inputs),
        "violations": [_violation_to_dict(v) for v in report.violations],
        "diagnostics": [
            {"detector": d.detector, "subject": d.subject, "reason": d.reason, "detail": d.detail}
            for d in report.diagnostics
        ],
    }
    if include_timings:
        out["timingsMs"] = {k: round(v, 1) for k, v in sorted(report.timings_ms.items())}
    return out


def render_json(report: RunReport, include_timings: bool = False) -> str:
    return json.dumps(report_to_dict(report, include_timings), indent=2, sort_keys=True) + "\n"


def render_text(report: RunReport) -> str:
    lines = [
        f"ethoscan {report.tool_version} (evaluation date {report.evaluation_date.isoformat()})",
        "inputs: " + ", ".join(report.inputs),
        "",
    ]
    if report.violations:
        lines.append(f"potential violations: {len(report.violations)}")
        for v in report.violations:
            note = f"  ({HUMAN_CONFIRMATION_NOTE})" if v.behavior_type in HUMAN_CONFIRMATION_TYPES else ""
            lines.append(f"  [{v.behavior_type}] {v.subject}{note}")
            for e in v.evidence:
                loc = f"  @ {e.location}" if e.location else ""
                lines.append(f"      {e.label}: {e.value}{loc}")
    else:
        lines.append("potential violations: none")
    if report.diagnostics:
        lines.append(f"could not evaluate: {len(report.diagnostics)}")
        for d in report.diagnostics:
            lines.append(f"  [{d.detector}] {d.subject}: {d.reason} ({d.detail})")
    if report.timings_ms:
        shown = " ".join(f"{k}={report.timings_ms[k]:.1f}" for k in sorted(report.timings_ms))
        lines.append(f"timings (ms): {shown}")
    return "\n".join(lines) + "\n"
