"""Orchestration: run selected detectors over a store and assemble a report."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from datetime import date
from typing import Optional

from . import detectors, licenses
from .detectors import DetectorConfig, Diagnostic
from .errors import EthoscanError
from .facts import FactStore, IssueFacts, Violation
from .report import RunReport

ALL_TYPES = ("s1", "s2", "s5", "s6", "s8", "s9")
ISSUE_LEVEL_TYPES = frozenset({"s1", "s8"})
REPO_LEVEL_TYPES = frozenset({"s2", "s5", "s6", "s9"})


class UsageError(EthoscanError):
    """Bad invocation: wrong flags or an input that cannot serve the request."""


@dataclass
class RunRequest:
    store: FactStore
    primary: str  # full name of the repository under analysis
    types: tuple[str, ...]
    evaluation_date: date
    cfg: DetectorConfig = field(default_factory=DetectorConfig)
    issues_available: bool = True
    only_issue_number: Optional[int] = None
    pair: Optional[str] = None  # full name of the s2 comparison repo
    catalog: Optional[licenses.LicenseCatalog] = None
    extra_rules_text: str = ""
    inputs: tuple[str, ...] = ()
    tool_version: str = "0.1.0"


def normalize_types(requested: list[str]) -> tuple[str, ...]:
    out: list[str] = []
    for t in requested:
        tag = t.lower()
        if tag == "all":
            for a in ALL_TYPES:
                if a not in out:
                    out.append(a)
            continue
        if tag not in ALL_TYPES:
            raise UsageError(f"unknown behavior type {t!r} (expected s1, s2, s5, s6, s8, s9, or all)")
        if tag not in out:
            out.append(tag)
    if not out:
        raise UsageError("at least one --type is required")
    return tuple(out)


def _issues_in_scope(req: RunRequest) -> list[IssueFacts]:
    issues = req.store.issues_of(req.primary)
    if req.only_issue_number is None:
        return issues
    chosen = [i for i in issues if i.number == req.only_issue_number]
    if not chosen:
        raise UsageError(f"issue #{req.only_issue_number} not present in {req.primary}")
    return chosen


def execute(req: RunRequest) -> RunReport:
    repo = req.store.repo(req.primary)
    issue_types = [t for t in req.types if t in ISSUE_LEVEL_TYPES]
    if issue_types and not req.issues_available:
        raise UsageError(
            f"types {', '.join(issue_types)} need issue-level facts, but the input snapshot "
            "is repo-scoped (issues: null)"
        )
    if "s2" in req.types and req.pair is None:
        raise UsageError("--type s2 needs --pair with the comparison repository snapshot")

    violations: list[Violation] = []
    diagnostics: list[Diagnostic] = []
    timings: dict[str, float] = {}
    issues = _issues_in_scope(req) if issue_types else []

    for tag in req.types:
        started = time.perf_counter()
        if tag == "s1":
            for issue in issues:
                violations.extend(detectors.detect_s1(
                    issue, repo, req.store.pages, req.cfg,
                    diagnostics=diagnostics, extra_rules_text=req.extra_rules_text,
                ))
        elif tag == "s2":
            pair_repo = req.store.repo(req.pair)
            found = detectors.detect_s2(repo, pair_repo, req.cfg, extra_rules_text=req.extra_rules_text)
            if found:
                violations.append(found)
        elif tag == "s5":
            found = detectors.detect_s5(repo, req.catalog, extra_rules_text=req.extra_rules_text)
            if found:
                violations.append(found)
        elif tag == "s6":
            violations.extend(detectors.detect_s6(repo, req.catalog, extra_rules_text=req.extra_rules_text))
        elif tag == "s8":
            for issue in issues:
                found = detectors.detect_s8(
                    issue, repo, req.store, req.cfg,
                    diagnostics=diagnostics, extra_rules_text=req.extra_rules_text,
                )
                if found:
                    violations.append(found)
        elif tag == "s9":
            found = detectors.detect_s9(
                repo, req.store.pages, req.cfg, req.evaluation_date,
                diagnostics=diagnostics, extra_rules_text=req.extra_rules_text,
            )
            if found:
                violations.append(found)
        timings[tag] = timings.get(tag, 0.0) + (time.perf_counter() - started) * 1000.0

    return RunReport(
        tool_version=req.tool_version,
        evaluation_date=req.evaluation_date,
        inputs=req.inputs or (req.primary,),
        violations=tuple(violations),
        diagnostics=tuple(diagnostics),
        timings_ms=timings,
    )
