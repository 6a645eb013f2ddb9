"""Shared builders for fact-model objects used across the test suite."""

from __future__ import annotations

import sys
from datetime import datetime, timezone
from pathlib import Path

import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num, name): one acceptance criterion, reported pass/fail at the end"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        marker = item.get_closest_marker("criterion")
        if marker:
            num, name = marker.args
            passed = rep.passed and ACCEPTANCE_RESULTS.get(num, (name, True))[1]
            ACCEPTANCE_RESULTS[num] = (name, passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        name, passed = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num} ({name}): {'PASS' if passed else 'FAIL'}")

sys.path.insert(0, str(Path(__file__).resolve().parent))

from ethoscan.facts import (
    Comment,
    CommitInfo,
    FactStore,
    FileContent,
    IssueFacts,
    RepositoryFacts,
    UserRef,
)
from ethoscan.snapshot import Snapshot

PROJECT_ROOT = Path(__file__).resolve().parents[1]
FIXTURES_DIR = PROJECT_ROOT / "fixtures"


def utc(year, month, day, hour=0, minute=0, second=0) -> datetime:
    return datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)


def make_file(path: str, content: str = "", fetched: bool = True) -> FileContent:
    return FileContent(path=path, content=content, content_count=1 if fetched else 0)


def make_repo(full_name: str = "octo/app", files: list[FileContent] | None = None, **kwargs) -> RepositoryFacts:
    owner, name = full_name.split("/", 1)
    files = list(files or [])
    defaults = dict(
        owner=owner,
        name=name,
        file_count=len(files),
        files=tuple(files),
    )
    defaults.update(kwargs)
    return RepositoryFacts(**defaults)


def make_issue(
    repo: str = "octo/app",
    number: int = 1,
    kind: str = "issue",
    opener: str = "alice",
    comments: list[tuple[str, str]] | None = None,
) -> IssueFacts:
    entries = tuple(Comment(UserRef(author), text) for author, text in (comments or []))
    return IssueFacts(repo=repo, number=number, kind=kind, owner=UserRef(opener), body_and_comments=entries)


def make_commit(sha: str, ts: datetime, diff: str = "", pr_count: int = 0) -> CommitInfo:
    return CommitInfo(sha=sha, timestamp=ts, code_change=diff, pull_request_count=pr_count)


def make_snapshot(repo: RepositoryFacts, issues=None, pages=None, captured=None) -> Snapshot:
    return Snapshot(
        captured_at=captured or utc(2022, 1, 1),
        repo=repo,
        issues=issues,
        external_pages=pages or {},
    )


def store_of(*repos: RepositoryFacts, issues=(), pages=None) -> FactStore:
    return FactStore(repos, issues, pages or {})


@pytest.fixture
def mit_text() -> str:
    return (
        "MIT License\n\nCopyright (c) 2021 Octo\n\n"
        "Permission is hereby granted, free of charge, to any person obtaining a copy "
        "of this software and associated documentation files (the \"Software\"), to deal "
        "in the Software without restriction."
    )


@pytest.fixture
def apache_text() -> str:
    return (
        "Apache License\nVersion 2.0, January 2004\nhttp://www.apache.org/licenses/\n\n"
        "TERMS AND CONDITIONS FOR USE, REPRODUCTION, AND DISTRIBUTION\n"
    )


@pytest.fixture
def gpl3_text() -> str:
    return (
        "GNU GENERAL PUBLIC LICENSE\nVersion 3, 29 June 2007\n\n"
        "Copyright (C) 2007 Free Software Foundation, Inc.\n"
    )
