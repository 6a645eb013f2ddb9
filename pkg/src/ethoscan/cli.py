"""Command-line entry point.

Exactly one input source per run: a live repository (--repo), an
offline snapshot (--snapshot), or a single live issue (--issue URL).
Exit status: 0 clean, 1 potential violations found, 2 usage or
configuration error, 3 ran but some conditions could not be evaluated.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import replace
from datetime import date, datetime, timezone
from pathlib import Path

from . import __version__
from .detectors import DetectorConfig
from .errors import EthoscanError
from .licenses import load_catalog
from .report import EXIT_USAGE, render_json, render_text
from .runner import ISSUE_LEVEL_TYPES, RunRequest, UsageError, execute, normalize_types
from .snapshot import load_snapshot, save_snapshot, to_fact_store

_ISSUE_URL_RE = re.compile(
    r"(?:https?://(?:www\.)?github\.com/)?([A-Za-z0-9_.-]+)/([A-Za-z0-9_.-]+)"
    r"(?:/(?:issues|pull)/(\d+)|#(\d+))$"
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ethoscan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("check", help="run detectors over a repository, snapshot, or issue")

    src = check.add_mutually_exclusive_group(required=True)
    src.add_argument("--repo", metavar="OWNER/NAME", help="fetch a live repository")
    src.add_argument("--snapshot", metavar="PATH", help="analyze an offline snapshot bundle")
    src.add_argument("--issue", metavar="URL", help="fetch and analyze one live issue/PR")

    check.add_argument("--type", action="append", default=[], metavar="TYPE",
                       help="behavior type to check: s1 s2 s5 s6 s8 s9 or all (repeatable)")
    check.add_argument("--format", choices=("json", "text"), default="text")
    check.add_argument("--date", metavar="YYYY-MM-DD",
                       help="evaluation date (default: today, UTC); fix it for reproducible runs")
    check.add_argument("--pair", action="append", default=[], metavar="PATH",
                       help="extra snapshot: first one is the s2 comparison repo, all of them "
                            "resolve repository links for s8")
    check.add_argument("--timings", action="store_true", help="include per-detector timings in JSON output")
    check.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")

    check.add_argument("--rules", action="append", default=[], metavar="PATH",
                       help="extra rule files appended to every selected rule pack")
    check.add_argument("--licenses", metavar="PATH", help="license catalog override (JSON)")
    check.add_argument("--s1-threshold", type=float, default=None, metavar="RATIO")
    check.add_argument("--s9-stale-days", type=int, default=None, metavar="DAYS")
    check.add_argument("--s8-exclude", action="append", default=[], metavar="SEGMENT",
                       help="URL path segments excluded from s8 (replaces the default list)")
    check.add_argument("--extensions", metavar="EXT,EXT",
                       help="source-file extension allowlist override (comma separated)")
    check.add_argument("--s1-full-links-only", action="store_true",
                       help="compatibility behavior: extract only full-form answer links")

    check.add_argument("--max-requests", type=int, default=None, metavar="N",
                       help="live fetch request cap (default 300 with a token, 50 without)")
    check.add_argument("--min-interval-ms", type=int, default=0, metavar="MS")
    check.add_argument("--api-base", default=None, metavar="URL")
    check.add_argument("--save-snapshot", metavar="PATH",
                       help="persist the fetched snapshot for offline reruns")
    return parser


def _build_config(args) -> DetectorConfig:
    cfg = DetectorConfig()
    if args.s1_threshold is not None:
        cfg = replace(cfg, s1_threshold=args.s1_threshold)
    if args.s9_stale_days is not None:
        cfg = replace(cfg, s9_stale_days=args.s9_stale_days)
    if args.s8_exclude:
        cfg = replace(cfg, s8_excluded_path_segments=tuple(args.s8_exclude))
    if args.extensions:
        exts = frozenset(e.strip().lstrip(".").lower() for e in args.extensions.split(",") if e.strip())
        cfg = replace(cfg, source_extensions=exts)
    if args.s1_full_links_only:
        cfg = cfg.with_strict_so_links()
    return cfg


def _parse_issue_url(value: str) -> tuple[str, str, int]:
    m = _ISSUE_URL_RE.match(value.strip())
    if not m:
        raise UsageError(
            f"--issue expects a URL like https://github.com/OWNER/NAME/issues/N "
            f"or OWNER/NAME#N, got {value!r}"
        )
    number = m.group(3) or m.group(4)
    return m.group(1), m.group(2), int(number)


def _live_fetch(args, types, cfg):
    # imported lazily so snapshot runs never construct a network client
    from .github_api import ApiClient, FetchBudget, SCOPE_BOTH, SCOPE_REPO, collect_external_pages, fetch_repository

    token = os.environ.get("ETHOSCAN_TOKEN") or None
    max_requests = args.max_requests
    if max_requests is None:
        max_requests = 300 if token else 50
    budget = FetchBudget(max_requests=max_requests, min_interval_ms=args.min_interval_ms)
    base_url = args.api_base or "https://api.github.com"
    client = ApiClient(budget, token=token, base_url=base_url)

    only_issue = None
    if args.issue:
        owner, name, only_issue = _parse_issue_url(args.issue)
    else:
        if "/" not in args.repo:
            raise UsageError(f"--repo expects OWNER/NAME, got {args.repo!r}")
        owner, name = args.repo.split("/", 1)

    need_issues = bool(ISSUE_LEVEL_TYPES.intersection(types)) or only_issue is not None
    scope = SCOPE_BOTH if need_issues else SCOPE_REPO
    snapshot = fetch_repository(owner, name, budget, scope=scope, client=client)
    snapshot = collect_external_pages(snapshot, budget, cfg.so_link_pattern, client=client)
    if args.save_snapshot:
        save_snapshot(snapshot, args.save_snapshot)
    return snapshot, only_issue


def run_check(args) -> int:
    types = normalize_types(args.type)
    explicit = {t.lower() for t in args.type}
    # "all" runs whatever the inputs support: without --pair there is no
    # comparison repo, so the pair check drops out unless asked for by name
    if "s2" in types and not args.pair and "s2" not in explicit:
        types = tuple(t for t in types if t != "s2")
    cfg = _build_config(args)

    if args.date:
        evaluation_date = date.fromisoformat(args.date)
    else:
        evaluation_date = datetime.now(timezone.utc).date()

    extra_rules_text = ""
    for rule_path in args.rules:
        extra_rules_text += Path(rule_path).read_text(encoding="utf-8") + "\n"
    catalog = load_catalog(Path(args.licenses)) if args.licenses else None

    only_issue = None
    if args.snapshot:
        snapshot = load_snapshot(args.snapshot)
    else:
        snapshot, only_issue = _live_fetch(args, types, cfg)

    # likewise, a repo-scoped snapshot cannot serve issue-level checks
    if not snapshot.has_issue_scope:
        implied = ISSUE_LEVEL_TYPES.difference(explicit)
        types = tuple(t for t in types if t not in implied)
    if not types:
        raise UsageError("no requested type is runnable with this input")

    aux = [load_snapshot(p) for p in args.pair]
    store = to_fact_store(snapshot, *aux)

    inputs = [snapshot.repo.full_name if only_issue is None else f"{snapshot.repo.full_name}#{only_issue}"]
    inputs += [s.repo.full_name for s in aux]

    report = execute(RunRequest(
        store=store,
        primary=snapshot.repo.full_name,
        types=types,
        evaluation_date=evaluation_date,
        cfg=cfg,
        issues_available=snapshot.has_issue_scope,
        only_issue_number=only_issue,
        pair=aux[0].repo.full_name if aux else None,
        catalog=catalog,
        extra_rules_text=extra_rules_text,
        inputs=tuple(inputs),
        tool_version=__version__,
    ))

    rendered = render_json(report, include_timings=args.timings) if args.format == "json" else render_text(report)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    else:
        sys.stdout.write(rendered)
    return report.exit_code()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            return run_check(args)
        parser.error(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EthoscanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
