"""Live ingestion from a code-hosting REST API (v3-style endpoints).

Every outgoing request is counted against a hard budget and paced by a
minimum interval; hitting the cap raises instead of silently returning
a truncated snapshot.  Offline analysis never touches this module: the
CLI only constructs a client for --repo/--issue inputs.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Any, Optional
from urllib.parse import urlsplit

import requests

from . import pages as page_scan
from .errors import (
    AuthenticationError,
    BudgetExhaustedError,
    DisallowedHostError,
    FactValidationError,
    PartialFetchError,
    RateLimitError,
    RepositoryNotFoundError,
)
from .facts import (
    Comment,
    CommitInfo,
    FileContent,
    IssueFacts,
    ReleaseInfo,
    RepositoryFacts,
    UserRef,
    ISSUE,
    PULL_REQUEST,
)
from .licenses import CHANGELOG_BASENAMES, LICENSE_BASENAMES, README_BASENAMES
from .similarity import SOURCE_EXTENSIONS, file_extension
from .snapshot import Snapshot

DEFAULT_API_BASE = "https://api.github.com"

SCOPE_REPO = "repoLevel"
SCOPE_ISSUE = "issueLevel"
SCOPE_BOTH = "both"

# Hosts external pages may be fetched from (answer site, app store).
ALLOWED_EXTERNAL_HOSTS = frozenset({"stackoverflow.com", "play.google.com"})

_URL_RE = re.compile(r"https?://[^\s<>\"')\]]+")


@dataclass(frozen=True)
class FetchBudget:
    """Hard request cap plus pacing; exceeding the cap aborts loudly."""

    max_requests: int
    min_interval_ms: int = 0

    def __post_init__(self):
        if self.max_requests <= 0:
            raise FactValidationError("max_requests must be positive")
        if self.min_interval_ms < 0:
            raise FactValidationError("min_interval_ms must be non-negative")


class ApiClient:
    """Thin REST client: budget accounting, pacing, pagination."""

    def __init__(
        self,
        budget: FetchBudget,
        token: Optional[str] = None,
        base_url: str = DEFAULT_API_BASE,
        session: Optional[requests.Session] = None,
    ):
        self.budget = budget
        self.base_url = base_url.rstrip("/")
        self.used = 0
        self._last_request_at: Optional[float] = None
        self._session = session or requests.Session()
        self._session.headers["Accept"] = "application/vnd.github+json"
        if token:
            self._session.headers["Authorization"] = f"token {token}"

    def _pace(self) -> None:
        if self.budget.min_interval_ms <= 0 or self._last_request_at is None:
            return
        wait = self.budget.min_interval_ms / 1000.0 - (time.monotonic() - self._last_request_at)
        if wait > 0:
            time.sleep(wait)

    def _request(self, url: str, params: Optional[dict] = None) -> requests.Response:
        if self.used >= self.budget.max_requests:
            raise BudgetExhaustedError(self.used, self.budget.max_requests)
        self._pace()
        self._last_request_at = time.monotonic()
        self.used += 1
        resp = self._session.get(url, params=params, timeout=30)
        if resp.status_code == 401:
            raise AuthenticationError("API authentication failed (check ETHOSCAN_TOKEN)")
        if resp.status_code == 403 and resp.headers.get("X-RateLimit-Remaining") == "0":
            raise RateLimitError("API rate limit exhausted")
        return resp

    def get_json(self, path: str, params: Optional[dict] = None) -> requests.Response:
        return self._request(self.base_url + path, params=params)

    def get_paginated(self, path: str, params: Optional[dict] = None) -> list[Any]:
        """Follow rel="next" links to exhaustion (within budget)."""
        out: list[Any] = []
        params = dict(params or {})
        params.setdefault("per_page", 100)
        resp = self._request(self.base_url + path, params=params)
        while True:
            if resp.status_code == 204:
                return out
            resp.raise_for_status()
            payload = resp.json()
            if not isinstance(payload, list):
                raise PartialFetchError([f"unexpected non-list payload at {path}"])
            out.extend(payload)
            next_url = resp.links.get("next", {}).get("url")
            if not next_url:
                return out
            resp = self._request(next_url)

    def get_text(self, url: str) -> requests.Response:
        return self._request(url)


def _parse_api_datetime(value: str) -> datetime:
    return datetime.fromisoformat(value.replace("Z", "+00:00")).astimezone(timezone.utc)


def _decode_content(payload: dict) -> Optional[str]:
    import base64

    if payload.get("encoding") != "base64" or payload.get("content") is None:
        return None
    raw = base64.b64decode(payload["content"])
    return raw.decode("utf-8", "replace")


def _pick_root_file(files: dict[str, FileContent], basenames: tuple[str, ...]) -> Optional[FileContent]:
    candidates = [
        (basenames.index(f.basename.lower()), f.path, f)
        for f in files.values()
        if f.in_root and f.basename.lower() in basenames
    ]
    if not candidates:
        return None
    candidates.sort(key=lambda t: (t[0], t[1]))
    return candidates[0][2]


def _wants_content(path: str) -> bool:
    if "/" not in path:
        return True
    return file_extension(path) in SOURCE_EXTENSIONS


def fetch_repository(
    owner: str,
    name: str,
    budget: FetchBudget,
    scope: str = SCOPE_BOTH,
    token: Optional[str] = None,
    base_url: str = DEFAULT_API_BASE,
    client: Optional[ApiClient] = None,
) -> Snapshot:
    """Capture one repository into a Snapshot.

    Always fetched: repo metadata, the full file-path tree, contents of
    root files and source files, and contributors.  Repo scope adds the
    license file's commit history (diffs and PR counts), the latest
    release, and the fork list.  Issue scope adds all issues/PRs with
    their comments; a repo-scoped snapshot stores issues as null so
    issue-level detectors can refuse it explicitly.
    """
    if scope not in (SCOPE_REPO, SCOPE_ISSUE, SCOPE_BOTH):
        raise FactValidationError(f"unknown scope {scope!r}")
    api = client or ApiClient(budget, token=token, base_url=base_url)
    full_name = f"{owner}/{name}"

    resp = api.get_json(f"/repos/{owner}/{name}")
    if resp.status_code == 404:
        raise RepositoryNotFoundError(full_name)
    resp.raise_for_status()
    meta = resp.json()
    default_branch = meta.get("default_branch") or "main"

    tree_resp = api.get_json(f"/repos/{owner}/{name}/git/trees/{default_branch}", params={"recursive": "1"})
    blobs: list[str] = []
    if tree_resp.status_code == 404:
        blobs = []  # empty repository: no tree for the default branch
    else:
        tree_resp.raise_for_status()
        tree = tree_resp.json()
        if tree.get("truncated"):
            raise PartialFetchError(["file tree (listing truncated by the API)"])
        blobs = [e["path"] for e in tree.get("tree", ()) if e.get("type") == "blob"]

    files: dict[str, FileContent] = {}
    for path in sorted(blobs):
        if not _wants_content(path):
            files[path] = FileContent(path=path, content="", content_count=0)
            continue
        content_resp = api.get_json(f"/repos/{owner}/{name}/contents/{path}", params={"ref": default_branch})
        if content_resp.status_code == 404:
            files[path] = FileContent(path=path, content="", content_count=0)
            continue
        content_resp.raise_for_status()
        decoded = _decode_content(content_resp.json())
        if decoded is None:
            files[path] = FileContent(path=path, content="", content_count=0)
        else:
            files[path] = FileContent(path=path, content=decoded, content_count=1)

    contributors = frozenset(
        UserRef(entry["login"])
        for entry in api.get_paginated(f"/repos/{owner}/{name}/contributors")
        if entry.get("login")
    )

    license_file = _pick_root_file(files, LICENSE_BASENAMES)
    readme_file = _pick_root_file(files, README_BASENAMES)
    changelog_file = _pick_root_file(files, CHANGELOG_BASENAMES)

    license_commits: tuple[CommitInfo, ...] = ()
    latest_release: Optional[ReleaseInfo] = None
    fork_list: tuple[str, ...] = ()
    if scope in (SCOPE_REPO, SCOPE_BOTH):
        if license_file is not None:
            license_commits = _fetch_license_history(api, owner, name, license_file.path)
        release_resp = api.get_json(f"/repos/{owner}/{name}/releases/latest")
        if release_resp.status_code not in (404,):
            release_resp.raise_for_status()
            body = release_resp.json()
            if body.get("published_at"):
                latest_release = ReleaseInfo(
                    tag=body.get("tag_name") or "",
                    published_date=_parse_api_datetime(body["published_at"]).date(),
                )
        fork_list = tuple(
            f["full_name"] for f in api.get_paginated(f"/repos/{owner}/{name}/forks") if f.get("full_name")
        )

    external_links: list[str] = []
    if meta.get("homepage"):
        external_links.append(meta["homepage"])
    for url in _URL_RE.findall(meta.get("description") or ""):
        if url not in external_links:
            external_links.append(url)

    repo = RepositoryFacts(
        owner=owner,
        name=name,
        is_fork=bool(meta.get("fork")),
        parent_full_name=(meta.get("parent") or {}).get("full_name"),
        fork_list=fork_list,
        file_count=len(blobs),
        files=tuple(files[p] for p in sorted(files)),
        license_file=license_file,
        readme_file=readme_file,
        changelog_file=changelog_file,
        contributors=contributors,
        latest_release=latest_release,
        license_commits=license_commits,
        external_links=tuple(external_links),
    )

    issues: Optional[tuple[IssueFacts, ...]] = None
    if scope in (SCOPE_ISSUE, SCOPE_BOTH):
        issues = _fetch_issues(api, owner, name, full_name)

    return Snapshot(
        captured_at=datetime.now(timezone.utc),
        repo=repo,
        issues=issues,
        external_pages={},
    )


def _fetch_license_history(api: ApiClient, owner: str, name: str, path: str) -> tuple[CommitInfo, ...]:
    listing = api.get_paginated(f"/repos/{owner}/{name}/commits", params={"path": path})
    commits: list[CommitInfo] = []
    for entry in reversed(listing):  # API returns newest first
        sha = entry["sha"]
        detail_resp = api.get_json(f"/repos/{owner}/{name}/commits/{sha}")
        detail_resp.raise_for_status()
        detail = detail_resp.json()
        patches = [
            f.get("patch", "")
            for f in detail.get("files", ())
            if f.get("filename") == path and f.get("patch")
        ]
        pulls = api.get_paginated(f"/repos/{owner}/{name}/commits/{sha}/pulls")
        commits.append(CommitInfo(
            sha=sha,
            timestamp=_parse_api_datetime(entry["commit"]["committer"]["date"]),
            code_change="\n".join(patches),
            pull_request_count=len(pulls),
        ))
    return tuple(commits)


def _fetch_issues(api: ApiClient, owner: str, name: str, full_name: str) -> tuple[IssueFacts, ...]:
    listing = api.get_paginated(
        f"/repos/{owner}/{name}/issues",
        params={"state": "all", "direction": "asc", "sort": "created"},
    )
    issues: list[IssueFacts] = []
    for entry in listing:
        number = entry["number"]
        opener = UserRef(entry.get("user", {}).get("login") or "ghost")
        body_entries = [Comment(opener, entry.get("body") or "")]
        for c in api.get_paginated(f"/repos/{owner}/{name}/issues/{number}/comments"):
            author = UserRef(c.get("user", {}).get("login") or "ghost")
            body_entries.append(Comment(author, c.get("body") or ""))
        issues.append(IssueFacts(
            repo=full_name,
            number=number,
            kind=PULL_REQUEST if "pull_request" in entry else ISSUE,
            owner=opener,
            body_and_comments=tuple(body_entries),
        ))
    return tuple(issues)


def fetch_external_page(
    url: str,
    budget: FetchBudget,
    client: Optional[ApiClient] = None,
    allowed_hosts: frozenset[str] = ALLOWED_EXTERNAL_HOSTS,
) -> Optional[str]:
    """Fetch one allowlisted external page; None when the page is unavailable.

    Hosts outside the allowlist are rejected outright: the tool only
    ever needs the answer site and the app store.
    """
    host = (urlsplit(url).hostname or "").lower()
    bare = host[4:] if host.startswith("www.") else host
    if bare not in allowed_hosts:
        raise DisallowedHostError(url)
    api = client or ApiClient(budget)
    resp = api.get_text(url)
    if resp.status_code != 200:
        return None
    return resp.text


def collect_external_pages(
    snapshot: Snapshot,
    budget: FetchBudget,
    so_link_pattern: str,
    client: Optional[ApiClient] = None,
    allowed_hosts: frozenset[str] = ALLOWED_EXTERNAL_HOSTS,
) -> Snapshot:
    """Fetch and cache every external page the detectors will consult:
    answer links cited in issues, store links in repo metadata/README."""
    api = client or ApiClient(budget)
    wanted: list[str] = []
    for issue in snapshot.issues or ():
        for comment in issue.body_and_comments:
            for link in page_scan.extract_so_links(comment.text, so_link_pattern):
                if link not in wanted:
                    wanted.append(link)
    readme = snapshot.repo.readme_file
    for link in page_scan.extract_store_links(
        *(list(snapshot.repo.external_links) + ([readme.content] if readme else []))
    ):
        if link not in wanted:
            wanted.append(link)

    cache = dict(snapshot.external_pages)
    for url in wanted:
        if url in cache:
            continue
        cache[url] = fetch_external_page(url, budget, client=api, allowed_hosts=allowed_hosts)
    return replace(snapshot, external_pages=cache)
