"""Typed, immutable view of one or more repositories and their issues.

Everything a detector reads lives here: repository metadata, file
contents, contributors, commit history of the license file, issues and
pull requests (a pull request is modeled as a kind of issue, so every
issue query includes PRs), and cached external pages.  All records are
frozen; a store never changes after construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date, datetime
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from .errors import FactValidationError, UnknownRepoError

_SHA_RE = re.compile(r"^[0-9a-f]{7,40}$")

ISSUE = "issue"
PULL_REQUEST = "pullRequest"


@dataclass(frozen=True, order=True)
class UserRef:
    """An account name; compared by exact, case-sensitive string equality."""

    login: str

    def __post_init__(self):
        if not self.login:
            raise FactValidationError("user login must be non-empty")


@dataclass(frozen=True)
class FileContent:
    """One file: repo-relative path plus its text content.

    ``content`` is the file bytes decoded as UTF-8 with lossy
    replacement, so binary blobs never abort analysis.  ``content_count``
    is the number of content payloads stored for the path: 0 means the
    path is known but its content was not fetched, 1 means content is
    present (an empty file fetched successfully still has count 1).
    """

    path: str
    content: str = ""
    content_count: int = 1

    def __post_init__(self):
        if self.path.startswith("/") or "\\" in self.path:
            raise FactValidationError(f"path must be repo-relative with forward slashes: {self.path!r}")
        if self.content_count < 0:
            raise FactValidationError("content_count must be non-negative")

    @property
    def is_binary(self) -> bool:
        """Binary-looking files (NUL byte survives lossy decoding) are skipped by similarity scans."""
        return "\x00" in self.content

    @property
    def basename(self) -> str:
        return self.path.rsplit("/", 1)[-1]

    @property
    def in_root(self) -> bool:
        return "/" not in self.path


@dataclass(frozen=True)
class CommitInfo:
    sha: str
    timestamp: datetime
    code_change: str = ""
    pull_request_count: int = 0

    def __post_init__(self):
        if not _SHA_RE.match(self.sha):
            raise FactValidationError(f"sha must be 7-40 lowercase hex characters: {self.sha!r}")
        if self.pull_request_count < 0:
            raise FactValidationError("pull_request_count must be non-negative")


@dataclass(frozen=True)
class ReleaseInfo:
    tag: str
    published_date: date


@dataclass(frozen=True)
class RepositoryFacts:
    """Repository-level facts, the unit of repo-scoped detection."""

    owner: str
    name: str
    is_fork: bool = False
    parent_full_name: Optional[str] = None
    fork_list: tuple[str, ...] = ()
    file_count: int = 0
    files: tuple[FileContent, ...] = ()
    license_file: Optional[FileContent] = None
    readme_file: Optional[FileContent] = None
    changelog_file: Optional[FileContent] = None
    contributors: frozenset[UserRef] = frozenset()
    latest_release: Optional[ReleaseInfo] = None
    license_commits: tuple[CommitInfo, ...] = ()
    external_links: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "fork_list", tuple(self.fork_list))
        object.__setattr__(self, "files", tuple(self.files))
        object.__setattr__(self, "contributors", frozenset(self.contributors))
        object.__setattr__(self, "license_commits", tuple(self.license_commits))
        object.__setattr__(self, "external_links", tuple(self.external_links))
        if not self.owner or not self.name:
            raise FactValidationError("repository owner and name must be non-empty")
        if self.file_count < 0:
            raise FactValidationError("file_count must be non-negative")
        if self.full_name in self.fork_list:
            raise FactValidationError(f"fork_list must not contain the repository itself: {self.full_name}")
        if self.license_file is not None and not self.license_file.in_root:
            raise FactValidationError(
                f"license_file must sit in the repository root, got {self.license_file.path!r}"
            )
        shas = [c.sha for c in self.license_commits]
        if len(set(shas)) != len(shas):
            raise FactValidationError("license_commits contains duplicate commit identifiers")
        stamps = [c.timestamp for c in self.license_commits]
        if stamps != sorted(stamps):
            raise FactValidationError("license_commits must be ordered oldest first")

    @property
    def full_name(self) -> str:
        return f"{self.owner}/{self.name}"

    def file_at(self, path: str) -> Optional[FileContent]:
        for f in self.files:
            if f.path == path:
                return f
        return None


@dataclass(frozen=True)
class Comment:
    """One body or comment entry of an issue, in posting order."""

    author: UserRef
    text: str


@dataclass(frozen=True)
class IssueFacts:
    """An issue or pull request; PRs take part in every issue query."""

    repo: str
    number: int
    kind: str
    owner: UserRef
    body_and_comments: tuple[Comment, ...] = ()
    linked_commits: tuple[CommitInfo, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body_and_comments", tuple(self.body_and_comments))
        object.__setattr__(self, "linked_commits", tuple(self.linked_commits))
        if self.number <= 0:
            raise FactValidationError("issue number must be positive")
        if self.kind not in (ISSUE, PULL_REQUEST):
            raise FactValidationError(f"issue kind must be {ISSUE!r} or {PULL_REQUEST!r}, got {self.kind!r}")

    @property
    def is_pull_request(self) -> bool:
        return self.kind == PULL_REQUEST

    @property
    def subject(self) -> str:
        return f"{self.repo}#{self.number}"


@dataclass(frozen=True)
class EvidenceItem:
    """One labeled piece of evidence; labels come from the per-detector vocabulary."""

    label: str
    value: str
    location: Optional[str] = None


@dataclass(frozen=True)
class Violation:
    """One detected behavior instance with its evidence and rule trace."""

    behavior_type: str
    subject: str
    evidence: tuple[EvidenceItem, ...]
    rule_trace: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "evidence", tuple(self.evidence))
        object.__setattr__(self, "rule_trace", tuple(self.rule_trace))
        if self.behavior_type not in BEHAVIOR_TYPES:
            raise FactValidationError(f"unknown behavior type {self.behavior_type!r}")
        if not self.evidence:
            raise FactValidationError("a violation must carry at least one evidence item")


BEHAVIOR_TYPES = ("S1", "S2", "S5", "S6", "S8", "S9")


class FactStore:
    """Immutable graph of repositories, issues, and cached external pages.

    A store may merge several snapshots (soft-fork checks need two
    repositories; self-promotion checks need the promoted repository's
    contributor set).  Safe to share across concurrent readers.
    """

    def __init__(
        self,
        repos: Iterable[RepositoryFacts] = (),
        issues: Iterable[IssueFacts] = (),
        pages: Mapping[str, Optional[str]] | None = None,
    ):
        by_name: dict[str, RepositoryFacts] = {}
        for r in repos:
            by_name[r.full_name] = r
        self._repos = MappingProxyType(by_name)
        self._issues = tuple(sorted(issues, key=lambda i: (i.repo, i.number)))
        seen = set()
        for i in self._issues:
            key = (i.repo, i.number)
            if key in seen:
                raise FactValidationError(f"duplicate issue number {i.number} in {i.repo}")
            seen.add(key)
        self._pages = MappingProxyType(dict(pages or {}))

    @property
    def repos(self) -> Mapping[str, RepositoryFacts]:
        return self._repos

    @property
    def issues(self) -> tuple[IssueFacts, ...]:
        return self._issues

    @property
    def pages(self) -> Mapping[str, Optional[str]]:
        """Cached external pages: URL -> page text, or None when known-unavailable."""
        return self._pages

    def repo(self, full_name: str) -> RepositoryFacts:
        try:
            return self._repos[full_name]
        except KeyError:
            raise UnknownRepoError(full_name) from None

    def has_repo(self, full_name: str) -> bool:
        return full_name in self._repos

    def issues_of(self, full_name: str) -> list[IssueFacts]:
        """All issues and pull requests of a repository, ordered by number."""
        self.repo(full_name)
        return [i for i in self._issues if i.repo == full_name]

    def is_contributor(self, user: UserRef, full_name: str) -> bool:
        """Exact, case-sensitive membership in the repo's contributor set."""
        return user in self.repo(full_name).contributors

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactStore):
            return NotImplemented
        return (
            dict(self._repos) == dict(other._repos)
            and self._issues == other._issues
            and dict(self._pages) == dict(other._pages)
        )

    def __repr__(self) -> str:
        return f"FactStore(repos={sorted(self._repos)}, issues={len(self._issues)}, pages={len(self._pages)})"


def issues_of(store: FactStore, full_name: str) -> list[IssueFacts]:
    return store.issues_of(full_name)


def is_contributor(store: FactStore, user: UserRef, full_name: str) -> bool:
    return store.is_contributor(user, full_name)


def export_base_facts(store: FactStore) -> dict[str, set[tuple]]:
    """Relational view of a store for the rule engine.

    The exported predicates (documented in docs/rule-language.md):

      repo/1, is_fork/1, parent_of/2 (child, parent),
      in_fork_list/2 (parent, child), contributor/2 (login, repo),
      file/2 (repo, path), file_count/2, has_license_file/1,
      has_readme/1, has_changelog/1, latest_release/3 (repo, tag, date),
      license_commit/3 (repo, index, sha), commit_pr_count/3
      (repo, sha, count), external_link/2, issue_in/2 (issue-id, repo),
      issue_number/2, issue_owner/2, pull_request/1,
      issue_comment/4 (issue-id, index, author, text).

    Issue identifiers are strings of the form ``owner/name#number``.
    File contents are deliberately not exported; content-level checks
    (similarity, citation search) run procedurally in the detectors.
    """
    facts: dict[str, set[tuple]] = {
        "repo": set(), "is_fork": set(), "parent_of": set(), "in_fork_list": set(),
        "contributor": set(), "file": set(), "file_count": set(),
        "has_license_file": set(), "has_readme": set(), "has_changelog": set(),
        "latest_release": set(), "license_commit": set(), "commit_pr_count": set(),
        "external_link": set(), "issue_in": set(), "issue_number": set(),
        "issue_owner": set(), "pull_request": set(), "issue_comment": set(),
    }
    for full_name, r in store.repos.items():
        facts["repo"].add((full_name,))
        if r.is_fork:
            facts["is_fork"].add((full_name,))
        if r.parent_full_name:
            facts["parent_of"].add((full_name, r.parent_full_name))
        for child in r.fork_list:
            facts["in_fork_list"].add((full_name, child))
        for user in r.contributors:
            facts["contributor"].add((user.login, full_name))
        for f in r.files:
            facts["file"].add((full_name, f.path))
        facts["file_count"].add((full_name, r.file_count))
        if r.license_file is not None:
            facts["has_license_file"].add((full_name,))
        if r.readme_file is not None:
            facts["has_readme"].add((full_name,))
        if r.changelog_file is not None:
            facts["has_changelog"].add((full_name,))
        if r.latest_release is not None:
            facts["latest_release"].add((full_name, r.latest_release.tag, r.latest_release.published_date))
        for idx, c in enumerate(r.license_commits):
            facts["license_commit"].add((full_name, idx, c.sha))
            facts["commit_pr_count"].add((full_name, c.sha, c.pull_request_count))
        for url in r.external_links:
            facts["external_link"].add((full_name, url))
    for issue in store.issues:
        iid = issue.subject
        facts["issue_in"].add((iid, issue.repo))
        facts["issue_number"].add((iid, issue.number))
        facts["issue_owner"].add((iid, issue.owner.login))
        if issue.is_pull_request:
            facts["pull_request"].add((iid,))
        for idx, c in enumerate(issue.body_and_comments):
            facts["issue_comment"].add((iid, idx, c.author.login, c.text))
    return facts
