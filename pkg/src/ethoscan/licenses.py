"""Repo-level license detection and license-change extraction.

Detection is deliberately simple and mirrors how code hosts surface
repository licenses: a license file in the repository root wins, then a
recognizable license mention in the README.  Identification works by
matching distinctive phrases (for license text and diffs) or names,
ids, and aliases (for prose) from a bundled catalog; the longest match
wins, which disambiguates families like GPL/LGPL/AGPL.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import MissingDiffError
from .facts import CommitInfo, FileContent, RepositoryFacts

SOURCE_LICENSE_FILE = "licenseFile"
SOURCE_README = "readme"

LICENSE_BASENAMES = ("license", "license.md", "license.txt", "copying", "copying.md")
README_BASENAMES = ("readme.md", "readme", "readme.txt", "readme.rst")
CHANGELOG_BASENAMES = ("changelog.md", "changelog", "changelog.txt", "changelog.rst")


@dataclass(frozen=True)
class LicenseInfo:
    spdx_id: str  # catalog id, or "unknown" for an unrecognized license file
    source: str  # SOURCE_LICENSE_FILE or SOURCE_README
    matched_name: str


@dataclass(frozen=True)
class LicenseChangeEvent:
    commit: CommitInfo
    from_license: str
    to_license: str


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spdx_id: str
    aliases: tuple[str, ...]
    phrases: tuple[str, ...]
    canonical_header: str

    def mention_terms(self) -> tuple[str, ...]:
        return (self.name, self.spdx_id) + self.aliases


class LicenseCatalog:
    def __init__(self, entries: list[CatalogEntry]):
        self.entries = tuple(entries)
        self._mention_patterns = [
            (entry, term, re.compile(r"(?<!\w)" + re.escape(term.lower()) + r"(?!\w)"))
            for entry in self.entries
            for term in entry.mention_terms()
        ]

    def identify_text(self, text: str) -> Optional[tuple[CatalogEntry, str]]:
        """Best catalog entry for a blob of license text (longest phrase wins)."""
        haystack = _normalize(text)
        best: Optional[tuple[CatalogEntry, str]] = None
        for entry in self.entries:
            for phrase in entry.phrases:
                needle = _normalize(phrase)
                if needle and needle in haystack:
                    if best is None or len(needle) > len(_normalize(best[1])):
                        best = (entry, phrase)
        return best

    def find_mention(self, text: str) -> Optional[tuple[CatalogEntry, str]]:
        """Case-insensitive license name/id mention in prose (longest wins)."""
        haystack = _normalize(text)
        best: Optional[tuple[CatalogEntry, str]] = None
        for entry, term, pattern in self._mention_patterns:
            if pattern.search(haystack):
                if best is None or len(term) > len(best[1]):
                    best = (entry, term)
        return best

    def mentions_any_license(self, text: str) -> bool:
        return self.find_mention(text) is not None


def _normalize(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip().lower()


def load_catalog(path: Optional[Path] = None) -> LicenseCatalog:
    """Load the bundled catalog, or an override file with the same schema."""
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    else:
        raw = json.loads(
            resources.files("ethoscan.data").joinpath("licenses.json").read_text(encoding="utf-8")
        )
    entries = [
        CatalogEntry(
            name=item["name"],
            spdx_id=item["spdxId"],
            aliases=tuple(item.get("aliases", ())),
            phrases=tuple(item["phrases"]),
            canonical_header=item.get("canonicalHeader", ""),
        )
        for item in raw["licenses"]
    ]
    return LicenseCatalog(entries)


_DEFAULT_CATALOG: Optional[LicenseCatalog] = None


def default_catalog() -> LicenseCatalog:
    global _DEFAULT_CATALOG
    if _DEFAULT_CATALOG is None:
        _DEFAULT_CATALOG = load_catalog()
    return _DEFAULT_CATALOG


def _root_file_matching(repo: RepositoryFacts, basenames: tuple[str, ...]) -> Optional[FileContent]:
    ranked: list[tuple[int, str, FileContent]] = []
    for f in repo.files:
        if not f.in_root:
            continue
        base = f.basename.lower()
        if base in basenames:
            ranked.append((basenames.index(base), f.path, f))
    if not ranked:
        return None
    ranked.sort(key=lambda t: (t[0], t[1]))
    return ranked[0][2]


def find_license_file(repo: RepositoryFacts) -> Optional[FileContent]:
    """Root-level license file; paths outside the root are never considered."""
    if repo.license_file is not None:
        return repo.license_file
    return _root_file_matching(repo, LICENSE_BASENAMES)


def find_readme(repo: RepositoryFacts) -> Optional[FileContent]:
    if repo.readme_file is not None:
        return repo.readme_file
    return _root_file_matching(repo, README_BASENAMES)


def find_changelog(repo: RepositoryFacts) -> Optional[FileContent]:
    if repo.changelog_file is not None:
        return repo.changelog_file
    return _root_file_matching(repo, CHANGELOG_BASENAMES)


def detect_repo_license(
    repo: RepositoryFacts, catalog: Optional[LicenseCatalog] = None
) -> Optional[LicenseInfo]:
    """Repo-level license, if any.

    Priority: root license file first (its presence counts even when the
    text matches no catalog entry; the id is then "unknown"), then a
    catalog name mentioned in the README.  Absence is a valid result.
    """
    catalog = catalog or default_catalog()
    license_file = find_license_file(repo)
    if license_file is not None:
        identified = catalog.identify_text(license_file.content)
        if identified is not None:
            return LicenseInfo(identified[0].spdx_id, SOURCE_LICENSE_FILE, identified[0].name)
        return LicenseInfo("unknown", SOURCE_LICENSE_FILE, license_file.basename)
    readme = find_readme(repo)
    if readme is not None:
        mention = catalog.find_mention(readme.content)
        if mention is not None:
            return LicenseInfo(mention[0].spdx_id, SOURCE_README, mention[1])
    return None


def _diff_sides(diff: str) -> tuple[str, str]:
    removed, added = [], []
    for line in diff.split("\n"):
        if line.startswith("+++") or line.startswith("---"):
            continue
        if line.startswith("+"):
            added.append(line[1:])
        elif line.startswith("-"):
            removed.append(line[1:])
    return "\n".join(removed), "\n".join(added)


def _identify_side(catalog: LicenseCatalog, text: str) -> Optional[str]:
    identified = catalog.identify_text(text)
    return identified[0].spdx_id if identified else None


def extract_license_changes(
    repo: RepositoryFacts, catalog: Optional[LicenseCatalog] = None
) -> list[LicenseChangeEvent]:
    """License switches in the license file's commit history.

    The first commit is the initial license creation and never yields an
    event.  A later commit is a change when its diff removes lines
    identifying one catalog license and adds lines identifying a
    different one.
    """
    catalog = catalog or default_catalog()
    events: list[LicenseChangeEvent] = []
    for commit in repo.license_commits[1:]:
        if not commit.code_change:
            raise MissingDiffError(commit.sha)
        removed, added = _diff_sides(commit.code_change)
        from_id = _identify_side(catalog, removed)
        to_id = _identify_side(catalog, added)
        if from_id is not None and to_id is not None and from_id != to_id:
            events.append(LicenseChangeEvent(commit, from_id, to_id))
    return events
