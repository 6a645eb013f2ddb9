"""The six behavior detectors.

Each detector follows the same shape: extract procedural facts from the
store (similarity scores, page scans, link extraction), hand them to
the rule pack for the relational conditions, and turn derived
``sN_violation`` facts into evidence-bearing Violation records.  All
detectors are pure functions of (facts, page cache, config, evaluation
date); reported findings are potential violations that still need a
human reader.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date
from importlib import resources
from typing import Mapping, Optional

from . import licenses, pages, similarity
from .errors import FactValidationError
from .facts import (
    EvidenceItem,
    FactStore,
    IssueFacts,
    RepositoryFacts,
    Violation,
    export_base_facts,
)
from .rulelang import RuleSet, evaluate, literal_holds, parse_rules

DEFAULT_EXCLUDED_SEGMENTS = (
    "/issues/", "/pull/", "/commit/", "/tree/", "/releases/", "/blob/", "/runs/",
)

S8_CANDIDATE_CAP = 10  # distinct linked repos resolved per issue


@dataclass(frozen=True)
class DetectorConfig:
    """Tunable knobs; the defaults encode the documented detector conditions."""

    s1_threshold: float = 0.10
    s2_require_exact: bool = True
    s9_stale_days: int = 183
    s8_excluded_path_segments: tuple[str, ...] = DEFAULT_EXCLUDED_SEGMENTS
    so_link_pattern: str = pages.SO_LINK_PATTERN
    gram_size: int = similarity.DEFAULT_GRAM_SIZE
    source_extensions: frozenset[str] = similarity.SOURCE_EXTENSIONS

    def __post_init__(self):
        if not (0.0 < self.s1_threshold <= 1.0):
            raise FactValidationError("s1_threshold must be in (0, 1]")
        if self.s9_stale_days <= 0:
            raise FactValidationError("s9_stale_days must be positive")
        object.__setattr__(self, "s8_excluded_path_segments", tuple(self.s8_excluded_path_segments))

    def with_strict_so_links(self) -> "DetectorConfig":
        """Compatibility behavior: only full-form answer links are extracted."""
        return replace(self, so_link_pattern=pages.SO_FULL_LINK_PATTERN)


@dataclass(frozen=True)
class Diagnostic:
    """A condition the detector could not evaluate (not a violation)."""

    detector: str
    subject: str
    reason: str
    detail: str


_RULE_PACK_CACHE: dict[tuple[str, str], RuleSet] = {}


def load_rule_pack(tag: str, extra_rules_text: str = "") -> RuleSet:
    """Rule pack for one behavior type, optionally extended with user rules."""
    key = (tag, extra_rules_text)
    if key not in _RULE_PACK_CACHE:
        text = resources.files("ethoscan.rules").joinpath(f"{tag.lower()}.rules").read_text(encoding="utf-8")
        if extra_rules_text:
            text = text + "\n" + extra_rules_text
        _RULE_PACK_CACHE[key] = parse_rules(text)
    return _RULE_PACK_CACHE[key]


def violation_trace_is_sound(
    violation: Violation,
    base_facts: Mapping[str, set],
    ruleset: RuleSet,
    derived,
) -> bool:
    """Re-check that every trace entry still holds against the same facts."""
    from .rulelang import parse_literal

    known = {r.head.predicate for r in ruleset.rules}
    known |= {lit.atom.predicate for r in ruleset.rules for lit in r.body}
    for entry in violation.rule_trace:
        lit = parse_literal(entry)
        if lit.atom.predicate not in known:
            return False
        if not literal_holds(lit, base_facts, derived):
            return False
    return True


def _trace_for(derived, predicate: str, values: tuple) -> tuple[str, ...]:
    witness = derived.witness(predicate, values)
    return witness.render() if witness else ()


# --- S1: unattributed reuse of answer-site code ---

def detect_s1(
    issue: IssueFacts,
    repo: RepositoryFacts,
    page_cache: Mapping[str, Optional[str]],
    cfg: DetectorConfig,
    diagnostics: Optional[list[Diagnostic]] = None,
    extra_rules_text: str = "",
) -> list[Violation]:
    """Copied answer code without crediting the answer link.

    One violation per (link, file) pair where the commenter is not the
    answer owner, the answer's code is contained in the file at or above
    the threshold, and the file does not cite the link.
    """
    if issue.repo != repo.full_name:
        raise FactValidationError(f"issue {issue.subject} does not belong to {repo.full_name}")
    link_pattern = cfg.so_link_pattern

    link_posters: list[tuple[str, str]] = []  # (link, commenter) in appearance order
    link_order: list[str] = []
    for comment in issue.body_and_comments:
        for url in pages.extract_so_links(comment.text, link_pattern):
            if url not in link_order:
                link_order.append(url)
            if (url, comment.author.login) not in link_posters:
                link_posters.append((url, comment.author.login))

    facts: dict[str, set] = {
        "so_link_posted": set(),
        "so_answer_owner": set(),
        "snippet_found": set(),
        "cited_in": set(),
    }
    scores: dict[tuple[str, str], float] = {}
    owners: dict[str, str] = {}

    files = [
        f for f in similarity.source_files(repo, cfg.source_extensions)
        if f.content_count > 0
    ]
    file_streams = {
        f.path: similarity.tokenize(f.content, similarity.file_extension(f.path), f.path)
        for f in files
    }
    file_prints = {
        path: similarity.fingerprint(stream, cfg.gram_size)
        for path, stream in file_streams.items()
        if len(stream) >= cfg.gram_size
    }

    for url in link_order:
        page = page_cache.get(url)
        if page is None:
            if diagnostics is not None:
                diagnostics.append(Diagnostic("S1", issue.subject, "page-unavailable", url))
            continue
        doc = pages.parse_answer_page(page, url)
        if doc.owner is None:
            if diagnostics is not None:
                diagnostics.append(Diagnostic("S1", issue.subject, "answer-owner-not-found", url))
            continue
        owners[url] = doc.owner
        facts["so_answer_owner"].add((url, doc.owner))
        snippet_prints_by_ext: dict[str, list] = {}
        for f in files:
            ext = similarity.file_extension(f.path)
            if ext not in snippet_prints_by_ext:
                prints = []
                for block in doc.code_blocks:
                    stream = similarity.tokenize(block, ext)
                    if len(stream) >= cfg.gram_size:
                        prints.append(similarity.fingerprint(stream, cfg.gram_size))
                snippet_prints_by_ext[ext] = prints
            hay = file_prints.get(f.path)
            if hay is None:
                continue
            best = 0.0
            for needle in snippet_prints_by_ext[ext]:
                best = max(best, similarity.containment(needle, hay))
            if best >= cfg.s1_threshold:
                facts["snippet_found"].add((url, f.path))
                scores[(url, f.path)] = best
                if url in f.content:
                    facts["cited_in"].add((f.path, url))

    for url, commenter in link_posters:
        facts["so_link_posted"].add((issue.subject, url, commenter))

    ruleset = load_rule_pack("s1", extra_rules_text)
    derived = evaluate(ruleset, facts)

    hits = sorted(
        derived.tuples("s1_violation"),
        key=lambda t: (link_order.index(t[1]), t[2]),
    )
    violations = []
    seen_pairs = set()
    for iid, url, path in hits:
        if (url, path) in seen_pairs:
            continue
        seen_pairs.add((url, path))
        commenter = next(c for u, c in link_posters if u == url and c != owners[url])
        violations.append(Violation(
            behavior_type="S1",
            subject=issue.subject,
            evidence=(
                EvidenceItem("link", url, url),
                EvidenceItem("file", path, path),
                EvidenceItem("containment", f"{scores[(url, path)]:.4f}"),
                EvidenceItem("answerOwner", owners[url]),
                EvidenceItem("commentAuthor", commenter),
            ),
            rule_trace=_trace_for(derived, "s1_violation", (iid, url, path)),
        ))
    return violations


# --- S2: repository copied without a fork relation ---

def detect_s2(
    r1: RepositoryFacts,
    r2: RepositoryFacts,
    cfg: Optional[DetectorConfig] = None,
    extra_rules_text: str = "",
) -> Optional[Violation]:
    """Soft fork: identical source trees with no registered fork relation.

    Direction matters: checks whether ``r2`` is an unregistered copy of
    ``r1``.
    """
    cfg = cfg or DetectorConfig()
    identical = similarity.repos_identical(
        r1, r2, cfg.source_extensions, require_exact=cfg.s2_require_exact
    )
    store = FactStore([r1, r2] if r1.full_name != r2.full_name else [r1])
    facts = export_base_facts(store)
    facts["identical_source"] = {(r1.full_name, r2.full_name)} if identical else set()

    ruleset = load_rule_pack("s2", extra_rules_text)
    derived = evaluate(ruleset, facts)
    hits = derived.tuples("s2_violation")
    if not hits:
        return None
    matched = len(similarity.source_files(r1, cfg.source_extensions))
    relation = f"parent of {r2.full_name}: {r2.parent_full_name or 'none'}; not in fork list of {r1.full_name}"
    return Violation(
        behavior_type="S2",
        subject=r2.full_name,
        evidence=(
            EvidenceItem("originalRepo", r1.full_name),
            EvidenceItem("matchedFileCount", str(matched)),
            EvidenceItem("forkRelation", relation),
        ),
        rule_trace=_trace_for(derived, "s2_violation", hits[0]),
    )


# --- S5: no license in a public repository ---

def detect_s5(
    repo: RepositoryFacts,
    catalog: Optional[licenses.LicenseCatalog] = None,
    extra_rules_text: str = "",
) -> Optional[Violation]:
    """No repo-level license: no root license file, no README mention."""
    catalog = catalog or licenses.default_catalog()
    store = FactStore([repo])
    facts = export_base_facts(store)
    facts["has_root_license"] = set()
    facts["readme_license"] = set()
    info = licenses.detect_repo_license(repo, catalog)
    if info is not None:
        if info.source == licenses.SOURCE_LICENSE_FILE:
            facts["has_root_license"].add((repo.full_name,))
        else:
            facts["readme_license"].add((repo.full_name, info.matched_name))

    ruleset = load_rule_pack("s5", extra_rules_text)
    derived = evaluate(ruleset, facts)
    if not derived.tuples("s5_violation"):
        return None
    searched_names = ", ".join(n.upper() for n in licenses.LICENSE_BASENAMES)
    return Violation(
        behavior_type="S5",
        subject=repo.full_name,
        evidence=(
            EvidenceItem("searched", f"root license file ({searched_names})"),
            EvidenceItem("searched", "README license mention against the bundled catalog"),
        ),
        rule_trace=_trace_for(derived, "s5_violation", (repo.full_name,)),
    )


# --- S6: uninformed license change ---

def detect_s6(
    repo: RepositoryFacts,
    catalog: Optional[licenses.LicenseCatalog] = None,
    extra_rules_text: str = "",
) -> list[Violation]:
    """License switches neither announced in the changelog nor made via PR."""
    catalog = catalog or licenses.default_catalog()
    events = licenses.extract_license_changes(repo, catalog)
    store = FactStore([repo])
    facts = export_base_facts(store)
    facts["license_change"] = set()
    facts["changelog_mentions_license"] = set()
    event_by_sha = {}
    for ev in events:
        facts["license_change"].add((repo.full_name, ev.commit.sha, ev.from_license, ev.to_license))
        event_by_sha[ev.commit.sha] = ev
    changelog = licenses.find_changelog(repo)
    if changelog is not None and catalog.mentions_any_license(changelog.content):
        facts["changelog_mentions_license"].add((repo.full_name,))

    ruleset = load_rule_pack("s6", extra_rules_text)
    derived = evaluate(ruleset, facts)
    order = {c.sha: i for i, c in enumerate(repo.license_commits)}
    hits = sorted(derived.tuples("s6_violation"), key=lambda t: order[t[1]])
    violations = []
    for _repo_name, sha in hits:
        ev = event_by_sha[sha]
        violations.append(Violation(
            behavior_type="S6",
            subject=repo.full_name,
            evidence=(
                EvidenceItem("commit", sha),
                EvidenceItem("fromLicense", ev.from_license),
                EvidenceItem("toLicense", ev.to_license),
            ),
            rule_trace=_trace_for(derived, "s6_violation", (_repo_name, sha)),
        ))
    return violations


# --- S8: undisclosed self-promotion ---

def detect_s8(
    issue: IssueFacts,
    r1: RepositoryFacts,
    store: FactStore,
    cfg: DetectorConfig,
    diagnostics: Optional[list[Diagnostic]] = None,
    extra_rules_text: str = "",
) -> Optional[Violation]:
    """Opener links a repository they contribute to, in a repo they don't.

    Links whose URL carries a demonstration-style path segment (issues,
    pull, commit, tree, releases, blob, runs) never count.  Findings
    always require human confirmation: a disclosure written in prose is
    invisible to this check.
    """
    if issue.repo != r1.full_name:
        raise FactValidationError(f"issue {issue.subject} does not belong to {r1.full_name}")

    candidates: list[tuple[str, str]] = []  # (link, target repo)
    resolved: list[str] = []
    for comment in issue.body_and_comments:
        for url in pages.extract_repo_links(comment.text):
            if any(seg in url for seg in cfg.s8_excluded_path_segments):
                continue
            target = pages.repo_link_target(url)
            if target is None:
                continue
            if target not in resolved:
                if len(resolved) >= S8_CANDIDATE_CAP:
                    continue
                resolved.append(target)
            if (url, target) not in candidates:
                candidates.append((url, target))

    facts = export_base_facts(store)
    facts["candidate_link"] = set()
    usable: list[tuple[str, str]] = []
    for url, target in candidates:
        if not store.has_repo(target):
            if diagnostics is not None:
                diagnostics.append(Diagnostic("S8", issue.subject, "unresolvable-repo", url))
            continue
        facts["candidate_link"].add((issue.subject, url, target))
        usable.append((url, target))

    ruleset = load_rule_pack("s8", extra_rules_text)
    derived = evaluate(ruleset, facts)
    hits = derived.tuples("s8_violation")
    if not hits:
        return None
    first = min(hits, key=lambda t: usable.index((t[1], t[2])))
    _iid, url, target = first
    return Violation(
        behavior_type="S8",
        subject=issue.subject,
        evidence=(
            EvidenceItem("link", url, url),
            EvidenceItem("issueOpener", issue.owner.login),
            EvidenceItem("contributorProof", f"{issue.owner.login} is a contributor of {target}"),
        ),
        rule_trace=_trace_for(derived, "s8_violation", first),
    )


# --- S9: stale project still selling a paid service ---

def detect_s9(
    repo: RepositoryFacts,
    page_cache: Mapping[str, Optional[str]],
    cfg: DetectorConfig,
    evaluation_date: date,
    diagnostics: Optional[list[Diagnostic]] = None,
    extra_rules_text: str = "",
) -> Optional[Violation]:
    """Original repo with a stale latest release whose store listing sells
    in-app purchases."""
    readme = licenses.find_readme(repo)
    store_links = pages.extract_store_links(
        *(list(repo.external_links) + ([readme.content] if readme else []))
    )

    stale = (
        repo.latest_release is not None
        and (evaluation_date - repo.latest_release.published_date).days > cfg.s9_stale_days
    )
    gate = stale and not repo.is_fork

    facts = export_base_facts(FactStore([repo]))
    facts["eval_date"] = {(evaluation_date,)}
    facts["stale_threshold_days"] = {(cfg.s9_stale_days,)}
    facts["store_link"] = set()
    facts["paid_marker_on"] = set()
    for link in store_links:
        facts["store_link"].add((repo.full_name, link))
        page = page_cache.get(link)
        if page is None:
            if gate and diagnostics is not None:
                diagnostics.append(Diagnostic("S9", repo.full_name, "page-unavailable", link))
            continue
        marker = pages.find_paid_marker(page)
        if marker is not None:
            facts["paid_marker_on"].add((link, marker))

    ruleset = load_rule_pack("s9", extra_rules_text)
    derived = evaluate(ruleset, facts)
    hits = derived.tuples("s9_violation")
    if not hits:
        return None
    first = min(hits, key=lambda t: store_links.index(t[1]))
    _repo_name, link, marker = first
    days_old = (evaluation_date - repo.latest_release.published_date).days
    return Violation(
        behavior_type="S9",
        subject=repo.full_name,
        evidence=(
            EvidenceItem("releaseDate", repo.latest_release.published_date.isoformat()),
            EvidenceItem("staleDays", str(days_old)),
            EvidenceItem("storeLink", link, link),
            EvidenceItem("matchedMarker", marker, link),
        ),
        rule_trace=_trace_for(derived, "s9_violation", first),
    )
