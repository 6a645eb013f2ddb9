#!/usr/bin/env python3
"""Regenerate the offline fixture corpus under fixtures/.

Every case is synthetic: file contents, issue threads, answer pages,
and store listings are invented so expected detector outcomes are
forced analytically.  Cases labeled with fpClass reproduce the known
false-positive patterns on purpose; the tool is expected to report
them, and the label records why a human reviewer would overturn the
finding.

Usage: python3 scripts/generate_fixtures.py [--out DIR]
"""

from __future__ import annotations

import argparse
import html
import json
import sys
from datetime import date, datetime, timezone
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ethoscan.facts import (
    Comment,
    CommitInfo,
    FileContent,
    IssueFacts,
    ReleaseInfo,
    RepositoryFacts,
    UserRef,
)
from ethoscan.similarity import containment, fingerprint, tokenize
from ethoscan.snapshot import Snapshot, save_snapshot

EVALUATION_DATE = date(2022, 1, 1)
CAPTURED = datetime(2022, 1, 1, 0, 0, 0, tzinfo=timezone.utc)

MIT = (
    "MIT License\n\nCopyright (c) 2021 Octo\n\n"
    "Permission is hereby granted, free of charge, to any person obtaining a copy "
    "of this software and associated documentation files (the \"Software\"), to deal "
    "in the Software without restriction, including without limitation the rights "
    "to use, copy, modify, merge, publish, distribute, sublicense, and/or sell "
    "copies of the Software.\n"
)
APACHE = (
    "Apache License\nVersion 2.0, January 2004\nhttp://www.apache.org/licenses/\n\n"
    "TERMS AND CONDITIONS FOR USE, REPRODUCTION, AND DISTRIBUTION\n"
)
GPL3 = (
    "GNU GENERAL PUBLIC LICENSE\nVersion 3, 29 June 2007\n\n"
    "Copyright (C) 2007 Free Software Foundation, Inc.\n\n"
    "The GNU General Public License is a free, copyleft license for software and "
    "other kinds of works.\n"
)

# The answer snippet used by every S1 case (61 js tokens, 57 five-grams).
SNIPPET = """function debounce(fn, wait) {
  let timer = null;
  return function(...args) {
    clearTimeout(timer);
    timer = setTimeout(() => fn.apply(this, args), wait);
  };
}"""

# Slice of the snippet landing near 35% containment (threshold is 10%).
SNIPPET_SLICE = "    timer = setTimeout(() => fn.apply(this, args), wait);"

# Six shared tokens: stays far below the 10% threshold.
SNIPPET_FRAGMENT = "clearTimeout(timer);"

FULL_LINK = "https://stackoverflow.com/questions/68214/debounce-helper"
SHORT_LINK = "https://stackoverflow.com/a/68214"
PLAY_LINK = "https://play.google.com/store/apps/details?id=com.octo.notes"

UTIL_BASE = """const MAX_RETRIES = 3;

function retry(task, attempts) {
  if (attempts <= 0) { throw new Error("gave up"); }
  try { return task(); } catch (err) { return retry(task, attempts - 1); }
}
"""


def answer_page(owner: str, code: str, answer_id: str = "68214") -> str:
    return (
        "<html><body>\n"
        '<div class="question" id="question-summary">How to debounce?</div>\n'
        f'<div class="answer accepted-answer" data-answerid="{answer_id}">\n'
        f"  <div class=\"post-text\"><pre><code>{html.escape(code)}</code></pre></div>\n"
        '  <div class="user-details" itemprop="author">\n'
        f'    <a href="/users/7/{owner}"><span itemprop="name">{owner}</span></a>\n'
        "  </div>\n"
        "</div>\n"
        "</body></html>\n"
    )


def listing_page(app: str, paid: bool) -> str:
    extras = "In-app purchases from $1.99" if paid else "Free. Contains ads."
    return (
        f"<html><body><h1>{app}</h1>\n"
        f'<div class="details">{extras}</div>\n'
        "</body></html>\n"
    )


def repo(full_name: str, files: list[FileContent], **kwargs) -> RepositoryFacts:
    owner, name = full_name.split("/", 1)
    root_by_base = {f.basename.lower(): f for f in files if f.in_root}
    kwargs.setdefault("license_file", root_by_base.get("license") or root_by_base.get("license.md"))
    kwargs.setdefault("readme_file", root_by_base.get("readme.md"))
    kwargs.setdefault("changelog_file", root_by_base.get("changelog.md"))
    return RepositoryFacts(
        owner=owner, name=name, file_count=len(files), files=tuple(files), **kwargs
    )


def issue(repo_name: str, number: int, opener: str, comments: list[tuple[str, str]], kind: str = "issue") -> IssueFacts:
    return IssueFacts(
        repo=repo_name, number=number, kind=kind, owner=UserRef(opener),
        body_and_comments=tuple(Comment(UserRef(a), t) for a, t in comments),
    )


def commit(sha: str, when: datetime, removed: str = "", added: str = "", pr_count: int = 0) -> CommitInfo:
    lines = ["--- a/LICENSE", "+++ b/LICENSE"]
    lines += [f"-{line}" for line in removed.split("\n") if line]
    lines += [f"+{line}" for line in added.split("\n") if line]
    return CommitInfo(sha=sha, timestamp=when, code_change="\n".join(lines), pull_request_count=pr_count)


def snap(r: RepositoryFacts, issues=None, pages=None) -> Snapshot:
    return Snapshot(captured_at=CAPTURED, repo=r, issues=issues, external_pages=pages or {})


class CorpusWriter:
    def __init__(self, root: Path):
        self.root = root
        self.cases: list[dict] = []

    def add(self, name: str, snapshots: dict[str, Snapshot], expected: dict[str, int],
            readme: str, fp_class: str | None = None, config: dict | None = None,
            expected_diagnostics: int | None = None) -> None:
        case_dir = self.root / "cases" / name
        case_dir.mkdir(parents=True, exist_ok=True)
        rels = []
        for filename, snapshot in snapshots.items():
            save_snapshot(snapshot, case_dir / filename)
            rels.append(f"cases/{name}/{filename}")
        (case_dir / "README.md").write_text(readme.rstrip() + "\n", encoding="utf-8")
        entry: dict = {"name": name, "snapshots": rels, "expected": expected}
        if fp_class:
            entry["fpClass"] = fp_class
        if config:
            entry["config"] = config
        if expected_diagnostics is not None:
            entry["expectedDiagnostics"] = expected_diagnostics
        self.cases.append(entry)

    def write_manifest(self) -> None:
        doc = {"evaluationDate": EVALUATION_DATE.isoformat(), "cases": self.cases}
        (self.root / "manifest.json").write_text(
            json.dumps(doc, indent=2, sort_keys=False) + "\n", encoding="utf-8"
        )


def s1_repo_files(util_body: str) -> list[FileContent]:
    return [
        FileContent("README.md", "# widgets\nA small toolkit.\n"),
        FileContent("LICENSE", MIT),
        FileContent("src/util.js", util_body),
        FileContent("src/app.js", "import { retry } from './util';\nconsole.log(retry);\n"),
    ]


def s1_cases(w: CorpusWriter) -> None:
    page = answer_page("sofia", SNIPPET)
    planted = UTIL_BASE + "\n" + SNIPPET_SLICE + "\n"

    # sanity: planted slice scores between the threshold and full containment
    snippet_fp = fingerprint(tokenize(SNIPPET, "js"))
    hay_fp = fingerprint(tokenize(planted, "js"))
    score = containment(snippet_fp, hay_fp)
    assert 0.10 <= score <= 0.45, f"planted containment off: {score}"
    frag_fp = fingerprint(tokenize(UTIL_BASE + "\n" + SNIPPET_FRAGMENT + "\n", "js"))
    low = containment(snippet_fp, frag_fp)
    assert low < 0.10, f"fragment containment too high: {low}"

    base_repo = repo("octo/widgets", s1_repo_files(planted), contributors=frozenset({UserRef("octo")}))
    pages = {FULL_LINK: page}

    def case_issue(author: str, text: str) -> IssueFacts:
        return issue("octo/widgets", 12, "mallory", [(author, text)], kind="pullRequest")

    w.add(
        "s1_tp",
        {"snapshot.json": snap(base_repo, issues=(case_issue("mallory", f"Handy trick from {FULL_LINK}"),), pages=pages)},
        {"s1": 1},
        "All conditions hold: the commenter is not the answer owner, the answer\n"
        "code sits in src/util.js above the 10% containment threshold, and the\n"
        "file never cites the link. Expect one finding.",
    )
    w.add(
        "s1_same_owner",
        {"snapshot.json": snap(base_repo, issues=(case_issue("sofia", f"My own answer: {FULL_LINK}"),), pages=pages)},
        {"s1": 0},
        "The commenter IS the answer owner (exact login match), so copying your\n"
        "own answer needs no credit. Condition 1 falsified; expect nothing.",
    )
    low_repo = repo("octo/widgets", s1_repo_files(UTIL_BASE + "\n" + SNIPPET_FRAGMENT + "\n"))
    w.add(
        "s1_low_similarity",
        {"snapshot.json": snap(low_repo, issues=(case_issue("mallory", f"see {FULL_LINK}"),), pages=pages)},
        {"s1": 0},
        "Only a six-token fragment of the answer appears in the file, which is\n"
        "below the 10% containment threshold. Condition 2 falsified.",
    )
    cited_repo = repo(
        "octo/widgets",
        s1_repo_files(planted + f"// source: {FULL_LINK}\n"),
    )
    w.add(
        "s1_cited",
        {"snapshot.json": snap(cited_repo, issues=(case_issue("mallory", f"from {FULL_LINK}"),), pages=pages)},
        {"s1": 0},
        "The copied code is present but the file itself contains the exact link\n"
        "text, i.e. credit was given. Condition 3 falsified.",
    )
    w.add(
        "s1_fp_reference_only",
        {"snapshot.json": snap(base_repo, issues=(case_issue("mallory", f"Related reading: {FULL_LINK}"),), pages=pages)},
        {"s1": 1},
        "Known false positive: the link was shared purely as a reference, but a\n"
        "common idiom makes the file clear the similarity threshold anyway. The\n"
        "tool cannot tell reference-sharing from copying; it reports, and a\n"
        "human overturns.",
        fp_class="s1-link-as-reference",
    )
    short_cited_repo = repo(
        "octo/widgets",
        s1_repo_files(planted + f"// via {SHORT_LINK}\n"),
    )
    w.add(
        "s1_fp_short_citation",
        {"snapshot.json": snap(short_cited_repo, issues=(case_issue("mallory", f"per {FULL_LINK}"),), pages=pages)},
        {"s1": 1},
        "Known false positive: the file credits the answer through its short\n"
        "link form, but the citation check compares the exact link text that\n"
        "was extracted from the comment, so the credit goes unseen.",
        fp_class="s1-short-link-citation",
    )
    mismatch_page = answer_page("Devin Rhode", SNIPPET)
    w.add(
        "s1_fp_name_mismatch",
        {"snapshot.json": snap(
            base_repo,
            issues=(issue("octo/widgets", 12, "devinrhode2", [("devinrhode2", f"borrowed {FULL_LINK}")], kind="pullRequest"),),
            pages={FULL_LINK: mismatch_page},
        )},
        {"s1": 1},
        "Known false positive: the commenter and the answer owner are the same\n"
        "person under different account names (devinrhode2 vs \"Devin Rhode\").\n"
        "Identity matching is exact and case-sensitive by design, so the tool\n"
        "reports it.",
        fp_class="s1-account-name-mismatch",
    )
    short_pages = {SHORT_LINK: answer_page("sofia", SNIPPET)}
    short_issue = (case_issue("mallory", f"Lifted from {SHORT_LINK} without fuss"),)
    w.add(
        "s1_short_link_default",
        {"snapshot.json": snap(base_repo, issues=short_issue, pages=short_pages)},
        {"s1": 1},
        "The comment cites the answer only through its short link form. The\n"
        "default link pattern extracts short links, so the copying is found.",
    )
    w.add(
        "s1_short_link_compat",
        {"snapshot.json": snap(base_repo, issues=short_issue, pages=short_pages)},
        {"s1": 0},
        "Same snapshot as s1_short_link_default, analyzed with the strict\n"
        "compatibility pattern that only extracts full-form links: the short\n"
        "link is never extracted and the copying goes undetected.",
        config={"s1FullLinksOnly": True},
    )
    w.add(
        "s1_page_unavailable",
        {"snapshot.json": snap(base_repo, issues=(case_issue("mallory", f"per {FULL_LINK}"),),
                               pages={FULL_LINK: None})},
        {"s1": 0},
        "The cached answer page is marked unavailable, so the conditions cannot\n"
        "be evaluated: no finding, one diagnostic.",
        expected_diagnostics=1,
    )


def s2_cases(w: CorpusWriter) -> None:
    sources = [
        FileContent("main.py", "from lib.util import run\n\nif __name__ == '__main__':\n    run()\n"),
        FileContent("lib/util.py", "def run():\n    print('widgets at work')\n"),
    ]
    original_files = sources + [FileContent("README.md", "# widgets (original)\n"), FileContent("LICENSE", MIT)]
    copy_files = sources + [FileContent("README.md", "# widgets (mirror)\n")]

    original = repo("octo/widgets", original_files)
    copy = repo("copycat/widgets", copy_files)

    w.add(
        "s2_tp",
        {"original.json": snap(original), "copy.json": snap(copy)},
        {"s2": 1},
        "Source trees are identical and the copy is neither in the original's\n"
        "fork list nor carries a parent pointer: a soft fork. The differing\n"
        "README does not matter; only source files are compared.",
    )
    changed = [FileContent("main.py", sources[0].content.replace("run()", "run(1)")), sources[1],
               FileContent("README.md", "# widgets (mirror)\n")]
    w.add(
        "s2_not_identical",
        {"original.json": snap(original), "copy.json": snap(repo("copycat/widgets", changed))},
        {"s2": 0},
        "One source file differs by a single token. The check demands exact\n"
        "source equality, so no finding.",
    )
    w.add(
        "s2_forked",
        {"original.json": snap(repo("octo/widgets", original_files, fork_list=("copycat/widgets",))),
         "copy.json": snap(copy)},
        {"s2": 0},
        "Identical trees, but the copy is registered in the original's fork\n"
        "list: an official fork, not a soft fork.",
    )
    w.add(
        "s2_parent_pointer",
        {"original.json": snap(original),
         "copy.json": snap(repo("copycat/widgets", copy_files, is_fork=True, parent_full_name="octo/widgets"))},
        {"s2": 0},
        "Identical trees and the copy's own metadata names the original as its\n"
        "parent. Fork relations are stored in both directions because live\n"
        "APIs expose them inconsistently; either direction clears the pair.",
    )
    w.add(
        "s2_extra_nonsource_file",
        {"original.json": snap(original),
         "copy.json": snap(repo("copycat/widgets", copy_files + [FileContent("NOTICE.txt", "mirror\n")]))},
        {"s2": 1},
        "The copy adds a non-source file on top of identical sources. Still a\n"
        "soft fork: only source files enter the comparison.",
    )


def s5_cases(w: CorpusWriter) -> None:
    def add(name, files, expected, readme_text, fp_class=None):
        w.add(name, {"snapshot.json": snap(repo(f"octo/{name.replace('_', '-')}", files))},
              {"s5": expected}, readme_text, fp_class=fp_class)

    add("s5_tp_bare",
        [FileContent("src/main.py", "print('x')\n"), FileContent("README.md", "# tool\nUse freely.\n")],
        1,
        "No license file anywhere and the README never names a license: report.")
    add("s5_tp_no_readme",
        [FileContent("src/main.py", "print('x')\n")],
        1,
        "Source code, no license file, no README at all: report.")
    add("s5_tn_root_license",
        [FileContent("LICENSE", MIT), FileContent("src/main.py", "print('x')\n")],
        0,
        "A root LICENSE file with recognizable text: licensed, no finding.")
    add("s5_tn_readme_license",
        [FileContent("README.md", "# tool\nLicensed under Apache-2.0.\n"), FileContent("src/main.py", "x = 1\n")],
        0,
        "No license file, but the README names a catalog license: no finding.")
    add("s5_fp_inner_license",
        [FileContent("docs/LICENSE", MIT), FileContent("src/main.py", "print('x')\n"),
         FileContent("README.md", "# tool\n")],
        1,
        "Known false positive: a LICENSE file exists but only inside a\n"
        "subdirectory. The search deliberately stays in the repository root\n"
        "(descending would pick up vendored package licenses), so this\n"
        "repository is reported although it is licensed.",
        fp_class="s5-license-not-in-root")
    add("s5_fp_disclaimer",
        [FileContent("README.md",
                     "# notes\nThis repository is for personal study and research purposes "
                     "only. Please DO NOT USE IT FOR COMMERCIAL PURPOSES.\n"),
         FileContent("src/main.py", "pass\n")],
        1,
        "Known false positive: the README carries a usage disclaimer that the\n"
        "author treats as licensing, but it names no recognized license, so\n"
        "the repository is reported.",
        fp_class="s5-readme-disclaimer")
    add("s5_fp_education",
        [FileContent("README.md", "# CS101\nHomework solutions for the CS101 course at Springfield Public School.\n"),
         FileContent("hw1/solution.py", "answer = 42\n")],
        1,
        "Known false positive: classroom material where nobody expects a\n"
        "license. Telling educational repositories apart needs a human, so the\n"
        "tool reports it.",
        fp_class="s5-education-repo")
    add("s5_fp_no_code",
        [FileContent("README.md", "# awesome-links\nA curated list of links.\n")],
        1,
        "Known false positive: the repository holds no source code or data, so\n"
        "a license hardly matters, but the check cannot judge that and\n"
        "reports.",
        fp_class="s5-no-source-or-data")
    add("s5_fp_org_license",
        [FileContent("README.md", "# infra\nAll Acme engineering repositories are covered by the "
                                  "Acme organization-wide legal policy; see the internal handbook.\n"),
         FileContent("deploy.sh", "echo deploy\n")],
        1,
        "Known false positive: the organization keeps one license for all of\n"
        "its repositories and this one defines none of its own. A single-repo\n"
        "snapshot cannot see organization-level licensing, so it is reported.",
        fp_class="s5-organization-license")


def s6_cases(w: CorpusWriter) -> None:
    t = datetime(2021, 1, 10, tzinfo=timezone.utc)
    t2 = datetime(2021, 2, 17, tzinfo=timezone.utc)
    t3 = datetime(2021, 2, 18, tzinfo=timezone.utc)
    files = [FileContent("LICENSE", GPL3), FileContent("src/main.py", "x = 1\n")]

    def mkrepo(commits, changelog=None):
        fs = list(files) + ([FileContent("CHANGELOG.md", changelog)] if changelog else [])
        return repo("octo/libproj", fs, license_commits=tuple(commits))

    w.add(
        "s6_tp",
        {"snapshot.json": snap(mkrepo([
            commit("a1b2c3d", t, added=MIT),
            commit("b2c3d4e", t2, removed=MIT, added=GPL3),
        ]))},
        {"s6": 1},
        "The license switched from MIT to GPL-3.0; there is no changelog and\n"
        "the commit went in without a pull request. Uninformed change.",
    )
    w.add(
        "s6_announced",
        {"snapshot.json": snap(mkrepo([
            commit("a1b2c3d", t, added=MIT),
            commit("b2c3d4e", t2, removed=MIT, added=GPL3),
        ], changelog="## 2.0\n- Relicensed under GPL-3.0, see discussion.\n"))},
        {"s6": 0},
        "Same switch, but the changelog names the license: announced.",
    )
    w.add(
        "s6_via_pr",
        {"snapshot.json": snap(mkrepo([
            commit("a1b2c3d", t, added=MIT),
            commit("b2c3d4e", t2, removed=MIT, added=GPL3, pr_count=1),
        ]))},
        {"s6": 0},
        "Same switch without a changelog, but the commit is contained in one\n"
        "pull request, which counts as informing the community.",
    )
    w.add(
        "s6_no_change",
        {"snapshot.json": snap(mkrepo([commit("a1b2c3d", t, added=GPL3)]))},
        {"s6": 0},
        "Only the initial license creation exists; the first commit never\n"
        "counts as a change.",
    )
    w.add(
        "s6_fp_restore",
        {"snapshot.json": snap(mkrepo([
            commit("a1b2c3d", t, added=APACHE),
            commit("b2c3d4e", t2, removed=APACHE, added=GPL3),
            commit("c3d4e5f", t3, removed=GPL3, added=APACHE),
        ]))},
        {"s6": 2},
        "Known false positive: the license was switched and restored the next\n"
        "day. Both commits are silent and PR-less, so both are reported, but a\n"
        "human would not fault the restoring commit.",
        fp_class="s6-license-restored",
    )


def s8_cases(w: CorpusWriter) -> None:
    host_files = [FileContent("README.md", "# framework\n"), FileContent("LICENSE", MIT),
                  FileContent("src/core.py", "core = True\n")]
    lib = repo("promo/speedlib", [FileContent("README.md", "# speedlib\n"),
                                  FileContent("src/lib.py", "fast = True\n")],
               contributors=frozenset({UserRef("promo-dev"), UserRef("helper")}))
    lib_snap = snap(lib)

    def host(issues, contributors=("core-dev", "maintainer")):
        r = repo("widgets/framework", host_files,
                 contributors=frozenset(UserRef(c) for c in contributors))
        return snap(r, issues=issues)

    link = "https://github.com/promo/speedlib"

    w.add(
        "s8_tp",
        {"host.json": host((issue("widgets/framework", 7, "promo-dev",
                                  [("promo-dev", f"You should switch to {link} for a big speedup.")],
                                  kind="pullRequest"),)),
         "lib.json": lib_snap},
        {"s8": 1},
        "An outsider to the host repository opens a PR pushing a library they\n"
        "contribute to, with no structural disclosure: report (findings of\n"
        "this type always carry the requires-human-confirmation note).",
    )
    w.add(
        "s8_same_repo",
        {"host.json": host((issue("widgets/framework", 8, "promo-dev",
                                  [("promo-dev", "See https://github.com/widgets/framework for context.")],
                                  kind="issue"),)),
         "lib.json": lib_snap},
        {"s8": 0},
        "The only link points back at the host repository itself; promoting a\n"
        "repo inside itself is not self-promotion. Condition 1 falsified.",
    )
    w.add(
        "s8_opener_is_insider",
        {"host.json": host((issue("widgets/framework", 9, "core-dev",
                                  [("core-dev", f"We could vendor {link}.")], kind="issue"),)),
         "lib.json": snap(repo("promo/speedlib", [FileContent("src/lib.py", "fast = True\n")],
                               contributors=frozenset({UserRef("core-dev")})))},
        {"s8": 0},
        "The opener is a contributor of the host repository; insiders\n"
        "proposing dependencies is normal project work. Condition 2 falsified.",
    )
    w.add(
        "s8_not_contributor_of_target",
        {"host.json": host((issue("widgets/framework", 10, "fan",
                                  [("fan", f"{link} might help here.")], kind="issue"),)),
         "lib.json": lib_snap},
        {"s8": 0},
        "The opener is an outsider to the host but also has no contributor\n"
        "relation to the linked repository: an ordinary recommendation.\n"
        "Condition 3 falsified.",
    )
    w.add(
        "s8_excluded_segment",
        {"host.json": host((issue("widgets/framework", 11, "promo-dev",
                                  [("promo-dev", f"Broken the same way as {link}/pull/3 over there.")],
                                  kind="issue"),)),
         "lib.json": lib_snap},
        {"s8": 0},
        "The link carries the /pull/ path segment, which marks it as shared\n"
        "for demonstration, so it is excluded before any condition is tried.",
    )
    w.add(
        "s8_fp_disclosed_in_prose",
        {"host.json": host((issue("widgets/framework", 12, "promo-dev",
                                  [("promo-dev", f"I am working on a project called speedlib ({link}); "
                                                 "it may fit here.")], kind="pullRequest"),)),
         "lib.json": lib_snap},
        {"s8": 1},
        "Known false positive: the opener does disclose the affiliation, but\n"
        "only in prose. Reading natural-language disclosures needs a human,\n"
        "so the structural conditions fire and the tool reports.",
        fp_class="s8-disclosed-in-prose",
    )
    w.add(
        "s8_fp_asking_advice",
        {"host.json": host((issue("widgets/framework", 13, "promo-dev",
                                  [("promo-dev", f"I'd like to try your framework in my project {link}; "
                                                 "is the plugin API stable enough?")], kind="issue"),)),
         "lib.json": lib_snap},
        {"s8": 1},
        "Known false positive: the opener asks for help using the host project\n"
        "inside their own repository, which is not promotion, but the\n"
        "structural conditions cannot tell intent.",
        fp_class="s8-advice-request",
    )
    w.add(
        "s8_unresolvable_target",
        {"host.json": host((issue("widgets/framework", 14, "promo-dev",
                                  [("promo-dev", "Try https://github.com/ghost/unknown instead.")],
                                  kind="issue"),))},
        {"s8": 0},
        "The linked repository is not present in the fact store, so the\n"
        "contributor conditions cannot be evaluated: no finding, one\n"
        "diagnostic.",
        expected_diagnostics=1,
    )


def s9_cases(w: CorpusWriter) -> None:
    paid = listing_page("Octo Notes", paid=True)
    free = listing_page("Octo Notes", paid=False)

    def app_repo(name="octo/notes-app", release=date(2021, 5, 1), link=PLAY_LINK, fork=False, parent=None):
        files = [FileContent("README.md", f"# notes\nGet it on Google Play: {link}\n" if link else "# notes\n"),
                 FileContent("LICENSE", MIT),
                 FileContent("app/main.kt", "fun main() {}\n")]
        return repo(name, files,
                    latest_release=ReleaseInfo("v2.0", release) if release else None,
                    is_fork=fork, parent_full_name=parent)

    w.add(
        "s9_tp",
        {"snapshot.json": snap(app_repo(), pages={PLAY_LINK: paid})},
        {"s9": 1},
        "Latest release is 245 days old (threshold 183), the repository is\n"
        "original, and its store listing sells in-app purchases: report.",
    )
    w.add(
        "s9_fresh_release",
        {"snapshot.json": snap(app_repo(release=date(2021, 12, 1)), pages={PLAY_LINK: paid})},
        {"s9": 0},
        "The latest release is 31 days old: actively maintained, no finding.",
    )
    w.add(
        "s9_fork_of_maintained_app",
        {"snapshot.json": snap(app_repo(name="fan/notes-app", fork=True, parent="octo/notes-app"),
                               pages={PLAY_LINK: paid})},
        {"s9": 0},
        "A stale fork pointing at the store listing of the app it was forked\n"
        "from. Forks are excluded: the fork going stale says nothing about the\n"
        "product.",
    )
    w.add(
        "s9_no_store_link",
        {"snapshot.json": snap(app_repo(link=None))},
        {"s9": 0},
        "Stale and original, but no store listing link anywhere: there is no\n"
        "paid service to disappoint.",
    )
    w.add(
        "s9_free_app",
        {"snapshot.json": snap(app_repo(), pages={PLAY_LINK: free})},
        {"s9": 0},
        "The listing page carries no paid marker: a free app may go stale\n"
        "without taking anyone's money.",
    )
    w.add(
        "s9_fp_library_of_active_app",
        {"snapshot.json": snap(
            repo("octo/render-lib",
                 [FileContent("README.md", f"# render-lib\nPowers the Octo Notes app: {PLAY_LINK}\n"),
                  FileContent("lib/render.kt", "val ok = true\n")],
                 latest_release=ReleaseInfo("v0.9", date(2021, 3, 1))),
            pages={PLAY_LINK: paid},
        )},
        {"s9": 1},
        "Known false positive: the stale repository is a library that links to\n"
        "the store listing of an app built on it. The app itself is actively\n"
        "maintained, but that is invisible from this snapshot, so the library\n"
        "is reported.",
        fp_class="s9-library-of-active-app",
    )
    w.add(
        "s9_page_unavailable",
        {"snapshot.json": snap(app_repo(), pages={PLAY_LINK: None})},
        {"s9": 0},
        "Stale, original, store link present, but the cached listing page is\n"
        "unavailable: the paid-service condition cannot be evaluated. No\n"
        "finding, one diagnostic.",
        expected_diagnostics=1,
    )
    w.add(
        "s9_no_release",
        {"snapshot.json": snap(app_repo(release=None), pages={PLAY_LINK: paid})},
        {"s9": 0},
        "No release exists at all, so staleness of the latest release cannot\n"
        "be established.",
    )


def misc_cases(w: CorpusWriter) -> None:
    clean = repo(
        "octo/clean",
        [FileContent("README.md", "# clean\nLicensed under the MIT license.\n"),
         FileContent("LICENSE", MIT),
         FileContent("CHANGELOG.md", "## 1.0\n- first release\n"),
         FileContent("src/main.py", "print('clean')\n")],
        latest_release=ReleaseInfo("v1.0", date(2021, 12, 15)),
        license_commits=(commit("a1b2c3d", datetime(2021, 1, 1, tzinfo=timezone.utc), added=MIT),),
        contributors=frozenset({UserRef("octo")}),
    )
    benign = issue("octo/clean", 1, "octo", [("octo", "Tracking small cleanups."),
                                             ("visitor", "Thanks for the tool!")])
    w.add(
        "clean",
        {"snapshot.json": snap(clean, issues=(benign,))},
        {"s1": 0, "s5": 0, "s6": 0, "s8": 0, "s9": 0},
        "A well-kept repository: root license, announced history, fresh\n"
        "release, no promotion, no copied answers. Every detector stays quiet.",
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "fixtures"))
    args = parser.parse_args()
    root = Path(args.out)
    (root / "cases").mkdir(parents=True, exist_ok=True)

    writer = CorpusWriter(root)
    s1_cases(writer)
    s2_cases(writer)
    s5_cases(writer)
    s6_cases(writer)
    s8_cases(writer)
    s9_cases(writer)
    misc_cases(writer)
    writer.write_manifest()

    from ethoscan.fixturesuite import format_matrix, run_fixture_suite

    results = run_fixture_suite(root / "manifest.json")
    failures = [r for r in results if not r.passed]
    print(format_matrix(results))
    if failures:
        print(f"\n{len(failures)} mismatching rows")
        return 1
    print(f"\nall {len(results)} rows match; corpus written to {root}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
