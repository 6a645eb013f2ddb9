"""Detector behaviors beyond the fixture matrix: properties, errors, traces."""

from __future__ import annotations

import random
from dataclasses import replace
from datetime import date

import pytest

from conftest import make_file, make_issue, make_repo, store_of
from ethoscan.detectors import (
    DEFAULT_EXCLUDED_SEGMENTS,
    DetectorConfig,
    detect_s1,
    detect_s2,
    detect_s5,
    detect_s8,
    detect_s9,
    load_rule_pack,
    violation_trace_is_sound,
)
from ethoscan.errors import FactValidationError, IncompleteTreeError
from ethoscan.facts import ReleaseInfo, UserRef, export_base_facts
from ethoscan.rulelang import evaluate
from ethoscan.similarity import containment, fingerprint, tokenize

SNIPPET = """function scan(items, seen) {
  for (const item of items) {
    if (!seen.has(item.key)) {
      seen.add(item.key);
      emit(item.key, item.value);
    }
  }
}"""

LINK = "https://stackoverflow.com/questions/555/dedupe-scan"


def answer_page(owner: str, code: str) -> str:
    import html
    return (
        f'<div class="answer" data-answerid="555">'
        f"<pre><code>{html.escape(code)}</code></pre>"
        f'<div class="user-details" itemprop="author"><span itemprop="name">{owner}</span></div>'
        f"</div>"
    )


def s1_setup(util_js: str, commenter: str = "mallory", owner: str = "sofia"):
    repo = make_repo("octo/app", [make_file("src/util.js", util_js), make_file("README.md", "x")])
    issue = make_issue("octo/app", 3, opener=commenter, comments=[(commenter, f"see {LINK}")])
    pages = {LINK: answer_page(owner, SNIPPET)}
    return issue, repo, pages


class TestS1:
    def test_planted_snippet_detected_and_score_matches_oracle(self):
        planted = "const x = 1;\n" + SNIPPET + "\nconsole.log(x);\n"
        issue, repo, pages = s1_setup(planted)
        cfg = DetectorConfig()
        found = detect_s1(issue, repo, pages, cfg)
        assert len(found) == 1
        v = found[0]
        evidence = {e.label: e.value for e in v.evidence}
        # evidence score must equal an independently computed containment
        k = cfg.gram_size
        oracle = containment(
            fingerprint(tokenize(SNIPPET, "js"), k),
            fingerprint(tokenize(planted, "js"), k),
        )
        assert evidence["containment"] == f"{oracle:.4f}"
        assert evidence["file"] == "src/util.js"
        assert evidence["answerOwner"] == "sofia"
        assert v.subject == "octo/app#3"

    def test_threshold_monotonicity(self):
        # raising the threshold never increases the violation count
        planted = SNIPPET  # containment 1.0 for the full plant
        issue, repo, pages = s1_setup("function pad() {}\n" + SNIPPET)
        counts = []
        for threshold in (0.05, 0.10, 0.5, 0.99, 1.0):
            cfg = DetectorConfig(s1_threshold=threshold)
            counts.append(len(detect_s1(issue, repo, pages, cfg)))
        assert counts == sorted(counts, reverse=True)

    def test_binary_file_skipped(self):
        issue, repo, pages = s1_setup(SNIPPET)
        binary = make_repo("octo/app", [make_file("src/util.js", "\x00" + SNIPPET)])
        assert detect_s1(issue, binary, pages, DetectorConfig()) == []

    def test_issue_repo_mismatch_rejected(self):
        issue, repo, pages = s1_setup(SNIPPET)
        stranger = make_repo("other/app", [])
        with pytest.raises(FactValidationError):
            detect_s1(issue, stranger, pages, DetectorConfig())

    def test_detector_is_deterministic(self):
        issue, repo, pages = s1_setup(SNIPPET)
        first = detect_s1(issue, repo, pages, DetectorConfig())
        second = detect_s1(issue, repo, pages, DetectorConfig())
        assert first == second


class TestS2:
    def test_incomplete_tree_propagates(self):
        r1 = make_repo("a/x", [make_file("m.py", "1")], file_count=5)
        r2 = make_repo("b/x", [make_file("m.py", "1")])
        with pytest.raises(IncompleteTreeError):
            detect_s2(r1, r2)

    def test_same_repo_never_a_soft_fork(self):
        r = make_repo("a/x", [make_file("m.py", "1")])
        assert detect_s2(r, r) is None

    def test_trace_re_evaluates_against_same_facts(self):
        r1 = make_repo("a/x", [make_file("m.py", "code = 1\n")])
        r2 = make_repo("b/x", [make_file("m.py", "code = 1\n")])
        violation = detect_s2(r1, r2)
        assert violation is not None
        ruleset = load_rule_pack("s2")
        facts = export_base_facts(store_of(r1, r2))
        facts["identical_source"] = {("a/x", "b/x")}
        derived = evaluate(ruleset, facts)
        assert violation_trace_is_sound(violation, facts, ruleset, derived)
        # and a perturbed trace must fail the recheck
        broken = replace(violation, rule_trace=('identical_source("a/x", "zzz/x")',))
        assert not violation_trace_is_sound(broken, facts, ruleset, derived)


class TestS8:
    def host_issue(self, text: str, opener: str = "promo-dev"):
        repo = make_repo("host/app", [make_file("README.md", "x")],
                         contributors=frozenset({UserRef("insider")}))
        lib = make_repo("promo/lib", [], contributors=frozenset({UserRef("promo-dev")}))
        issue = make_issue("host/app", 5, opener=opener, comments=[(opener, text)])
        store = store_of(repo, lib, issues=[issue])
        return issue, repo, store

    def test_exclusion_exhaustive_over_all_segments(self):
        # every excluded segment suppresses every generated URL shape
        rng = random.Random(3)
        shapes = ["{base}{seg}42", "{base}{seg}abc/def", "{base}{seg}", "see {base}{seg}9 end"]
        for seg in DEFAULT_EXCLUDED_SEGMENTS:
            for i in range(20):
                shape = rng.choice(shapes)
                text = shape.format(base="https://github.com/promo/lib", seg=seg)
                issue, repo, store = self.host_issue(text)
                assert detect_s8(issue, repo, store, DetectorConfig()) is None, (seg, text)

    def test_removing_segment_from_config_flips_to_violation(self):
        for seg in DEFAULT_EXCLUDED_SEGMENTS:
            text = f"try https://github.com/promo/lib{seg}42"
            issue, repo, store = self.host_issue(text)
            remaining = tuple(s for s in DEFAULT_EXCLUDED_SEGMENTS if s != seg)
            cfg = DetectorConfig(s8_excluded_path_segments=remaining)
            found = detect_s8(issue, repo, store, cfg)
            assert found is not None, seg
            assert found.evidence[0].value.endswith(f"{seg}42")

    def test_candidate_cap_limits_resolution(self):
        links = " ".join(f"https://github.com/promo/lib{i}" for i in range(15))
        issue, repo, store = self.host_issue(links)
        diagnostics = []
        assert detect_s8(issue, repo, store, DetectorConfig(), diagnostics=diagnostics) is None
        assert len(diagnostics) == 10  # cap: only the first 10 distinct repos are resolved

    def test_first_match_wins(self):
        text = ("first https://github.com/promo/lib then https://github.com/promo/lib2")
        repo = make_repo("host/app", [], contributors=frozenset({UserRef("insider")}))
        lib = make_repo("promo/lib", [], contributors=frozenset({UserRef("promo-dev")}))
        lib2 = make_repo("promo/lib2", [], contributors=frozenset({UserRef("promo-dev")}))
        issue = make_issue("host/app", 5, opener="promo-dev", comments=[("promo-dev", text)])
        store = store_of(repo, lib, lib2, issues=[issue])
        found = detect_s8(issue, repo, store, DetectorConfig())
        assert found.evidence[0].value == "https://github.com/promo/lib"


class TestS9:
    def app(self, release: date, fork=False):
        link = "https://play.google.com/store/apps/details?id=com.x.y"
        return make_repo(
            "octo/app",
            [make_file("README.md", f"store: {link}")],
            latest_release=ReleaseInfo("v1", release),
            is_fork=fork,
        ), link

    def test_staleness_depends_on_evaluation_date(self):
        repo, link = self.app(date(2021, 5, 1))
        pages = {link: "Offers In-App Purchases"}
        cfg = DetectorConfig()
        assert detect_s9(repo, pages, cfg, date(2022, 1, 1)) is not None
        assert detect_s9(repo, pages, cfg, date(2021, 6, 1)) is None

    def test_boundary_day_not_stale(self):
        repo, link = self.app(date(2021, 7, 2))
        pages = {link: "in-app purchase"}
        cfg = DetectorConfig()
        # exactly 183 days is not "older than" the bound
        assert (date(2022, 1, 1) - date(2021, 7, 2)).days == 183
        assert detect_s9(repo, pages, cfg, date(2022, 1, 1)) is None
        assert detect_s9(repo, pages, cfg, date(2022, 1, 2)) is not None

    def test_marker_match_is_case_insensitive(self):
        repo, link = self.app(date(2021, 1, 1))
        found = detect_s9(repo, {link: "IN-APP PURCHASE available"}, DetectorConfig(), date(2022, 1, 1))
        assert found is not None
        assert {e.label: e.value for e in found.evidence}["matchedMarker"] == "IN-APP PURCHASE"

    def test_page_missing_entirely_counts_as_unavailable(self):
        repo, link = self.app(date(2021, 1, 1))
        diagnostics = []
        assert detect_s9(repo, {}, DetectorConfig(), date(2022, 1, 1), diagnostics=diagnostics) is None
        assert [d.reason for d in diagnostics] == ["page-unavailable"]


class TestS5:
    def test_rule_trace_names_pack_atoms(self):
        repo = make_repo("octo/bare", [make_file("src/a.py", "x")])
        violation = detect_s5(repo)
        assert violation is not None
        assert violation.rule_trace == ('repo("octo/bare")', 'not s5_licensed("octo/bare")')

    def test_read_only_store(self):
        # detectors never mutate the facts they are given
        repo = make_repo("octo/bare", [make_file("src/a.py", "x")])
        before = repr(repo)
        detect_s5(repo)
        assert repr(repo) == before
