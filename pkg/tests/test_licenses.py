"""License catalog matching, repo-level detection, and change extraction."""

from __future__ import annotations

import pytest

from conftest import make_commit, make_file, make_repo, utc
from ethoscan.errors import MissingDiffError
from ethoscan.licenses import (
    SOURCE_LICENSE_FILE,
    SOURCE_README,
    default_catalog,
    detect_repo_license,
    extract_license_changes,
    load_catalog,
)


@pytest.fixture(scope="module")
def catalog():
    return default_catalog()


class TestCatalog:
    def test_every_entry_detects_its_own_canonical_text(self, catalog):
        for entry in catalog.entries:
            assert entry.canonical_header, f"{entry.spdx_id} lacks canonical text"
            identified = catalog.identify_text(entry.canonical_header)
            assert identified is not None, f"{entry.spdx_id} not detected at all"
            assert identified[0].spdx_id == entry.spdx_id, (
                f"{entry.spdx_id} misidentified as {identified[0].spdx_id}"
            )

    def test_phrases_actually_occur_in_canonical_text(self, catalog):
        import re

        def norm(s):
            return re.sub(r"\s+", " ", s).lower()

        for entry in catalog.entries:
            assert any(norm(p) in norm(entry.canonical_header) for p in entry.phrases), entry.spdx_id

    def test_gpl_family_disambiguation(self, catalog):
        lgpl3 = (
            "GNU LESSER GENERAL PUBLIC LICENSE\nVersion 3, 29 June 2007\n\n"
            "This version of the GNU Lesser General Public License incorporates the terms "
            "and conditions of version 3 of the GNU General Public License, supplemented "
            "by the additional permissions listed below."
        )
        assert catalog.identify_text(lgpl3)[0].spdx_id == "LGPL-3.0"

    def test_mention_word_boundaries(self, catalog):
        assert catalog.find_mention("scripts that permit anything") is None
        assert catalog.find_mention("Licensed under the MIT license.")[0].spdx_id == "MIT"

    def test_mention_finds_spdx_id(self, catalog):
        assert catalog.find_mention("Licensed under Apache-2.0")[0].spdx_id == "Apache-2.0"

    def test_disclaimer_is_not_a_license(self, catalog):
        disclaimer = (
            "This repository is for personal study and research purposes only. "
            "Please DO NOT USE IT FOR COMMERCIAL PURPOSES."
        )
        assert catalog.find_mention(disclaimer) is None

    def test_catalog_override_file(self, tmp_path):
        payload = """{
  "licenses": [
    {"name": "House License", "spdxId": "HOUSE-1.0",
     "phrases": ["The House License governs everything"],
     "canonicalHeader": "The House License governs everything."}
  ]
}"""
        path = tmp_path / "cat.json"
        path.write_text(payload, encoding="utf-8")
        cat = load_catalog(path)
        assert cat.identify_text("The House License governs everything.")[0].spdx_id == "HOUSE-1.0"


class TestDetectRepoLicense:
    def test_root_license_file_mit(self, mit_text):
        repo = make_repo(files=[make_file("LICENSE", mit_text)], license_file=make_file("LICENSE", mit_text))
        info = detect_repo_license(repo)
        assert info.spdx_id == "MIT"
        assert info.source == SOURCE_LICENSE_FILE

    def test_license_file_found_without_explicit_field(self, mit_text):
        repo = make_repo(files=[make_file("LICENSE.md", mit_text)])
        info = detect_repo_license(repo)
        assert info.spdx_id == "MIT"

    def test_readme_mention_apache(self):
        repo = make_repo(files=[make_file("README.md", "Licensed under Apache-2.0")])
        info = detect_repo_license(repo)
        assert info.spdx_id == "Apache-2.0"
        assert info.source == SOURCE_README

    def test_inner_folder_license_not_found(self, mit_text):
        repo = make_repo(files=[make_file("docs/LICENSE", mit_text), make_file("README.md", "hello")])
        assert detect_repo_license(repo) is None

    def test_license_file_priority_over_readme(self, mit_text):
        repo = make_repo(files=[
            make_file("LICENSE", mit_text),
            make_file("README.md", "Licensed under Apache-2.0"),
        ])
        assert detect_repo_license(repo).spdx_id == "MIT"

    def test_unrecognized_license_file_still_counts(self):
        repo = make_repo(files=[make_file("LICENSE", "You may use this for anything fun.")])
        info = detect_repo_license(repo)
        assert info.spdx_id == "unknown"
        assert info.source == SOURCE_LICENSE_FILE

    def test_no_license_anywhere(self):
        repo = make_repo(files=[make_file("README.md", "just a readme"), make_file("main.py", "x")])
        assert detect_repo_license(repo) is None


def _diff(removed: str = "", added: str = "") -> str:
    lines = ["--- a/LICENSE", "+++ b/LICENSE"]
    lines += [f"-{line}" for line in removed.split("\n") if line]
    lines += [f"+{line}" for line in added.split("\n") if line]
    return "\n".join(lines)


class TestExtractLicenseChanges:
    def test_initial_creation_ignored(self, mit_text):
        repo = make_repo(license_commits=[make_commit("a" * 7, utc(2021, 1, 1), _diff(added=mit_text))])
        assert extract_license_changes(repo) == []

    def test_single_switch(self, apache_text, gpl3_text):
        repo = make_repo(license_commits=[
            make_commit("a" * 7, utc(2021, 1, 1), _diff(added=apache_text)),
            make_commit("b" * 7, utc(2021, 2, 17), _diff(removed=apache_text, added=gpl3_text)),
        ])
        events = extract_license_changes(repo)
        assert [(e.from_license, e.to_license) for e in events] == [("Apache-2.0", "GPL-3.0")]

    def test_switch_and_restore_yield_two_events(self, apache_text, gpl3_text):
        repo = make_repo(license_commits=[
            make_commit("a" * 7, utc(2021, 1, 1), _diff(added=apache_text)),
            make_commit("b" * 7, utc(2021, 2, 17), _diff(removed=apache_text, added=gpl3_text)),
            make_commit("c" * 7, utc(2021, 2, 18), _diff(removed=gpl3_text, added=apache_text)),
        ])
        events = extract_license_changes(repo)
        assert [(e.from_license, e.to_license) for e in events] == [
            ("Apache-2.0", "GPL-3.0"),
            ("GPL-3.0", "Apache-2.0"),
        ]

    def test_touch_without_license_identity_change(self, apache_text):
        repo = make_repo(license_commits=[
            make_commit("a" * 7, utc(2021, 1, 1), _diff(added=apache_text)),
            make_commit("b" * 7, utc(2021, 3, 1), _diff(removed="typo line", added="fixed line")),
        ])
        assert extract_license_changes(repo) == []

    def test_missing_diff_raises(self, apache_text):
        repo = make_repo(license_commits=[
            make_commit("a" * 7, utc(2021, 1, 1), _diff(added=apache_text)),
            make_commit("b" * 7, utc(2021, 3, 1), ""),
        ])
        with pytest.raises(MissingDiffError) as err:
            extract_license_changes(repo)
        assert "b" * 7 in str(err.value)

    def test_output_bounded_by_history_length(self, apache_text, gpl3_text):
        commits = [make_commit("a" * 7, utc(2021, 1, 1), _diff(added=apache_text))]
        for i, (frm, to) in enumerate([(0, 1), (1, 0), (0, 1)]):
            texts = [apache_text, gpl3_text]
            commits.append(make_commit(
                chr(ord("b") + i) * 7, utc(2021, 2 + i, 1),
                _diff(removed=texts[frm], added=texts[to]),
            ))
        repo = make_repo(license_commits=commits)
        assert len(extract_license_changes(repo)) <= max(0, len(commits) - 1)
