"""Scanning of cached external pages and link extraction from text.

Page parsing is regex-based and tolerant: answer pages yield the answer
owner's display name plus the code blocks, store-listing pages yield a
paid-service marker when one is present.  The selectors cover the
schema.org markup the real sites use and a plain fallback, which the
offline fixture pages also follow.
"""

from __future__ import annotations

import html as html_module
import re
from dataclasses import dataclass
from typing import Optional

# Answer-site links. Full form: /questions/<id>[/slug][#anchor].
# Short forms: /a/<id>[/userid] and /q/<id>[/userid].
SO_FULL_LINK_PATTERN = (
    r"https?://(?:www\.)?stackoverflow\.com/questions/\d+"
    r"(?:/[A-Za-z0-9_-]*)?(?:#(?:answer-)?\d+)?"
)
SO_SHORT_LINK_PATTERN = r"https?://(?:www\.)?stackoverflow\.com/[aq]/\d+(?:/\d+)?"
SO_LINK_PATTERN = f"(?:{SO_FULL_LINK_PATTERN})|(?:{SO_SHORT_LINK_PATTERN})"

REPO_LINK_RE = re.compile(
    r"https?://(?:www\.)?github\.com/[A-Za-z0-9_.-]+/[A-Za-z0-9_.-]+(?:/[^\s<>\"')\]]*)?"
)

STORE_LINK_RE = re.compile(
    r"https?://play\.google\.com/store/apps/details\?[^\s<>\"')\]]+"
)

PAID_MARKERS = ("in-app purchase",)

_PRE_CODE_RE = re.compile(r"<pre[^>]*>\s*<code[^>]*>(.*?)</code>\s*</pre>", re.DOTALL | re.IGNORECASE)
_ANSWER_SPLIT_RE = re.compile(r'(?=<div[^>]*\bclass="[^"]*\banswer\b)', re.IGNORECASE)
_ANSWER_ID_RE = re.compile(r'data-answerid="(\d+)"')
_OWNER_RES = (
    re.compile(r'itemprop="author"[\s\S]*?itemprop="name"[^>]*>([^<]+)<', re.IGNORECASE),
    re.compile(r'class="user-details"[^>]*>[\s\S]*?<a[^>]*>([^<]+)</a>', re.IGNORECASE),
)


@dataclass(frozen=True)
class AnswerDoc:
    """Owner and code blocks of the answer a link points at."""

    owner: Optional[str]
    code_blocks: tuple[str, ...]


def _target_answer_id(url: str) -> Optional[str]:
    m = re.search(r"stackoverflow\.com/a/(\d+)", url)
    if m:
        return m.group(1)
    m = re.search(r"#(?:answer-)?(\d+)$", url)
    if m:
        return m.group(1)
    return None


def _extract_block(block: str) -> AnswerDoc:
    owner = None
    for pattern in _OWNER_RES:
        m = pattern.search(block)
        if m:
            owner = html_module.unescape(m.group(1)).strip()
            break
    codes = tuple(html_module.unescape(m.group(1)) for m in _PRE_CODE_RE.finditer(block))
    return AnswerDoc(owner, codes)


def parse_answer_page(page_text: str, url: str) -> AnswerDoc:
    """Owner and code of the answer targeted by ``url``.

    When the URL names an answer id the matching block wins; otherwise
    the first answer block on the page is used, and a page without
    answer markup is treated as one block.
    """
    parts = _ANSWER_SPLIT_RE.split(page_text)
    blocks = [b for b in parts if re.match(r'<div[^>]*\bclass="[^"]*\banswer\b', b, re.IGNORECASE)]
    if not blocks:
        return _extract_block(page_text)
    target = _target_answer_id(url)
    if target is not None:
        for block in blocks:
            m = _ANSWER_ID_RE.search(block)
            if m and m.group(1) == target:
                return _extract_block(block)
    return _extract_block(blocks[0])


def find_paid_marker(page_text: str) -> Optional[str]:
    """Matched paid-service marker text from a store listing, if any."""
    lowered = page_text.lower()
    for marker in PAID_MARKERS:
        idx = lowered.find(marker)
        if idx != -1:
            return page_text[idx:idx + len(marker)]
    return None


_TRAILING_PUNCT = ".,;:!?"


def _strip_trailing_punct(url: str) -> str:
    return url.rstrip(_TRAILING_PUNCT)


def extract_so_links(text: str, pattern: str) -> list[str]:
    """Answer-site links in order of first appearance, deduplicated."""
    seen: list[str] = []
    for m in re.finditer(pattern, text):
        url = _strip_trailing_punct(m.group(0))
        if url not in seen:
            seen.append(url)
    return seen


def extract_repo_links(text: str) -> list[str]:
    """Repository links in order of first appearance, deduplicated."""
    seen: list[str] = []
    for m in REPO_LINK_RE.finditer(text):
        url = _strip_trailing_punct(m.group(0))
        if url not in seen:
            seen.append(url)
    return seen


def repo_link_target(url: str) -> Optional[str]:
    """``owner/name`` a repository link points at (``.git`` stripped)."""
    m = re.match(r"https?://(?:www\.)?github\.com/([A-Za-z0-9_.-]+)/([A-Za-z0-9_.-]+)", url)
    if not m:
        return None
    owner, name = m.group(1), m.group(2)
    name = name.rstrip(_TRAILING_PUNCT)
    if name.endswith(".git"):
        name = name[:-4]
    if not name:
        return None
    return f"{owner}/{name}"


def extract_store_links(*texts: str) -> list[str]:
    seen: list[str] = []
    for text in texts:
        for m in STORE_LINK_RE.finditer(text):
            url = _strip_trailing_punct(m.group(0))
            if url not in seen:
                seen.append(url)
    return seen
