"""Token-level similarity: k-gram fingerprints and containment scoring.

Comparisons are directional: ``containment(needle, hay)`` answers "how
much of the needle appears in the hay", which is what snippet-copying
checks need.  Hashing is fixed (blake2b) so fingerprints are identical
across runs and platforms.
"""

from __future__ import annotations

import hashlib
from collections import Counter, deque
from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import EmptyNeedleError, GramSizeMismatchError, IncompleteTreeError
from .facts import FileContent, RepositoryFacts

DEFAULT_GRAM_SIZE = 5

# File extensions treated as source code; mirrored by the ingestion
# allowlist and overridable from the CLI.
SOURCE_EXTENSIONS = frozenset({
    "c", "h", "cc", "cpp", "hpp", "java", "py", "js", "ts", "go",
    "rs", "rb", "php", "cs", "kt", "swift", "scala", "m", "sh",
})

_C_COMMENT_EXTENSIONS = frozenset({
    "c", "h", "cc", "cpp", "hpp", "java", "js", "ts", "go",
    "rs", "cs", "kt", "swift", "scala", "m",
})
_HASH_COMMENT_EXTENSIONS = frozenset({"py", "rb", "sh"})
# PHP accepts both comment families.
_QUOTES = "\"'`"


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[str, ...]
    source_path: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)


def normalize_line_endings(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


def file_extension(path: str) -> str:
    base = path.rsplit("/", 1)[-1]
    if "." not in base:
        return ""
    return base.rsplit(".", 1)[-1].lower()


def tokenize(text: str, extension: str, source_path: Optional[str] = None) -> TokenStream:
    """Lex ``text`` into a normalized token stream.

    Known source extensions get comment stripping and a small lexer
    (identifiers, numbers, quoted strings, single-character symbols);
    anything else falls back to whitespace tokenization with no comment
    handling.  Identifiers are preserved verbatim, whitespace never
    yields tokens, and line endings are normalized before lexing.
    """
    text = normalize_line_endings(text)
    ext = extension.lower().lstrip(".")
    c_comments = ext in _C_COMMENT_EXTENSIONS or ext == "php"
    hash_comments = ext in _HASH_COMMENT_EXTENSIONS or ext == "php"
    if not (c_comments or hash_comments):
        return TokenStream(tuple(text.split()), source_path)

    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if hash_comments and ch == "#":
            i = _skip_to_newline(text, i)
            continue
        if c_comments and ch == "/" and i + 1 < n and text[i + 1] == "/":
            i = _skip_to_newline(text, i)
            continue
        if c_comments and ch == "/" and i + 1 < n and text[i + 1] == "*":
            end = text.find("*/", i + 2)
            i = n if end == -1 else end + 2
            continue
        if ch in _QUOTES:
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == ch or text[j] == "\n":
                    break
                j += 1
            j = min(j + 1, n)
            tokens.append(text[i:j])
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "._"):
                j += 1
            tokens.append(text[i:j])
            i = j
            continue
        tokens.append(ch)
        i += 1
    return TokenStream(tuple(tokens), source_path)


def _skip_to_newline(text: str, i: int) -> int:
    end = text.find("\n", i)
    return len(text) if end == -1 else end


def _hash_gram(gram: tuple[str, ...]) -> int:
    payload = "\x1f".join(gram).encode("utf-8", "surrogatepass")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


class FingerprintSet:
    """Multiset of k-gram hashes of a token stream.

    Without winnowing the multiset has exactly ``max(0, n - k + 1)``
    entries for an n-token stream.
    """

    __slots__ = ("k", "_counts", "_size")

    def __init__(self, k: int, counts: Mapping[int, int]):
        self.k = k
        self._counts = dict(counts)
        self._size = sum(self._counts.values())

    @property
    def size(self) -> int:
        return self._size

    def count(self, h: int) -> int:
        return self._counts.get(h, 0)

    def counts(self) -> Mapping[int, int]:
        return dict(self._counts)

    def __len__(self) -> int:
        return self._size

    def __eq__(self, other) -> bool:
        if not isinstance(other, FingerprintSet):
            return NotImplemented
        return self.k == other.k and self._counts == other._counts

    def __repr__(self) -> str:
        return f"FingerprintSet(k={self.k}, grams={self._size})"


def fingerprint(stream: TokenStream, k: int = DEFAULT_GRAM_SIZE, window: Optional[int] = None) -> FingerprintSet:
    """Hash every window of ``k`` consecutive tokens.

    ``window`` enables winnowing (keep the rightmost minimum of each
    hash window); off by default since desk-scale corpora do not need
    the thinning.
    """
    if k < 1:
        raise ValueError("gram size must be >= 1")
    toks = stream.tokens
    grams = [_hash_gram(toks[i:i + k]) for i in range(len(toks) - k + 1)]
    if window is not None and window > 1 and grams:
        grams = _winnow(grams, window)
    return FingerprintSet(k, Counter(grams))


def _winnow(hashes: list[int], window: int) -> list[int]:
    selected: list[int] = []
    dq: deque[tuple[int, int]] = deque()  # (hash, position), increasing hash
    last_pos = -1
    for pos, h in enumerate(hashes):
        while dq and dq[0][1] <= pos - window:
            dq.popleft()
        while dq and dq[-1][0] >= h:
            dq.pop()
        dq.append((h, pos))
        if pos >= window - 1 and dq[0][1] != last_pos:
            selected.append(dq[0][0])
            last_pos = dq[0][1]
    return selected


def containment(needle: FingerprintSet, hay: FingerprintSet) -> float:
    """Fraction of the needle's grams present in the hay (multiset semantics)."""
    if needle.k != hay.k:
        raise GramSizeMismatchError(needle.k, hay.k)
    if needle.size == 0:
        raise EmptyNeedleError("needle fingerprint set is empty; text shorter than the gram size")
    shared = 0
    for h, c in needle.counts().items():
        shared += min(c, hay.count(h))
    return shared / needle.size


def source_files(repo: RepositoryFacts, extensions: frozenset[str] = SOURCE_EXTENSIONS) -> list[FileContent]:
    """Non-binary files whose extension is on the source allowlist."""
    out = []
    for f in repo.files:
        if file_extension(f.path) in extensions and not f.is_binary:
            out.append(f)
    return out


def _require_complete_tree(repo: RepositoryFacts, extensions: frozenset[str]) -> None:
    if repo.file_count != len(repo.files):
        raise IncompleteTreeError(
            repo.full_name,
            f"file_count={repo.file_count} but {len(repo.files)} paths listed",
        )
    missing = [
        f.path
        for f in repo.files
        if file_extension(f.path) in extensions and f.content_count == 0
    ]
    if missing:
        raise IncompleteTreeError(repo.full_name, "source files without content: " + ", ".join(sorted(missing)))


def repos_identical(
    r1: RepositoryFacts,
    r2: RepositoryFacts,
    extensions: frozenset[str] = SOURCE_EXTENSIONS,
    require_exact: bool = True,
) -> bool:
    """True iff the two repositories carry the same source files.

    The source-file path sets must match and each pair of contents must
    be byte-equal after line-ending normalization.  Non-source files
    (README, images, ...) never affect the outcome.  With
    ``require_exact=False`` the per-file comparison relaxes to equality
    of token streams, tolerating whitespace and comment edits.
    """
    _require_complete_tree(r1, extensions)
    _require_complete_tree(r2, extensions)
    left = {f.path: f for f in source_files(r1, extensions)}
    right = {f.path: f for f in source_files(r2, extensions)}
    if left.keys() != right.keys():
        return False
    for path, f1 in left.items():
        f2 = right[path]
        if require_exact:
            if normalize_line_endings(f1.content) != normalize_line_endings(f2.content):
                return False
        else:
            ext = file_extension(path)
            if tokenize(f1.content, ext).tokens != tokenize(f2.content, ext).tokens:
                return False
    return True
