"""Tweet text cleaning, tokenization, and surface-feature extraction.

Cleaning removes three URL shapes (scheme-prefixed, bare shortener, truncated
fragment), applies an extra path-stripping pass to tweets containing the word
"blog" (shortened URLs co-occur with it almost always in this kind of spam),
decodes literal \\uXXXX escapes, and drops non-printable characters. Every
removal stage runs to a fixpoint, which makes clean_text idempotent by
construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Full URLs first, then bare shorteners, then truncated fragments. A fragment
# at end-of-text may drag a trailing ellipsis with it (truncated tweets).
_RE_FULL_URL = re.compile(r"\bhttps?://\S+", re.IGNORECASE)
_RE_SHORTENER = re.compile(r"\bt\.co/\w+", re.IGNORECASE)
_RE_FRAGMENT_TAIL = re.compile(r"\bhttps?:/+\s*(?:\.{2,}|…)\s*$", re.IGNORECASE)
_RE_FRAGMENT = re.compile(r"\bhttps?:/+(?=\s|$)", re.IGNORECASE)
# Aggressive pass for "blog" tweets: residual path-like tokens (bit.ly/x etc).
_RE_PATHLIKE = re.compile(r"\S*\.\S+/\S+")

_RE_BLOG = re.compile(r"\bblog\b", re.IGNORECASE)
_RE_ESCAPE = re.compile(r"\\+u([0-9a-fA-F]{4})")
_RE_WS = re.compile(r"\s+")

_RE_TOKEN = re.compile(r"[@#]\w+|\w+")
_RE_HASHTAG = re.compile(r"#\w+")
_RE_MENTION = re.compile(r"@\w+")
_RE_RETWEET = re.compile(r"^RT ?@", re.IGNORECASE)

_URL_PATTERNS = (_RE_FULL_URL, _RE_SHORTENER, _RE_FRAGMENT_TAIL, _RE_FRAGMENT)


@dataclass(frozen=True)
class SurfaceFeatures:
    """Counts taken from the raw text; they must survive URL removal."""

    url_count: int
    hashtag_count: int
    mention_count: int
    is_retweet: bool
    token_count: int
    char_count: int


def _decode_and_filter(text: str) -> str:
    # Decoding can expose further escapes (\ is a backslash) and can
    # produce control characters; dropping a control character can fuse a
    # backslash with a uXXXX tail. Run both to a joint fixpoint so a second
    # clean_text pass has nothing left to do. Every step shrinks the string.
    while True:
        new = _RE_ESCAPE.sub(lambda m: chr(int(m.group(1), 16)), text)
        new = "".join(ch for ch in new if ch == " " or ch.isprintable())
        if new == text:
            return new
        text = new


def _strip_patterns(text: str, patterns) -> tuple[str, int]:
    removed = 0
    while True:
        changed = False
        for pat in patterns:
            text, n = pat.subn(" ", text)
            if n:
                removed += n
                changed = True
        if not changed:
            return text, removed


def count_urls(text: str) -> int:
    """Number of URL-shaped substrings under the base grammar (no blog pass)."""
    return _strip_patterns(text, _URL_PATTERNS)[1]


def clean_text(raw: str) -> str:
    """Clean one tweet. Total function; idempotent for any input string."""
    text = _RE_WS.sub(" ", raw)
    text = _decode_and_filter(text)
    aggressive = bool(_RE_BLOG.search(text))
    text, _ = _strip_patterns(text, _URL_PATTERNS)
    if aggressive:
        text, _ = _strip_patterns(text, _URL_PATTERNS + (_RE_PATHLIKE,))
    return _RE_WS.sub(" ", text).strip()


def tokenize(cleaned: str) -> list[str]:
    """Lowercased tokens; @mentions and #hashtags stay whole, punctuation splits."""
    return _RE_TOKEN.findall(cleaned.lower())


def is_retweet_text(raw: str) -> bool:
    """True iff the text starts with "RT @" or "RT@" (case-insensitive)."""
    return bool(_RE_RETWEET.match(raw.lstrip()))


def surface_features(raw: str) -> SurfaceFeatures:
    """Extract counts from the raw (uncleaned) text of one tweet."""
    return SurfaceFeatures(
        url_count=count_urls(raw),
        hashtag_count=len(_RE_HASHTAG.findall(raw)),
        mention_count=len(_RE_MENTION.findall(raw)),
        is_retweet=is_retweet_text(raw),
        token_count=len(tokenize(clean_text(raw))),
        char_count=len(raw),
    )
