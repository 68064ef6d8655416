"""Tweet preprocessing: normalization, tokenization, negation marking.

Everything here is a pure function of its inputs. A :class:`LanguageProfile`
carries the per-language knobs (negation triggers, suffix, case folding and
letter stripping).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Sequence, TextIO

LABELS = ("negative", "neutral", "positive")

ENGLISH_NEGATIONS = frozenset([
    "no", "not", "never", "cannot", "don't", "doesn't", "didn't", "won't",
    "wouldn't", "can't", "couldn't", "isn't", "aren't", "wasn't", "weren't",
    "shouldn't", "haven't", "hasn't", "hadn't", "n't", "neither", "nor",
])
# "ما" is left out on purpose: it is just as often interrogative or relative.
ARABIC_NEGATIONS = frozenset(["لا", "ليس"])

PUNCTUATION = frozenset(".,;:!?()\"'،؛؟")
SENTENCE_PUNCTUATION = frozenset(".,;:!?،؛؟")

_URL_RE = re.compile(r"(?:\b[A-Za-z][A-Za-z0-9+.\-]*://|\bwww\.)\S*", re.IGNORECASE)
_USER_RE = re.compile(r"(?<![\w@])@\w+")
_LATIN_RE = re.compile(r"[A-Za-zÀ-ɏḀ-ỿ]")
_ELONGATION_RE = re.compile(r"(.)\1{2,}", re.DOTALL)
_EMOTICON_RE = re.compile(
    r"""^(?:
        [<>]?[:;=8xX][\-o*'^]?[()\[\]dDpP/\\|*3oO@$]+
      | [()\[\]dDpP/\\|]+[\-o*'^]?[:;=8]
      | <[/\\]?3+
      | [\^][_\-.]?[\^]
    )$""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class LanguageProfile:
    language_id: str
    negation_words: frozenset
    negation_suffix: str
    lowercase: bool
    strip_non_native_letters: bool

    def __post_init__(self):
        if not self.negation_words:
            raise ValueError("a language profile needs at least one negation word")
        for word in self.negation_words:
            if not word or any(ch.isspace() for ch in word):
                raise ValueError(f"invalid negation word {word!r}")
        object.__setattr__(self, "negation_words", frozenset(self.negation_words))

    @classmethod
    def english(cls) -> "LanguageProfile":
        return cls("english", ENGLISH_NEGATIONS, "_NEG", True, False)

    @classmethod
    def arabic(cls) -> "LanguageProfile":
        return cls("arabic", ARABIC_NEGATIONS, "_منفي", False, True)

    @classmethod
    def for_language(cls, lang: str) -> "LanguageProfile":
        key = lang.lower()
        if key in ("en", "english"):
            return cls.english()
        if key in ("ar", "arabic"):
            return cls.arabic()
        raise ValueError(f"unsupported language {lang!r} (expected en or ar)")

    def with_negation(self, words: Optional[Iterable[str]] = None,
                      suffix: Optional[str] = None) -> "LanguageProfile":
        changes = {}
        if words is not None:
            changes["negation_words"] = frozenset(words)
        if suffix is not None:
            changes["negation_suffix"] = suffix
        return replace(self, **changes)

    def is_negation(self, surface: str) -> bool:
        if self.lowercase:
            surface = surface.lower()
        return surface in self.negation_words

    def to_dict(self) -> dict:
        return {
            "language_id": self.language_id,
            "negation_words": sorted(self.negation_words),
            "negation_suffix": self.negation_suffix,
            "lowercase": self.lowercase,
            "strip_non_native_letters": self.strip_non_native_letters,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LanguageProfile":
        return cls(data["language_id"], frozenset(data["negation_words"]),
                   data["negation_suffix"], bool(data["lowercase"]),
                   bool(data["strip_non_native_letters"]))


@dataclass(frozen=True)
class Token:
    surface: str
    pos: Optional[str] = None
    negated: bool = False

    def feature_form(self, suffix: str) -> str:
        """Surface used by n-gram features; negated tokens carry the suffix."""
        return self.surface + suffix if self.negated else self.surface


@dataclass
class Tweet:
    id: str
    text: str
    tokens: list = field(default_factory=list)
    label: Optional[str] = None


def _normalize_once(text: str, profile: LanguageProfile) -> str:
    text = _URL_RE.sub(" ", text)
    text = _USER_RE.sub(" ", text)
    if profile.lowercase:
        text = text.lower()
    if profile.strip_non_native_letters:
        text = _LATIN_RE.sub("", text)
    text = _ELONGATION_RE.sub(r"\1\1", text)
    return " ".join(text.split())


def normalize(raw: str, profile: LanguageProfile) -> str:
    """Clean one raw tweet.

    Steps run in a fixed order: URL and username removal, case folding,
    Latin letter stripping, elongation capping (runs of three or more
    identical characters become two) and whitespace collapsing.

    A later step can expose something an earlier one would have removed
    (stripping ``x`` from ``x@user`` reveals a username), so the steps are
    repeated until the text stops changing. That keeps ``normalize``
    idempotent.

    >>> normalize("I LOVE it http://t.co/x @bob", LanguageProfile.english())
    'i love it'
    >>> normalize("sooooo coooool", LanguageProfile.english())
    'soo cool'
    """
    text = raw
    for _ in range(16):
        cleaned = _normalize_once(text, profile)
        if cleaned == text:
            break
        text = cleaned
    return text


def _split_chunk(chunk: str) -> Iterator[str]:
    if _EMOTICON_RE.match(chunk):
        yield chunk
        return
    current = []
    last = len(chunk) - 1
    for i, ch in enumerate(chunk):
        if ch in PUNCTUATION:
            prev = chunk[i - 1] if i > 0 else ""
            nxt = chunk[i + 1] if i < last else ""
            inner_apostrophe = ch == "'" and prev.isalnum() and nxt.isalnum()
            numeric = ch in ".," and prev.isdigit() and nxt.isdigit()
            if inner_apostrophe or numeric:
                current.append(ch)
                continue
            if current:
                yield "".join(current)
                current = []
            yield ch
        else:
            current.append(ch)
    if current:
        yield "".join(current)


def tokenize(normalized: str) -> list:
    """Split normalized text into tokens.

    Whitespace separates chunks; the punctuation marks ``. , ; : ! ? ( ) " '``
    (and Arabic ``، ؛ ؟``) are split off as tokens of their own, except for
    word-internal apostrophes (``don't``) and separators inside numbers
    (``3.5``). Hashtags and emoticons survive intact.
    """
    return [Token(piece) for chunk in normalized.split() for piece in _split_chunk(chunk)]


def mark_negation(tokens: Sequence[Token], profile: LanguageProfile) -> list:
    """Flag tokens inside negated contexts.

    A context opens after a negation word and closes at the next sentence
    punctuation token (or the end of the tweet). The trigger and the closing
    punctuation are not flagged. Triggers met inside an open context are
    flagged like any other word and do not restart it.
    """
    out = []
    in_scope = False
    for tok in tokens:
        if tok.surface in SENTENCE_PUNCTUATION:
            in_scope = False
            negated = False
        elif in_scope:
            negated = True
        else:
            negated = False
            in_scope = profile.is_negation(tok.surface)
        out.append(replace(tok, negated=negated))
    return out


def attach_tags(tokens: Sequence[Token], tags: Sequence[str]) -> list:
    if len(tokens) != len(tags):
        raise ValueError(f"tag count mismatch: {len(tokens)} tokens but {len(tags)} tags")
    return [replace(tok, pos=tag) for tok, tag in zip(tokens, tags)]


def preprocess(raw: str, profile: LanguageProfile) -> list:
    """normalize -> tokenize -> mark_negation."""
    return mark_negation(tokenize(normalize(raw, profile)), profile)


def preprocess_tagged(pairs: Sequence[tuple], profile: LanguageProfile) -> list:
    """Build negation-marked tokens from externally tokenized ``(surface, tag)`` pairs.

    Each surface is normalized on its own; tokens that normalize away (URLs,
    usernames) are dropped together with their tag.
    """
    tokens = []
    for surface, tag in pairs:
        for piece in normalize(surface, profile).split():
            tokens.append(Token(piece, pos=tag))
    return mark_negation(tokens, profile)


class TweetFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _check_label(label: str, lineno: int) -> Optional[str]:
    if label == "-":
        return None
    if label not in LABELS:
        raise TweetFormatError(lineno, f"unknown label {label!r}")
    return label


def read_tweet_tsv(stream: TextIO, skip_bad: bool = False,
                   on_error=None) -> list:
    """Read ``id<TAB>label<TAB>text`` lines; ``-`` marks a missing label."""
    tweets = []
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        try:
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise TweetFormatError(lineno, f"expected 3 tab-separated columns, got {len(parts)}")
            tweet_id, label, text = parts
            if not tweet_id:
                raise TweetFormatError(lineno, "empty tweet id")
            tweets.append(Tweet(tweet_id, text, label=_check_label(label, lineno)))
        except TweetFormatError as exc:
            if not skip_bad:
                raise
            if on_error is not None:
                on_error(exc)
    return tweets


def read_tagged(stream: TextIO, skip_bad: bool = False, on_error=None) -> list:
    """Read pre-tagged tweets: ``surface<TAB>pos`` per line, blank line between tweets.

    A block may start with a header line ``#<TAB>id<TAB>label`` (label may be
    ``-``). Without one, tweets are numbered from 1 and carry no label. The
    returned tweets keep their pairs in ``tokens`` as raw ``(surface, tag)``
    tuples; ``text`` is the space-joined surfaces.
    """
    tweets = []
    block, header, bad = [], None, False

    def flush():
        nonlocal block, header, bad
        if (block or header) and not bad:
            tweet_id, label = header if header else (str(len(tweets) + 1), None)
            tweets.append(Tweet(tweet_id, " ".join(s for s, _ in block), tokens=block, label=label))
        block, header, bad = [], None, False

    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            flush()
            continue
        if bad:
            continue
        cols = line.split("\t")
        try:
            if len(cols) == 3 and cols[0] == "#" and not block and header is None:
                header = (cols[1], _check_label(cols[2], lineno))
            elif len(cols) == 2 and cols[0]:
                block.append((cols[0], cols[1]))
            else:
                raise TweetFormatError(lineno, f"expected surface<TAB>pos, got {len(cols)} column(s)")
        except TweetFormatError as exc:
            if not skip_bad:
                raise
            if on_error is not None:
                on_error(exc)
            bad = True
    flush()
    return tweets
