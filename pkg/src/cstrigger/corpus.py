"""Token-level language-annotated corpora: data model, canonical file format,
tag normalisation, validation and corpus statistics.

Canonical format (UTF-8)::

    # id = ex5
    # turn = t1
    every<TAB>lang:en
    ahly<TAB>shared:ar
    ...
    <blank line>

A line containing a tab is a token line; a ``#`` line without a tab is
metadata.  Hashtag tokens such as ``#ahly`` are therefore unambiguous.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, TextIO

__all__ = [
    "Corpus",
    "CorpusError",
    "LanguagePair",
    "MappingError",
    "NEUTRAL_KINDS",
    "ParseError",
    "SchemaError",
    "StatsTable",
    "Tag",
    "TagMapping",
    "Token",
    "Utterance",
    "ValidationIssue",
    "corpus_stats",
    "iter_utterances",
    "parse_corpus",
    "parse_mapping",
    "serialize_corpus",
    "validate_corpus",
]

LANG = "lang"
SHARED = "shared"
SHARED_OTHER = "shared_other"
MIX = "mix"
NEUTRAL = "neutral"
NEUTRAL_KINDS = ("other", "punct", "emoji", "hashtag")

_CODE_RE = re.compile(r"^[a-z]{2,3}$")


class CorpusError(Exception):
    """Base class for corpus input problems."""


class ParseError(CorpusError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class MappingError(CorpusError):
    def __init__(self, raw: str, lineno: Optional[int] = None):
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{where}unmapped tag {raw!r}")
        self.raw = raw
        self.lineno = lineno


class SchemaError(CorpusError):
    pass


@dataclass(frozen=True)
class LanguagePair:
    l1: str
    l2: str
    name: str = ""

    def __post_init__(self):
        for code in (self.l1, self.l2):
            if not _CODE_RE.match(code):
                raise ValueError(f"language code must be 2-3 lowercase ASCII letters: {code!r}")
        if self.l1 == self.l2:
            raise ValueError("a language pair needs two distinct languages")

    @classmethod
    def parse(cls, text: str) -> "LanguagePair":
        """Parse ``"en-es"`` (or ``"en,es"``)."""
        parts = re.split(r"[-,:/]", text.strip())
        if len(parts) != 2:
            raise ValueError(f"expected L1-L2, got {text!r}")
        return cls(parts[0].lower(), parts[1].lower(), text.strip())

    def __contains__(self, code: str) -> bool:
        return code == self.l1 or code == self.l2

    def other(self, code: str) -> str:
        return self.l2 if code == self.l1 else self.l1


@dataclass(frozen=True)
class Tag:
    """A normalised language-ID tag.

    ``kind`` is one of ``lang``, ``shared``, ``shared_other``, ``mix`` or
    ``neutral``; ``value`` holds the language code (``lang``/``shared``) or
    the neutral subkind.
    """

    kind: str
    value: str = ""

    @classmethod
    def parse(cls, text: str) -> "Tag":
        if text.startswith("lang:"):
            code = text[5:]
            if _CODE_RE.match(code):
                return cls(LANG, code)
        elif text == "shared:other":
            return cls(SHARED_OTHER)
        elif text.startswith("shared:"):
            code = text[7:]
            if _CODE_RE.match(code):
                return cls(SHARED, code)
        elif text == "mix":
            return cls(MIX)
        elif text in NEUTRAL_KINDS:
            return cls(NEUTRAL, text)
        raise ValueError(f"not a canonical tag: {text!r}")

    def __str__(self) -> str:
        if self.kind == LANG:
            return f"lang:{self.value}"
        if self.kind == SHARED:
            return f"shared:{self.value}"
        if self.kind == SHARED_OTHER:
            return "shared:other"
        if self.kind == MIX:
            return "mix"
        return self.value

    @property
    def is_shared(self) -> bool:
        return self.kind == SHARED or self.kind == SHARED_OTHER

    @property
    def is_neutral(self) -> bool:
        return self.kind == NEUTRAL

    @property
    def lang(self) -> Optional[str]:
        return self.value if self.kind == LANG else None

    @property
    def shared_subclass(self) -> Optional[str]:
        """Language code of a shared tag, ``"other"`` for shared-other."""
        if self.kind == SHARED:
            return self.value
        if self.kind == SHARED_OTHER:
            return "other"
        return None


@dataclass(frozen=True)
class Token:
    text: str
    tag: Tag


@dataclass(frozen=True)
class Utterance:
    id: str
    turn_id: str
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def tags(self) -> list[Tag]:
        return [t.tag for t in self.tokens]


@dataclass(frozen=True)
class Corpus:
    pair: LanguagePair
    utterances: tuple[Utterance, ...]
    source_label: str = ""

    def __len__(self) -> int:
        return len(self.utterances)

    @property
    def n_tokens(self) -> int:
        return sum(len(u) for u in self.utterances)


@dataclass
class TagMapping:
    """Declarative map from a source corpus's raw tags to canonical tags."""

    entries: dict[str, Tag] = field(default_factory=dict)

    def __getitem__(self, raw: str) -> Tag:
        return self.entries[raw]

    def __contains__(self, raw: str) -> bool:
        return raw in self.entries


def parse_mapping(stream: Iterable[str]) -> TagMapping:
    """Read ``raw<TAB>canonical-tag`` lines; blank and ``#`` lines are skipped."""
    entries = {}
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0]:
            raise ParseError(lineno, "mapping lines must be raw<TAB>tag")
        try:
            entries[parts[0]] = Tag.parse(parts[1].strip())
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
    return TagMapping(entries)


def _metadata(line: str) -> tuple[str, str]:
    body = line[1:].strip()
    key, sep, value = body.partition("=")
    if not sep:
        return "", body
    return key.strip(), value.strip()


def iter_utterances(
    stream: Iterable[str],
    pair: LanguagePair,
    mapping: Optional[TagMapping] = None,
) -> Iterator[Utterance]:
    """Stream utterances from canonical-format lines.

    Without ``mapping`` every tag must already be canonical; with one, every
    raw tag must be a key of the mapping (no pass-through).
    """
    cache: dict[str, Tag] = {}
    tokens: list[Token] = []
    meta: dict[str, str] = {}
    index = 0

    def flush():
        nonlocal index
        index += 1
        uid = meta.get("id", str(index))
        return Utterance(uid, meta.get("turn", uid), tuple(tokens))

    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if "\t" in line:
            text, sep, raw = line.partition("\t")
            if not text or "\t" in raw or not raw:
                raise ParseError(lineno, "token lines must be token<TAB>tag")
            tag = cache.get(raw)
            if tag is None:
                tag = _normalize(raw, lineno, pair, mapping)
                cache[raw] = tag
            tokens.append(Token(text, tag))
        elif not line.strip():
            if tokens or meta:
                yield flush()
                tokens, meta = [], {}
        elif line.startswith("#"):
            if tokens:
                raise ParseError(lineno, "metadata line after tokens of the same utterance")
            key, value = _metadata(line)
            if key:
                meta[key] = value
        else:
            raise ParseError(lineno, "expected token<TAB>tag, metadata or blank line")
    if tokens or meta:
        yield flush()


def _normalize(raw: str, lineno: int, pair: LanguagePair, mapping: Optional[TagMapping]) -> Tag:
    if mapping is not None:
        if raw not in mapping:
            raise MappingError(raw, lineno)
        tag = mapping[raw]
    else:
        try:
            tag = Tag.parse(raw)
        except ValueError:
            raise MappingError(raw, lineno) from None
    if tag.kind == SHARED and tag.value not in pair:
        raise SchemaError(
            f"line {lineno}: shared tag {tag} outside language pair {pair.l1}-{pair.l2}"
        )
    return tag


def parse_corpus(
    stream: Iterable[str],
    pair: LanguagePair,
    mapping: Optional[TagMapping] = None,
    source_label: str = "",
) -> Corpus:
    return Corpus(pair, tuple(iter_utterances(stream, pair, mapping)), source_label)


def serialize_corpus(corpus: Corpus, out: Optional[TextIO] = None) -> str:
    lines = []
    for u in corpus.utterances:
        lines.append(f"# id = {u.id}")
        lines.append(f"# turn = {u.turn_id}")
        lines.extend(f"{t.text}\t{t.tag}" for t in u.tokens)
        lines.append("")
    text = "\n".join(lines) + ("\n" if lines else "")
    if out is not None:
        out.write(text)
    return text


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    utterance_id: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind}: {self.utterance_id}" + (f" ({self.detail})" if self.detail else "")


def validate_corpus(corpus: Corpus) -> list[ValidationIssue]:
    """Report invariant violations; an empty list means the corpus is valid."""
    issues = []
    seen = set()
    reported = set()
    for u in corpus.utterances:
        if u.id in seen and u.id not in reported:
            issues.append(ValidationIssue("duplicate id", u.id))
            reported.add(u.id)
        seen.add(u.id)
        if not u.tokens:
            issues.append(ValidationIssue("empty utterance", u.id))
        for pos, tok in enumerate(u.tokens):
            if not tok.text:
                issues.append(ValidationIssue("empty token", u.id, f"position {pos}"))
            if tok.tag.kind == SHARED and tok.tag.value not in corpus.pair:
                issues.append(
                    ValidationIssue("out-of-pair shared code", u.id, f"position {pos}: {tok.tag}")
                )
    return issues


@dataclass
class StatsTable:
    utterances: int = 0
    tokens: int = 0
    lang_tokens: Counter = field(default_factory=Counter)
    shared_tokens: Counter = field(default_factory=Counter)
    shared_items: Counter = field(default_factory=Counter)
    mix_tokens: int = 0
    neutral_tokens: Counter = field(default_factory=Counter)
    switches: Counter = field(default_factory=Counter)

    @property
    def switch_total(self) -> int:
        return sum(self.switches.values())

    def kind_total(self) -> int:
        return (
            sum(self.lang_tokens.values())
            + sum(self.shared_tokens.values())
            + self.mix_tokens
            + sum(self.neutral_tokens.values())
        )

    def to_dict(self) -> dict:
        return {
            "utterances": self.utterances,
            "tokens": self.tokens,
            "lang_tokens": dict(sorted(self.lang_tokens.items())),
            "shared_tokens": dict(sorted(self.shared_tokens.items())),
            "shared_items": dict(sorted(self.shared_items.items())),
            "mix_tokens": self.mix_tokens,
            "neutral_tokens": dict(sorted(self.neutral_tokens.items())),
            "switches": {f"{a}->{b}": n for (a, b), n in sorted(self.switches.items())},
        }

    def render(self, pair: LanguagePair) -> str:
        """Plain-text table in the layout of the corpus statistics tables."""
        rows: list[tuple[str, str, str]] = []

        def pct(n, total):
            return f"{100.0 * n / total:.1f}" if total else ""

        rows.append(("Utterances", f"{self.utterances:,}", ""))
        rows.append(("Tokens (total)", f"{self.tokens:,}", ""))
        langs = [pair.l1, pair.l2] + sorted(set(self.lang_tokens) - {pair.l1, pair.l2})
        for code in langs:
            rows.append((code.upper(), f"{self.lang_tokens[code]:,}", pct(self.lang_tokens[code], self.tokens)))
        for sub in (pair.l1, pair.l2, "other"):
            label = "Shared-Other" if sub == "other" else f"Shared-{sub.upper()}"
            rows.append((label, f"{self.shared_items[sub]:,}", pct(self.shared_items[sub], self.tokens)))
        rows.append(("MIX", f"{self.mix_tokens:,}", pct(self.mix_tokens, self.tokens)))
        for kind in NEUTRAL_KINDS:
            if self.neutral_tokens[kind]:
                rows.append((kind.capitalize(), f"{self.neutral_tokens[kind]:,}",
                             pct(self.neutral_tokens[kind], self.tokens)))
        total = self.switch_total
        rows.append(("CS (total)", f"{total:,}", ""))
        for a, b in ((pair.l1, pair.l2), (pair.l2, pair.l1)):
            n = self.switches[(a, b)]
            rows.append((f"{a.upper()}->{b.upper()}", f"{n:,}", pct(n, total)))
        w0 = max(len(r[0]) for r in rows)
        w1 = max(len(r[1]) for r in rows)
        return "\n".join(f"{a:<{w0}}  {b:>{w1}}  {c:>5}".rstrip() for a, b, c in rows) + "\n"


def corpus_stats(corpus: Corpus, policy: str = "exclude-return") -> StatsTable:
    """Token, shared-item and switch counts (switches after insertional filtering)."""
    from .switches import detect_switch_points, filter_insertional, group_shared_items

    stats = StatsTable()
    for u in corpus.utterances:
        stats.utterances += 1
        stats.tokens += len(u)
        for tok in u.tokens:
            tag = tok.tag
            if tag.kind == LANG:
                stats.lang_tokens[tag.value] += 1
            elif tag.is_shared:
                stats.shared_tokens[tag.shared_subclass] += 1
            elif tag.kind == MIX:
                stats.mix_tokens += 1
            else:
                stats.neutral_tokens[tag.value] += 1
        for item in group_shared_items(u):
            stats.shared_items[item.subclass] += 1
        points = filter_insertional(detect_switch_points(u, corpus.pair), u, policy)
        for p in points:
            stats.switches[(p.from_lang, p.to_lang)] += 1
    return stats
