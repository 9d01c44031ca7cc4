"""Shared-item grouping and code-switch point detection."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TextIO

from .corpus import LANG, Corpus, LanguagePair, Utterance

__all__ = [
    "EXCLUDE_RETURN",
    "INSERTIONAL_POLICIES",
    "KEEP_ALL",
    "SharedItem",
    "SwitchPoint",
    "detect_switch_points",
    "filter_insertional",
    "group_shared_items",
    "mark_insertional",
    "utterance_switches",
    "write_switch_dump",
]

EXCLUDE_RETURN = "exclude-return"
KEEP_ALL = "keep-all"
INSERTIONAL_POLICIES = (EXCLUDE_RETURN, KEEP_ALL)


@dataclass(frozen=True)
class SharedItem:
    """A maximal (possibly multi-word) shared item; ``end`` is inclusive.

    ``subclass`` is the origin language code, or ``"other"``.
    """

    utterance_id: str
    start: int
    end: int
    subclass: str

    @property
    def width(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class SwitchPoint:
    utterance_id: str
    position: int
    from_lang: str
    to_lang: str
    gap: int
    insertional_return: bool = False


def group_shared_items(u: Utterance) -> list[SharedItem]:
    """Group runs of consecutive shared tokens into items.

    A run made of one origin language plus shared-other tokens becomes a single
    item labelled with that language.  A run that contains both languages of
    the pair is split at every change of subclass, so ``Nueva York`` (shared-ES
    then shared-EN) yields two items.
    """
    items = []
    tokens = u.tokens
    n = len(tokens)
    i = 0
    while i < n:
        if not tokens[i].tag.is_shared:
            i += 1
            continue
        j = i
        while j + 1 < n and tokens[j + 1].tag.is_shared:
            j += 1
        subs = [tokens[k].tag.shared_subclass for k in range(i, j + 1)]
        origins = set(subs) - {"other"}
        if len(origins) <= 1:
            label = origins.pop() if origins else "other"
            items.append(SharedItem(u.id, i, j, label))
        else:
            start = i
            for k in range(i + 1, j + 2):
                if k == j + 1 or subs[k - i] != subs[k - 1 - i]:
                    items.append(SharedItem(u.id, start, k - 1, subs[start - i]))
                    start = k
        i = j + 1
    return items


def detect_switch_points(u: Utterance, pair: LanguagePair) -> list[SwitchPoint]:
    """Every token in one pair language whose nearest preceding pair-language
    token (same utterance) is in the other one.

    Tokens in between (shared, mix, neutral, third-language) form the gap.
    """
    points = []
    last_pos = -1
    last_lang = None
    l1, l2 = pair.l1, pair.l2
    for pos, tok in enumerate(u.tokens):
        tag = tok.tag
        if tag.kind != LANG:
            continue
        lang = tag.value
        if lang != l1 and lang != l2:
            continue
        if last_lang is not None and lang != last_lang:
            points.append(SwitchPoint(u.id, pos, last_lang, lang, pos - last_pos - 1))
        last_pos, last_lang = pos, lang
    return points


def _lang_at(u: Utterance, pos: int):
    tag = u.tokens[pos].tag
    return tag.value if tag.kind == LANG else None


def _prev_non_neutral(u: Utterance, pos: int) -> int:
    pos -= 1
    while pos >= 0 and u.tokens[pos].tag.is_neutral:
        pos -= 1
    return pos


def mark_insertional(points: list[SwitchPoint], u: Utterance, skip_neutral: bool = False) -> list[SwitchPoint]:
    """Flag return legs of one-token insertions (``w1 w2 w3`` with ``w1``, ``w3``
    in one language and ``w2`` in the other); nothing is removed.

    With ``skip_neutral`` the triple is matched ignoring punctuation, emoji,
    hashtags and other neutral tokens.
    """
    out = []
    for p in points:
        if skip_neutral:
            w2 = _prev_non_neutral(u, p.position)
            w1 = _prev_non_neutral(u, w2) if w2 >= 0 else -1
        else:
            w2, w1 = p.position - 1, p.position - 2
        flagged = (
            w1 >= 0
            and _lang_at(u, w2) == p.from_lang
            and _lang_at(u, w1) == p.to_lang
        )
        out.append(replace(p, insertional_return=flagged) if flagged else p)
    return out


def filter_insertional(
    points: list[SwitchPoint],
    u: Utterance,
    policy: str = EXCLUDE_RETURN,
    skip_neutral: bool = False,
) -> list[SwitchPoint]:
    if policy == KEEP_ALL:
        return list(points)
    if policy != EXCLUDE_RETURN:
        raise ValueError(f"unknown insertional policy {policy!r}")
    return [p for p in mark_insertional(points, u, skip_neutral) if not p.insertional_return]


def utterance_switches(
    u: Utterance, pair: LanguagePair, policy: str = EXCLUDE_RETURN, skip_neutral: bool = False
) -> list[SwitchPoint]:
    return filter_insertional(detect_switch_points(u, pair), u, policy, skip_neutral)


def write_switch_dump(corpus: Corpus, out: TextIO, skip_neutral: bool = False) -> int:
    """One tab-separated line per detected point, including flagged returns."""
    n = 0
    for u in corpus.utterances:
        for p in mark_insertional(detect_switch_points(u, corpus.pair), u, skip_neutral):
            out.write(
                f"{p.utterance_id}\t{p.position}\t{p.from_lang}\t{p.to_lang}\t{p.gap}\t"
                f"{str(p.insertional_return).lower()}\n"
            )
            n += 1
    return n
