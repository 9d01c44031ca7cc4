"""Shared/non-shared item occurrences, switch windows and 2x2 tables."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from .corpus import Corpus, LanguagePair, Utterance
from .switches import (
    EXCLUDE_RETURN,
    INSERTIONAL_POLICIES,
    SwitchPoint,
    group_shared_items,
    utterance_switches,
)

__all__ = [
    "ALL_SHARED",
    "BOTH",
    "ContingencyTable",
    "DIRECTIONS",
    "ItemOccurrence",
    "L1_TO_L2",
    "L2_TO_L1",
    "MAX_DISTANCE",
    "MODES",
    "NEIGHBOR",
    "PRECEDE",
    "SHARED_L1",
    "SHARED_L2",
    "SHARED_OTHER",
    "SHARED_TYPES",
    "TestSpec",
    "build_contingency",
    "direction_of",
    "enumerate_items",
    "near_switch",
    "subclass_matches",
]

SHARED_L1 = "shared-l1"
SHARED_L2 = "shared-l2"
SHARED_OTHER = "shared-other"
ALL_SHARED = "all-shared"
SHARED_TYPES = (SHARED_L1, SHARED_L2, SHARED_OTHER, ALL_SHARED)

L1_TO_L2 = "l1-l2"
L2_TO_L1 = "l2-l1"
BOTH = "both"
DIRECTIONS = (L1_TO_L2, L2_TO_L1, BOTH)

PRECEDE = "precede"
NEIGHBOR = "neighbor"
MODES = (PRECEDE, NEIGHBOR)

MAX_DISTANCE = 6


@dataclass(frozen=True)
class TestSpec:
    shared_type: str
    direction: str
    mode: str
    distance: int
    insertional_policy: str = EXCLUDE_RETURN
    skip_neutral_items: bool = False
    skip_neutral_insertion: bool = False
    max_distance: int = MAX_DISTANCE

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.shared_type not in SHARED_TYPES:
            raise ValueError(f"shared_type must be one of {SHARED_TYPES}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.insertional_policy not in INSERTIONAL_POLICIES:
            raise ValueError(f"insertional_policy must be one of {INSERTIONAL_POLICIES}")
        if not 1 <= self.distance <= self.max_distance:
            raise ValueError(f"distance must be in [1, {self.max_distance}]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ItemOccurrence:
    """One countable unit: a grouped shared item or a single other token.

    ``subclass`` is the shared item's origin (``None`` for ordinary tokens).
    """

    utterance_id: str
    start: int
    end: int
    is_shared: bool
    subclass: Optional[str] = None


@dataclass(frozen=True)
class ContingencyTable:
    """Rows: near a switch yes/no.  Columns: shared yes/no.

    ``a`` shared & near, ``b`` non-shared & near, ``c`` shared & not near,
    ``d`` non-shared & not near.
    """

    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0

    def __add__(self, other: "ContingencyTable") -> "ContingencyTable":
        return ContingencyTable(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def shared_total(self) -> int:
        return self.a + self.c

    @property
    def nonshared_total(self) -> int:
        return self.b + self.d

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    @classmethod
    def from_dict(cls, data: dict) -> "ContingencyTable":
        return cls(int(data["a"]), int(data["b"]), int(data["c"]), int(data["d"]))

    def dump(self) -> str:
        return f"{self.a}\t{self.b}\t{self.c}\t{self.d}"


def subclass_matches(subclass: Optional[str], shared_type: str, pair: LanguagePair) -> bool:
    if subclass is None:
        return False
    if shared_type == ALL_SHARED:
        return True
    if shared_type == SHARED_L1:
        return subclass == pair.l1
    if shared_type == SHARED_L2:
        return subclass == pair.l2
    return subclass == "other"


def direction_of(point: SwitchPoint, pair: LanguagePair) -> str:
    return L1_TO_L2 if point.from_lang == pair.l1 else L2_TO_L1


def enumerate_items(u: Utterance, spec: TestSpec, pair: LanguagePair) -> list[ItemOccurrence]:
    """Occurrences of one utterance, excluding anything touching its first or
    last token.

    Each grouped shared item counts once; every other token is its own
    occurrence.  Shared items of a non-matching subclass count as non-shared.
    """
    n = len(u.tokens)
    last = n - 1
    out = []
    shared = {item.start: item for item in group_shared_items(u)}
    pos = 0
    while pos < n:
        item = shared.get(pos)
        if item is not None:
            if item.start > 0 and item.end < last:
                out.append(ItemOccurrence(
                    u.id, item.start, item.end,
                    subclass_matches(item.subclass, spec.shared_type, pair), item.subclass,
                ))
            pos = item.end + 1
            continue
        if 0 < pos < last and not (spec.skip_neutral_items and u.tokens[pos].tag.is_neutral):
            out.append(ItemOccurrence(u.id, pos, pos, False))
        pos += 1
    return out


def near_switch(item: ItemOccurrence, points: list[SwitchPoint], spec: TestSpec, pair: LanguagePair) -> bool:
    for p in points:
        if spec.direction != BOTH and direction_of(p, pair) != spec.direction:
            continue
        if p.position > item.end and p.position - item.end <= spec.distance:
            return True
        if spec.mode == NEIGHBOR and p.position < item.start and item.start - p.position <= spec.distance:
            return True
    return False


def build_contingency(corpus: Corpus, spec: TestSpec) -> ContingencyTable:
    """Sum near-switch indicators over every occurrence of every utterance.

    A single switch point may count for several items.
    """
    a = b = c = d = 0
    pair = corpus.pair
    for u in corpus.utterances:
        items = enumerate_items(u, spec, pair)
        if not items:
            continue
        points = utterance_switches(u, pair, spec.insertional_policy, spec.skip_neutral_insertion)
        for item in items:
            near = near_switch(item, points, spec, pair)
            if item.is_shared:
                if near:
                    a += 1
                else:
                    c += 1
            elif near:
                b += 1
            else:
                d += 1
    return ContingencyTable(a, b, c, d)
