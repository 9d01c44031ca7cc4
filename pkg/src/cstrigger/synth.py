"""Seeded synthetic corpora for testing and simulation."""

from __future__ import annotations

import random
from typing import Optional

from .corpus import Corpus, LanguagePair, Tag, Token, Utterance

__all__ = ["planted_effect_corpus", "random_corpus", "trigger_factor"]


def random_corpus(
    seed: int,
    pair: LanguagePair = LanguagePair("en", "es"),
    max_utterances: int = 50,
    max_tokens: int = 40,
    third: str = "fr",
) -> Corpus:
    """Arbitrary utterances over the full tag alphabet.

    Tags follow a sticky random walk so that runs of shared items, switches,
    one-token insertions and neutral material all occur often.
    """
    rng = random.Random(seed)
    alphabet = [
        (Tag("lang", pair.l1), 10),
        (Tag("lang", pair.l2), 10),
        (Tag("lang", third), 1),
        (Tag("shared", pair.l1), 2),
        (Tag("shared", pair.l2), 2),
        (Tag("shared_other"), 2),
        (Tag("mix"), 1),
        (Tag("neutral", "other"), 1),
        (Tag("neutral", "punct"), 2),
        (Tag("neutral", "emoji"), 1),
        (Tag("neutral", "hashtag"), 1),
    ]
    tags = [t for t, _ in alphabet]
    weights = [w for _, w in alphabet]
    utterances = []
    for ui in range(rng.randint(0, max_utterances)):
        n = rng.randint(1, max_tokens)
        seq = []
        for _ in range(n):
            if seq and rng.random() < 0.4:
                seq.append(seq[-1])
            else:
                seq.append(rng.choices(tags, weights)[0])
        tokens = tuple(Token(f"w{i}", t) for i, t in enumerate(seq))
        utterances.append(Utterance(f"s{seed}-u{ui}", f"s{seed}-t{ui // 3}", tokens))
    return Corpus(pair, tuple(utterances), f"random-{seed}")


def trigger_factor(k: int, peak: float = 2.0, reach: int = 6) -> float:
    """Switch-hazard multiplier ``k`` tokens after a shared item: ``peak`` at
    distance 1, falling linearly to 1.0 at ``reach`` and beyond."""
    if k < 1 or k >= reach:
        return 1.0
    return peak - (peak - 1.0) * (k - 1) / (reach - 1)


def planted_effect_corpus(
    n_utterances: int,
    seed: int,
    pair: LanguagePair = LanguagePair("en", "es"),
    baseline: float = 0.1,
    peak: float = 2.0,
    reach: int = 6,
    shared_rate: float = 0.01,
    length: tuple[int, int] = (8, 16),
    label: Optional[str] = None,
) -> Corpus:
    """Utterances whose switch hazard is raised after shared items.

    Each non-initial token is a shared item with probability ``shared_rate``;
    otherwise it is a pair-language token that switches language with
    probability ``baseline * trigger_factor(distance to the last shared
    token)``.  A token right after a switch never switches back, so there are
    no one-token insertions and the insertional filter leaves the data as
    generated.
    """
    rng = random.Random(seed)
    langs = (pair.l1, pair.l2)
    lang_tags = {c: Tag("lang", c) for c in langs}
    shared_tags = [Tag("shared", pair.l1), Tag("shared", pair.l2), Tag("shared_other")]
    utterances = []
    for ui in range(n_utterances):
        n = rng.randint(*length)
        cur = langs[rng.random() < 0.5]
        seq = [Token("w", lang_tags[cur])]
        last_shared = None
        refractory = False
        for t in range(1, n):
            if rng.random() < shared_rate:
                seq.append(Token("S", shared_tags[rng.randrange(3)]))
                last_shared = t
                continue
            switched = False
            if not refractory:
                hazard = baseline
                if last_shared is not None:
                    hazard *= trigger_factor(t - last_shared, peak, reach)
                if rng.random() < hazard:
                    cur = pair.other(cur)
                    switched = True
            refractory = switched
            seq.append(Token("w", lang_tags[cur]))
        utterances.append(Utterance(str(ui), str(ui), tuple(seq)))
    return Corpus(pair, tuple(utterances), label or f"planted-{seed}")
