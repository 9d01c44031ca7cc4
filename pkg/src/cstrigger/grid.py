"""Multi-test grids (direction x mode x distance) and hypothesis evaluation.

Grids are computed from a *window profile*: one pass over the corpus records,
for every occurrence, the distance to the nearest switch of each direction
after it (precede) and on either side (neighbor), capped at the largest
distance of interest.  Every contingency table of every shared type is then a
cumulative sum over that histogram, so the full 4 x 36 test grid costs one
corpus pass.  Partial profiles add up exactly, which is what makes the
parallel run bit-identical to the serial one.
"""

from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .association import (
    DIRECTIONS,
    L1_TO_L2,
    L2_TO_L1,
    MAX_DISTANCE,
    MODES,
    NEIGHBOR,
    PRECEDE,
    SHARED_L1,
    SHARED_L2,
    SHARED_TYPES,
    ContingencyTable,
    subclass_matches,
)
from .corpus import Corpus, LanguagePair
from .exact import ALPHA, TestResult, evaluate_table
from .switches import EXCLUDE_RETURN, INSERTIONAL_POLICIES, group_shared_items, utterance_switches

__all__ = [
    "GRID_FORMAT",
    "GridResult",
    "GridSpec",
    "HypothesisReport",
    "MONOTONE_TOLERANCE",
    "WindowProfile",
    "accumulate_profile",
    "evaluate_hypotheses",
    "grid_from_profile",
    "read_grid",
    "run_grid",
    "run_grids",
]

GRID_FORMAT = "cstrigger-grid/1"
MONOTONE_TOLERANCE = 1e-9

CSV_COLUMNS = [
    "direction", "mode", "distance", "a", "b", "c", "d",
    "shared_rate", "nonshared_rate", "rsp", "p", "significant",
]


@dataclass(frozen=True)
class GridSpec:
    shared_type: str
    distances: tuple[int, ...] = tuple(range(1, MAX_DISTANCE + 1))
    modes: tuple[str, ...] = MODES
    directions: tuple[str, ...] = DIRECTIONS
    insertional_policy: str = EXCLUDE_RETURN
    skip_neutral_items: bool = False
    skip_neutral_insertion: bool = False

    def __post_init__(self):
        if self.shared_type not in SHARED_TYPES:
            raise ValueError(f"shared_type must be one of {SHARED_TYPES}")
        if not self.distances or min(self.distances) < 1:
            raise ValueError("distances must be positive")
        if len(set(self.distances)) != len(self.distances):
            raise ValueError("distances must be distinct")
        if not set(self.modes) <= set(MODES) or not self.modes:
            raise ValueError(f"modes must be drawn from {MODES}")
        if not set(self.directions) <= set(DIRECTIONS) or not self.directions:
            raise ValueError(f"directions must be drawn from {DIRECTIONS}")
        if self.insertional_policy not in INSERTIONAL_POLICIES:
            raise ValueError(f"insertional_policy must be one of {INSERTIONAL_POLICIES}")

    @property
    def n_tests(self) -> int:
        return len(self.distances) * len(self.modes) * len(self.directions)

    def cells(self) -> list[tuple[str, str, int]]:
        return [(dr, m, d) for dr in self.directions for m in self.modes for d in self.distances]

    def to_dict(self) -> dict:
        return {
            "shared_type": self.shared_type,
            "distances": list(self.distances),
            "modes": list(self.modes),
            "directions": list(self.directions),
            "insertional_policy": self.insertional_policy,
            "skip_neutral_items": self.skip_neutral_items,
            "skip_neutral_insertion": self.skip_neutral_insertion,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        return cls(
            shared_type=data["shared_type"],
            distances=tuple(data["distances"]),
            modes=tuple(data["modes"]),
            directions=tuple(data["directions"]),
            insertional_policy=data.get("insertional_policy", EXCLUDE_RETURN),
            skip_neutral_items=data.get("skip_neutral_items", False),
            skip_neutral_insertion=data.get("skip_neutral_insertion", False),
        )


# -- window profile ----------------------------------------------------------

@dataclass
class WindowProfile:
    """Histograms of nearest-switch distance per (subclass, direction, mode).

    Subclass ``""`` stands for ordinary (non-shared) tokens.  Bin ``k`` in
    ``1..max_distance`` counts occurrences whose nearest qualifying switch is
    exactly ``k`` tokens away; bin ``max_distance + 1`` counts the rest.
    """

    max_distance: int
    counts: dict = field(default_factory=dict)
    totals: Counter = field(default_factory=Counter)

    def bins(self, subclass: str, direction: str, mode: str) -> list[int]:
        key = (subclass, direction, mode)
        hist = self.counts.get(key)
        if hist is None:
            hist = self.counts[key] = [0] * (self.max_distance + 2)
        return hist

    def merge(self, other: "WindowProfile") -> "WindowProfile":
        if other.max_distance != self.max_distance:
            raise ValueError("cannot merge profiles with different distance caps")
        for key, hist in other.counts.items():
            mine = self.bins(*key)
            for i, v in enumerate(hist):
                mine[i] += v
        self.totals.update(other.totals)
        return self

    def table(self, pair: LanguagePair, shared_type: str, direction: str, mode: str, distance: int) -> ContingencyTable:
        if distance > self.max_distance:
            raise ValueError(f"profile only covers distances up to {self.max_distance}")
        a = b = shared = nonshared = 0
        for sub, n in self.totals.items():
            is_shared = subclass_matches(sub or None, shared_type, pair)
            hist = self.counts.get((sub, direction, mode))
            near = sum(hist[1:distance + 1]) if hist else 0
            if is_shared:
                a += near
                shared += n
            else:
                b += near
                nonshared += n
        return ContingencyTable(a, b, shared - a, nonshared - b)


def _forward_distances(n: int, positions: list[int], cap: int) -> list[int]:
    out = [cap + 1] * n
    # descending so the nearest later point wins
    for p in reversed(positions):
        lo = max(0, p - cap)
        out[lo:p] = range(p - lo, 0, -1)
    return out


def _backward_distances(n: int, positions: list[int], cap: int) -> list[int]:
    out = [cap + 1] * n
    for p in positions:
        hi = min(n, p + cap + 1)
        out[p + 1:hi] = range(1, hi - p)
    return out


def _profile_utterances(utterances: Iterable, pair: LanguagePair, cap: int, policy: str,
                        skip_neutral_items: bool, skip_neutral_insertion: bool) -> WindowProfile:
    prof = WindowProfile(cap)
    none = cap + 1
    hists: dict = {}

    def hist_for(sub):
        h = hists.get(sub)
        if h is None:
            h = hists[sub] = [
                (prof.bins(sub, dr, PRECEDE), prof.bins(sub, dr, NEIGHBOR)) for dr in DIRECTIONS
            ]
        return h

    l1 = pair.l1
    for u in utterances:
        tokens = u.tokens
        n = len(tokens)
        if n < 3:
            continue
        last = n - 1
        occ = []
        shared_at = {it.start: it for it in group_shared_items(u)}
        pos = 1
        # an item touching position 0 is skipped whole
        for it in shared_at.values():
            if it.start == 0:
                pos = it.end + 1
        while pos < last:
            it = shared_at.get(pos)
            if it is not None:
                if it.end < last:
                    occ.append((it.start, it.end, it.subclass))
                pos = it.end + 1
                continue
            if not (skip_neutral_items and tokens[pos].tag.is_neutral):
                occ.append((pos, pos, ""))
            pos += 1
        if not occ:
            continue
        points = utterance_switches(u, pair, policy, skip_neutral_insertion)
        for _, _, sub in occ:
            prof.totals[sub] += 1
        if not points:
            for _, _, sub in occ:
                for pre, nb in hist_for(sub):
                    pre[none] += 1
                    nb[none] += 1
            continue
        by_dir = (
            [p.position for p in points if p.from_lang == l1],
            [p.position for p in points if p.from_lang != l1],
            [p.position for p in points],
        )
        fwd = [_forward_distances(n, ps, cap) for ps in by_dir]
        bwd = [_backward_distances(n, ps, cap) for ps in by_dir]
        for start, end, sub in occ:
            h = hist_for(sub)
            for k in range(3):
                f = fwd[k][end]
                b = bwd[k][start]
                pre, nb = h[k]
                pre[f] += 1
                nb[f if f < b else b] += 1
    return prof


_WORKER_STATE: dict = {}


def _profile_chunk(bounds: tuple[int, int]) -> WindowProfile:
    st = _WORKER_STATE
    lo, hi = bounds
    return _profile_utterances(st["corpus"].utterances[lo:hi], st["corpus"].pair, *st["args"])


def accumulate_profile(
    corpus: Corpus,
    max_distance: int = MAX_DISTANCE,
    insertional_policy: str = EXCLUDE_RETURN,
    skip_neutral_items: bool = False,
    skip_neutral_insertion: bool = False,
    jobs: int = 1,
) -> WindowProfile:
    args = (max_distance, insertional_policy, skip_neutral_items, skip_neutral_insertion)
    n = len(corpus.utterances)
    if jobs <= 1 or n < 2 or "fork" not in multiprocessing.get_all_start_methods():
        return _profile_utterances(corpus.utterances, corpus.pair, *args)
    chunks = jobs * 4
    step = max(1, math.ceil(n / chunks))
    bounds = [(i, min(n, i + step)) for i in range(0, n, step)]
    _WORKER_STATE["corpus"] = corpus
    _WORKER_STATE["args"] = args
    try:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            parts = list(pool.map(_profile_chunk, bounds))
    finally:
        _WORKER_STATE.clear()
    total = WindowProfile(max_distance)
    for part in parts:
        total.merge(part)
    return total


# -- grid results ------------------------------------------------------------

@dataclass
class GridResult:
    spec: GridSpec
    pair: LanguagePair
    results: dict  # (direction, mode, distance) -> TestResult
    corpus_label: str = ""
    alpha: float = ALPHA

    @property
    def label(self) -> str:
        return f"{self.corpus_label or 'corpus'}:{self.spec.shared_type}"

    def lines(self) -> dict[tuple[str, str], list[Optional[float]]]:
        return {
            (dr, m): [self.results[(dr, m, d)].rsp for d in self.spec.distances]
            for dr in self.spec.directions
            for m in self.spec.modes
        }

    @property
    def degenerate(self) -> bool:
        """True when the grid has no shared occurrences at all."""
        return all(r.table.shared_total == 0 for r in self.results.values())

    def is_complete(self) -> bool:
        return all(cell in self.results for cell in self.spec.cells())

    def to_dict(self) -> dict:
        cells = []
        for dr, m, d in self.spec.cells():
            r = self.results[(dr, m, d)]
            cells.append({
                "direction": dr,
                "mode": m,
                "distance": d,
                **r.to_dict(),
                "significant": r.significant(self.alpha),
            })
        return {
            "format": GRID_FORMAT,
            "corpus": self.corpus_label,
            "pair": {"l1": self.pair.l1, "l2": self.pair.l2, "name": self.pair.name},
            "alpha": self.alpha,
            "spec": self.spec.to_dict(),
            "degenerate": self.degenerate,
            "cells": cells,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "GridResult":
        if data.get("format") != GRID_FORMAT:
            raise ValueError(f"not a {GRID_FORMAT} document")
        p = data["pair"]
        results = {
            (c["direction"], c["mode"], int(c["distance"])): TestResult.from_dict(c)
            for c in data["cells"]
        }
        grid = cls(
            spec=GridSpec.from_dict(data["spec"]),
            pair=LanguagePair(p["l1"], p["l2"], p.get("name", "")),
            results=results,
            corpus_label=data.get("corpus", ""),
            alpha=data.get("alpha", ALPHA),
        )
        if not grid.is_complete():
            raise ValueError("grid document is missing cells")
        return grid

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for dr, m, d in self.spec.cells():
            r = self.results[(dr, m, d)]
            t = r.table
            w.writerow([
                dr, m, d, t.a, t.b, t.c, t.d,
                _fmt(r.shared_rate, "{:.6f}"),
                _fmt(r.nonshared_rate, "{:.6f}"),
                _fmt(r.rsp, "{:.3f}"),
                f"{r.p_value:.1e}",
                "true" if r.significant(self.alpha) else "false",
            ])
        return buf.getvalue()


def _fmt(value: Optional[float], pattern: str) -> str:
    return "" if value is None else pattern.format(value)


def read_grid(path: str) -> GridResult:
    with open(path, encoding="utf-8") as fh:
        return GridResult.from_dict(json.load(fh))


def grid_from_profile(profile: WindowProfile, spec: GridSpec, pair: LanguagePair,
                      corpus_label: str = "", alpha: float = ALPHA) -> GridResult:
    results = {
        (dr, m, d): evaluate_table(profile.table(pair, spec.shared_type, dr, m, d))
        for dr, m, d in spec.cells()
    }
    return GridResult(spec, pair, results, corpus_label, alpha)


def run_grids(corpus: Corpus, specs: Sequence[GridSpec], jobs: int = 1, alpha: float = ALPHA) -> list[GridResult]:
    """Run several grids that share their counting options with one corpus pass."""
    if not specs:
        return []
    first = specs[0]
    options = (first.insertional_policy, first.skip_neutral_items, first.skip_neutral_insertion)
    for s in specs[1:]:
        if (s.insertional_policy, s.skip_neutral_items, s.skip_neutral_insertion) != options:
            raise ValueError("grids in one pass must share insertional and neutral-token options")
    cap = max(max(s.distances) for s in specs)
    profile = accumulate_profile(corpus, cap, *options, jobs=jobs)
    return [grid_from_profile(profile, s, corpus.pair, corpus.source_label, alpha) for s in specs]


def run_grid(corpus: Corpus, spec: GridSpec, jobs: int = 1, alpha: float = ALPHA) -> GridResult:
    return run_grids(corpus, [spec], jobs, alpha)[0]


# -- hypotheses --------------------------------------------------------------

@dataclass
class HypothesisReport:
    alpha: float
    tolerance: float
    h1: dict
    h2: dict
    h3: dict
    h4: list
    undefined: list

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "tolerance": self.tolerance,
            "h1": self.h1,
            "h2": self.h2,
            "h3": self.h3,
            "h4": self.h4,
            "undefined": self.undefined,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def render(self) -> str:
        h1, h2, h3 = self.h1, self.h2, self.h3
        out = [
            f"H1 non-significant tests (p >= {self.alpha:g}): "
            f"{h1['nonsignificant']}/{h1['total']} ({100 * h1['fraction']:.1f}%)",
            f"H2 non-increasing lines: {h2['monotone']}/{h2['total']} "
            f"({h2['total'] - h2['monotone']} exceptions)",
            f"H3 precede >= neighbor: {h3['violations']} violations of {h3['pairs_compared']} pairs "
            f"({h3['points_compared']} points)",
            f"H4 directional comparisons (descriptive): {len(self.h4)} grids",
        ]
        for entry in self.h4:
            tally = Counter(row["stronger"] for row in entry["rows"])
            out.append(
                f"  {entry['grid']}: to-origin {entry['to_origin']} stronger {tally['to-origin']}, "
                f"from-origin {entry['from_origin']} stronger {tally['from-origin']}, ties {tally['tie']}"
            )
        if self.undefined:
            out.append(f"undefined RSP cells skipped: {len(self.undefined)}")
        return "\n".join(out) + "\n"


def _line_violations(values: list[Optional[float]], distances: Sequence[int], tol: float) -> list[int]:
    bad = []
    prev = None
    for d, v in zip(distances, values):
        if v is None:
            prev = None  # undefined cell starts a new segment
            continue
        if prev is not None and v > prev * (1 + tol):
            bad.append(d)
        prev = v
    return bad


def evaluate_hypotheses(grids: Sequence[GridResult], alpha: float = ALPHA,
                        tolerance: float = MONOTONE_TOLERANCE) -> HypothesisReport:
    nonsig = []
    total = 0
    lines = []
    h3_rows = []
    h4 = []
    undefined = []
    for g in grids:
        if not g.is_complete():
            raise ValueError(f"grid {g.label} is incomplete")
        spec = g.spec
        for dr, m, d in spec.cells():
            r = g.results[(dr, m, d)]
            total += 1
            if r.p_value >= alpha:
                nonsig.append({"grid": g.label, "direction": dr, "mode": m, "distance": d, "p": r.p_value})
            if r.rsp is None:
                undefined.append({"grid": g.label, "direction": dr, "mode": m, "distance": d})
        for (dr, m), values in g.lines().items():
            bad = _line_violations(values, spec.distances, tolerance)
            lines.append({"grid": g.label, "direction": dr, "mode": m,
                          "monotone": not bad, "violations": bad})
        if PRECEDE in spec.modes and NEIGHBOR in spec.modes:
            for dr in spec.directions:
                for d in spec.distances:
                    pre = g.results[(dr, PRECEDE, d)].rsp
                    nb = g.results[(dr, NEIGHBOR, d)].rsp
                    if pre is None or nb is None:
                        continue
                    h3_rows.append({"grid": g.label, "direction": dr, "distance": d,
                                    "precede": pre, "neighbor": nb, "complies": not pre < nb})
        origin = {SHARED_L1: g.pair.l1, SHARED_L2: g.pair.l2}.get(spec.shared_type)
        if origin is not None and L1_TO_L2 in spec.directions and L2_TO_L1 in spec.directions:
            to_dir, from_dir = (L2_TO_L1, L1_TO_L2) if origin == g.pair.l1 else (L1_TO_L2, L2_TO_L1)
            rows = []
            for m in spec.modes:
                for d in spec.distances:
                    to_r = g.results[(to_dir, m, d)].rsp
                    from_r = g.results[(from_dir, m, d)].rsp
                    if to_r is None or from_r is None:
                        stronger = None
                    elif to_r > from_r:
                        stronger = "to-origin"
                    elif from_r > to_r:
                        stronger = "from-origin"
                    else:
                        stronger = "tie"
                    rows.append({"mode": m, "distance": d, "to_origin_rsp": to_r,
                                 "from_origin_rsp": from_r, "stronger": stronger})
            h4.append({"grid": g.label, "origin": origin, "to_origin": to_dir,
                       "from_origin": from_dir, "rows": rows})
    violations = [r for r in h3_rows if not r["complies"]]
    return HypothesisReport(
        alpha=alpha,
        tolerance=tolerance,
        h1={"nonsignificant": len(nonsig), "total": total,
            "fraction": len(nonsig) / total if total else 0.0, "cells": nonsig},
        h2={"monotone": sum(1 for ln in lines if ln["monotone"]), "total": len(lines), "lines": lines},
        h3={"violations": len(violations), "pairs_compared": len(h3_rows),
            "points_compared": 2 * len(h3_rows), "rows": h3_rows},
        h4=h4,
        undefined=undefined,
    )


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("CSTRIGGER_JOBS", "1")))
    except ValueError:
        return 1
