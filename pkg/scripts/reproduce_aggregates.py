#!/usr/bin/env python3
"""Run all 20 multi-test grids (five corpora x four shared types) and check the
headline hypothesis aggregates.

The corpora are not distributed with this repository.  Point the runner at a
manifest, one corpus per line (``#`` starts a comment):

    name<TAB>path<TAB>pair[<TAB>mapping]

for example ``sentimix<TAB>/data/sentimix.tsv<TAB>en-es``.  Paths are resolved
relative to the manifest.  Expected aggregates over the five re-annotated
corpora (two EN-AR, two EN-ES, one EN-DE):

    non-significant tests (p >= 0.05)   10 / 720
    monotone non-increasing lines       98 / 120
    precede < neighbor violations       38 / 720 compared points

Each corpus (all four shared types, 144 tests) should finish in under five
minutes on a desktop machine; the largest is about 5.4M tokens.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from cstrigger.association import SHARED_TYPES
from cstrigger.corpus import LanguagePair, parse_corpus, parse_mapping
from cstrigger.grid import GridSpec, evaluate_hypotheses, run_grids
from cstrigger.plot import render_multitest_svg

EXPECTED = {
    "nonsignificant": (10, 720),
    "monotone_lines": (98, 120),
    "h3_violations": (38, 720),
}
TIME_BUDGET_S = 300.0


@dataclass
class ManifestEntry:
    name: str
    path: Path
    pair: LanguagePair
    mapping: Optional[Path] = None


def read_manifest(path: Path) -> list[ManifestEntry]:
    entries = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise ValueError(f"{path}:{lineno}: expected name, path, pair[, mapping]")
        mapping = path.parent / fields[3] if len(fields) == 4 else None
        entries.append(ManifestEntry(fields[0], path.parent / fields[1], LanguagePair.parse(fields[2]), mapping))
    return entries


def reproduce(manifest: Path, out_dir: Optional[Path] = None, jobs: int = 1) -> dict:
    grids, timings = [], {}
    for entry in read_manifest(manifest):
        start = time.perf_counter()
        mapping = None
        if entry.mapping:
            with open(entry.mapping, encoding="utf-8") as fh:
                mapping = parse_mapping(fh)
        with open(entry.path, encoding="utf-8") as fh:
            corpus = parse_corpus(fh, entry.pair, mapping, source_label=entry.name)
        results = run_grids(corpus, [GridSpec(t) for t in SHARED_TYPES], jobs=jobs)
        timings[entry.name] = {"tokens": corpus.n_tokens, "seconds": time.perf_counter() - start}
        grids.extend(results)
        if out_dir:
            out_dir.mkdir(parents=True, exist_ok=True)
            for g in results:
                stem = f"{entry.name}.{g.spec.shared_type}"
                (out_dir / f"{stem}.json").write_text(g.to_json(), encoding="utf-8")
                (out_dir / f"{stem}.svg").write_text(render_multitest_svg(g), encoding="utf-8")
    report = evaluate_hypotheses(grids)
    observed = {
        "nonsignificant": (report.h1["nonsignificant"], report.h1["total"]),
        "monotone_lines": (report.h2["monotone"], report.h2["total"]),
        "h3_violations": (report.h3["violations"], report.h3["points_compared"]),
    }
    return {"observed": observed, "expected": EXPECTED, "timings": timings, "report": report}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("manifest", type=Path)
    ap.add_argument("-o", "--out-dir", type=Path, help="write grid JSON and SVG per corpus and shared type")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)

    result = reproduce(args.manifest, args.out_dir, args.jobs)
    ok = True
    for key, (got, total) in result["observed"].items():
        want = EXPECTED[key]
        match = (got, total) == want
        ok &= match
        print(f"{'OK  ' if match else 'DIFF'} {key}: {got}/{total} (expected {want[0]}/{want[1]})")
    for name, t in result["timings"].items():
        fast = t["seconds"] < TIME_BUDGET_S
        ok &= fast
        print(f"{'OK  ' if fast else 'SLOW'} {name}: {t['tokens']} tokens in {t['seconds']:.1f} s")
    if args.out_dir:
        (args.out_dir / "hypotheses.json").write_text(result["report"].to_json(), encoding="utf-8")
        (args.out_dir / "summary.json").write_text(
            json.dumps({k: v for k, v in result.items() if k != "report"}, indent=2) + "\n", encoding="utf-8")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
