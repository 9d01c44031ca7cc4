"""Command-line interface.

Exit codes: 0 success, 1 invalid/unreadable input, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .association import DIRECTIONS, MAX_DISTANCE, MODES, SHARED_TYPES
from .corpus import Corpus, CorpusError, LanguagePair, corpus_stats, parse_corpus, parse_mapping, validate_corpus
from .exact import ALPHA
from .grid import GridSpec, default_jobs, evaluate_hypotheses, read_grid, run_grid
from .plot import PlotStyle, render_multitest_svg
from .switches import INSERTIONAL_POLICIES, write_switch_dump


class InputError(Exception):
    """Bad input file; reported with exit code 1."""


def _pair(text: str) -> LanguagePair:
    try:
        return LanguagePair.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _choices_list(allowed: Sequence[str]):
    def parse(text: str) -> tuple[str, ...]:
        items = tuple(x.strip() for x in text.split(",") if x.strip())
        bad = [x for x in items if x not in allowed]
        if bad or not items:
            raise argparse.ArgumentTypeError(f"expected a comma list from {', '.join(allowed)}")
        return items
    return parse


def _distances(text: str) -> tuple[int, ...]:
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
            values = tuple(range(lo, hi + 1))
        else:
            values = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad distance list {text!r}") from None
    if not values or min(values) < 1 or len(set(values)) != len(values):
        raise argparse.ArgumentTypeError(f"bad distance list {text!r}")
    return values


def _jobs(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("--jobs must be >= 1")
    return n


def _load_corpus(args) -> Corpus:
    mapping = None
    if args.mapping:
        try:
            with open(args.mapping, encoding="utf-8") as fh:
                mapping = parse_mapping(fh)
        except OSError as exc:
            raise InputError(f"{args.mapping}: {exc.strerror}") from None
        except CorpusError as exc:
            raise InputError(f"{args.mapping}: {exc}") from None
    try:
        with open(args.corpus, encoding="utf-8") as fh:
            return parse_corpus(fh, args.pair, mapping, source_label=Path(args.corpus).stem)
    except OSError as exc:
        raise InputError(f"{args.corpus}: {exc.strerror}") from None
    except UnicodeDecodeError as exc:
        raise InputError(f"{args.corpus}: not UTF-8 ({exc.reason})") from None
    except CorpusError as exc:
        raise InputError(f"{args.corpus}: {exc}") from None


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_validate(args) -> int:
    corpus = _load_corpus(args)
    issues = validate_corpus(corpus)
    for issue in issues:
        print(issue, file=sys.stderr)
    print(f"{args.corpus}: {len(corpus)} utterances, {corpus.n_tokens} tokens, {len(issues)} issues")
    return 1 if issues else 0


def cmd_stats(args) -> int:
    corpus = _load_corpus(args)
    stats = corpus_stats(corpus, args.policy)
    if args.json:
        sys.stdout.write(json.dumps(stats.to_dict(), indent=2) + "\n")
    else:
        sys.stdout.write(stats.render(corpus.pair))
    return 0


def cmd_switches(args) -> int:
    corpus = _load_corpus(args)
    write_switch_dump(corpus, sys.stdout, args.skip_neutral_insertion)
    return 0


def cmd_analyze(args) -> int:
    corpus = _load_corpus(args)
    spec = GridSpec(
        shared_type=args.shared_type,
        distances=args.distances,
        modes=args.modes,
        directions=args.directions,
        insertional_policy=args.policy,
        skip_neutral_items=args.skip_neutral_items,
        skip_neutral_insertion=args.skip_neutral_insertion,
    )
    grid = run_grid(corpus, spec, jobs=args.jobs, alpha=args.alpha)
    if grid.degenerate:
        print(f"warning: no {args.shared_type} items in {args.corpus}; all RSP undefined", file=sys.stderr)
    if args.output:
        _write(f"{args.output}.json", grid.to_json())
        _write(f"{args.output}.csv", grid.to_csv())
    else:
        sys.stdout.write(grid.to_json())
    return 0


def _read_grid(path: str):
    try:
        return read_grid(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: not a grid result ({exc})") from None


def _colors(text: str) -> dict:
    out = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep or key.strip() not in DIRECTIONS:
            raise argparse.ArgumentTypeError("expected DIRECTION=COLOR pairs, e.g. l1-l2=#000080")
        out[key.strip()] = value.strip()
    return out


def cmd_plot(args) -> int:
    grid = _read_grid(args.grid)
    style = PlotStyle(log_y=args.log_y)
    if args.colors:
        style = PlotStyle(colors={**style.colors, **args.colors}, log_y=args.log_y)
    svg = render_multitest_svg(grid, style)
    if args.output:
        _write(args.output, svg)
    else:
        sys.stdout.write(svg)
    return 0


def cmd_hypotheses(args) -> int:
    grids = [_read_grid(p) for p in args.grids]
    report = evaluate_hypotheses(grids, alpha=args.alpha)
    sys.stdout.write(report.to_json() if args.json else report.render())
    return 0


def cmd_generate(args) -> int:
    from .corpus import serialize_corpus
    from .synth import planted_effect_corpus, random_corpus

    if args.kind == "planted":
        corpus = planted_effect_corpus(args.utterances, args.seed, args.pair)
    else:
        corpus = random_corpus(args.seed, args.pair, max_utterances=args.utterances)
    serialize_corpus(corpus, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cstrigger",
        description="Code-switch detection and shared-item trigger statistics for bilingual corpora.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    corpus_args = argparse.ArgumentParser(add_help=False)
    corpus_args.add_argument("corpus", help="canonical token<TAB>tag corpus file")
    corpus_args.add_argument("--pair", type=_pair, required=True, help="language pair L1-L2, e.g. en-es")
    corpus_args.add_argument("--mapping", help="raw<TAB>tag mapping for source-scheme tags")

    p = sub.add_parser("validate", parents=[corpus_args], help="check a corpus file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", parents=[corpus_args], help="corpus statistics table")
    p.add_argument("--policy", choices=INSERTIONAL_POLICIES, default=INSERTIONAL_POLICIES[0])
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("switches", parents=[corpus_args], help="dump detected switch points")
    p.add_argument("--skip-neutral-insertion", action="store_true",
                   help="ignore neutral tokens when matching one-token insertions")
    p.set_defaults(func=cmd_switches)

    p = sub.add_parser("analyze", parents=[corpus_args], help="run a multi-test grid")
    p.add_argument("--shared-type", required=True, choices=SHARED_TYPES)
    p.add_argument("--directions", type=_choices_list(DIRECTIONS), default=DIRECTIONS)
    p.add_argument("--modes", type=_choices_list(MODES), default=MODES)
    p.add_argument("--distances", type=_distances, default=tuple(range(1, MAX_DISTANCE + 1)),
                   help="range like 1-6 or list like 1,2,4 (default 1-6)")
    p.add_argument("--policy", choices=INSERTIONAL_POLICIES, default=INSERTIONAL_POLICIES[0],
                   help="treatment of returns from one-token insertions")
    p.add_argument("--skip-neutral-items", action="store_true",
                   help="do not count neutral tokens as non-shared items")
    p.add_argument("--skip-neutral-insertion", action="store_true",
                   help="ignore neutral tokens when matching one-token insertions")
    p.add_argument("--alpha", type=float, default=ALPHA)
    p.add_argument("--jobs", type=_jobs, default=default_jobs(),
                   help="worker processes (default $CSTRIGGER_JOBS or 1)")
    p.add_argument("-o", "--output", help="write PREFIX.json and PREFIX.csv instead of JSON on stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plot", help="render a grid result as SVG")
    p.add_argument("grid", help="grid result JSON from 'analyze'")
    p.add_argument("-o", "--output", help="SVG path (default stdout)")
    p.add_argument("--log-y", action="store_true")
    p.add_argument("--colors", type=_colors, help="override colours, e.g. l1-l2=#000080,both=#444444")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("hypotheses", help="evaluate hypotheses over grid results")
    p.add_argument("grids", nargs="+")
    p.add_argument("--alpha", type=float, default=ALPHA)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_hypotheses)

    p = sub.add_parser("generate", help="write a seeded synthetic corpus")
    p.add_argument("kind", choices=("planted", "random"))
    p.add_argument("--pair", type=_pair, default=LanguagePair("en", "es"))
    p.add_argument("--utterances", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
