"""Lexical triggers of code-switching in language-annotated bilingual corpora."""

from .association import (
    ContingencyTable,
    ItemOccurrence,
    TestSpec,
    build_contingency,
    enumerate_items,
    near_switch,
)
from .corpus import (
    Corpus,
    LanguagePair,
    Tag,
    TagMapping,
    Token,
    Utterance,
    corpus_stats,
    parse_corpus,
    parse_mapping,
    serialize_corpus,
    validate_corpus,
)
from .exact import (
    TestResult,
    evaluate_table,
    fisher_exact_two_sided,
    log_hypergeometric_pmf,
    relative_switching_propensity,
)
from .grid import GridResult, GridSpec, HypothesisReport, evaluate_hypotheses, run_grid, run_grids
from .switches import SharedItem, SwitchPoint, detect_switch_points, filter_insertional, group_shared_items

__version__ = "0.1.0"

__all__ = [
    "ContingencyTable",
    "ItemOccurrence",
    "TestSpec",
    "build_contingency",
    "enumerate_items",
    "near_switch",
    "Corpus",
    "LanguagePair",
    "Tag",
    "TagMapping",
    "Token",
    "Utterance",
    "corpus_stats",
    "parse_corpus",
    "parse_mapping",
    "serialize_corpus",
    "validate_corpus",
    "TestResult",
    "evaluate_table",
    "fisher_exact_two_sided",
    "log_hypergeometric_pmf",
    "relative_switching_propensity",
    "GridResult",
    "GridSpec",
    "HypothesisReport",
    "evaluate_hypotheses",
    "run_grid",
    "run_grids",
    "SharedItem",
    "SwitchPoint",
    "detect_switch_points",
    "filter_insertional",
    "group_shared_items",
]
