import importlib.util
import sys
from pathlib import Path

import pytest

from cstrigger.association import ContingencyTable
from cstrigger.corpus import LanguagePair, parse_corpus
from cstrigger.exact import TestResult
from cstrigger.grid import GridResult, GridSpec

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))

EN_AR = LanguagePair("en", "ar", "EN-AR")
EN_ES = LanguagePair("en", "es", "EN-ES")
EN_DE = LanguagePair("en", "de", "EN-DE")


def load_fixture(name, pair):
    with open(FIXTURES / name, encoding="utf-8") as fh:
        return parse_corpus(fh, pair, source_label=Path(name).stem)


@pytest.fixture
def en_ar():
    return load_fixture("en_ar_examples.tsv", EN_AR)


@pytest.fixture
def en_es():
    return load_fixture("en_es_examples.tsv", EN_ES)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def load_script(name):
    """Import a module from scripts/ (registered so dataclasses resolve)."""
    path = Path(__file__).resolve().parent.parent / "scripts" / f"{name}.py"
    spec = importlib.util.spec_from_file_location(name, path)
    module = importlib.util.module_from_spec(spec)
    sys.modules[name] = module
    spec.loader.exec_module(module)
    return module


def utt(corpus, uid):
    return next(u for u in corpus.utterances if u.id == uid)


DIST = tuple(range(1, 7))


def fake_grid(rsp=None, p=None, shared_type="shared-l2", pair=EN_ES, label="fixture"):
    """Grid with chosen RSP/p per cell; unspecified cells get RSP 1.5, p 0.01."""
    rsp = rsp or {}
    p = p or {}
    spec = GridSpec(shared_type)
    results = {}
    for cell in spec.cells():
        results[cell] = TestResult(
            table=ContingencyTable(10, 100, 90, 900),
            rsp=rsp.get(cell, 1.5),
            p_value=p.get(cell, 0.01),
            shared_rate=0.1,
            nonshared_rate=0.1,
        )
    return GridResult(spec, pair, results, label)


def line(direction, mode, values):
    return {(direction, mode, d): v for d, v in zip(DIST, values)}


# One PASS/FAIL/SKIP line per acceptance criterion, printed after the run.
_ACCEPTANCE: list[str] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.module.__name__ != "test_acceptance" or not (rep.when == "call" or rep.outcome != "passed"):
        return
    if rep.when == "teardown" and rep.outcome == "passed":
        return
    label = (item.function.__doc__ or item.name).strip().splitlines()[0]
    status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
    detail = dict(item.user_properties).get("detail", "")
    if rep.outcome == "skipped" and isinstance(rep.longrepr, tuple):
        detail = rep.longrepr[2].removeprefix("Skipped: ")
    line = f"{status}  {label}" + (f"  [{detail}]" if detail else "")
    _ACCEPTANCE.append(line)
    print(f"\n{line}")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
