"""Shared fixtures and the acceptance-criteria summary hook."""

from __future__ import annotations

from pathlib import Path

import pytest

from relann.alignment import load_sample_alignment
from relann.corpus import load_sample_corpus
from relann.inventory import load_seed_inventory
from relann.store import load_records_jsonl

FIXTURE_PATH = (
    Path(__file__).resolve().parent.parent
    / "src/relann/data/fixtures/table1_records.jsonl"
)

_acceptance_outcomes: dict[str, str] = {}


@pytest.fixture(scope="session")
def inv():
    return load_seed_inventory()


@pytest.fixture(scope="session")
def alignment(inv):
    return load_sample_alignment(inv)


@pytest.fixture(scope="session")
def corpus_and_glossary():
    return load_sample_corpus()


@pytest.fixture(scope="session")
def benchmark_records():
    return load_records_jsonl(FIXTURE_PATH)


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    _acceptance_outcomes[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _acceptance_outcomes.items():
        marker = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  [{marker}] {name}")
