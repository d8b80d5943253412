"""Shared fixtures.

The whole suite runs with outbound networking disabled (socket connect
raises), proving the mock-backed stack works fully offline.
"""

from __future__ import annotations

import json
import socket

import pytest

from hapticrec.data_files import data_json, data_text
from hapticrec.ingestion import FixtureMetadataClient, IngestionPipeline
from hapticrec.providers import (
    MockCompletionProvider,
    MockEmbeddingProvider,
    RuleBasedExtractor,
)
from hapticrec.retrieval import ConstraintExtractor, RelevanceRouter
from hapticrec.schema import default_schema
from hapticrec.sessions import SessionStore
from hapticrec.store import CorpusStore

# One line per acceptance criterion, echoed after the run summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


class _NetworkDisabled(RuntimeError):
    pass


def _refuse(*args, **kwargs):
    raise _NetworkDisabled("outbound networking is disabled for this test run")


@pytest.fixture(scope="session", autouse=True)
def no_network():
    saved = socket.socket.connect
    socket.socket.connect = _refuse
    yield
    socket.socket.connect = saved


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def corpus_text() -> str:
    return data_text("fixture_corpus.json")


@pytest.fixture(scope="session")
def corpus_json(corpus_text):
    return json.loads(corpus_text)


@pytest.fixture()
def store(schema, corpus_text) -> CorpusStore:
    s = CorpusStore(schema)
    s.import_json(corpus_text)
    return s


@pytest.fixture(scope="session")
def embedder() -> MockEmbeddingProvider:
    return MockEmbeddingProvider()


@pytest.fixture(scope="session")
def completion() -> MockCompletionProvider:
    return MockCompletionProvider()


@pytest.fixture(scope="session")
def tag_extractor() -> RuleBasedExtractor:
    return RuleBasedExtractor(data_json("extraction_patterns.json"))


@pytest.fixture(scope="session")
def constraint_extractor() -> ConstraintExtractor:
    return ConstraintExtractor()


@pytest.fixture(scope="session")
def router(schema) -> RelevanceRouter:
    return RelevanceRouter(schema)


@pytest.fixture()
def sessions(tmp_path) -> SessionStore:
    return SessionStore(str(tmp_path / "sessions"))


@pytest.fixture()
def empty_store(schema) -> CorpusStore:
    return CorpusStore(schema)


@pytest.fixture()
def pipeline(empty_store, embedder, completion, tag_extractor, tmp_path) -> IngestionPipeline:
    return IngestionPipeline(
        store=empty_store,
        extractor=tag_extractor,
        embedder=embedder,
        completion=completion,
        metadata_client=FixtureMetadataClient(),
        review_dir=str(tmp_path / "reviews"),
    )


def fixture_doc(name: str) -> str:
    return data_text("fixtures", "docs", name)
