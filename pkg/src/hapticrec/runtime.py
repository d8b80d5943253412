"""Wires configuration into a running application state.

Both entry points (HTTP service and CLI) build the same ``AppState``:
one corpus store, one session store, one ingestion pipeline, one agent.
Without a data directory everything is ephemeral and the store is seeded
from the packaged fixture corpus.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass

from .agent import RecommendationAgent
from .config import AppConfig
from .data_files import data_json, data_text
from .errors import ConfigError
from .ingestion import FixtureMetadataClient, IngestionPipeline
from .providers import (
    CompletionProvider,
    HttpCompletionProvider,
    MockCompletionProvider,
    MockEmbeddingProvider,
    RuleBasedExtractor,
)
from .schema import default_schema
from .sessions import SessionStore
from .store import CorpusStore

logger = logging.getLogger(__name__)


@dataclass
class AppState:
    config: AppConfig
    store: CorpusStore
    sessions: SessionStore
    pipeline: IngestionPipeline
    agent: RecommendationAgent
    samples: list[str]

    def corpus_save_path(self) -> str | None:
        if self.config.corpus_path:
            return self.config.corpus_path
        if self.config.data_dir:
            return os.path.join(self.config.data_dir, "corpus.json")
        return None

    def save_corpus(self) -> str | None:
        """Persist the store if any persistent location is configured."""
        path = self.corpus_save_path()
        if path:
            os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
            tmp = path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as f:
                f.write(self.store.export_json())
            os.replace(tmp, path)
        return path


def _completion_provider(config: AppConfig) -> CompletionProvider:
    if config.provider == "mock":
        return MockCompletionProvider()
    if config.provider == "http":
        if not config.provider_endpoint:
            raise ConfigError("provider=http requires provider_endpoint")
        return HttpCompletionProvider(
            endpoint=config.provider_endpoint,
            api_key=config.provider_api_key or None,
            model=config.provider_model,
            timeout_s=config.provider_timeout_s,
        )
    raise ConfigError(f"unknown completion provider {config.provider!r}")


def load_samples(config: AppConfig) -> list[str]:
    if config.samples_path:
        try:
            with open(config.samples_path, encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"samples file {config.samples_path}: {exc}") from exc
    else:
        data = data_json("sample_queries.json")
    samples = data.get("samples") if isinstance(data, dict) else data
    if not isinstance(samples, list) or not all(isinstance(s, str) for s in samples):
        raise ConfigError("sample queries must be a JSON array of strings")
    return samples


def build_state(config: AppConfig | None = None) -> AppState:
    config = config or AppConfig()
    schema = default_schema()
    store = CorpusStore(schema)

    corpus_path = config.corpus_path
    if not corpus_path and config.data_dir:
        candidate = os.path.join(config.data_dir, "corpus.json")
        if os.path.exists(candidate):
            corpus_path = candidate
    if corpus_path and os.path.exists(corpus_path):
        with open(corpus_path, encoding="utf-8") as f:
            count = store.import_json(f.read())
        logger.info("loaded %d devices from %s", count, corpus_path)
    else:
        count = store.import_json(data_text("fixture_corpus.json"))
        logger.info("seeded %d devices from the packaged fixture corpus", count)

    session_dir = (
        os.path.join(config.data_dir, "sessions") if config.data_dir else None
    )
    review_dir = os.path.join(config.data_dir, "reviews") if config.data_dir else None
    sessions = SessionStore(session_dir)
    completion = _completion_provider(config)
    embedder = MockEmbeddingProvider(store.dim)
    extractor = RuleBasedExtractor(data_json("extraction_patterns.json"))
    pipeline = IngestionPipeline(
        store=store,
        extractor=extractor,
        embedder=embedder,
        completion=completion,
        metadata_client=FixtureMetadataClient(),
        review_dir=review_dir,
    )
    agent = RecommendationAgent(
        store=store,
        sessions=sessions,
        completion=completion,
        embedder=embedder,
        shortlist_size=config.shortlist_size,
        semantic_k=config.semantic_k,
    )
    return AppState(
        config=config,
        store=store,
        sessions=sessions,
        pipeline=pipeline,
        agent=agent,
        samples=load_samples(config),
    )
