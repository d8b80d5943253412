"""Query understanding and candidate retrieval.

One chat turn starts here: the new prompt is folded with recent history
into a summarized query, constraints are pulled out of it, the query is
routed (on-topic or not), and candidates are gathered through two paths —
per-predicate structured search and top-k semantic search — or, for
off-topic turns, from the session's recommended-device log.

Structured hits are unioned rather than intersected: a device matching
only some predicates stays in play and its matched-predicate count feeds
the proportional term of the rank score.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

import numpy as np

from .data_files import data_json
from .errors import ConfigError, QueryError
from .providers import CompletionProvider, EmbeddingProvider, fit_turns
from .schema import Op, Predicate, TaxonomySchema
from .sessions import ConversationSession
from .store import CorpusStore, cosine_between

logger = logging.getLogger(__name__)

# User turns folded into the summary (the new prompt rides on top).
SUMMARY_WINDOW = 4
# Characters of conversation the summarization prompt may occupy.
SUMMARY_BUDGET_CHARS = 6000
# Semantic candidates fetched before rerank (2x the shortlist size).
SEMANTIC_K = 10


@dataclass
class SummarizedQuery:
    """The consolidated query plus what was mined out of it.

    ``latest_text``/``latest_constraints`` cover only the newest prompt;
    routing uses them so an off-topic aside is not rescued by domain
    words from earlier turns that the summary still carries.
    """

    text: str
    extracted_constraints: list[Predicate]
    semantic_text: str
    latest_text: str
    latest_constraints: list[Predicate] = field(default_factory=list)


@dataclass(frozen=True)
class RouteDecision:
    relevant: bool
    reason: str


@dataclass
class QueryPlan:
    predicates: list[Predicate]
    semantic_text: str

    @property
    def n_all(self) -> int:
        return len(self.predicates)


@dataclass
class CandidateEntry:
    device_id: int
    matched_predicate_count: int = 0
    cosine: float | None = None
    provenance: set[str] = field(default_factory=set)


@dataclass
class CandidateSet:
    """Union of all search paths, keyed by device id. ``query_vector`` is
    kept so rerank can compute cosines for conditional-only hits."""

    entries: dict[int, CandidateEntry] = field(default_factory=dict)
    query_vector: np.ndarray | None = None

    def ids(self) -> list[int]:
        return sorted(self.entries)


class ConstraintExtractor:
    """Rule table turning phrases like "at least 6 dof" into predicates.

    Rules apply in file order, most-specific first; every match claims
    its span so a later, looser rule cannot re-match the same words. The
    unclaimed remainder becomes the semantic residual.
    """

    def __init__(self, rules: list[dict] | None = None):
        if rules is None:
            rules = data_json("constraint_patterns.json")
        self._rules: list[tuple[re.Pattern, str, Op, str]] = []
        for rule in rules:
            try:
                self._rules.append(
                    (
                        re.compile(rule["pattern"], re.IGNORECASE),
                        rule["attribute"],
                        Op(rule["op"]),
                        rule["value"],
                    )
                )
            except (KeyError, ValueError, re.error) as exc:
                raise ConfigError(f"bad constraint rule {rule!r}: {exc}") from exc

    def extract(self, text: str) -> tuple[list[Predicate], str]:
        """(predicates, residual text). Duplicate predicates collapse;
        residual is the input with matched spans blanked out."""
        claimed = [False] * len(text)
        found: list[Predicate] = []
        seen: set[tuple] = set()
        for pattern, attribute, op, value in self._rules:
            for m in pattern.finditer(text):
                start, end = m.span()
                if any(claimed[start:end]):
                    continue
                for i in range(start, end):
                    claimed[i] = True
                literal = m.group(1) if value == "$1" else value
                key = (attribute, op, str(literal).lower())
                if key not in seen:
                    seen.add(key)
                    found.append(Predicate(attribute, op, literal))
        residual = "".join(
            " " if claimed[i] else ch for i, ch in enumerate(text)
        )
        return found, " ".join(residual.split())


def summarize(
    session: ConversationSession,
    new_prompt: str,
    provider: CompletionProvider,
    extractor: ConstraintExtractor,
) -> SummarizedQuery:
    """Fold the new prompt with the last few user turns into one query,
    then mine constraints from it (and, separately, from the new prompt
    alone for routing)."""
    if not new_prompt.strip():
        raise QueryError("prompt must be non-empty")
    window = session.user_turns()[-SUMMARY_WINDOW:]
    reserved = len(new_prompt) + 200
    window = fit_turns(window, reserved, SUMMARY_BUDGET_CHARS)
    lines = "\n".join(f"user: {t}" for t in [*window, new_prompt])
    prompt = (
        "Consolidate this conversation into one self-contained request "
        "for a haptic device recommendation.\n"
        f"[conversation]\n{lines}\n[/conversation]\n"
    )
    text = provider.complete(prompt).strip() or new_prompt
    constraints, residual = extractor.extract(text)
    latest_constraints, _ = extractor.extract(new_prompt)
    return SummarizedQuery(
        text=text,
        extracted_constraints=constraints,
        # A fully-constrained prompt leaves no residual; fall back to the
        # whole summary so the semantic path always has something to embed.
        semantic_text=residual if residual.strip() else text,
        latest_text=new_prompt,
        latest_constraints=latest_constraints,
    )


class RelevanceRouter:
    """Rule-based relevance classifier over a domain lexicon.

    A query is on-topic iff its newest prompt hits the lexicon (domain
    terms + schema attribute names) or yields at least one constraint.
    Adding a lexicon word to a prompt can therefore only turn it
    relevant, never the reverse.
    """

    def __init__(self, schema: TaxonomySchema, terms: list[str] | None = None):
        if terms is None:
            terms = data_json("routing_lexicon.json")["terms"]
        vocab = {t.strip().lower() for t in terms if t.strip()}
        for name in schema.names():
            vocab.add(name.lower())
            vocab.add(name.lower().replace("_", " "))
        self._phrases = sorted(v for v in vocab if " " in v or "-" in v)
        words = sorted(v for v in vocab if " " not in v and "-" not in v)
        self._word_re = re.compile(
            r"\b(?:" + "|".join(re.escape(w) for w in words) + r")\b", re.IGNORECASE
        )

    def lexicon_hit(self, text: str) -> str | None:
        lowered = text.lower()
        m = self._word_re.search(lowered)
        if m:
            return m.group(0)
        for phrase in self._phrases:
            if phrase in lowered:
                return phrase
        return None

    def route(self, summary: SummarizedQuery) -> RouteDecision:
        hit = self.lexicon_hit(summary.latest_text)
        if hit:
            return RouteDecision(True, f"lexicon term {hit!r}")
        if summary.latest_constraints:
            return RouteDecision(
                True, f"{len(summary.latest_constraints)} extracted constraint(s)"
            )
        return RouteDecision(False, "no domain terms or constraints in the prompt")


def plan_queries(summary: SummarizedQuery, schema: TaxonomySchema) -> QueryPlan:
    """Validate extracted constraints into the query plan; constraints on
    unknown attributes or with incompatible operators are dropped (logged),
    they never abort the turn."""
    predicates = []
    for pred in summary.extracted_constraints:
        try:
            predicates.append(schema.validate_predicate(pred))
        except QueryError as exc:
            logger.warning("dropping constraint %s: %s", pred.describe(), exc)
    return QueryPlan(predicates=predicates, semantic_text=summary.semantic_text)


def gather_candidates(
    plan: QueryPlan,
    session: ConversationSession,
    store: CorpusStore,
    embedder: EmbeddingProvider,
    route: RouteDecision,
    semantic_k: int = SEMANTIC_K,
) -> CandidateSet:
    """Union the conditional and semantic search paths (relevant route),
    or replay the session's recommended log with refreshed cosines
    (irrelevant route)."""
    query_vector = None
    if plan.semantic_text.strip():
        query_vector = embedder.embed(plan.semantic_text)
    candidates = CandidateSet(query_vector=query_vector)

    if not route.relevant:
        for device_id in session.recommended_log:
            if not store.has_device(device_id):
                logger.warning("recommended_log id %d no longer in store", device_id)
                continue
            entry = CandidateEntry(device_id, provenance={"recommended_log"})
            vec = store.get_embedding(device_id)
            if vec is not None and query_vector is not None:
                entry.cosine = cosine_between(vec, query_vector)
            candidates.entries[device_id] = entry
        return candidates

    for pred in plan.predicates:
        for record in store.query_structured([pred]):
            entry = candidates.entries.setdefault(
                record.id, CandidateEntry(record.id)
            )
            entry.matched_predicate_count += 1
            entry.provenance.add("conditional")

    if query_vector is not None:
        for device_id, score in store.vector_search(query_vector, semantic_k):
            entry = candidates.entries.setdefault(
                device_id, CandidateEntry(device_id)
            )
            entry.cosine = score
            entry.provenance.add("semantic")
    return candidates
