"""The conversational agent: one chat turn end-to-end.

Pipeline per turn: summarize -> route -> plan + gather -> rerank ->
select template -> assemble grounded prompt -> complete -> postprocess.
The grounded prompt carries four elements: a task description, the
device reference blocks, the summarized user prompt, and output cues.
Postprocessing is the grounding boundary: whatever the model wrote, only
devices from this turn's shortlist can come out as recommendations;
recognizable mentions of anything else are stripped.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .data_files import data_dir_names, data_json
from .errors import ConfigError, HapticRecError, NotFoundError
from .providers import (
    CompletionProvider,
    EmbeddingProvider,
    NO_MATCH_SENTINEL,
)
from .rerank import SHORTLIST_SIZE, RankedDevice, rerank
from .retrieval import (
    SEMANTIC_K,
    ConstraintExtractor,
    RelevanceRouter,
    RouteDecision,
    SummarizedQuery,
    gather_candidates,
    plan_queries,
    summarize,
)
from .sessions import SessionStore
from .store import CorpusStore

logger = logging.getLogger(__name__)

TEMPLATE_TAGS = ("device_recommendation", "device_detail", "comparison", "off_topic")

FALLBACK_ANSWER = (
    "The model produced no usable answer for this request; "
    "please rephrase or try again."
)

_MARKER = re.compile(r"\[device:(\d+)\]")

# Phrases signalling the user wants depth on known devices vs. a fresh list.
_DETAIL_WORDS = (
    "tell me more",
    "more about",
    "more detail",
    "details",
    "describe",
    "explain",
    "specs",
    "specifications",
)
_COMPARE_WORDS = (
    "compare",
    "comparison",
    "versus",
    " vs ",
    " vs.",
    "difference between",
    "better than",
)


@dataclass(frozen=True)
class PromptTemplate:
    """One predefined prompt option; ``layout`` strings the four elements
    together via {task}/{references}/{summary}/{cues} slots."""

    id: str
    tag: str
    task: str
    cues: str
    layout: str

    def render(self, references: str, summary: str) -> str:
        return self.layout.format(
            task=self.task, references=references, summary=summary, cues=self.cues
        )


@dataclass
class Recommendation:
    device_id: int
    name: str
    rank_score: float
    n_pos: int
    n_all: int
    cosine: float
    links: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.device_id,
            "name": self.name,
            "rank_score": self.rank_score,
            "n_pos": self.n_pos,
            "n_all": self.n_all,
            "cosine": self.cosine,
            "links": list(self.links),
        }


@dataclass
class AgentResponse:
    text: str
    recommendations: list[Recommendation]
    template_id: str

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "recommendations": [r.to_dict() for r in self.recommendations],
            "template_id": self.template_id,
        }


def load_templates() -> dict[str, PromptTemplate]:
    """All packaged templates keyed by tag; fails fast if any of the four
    required tags is missing or a file is malformed."""
    templates: dict[str, PromptTemplate] = {}
    for name in data_dir_names("templates"):
        if not name.endswith(".json"):
            continue
        raw = data_json("templates", name)
        try:
            template = PromptTemplate(
                id=raw["id"],
                tag=raw["tag"],
                task=raw["task"],
                cues=raw["cues"],
                layout=raw["layout"],
            )
        except KeyError as exc:
            raise ConfigError(f"template {name}: missing field {exc}") from exc
        templates[template.tag] = template
    missing = [tag for tag in TEMPLATE_TAGS if tag not in templates]
    if missing:
        raise ConfigError(f"missing prompt templates for tags: {missing}")
    return templates


def select_template(
    summary: SummarizedQuery,
    route: RouteDecision,
    templates: dict[str, PromptTemplate],
) -> PromptTemplate:
    """Deterministic template choice from the route and the newest prompt.

    Off-route turns still get the detail template when the user is asking
    about already-recommended devices ("tell me more ..."), which is the
    recommended-log replay path; everything else off-route is off_topic.
    """
    lowered = f" {summary.latest_text.lower()} "
    wants_detail = any(w in lowered for w in _DETAIL_WORDS)
    if not route.relevant:
        return templates["device_detail" if wants_detail else "off_topic"]
    if any(w in lowered for w in _COMPARE_WORDS):
        return templates["comparison"]
    if wants_detail:
        return templates["device_detail"]
    return templates["device_recommendation"]


def _reference_block(store: CorpusStore, ranked: RankedDevice) -> str:
    try:
        record = store.get_device(ranked.device_id)
    except NotFoundError:
        raise HapticRecError(
            f"ranked device {ranked.device_id} missing from store"
        ) from None
    lines = [f"[device:{record.id}] {record.name}"]
    lines.append(f"  source: {record.source_kind} ({record.review_status})")
    if record.source_links:
        lines.append("  links: " + " ".join(record.source_links))
    summary = " ".join(record.metadata.abstract_or_summary.split())
    if summary:
        lines.append(f"  summary: {summary}")
    for attr in store.schema.attributes:
        av = record.taxonomy.get(attr.name)
        if av is not None:
            _, canon = store.schema.canonicalize(attr.name, av.value)
            lines.append(f"  {attr.name}: {canon}")
    lines.append(
        f"  score: {ranked.rank_score:.6f} "
        f"(n_pos={ranked.n_pos}, n_all={ranked.n_all}, cosine={ranked.cosine:.6f})"
    )
    return "\n".join(lines)


def assemble_prompt(
    template: PromptTemplate,
    ranked: list[RankedDevice],
    summary: SummarizedQuery,
    store: CorpusStore,
) -> str:
    """Grounded prompt: references in rank order, never truncated; an
    empty shortlist is stated explicitly rather than omitted."""
    if ranked:
        references = "\n".join(_reference_block(store, r) for r in ranked)
    else:
        references = NO_MATCH_SENTINEL
    return template.render(references=references, summary=summary.text)


def postprocess(
    raw_text: str,
    ranked: list[RankedDevice],
    store: CorpusStore,
    template_id: str,
) -> AgentResponse:
    """Match model mentions against the shortlist and strip the rest.

    Mentions count via ``[device:<id>]`` markers or exact store names.
    Store devices outside the shortlist are removed from the text;
    fabricated names we cannot recognize stay as prose but never become
    recommendations. Mentioned shortlist names missing a marker get one,
    so the rendered text always carries stable markers.
    """
    ranked_by_id = {r.device_id: r for r in ranked}
    text = raw_text.strip()

    known_names = store.devices_by_name()
    for name, device_id in sorted(known_names.items(), key=lambda kv: -len(kv[0])):
        if device_id not in ranked_by_id and name in text:
            logger.warning("stripped unranked device mention %r", name)
            text = text.replace(name, "")

    dropped_markers = []
    def _check_marker(m: re.Match) -> str:
        device_id = int(m.group(1))
        if device_id in ranked_by_id and store.has_device(device_id):
            return m.group(0)
        dropped_markers.append(device_id)
        return ""

    text = _MARKER.sub(_check_marker, text)
    if dropped_markers:
        logger.warning("stripped unknown device markers %s", sorted(set(dropped_markers)))

    mentioned: set[int] = set()
    for m in _MARKER.finditer(text):
        mentioned.add(int(m.group(1)))
    for r in ranked:
        if r.device_id in mentioned:
            continue
        name = store.get_device(r.device_id).name
        if name and name in text:
            mentioned.add(r.device_id)
            text = text.replace(name, f"[device:{r.device_id}] {name}", 1)

    # Tidy whitespace damage from stripping, preserving line structure.
    lines = [re.sub(r"[ \t]{2,}", " ", line).rstrip() for line in text.splitlines()]
    text = "\n".join(lines).strip()
    if not text:
        text = FALLBACK_ANSWER

    recommendations = []
    for r in ranked:
        if r.device_id not in mentioned:
            continue
        record = store.get_device(r.device_id)
        recommendations.append(
            Recommendation(
                device_id=record.id,
                name=record.name,
                rank_score=r.rank_score,
                n_pos=r.n_pos,
                n_all=r.n_all,
                cosine=r.cosine,
                links=list(record.source_links),
            )
        )
    return AgentResponse(
        text=text, recommendations=recommendations, template_id=template_id
    )


class RecommendationAgent:
    """Everything one chat turn needs, wired together once at startup."""

    def __init__(
        self,
        store: CorpusStore,
        sessions: SessionStore,
        completion: CompletionProvider,
        embedder: EmbeddingProvider,
        extractor: ConstraintExtractor | None = None,
        router: RelevanceRouter | None = None,
        templates: dict[str, PromptTemplate] | None = None,
        shortlist_size: int = SHORTLIST_SIZE,
        semantic_k: int = SEMANTIC_K,
    ):
        self.store = store
        self.sessions = sessions
        self.completion = completion
        self.embedder = embedder
        self.extractor = extractor or ConstraintExtractor()
        self.router = router or RelevanceRouter(store.schema)
        self.templates = templates or load_templates()
        self.shortlist_size = shortlist_size
        self.semantic_k = semantic_k

    def chat_turn(self, session_id: str, prompt: str) -> AgentResponse:
        """Run one full turn; the session log gains either the two turns
        plus the recommendation event, or a single error event."""
        session = self.sessions.get(session_id)
        with self.sessions.lock(session_id):
            try:
                summary = summarize(session, prompt, self.completion, self.extractor)
                route = self.router.route(summary)
                plan = plan_queries(summary, self.store.schema)
                candidates = gather_candidates(
                    plan, session, self.store, self.embedder, route, self.semantic_k
                )
                ranked = rerank(candidates, plan, self.store, self.shortlist_size)
                template = select_template(summary, route, self.templates)
                grounded_prompt = assemble_prompt(template, ranked, summary, self.store)
                raw = self.completion.complete(grounded_prompt)
                response = postprocess(raw, ranked, self.store, template.id)
            except Exception as exc:
                self.sessions.record_error(session_id, str(exc))
                logger.exception("chat turn failed for session %s", session_id)
                raise
            self.sessions.commit_turn(
                session_id,
                prompt,
                response.text,
                [r.device_id for r in response.recommendations],
            )
            return response
