"""Document-to-device ingestion pipeline.

A source document (HTML page, plain text, or a pre-extracted PDF text
dump) is parsed into blocks, each block is interrogated for taxonomy
attributes, and the per-block votes are aggregated by weighted voting
into one consensus taxonomy. The resulting draft record is staged for
human review; only approved or corrected records enter the store and
receive an embedding.
"""

from __future__ import annotations

import json
import logging
import os
import re
import zlib
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Protocol

import numpy as np

from .data_files import data_json
from .errors import ConfigError, IngestionError, NotFoundError, StateError
from .providers import CompletionProvider, EmbeddingProvider, ExtractionProvider, first_sentence
from .schema import SchemaValidationError, TaxonomySchema
from .store import (
    AttributeValue,
    CorpusStore,
    DeviceRecord,
    Metadata,
    canonical_embedding_text,
)

logger = logging.getLogger(__name__)

DOCUMENT_KINDS = ("pdf_text_dump", "html", "plain_text")

# Vote weight by block kind: tables are structured specification sources,
# captions are supplementary assets.
BLOCK_WEIGHTS = {"table": 2.0, "text": 1.0, "image_caption": 0.5}


@dataclass(frozen=True)
class SourceDocument:
    """One raw input document; ``kind`` selects the parser."""

    uri: str
    kind: str  # pdf_text_dump | html | plain_text
    content: str


@dataclass(frozen=True)
class SourceBlock:
    """One parsed element of a document. Tables are serialized as
    ' | '-delimited rows; images are represented by their caption text."""

    id: str
    document_uri: str
    kind: str  # text | table | image_caption
    content: str
    position: int


@dataclass(frozen=True)
class AttributeAssignment:
    """One block's vote: attribute, proposed raw value, block-kind weight."""

    block_id: str
    attribute: str
    value: str
    weight: float


@dataclass
class ReviewItem:
    """A staged draft awaiting a single pending→approved|corrected step."""

    id: str
    draft: DeviceRecord
    blocks: list[SourceBlock] = field(default_factory=list)
    decision: str = "pending"

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "decision": self.decision,
            "draft": self.draft.to_dict(),
            "blocks": [
                {
                    "id": b.id,
                    "document_uri": b.document_uri,
                    "kind": b.kind,
                    "content": b.content,
                    "position": b.position,
                }
                for b in self.blocks
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReviewItem":
        return cls(
            id=d["id"],
            draft=DeviceRecord.from_dict(d["draft"]),
            blocks=[
                SourceBlock(
                    id=b["id"],
                    document_uri=b["document_uri"],
                    kind=b["kind"],
                    content=b["content"],
                    position=b["position"],
                )
                for b in d.get("blocks", [])
            ],
            decision=d.get("decision", "pending"),
        )


def _collapse(text: str) -> str:
    return " ".join(text.split())


class _BlockHtmlParser(HTMLParser):
    """Collects paragraph, table, and caption blocks from simple HTML.

    Headings and the <title> element feed title derivation only; they do
    not become blocks.
    """

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.pieces: list[tuple[str, str]] = []
        self.title = ""
        self._mode: str | None = None
        self._buf: list[str] = []
        self._rows: list[list[str]] | None = None
        self._cell: list[str] | None = None

    def handle_starttag(self, tag, attrs):
        if tag == "p":
            self._mode, self._buf = "p", []
        elif tag == "figcaption":
            self._mode, self._buf = "figcaption", []
        elif tag in ("title", "h1"):
            self._mode, self._buf = tag, []
        elif tag == "table":
            self._rows = []
        elif tag == "tr" and self._rows is not None:
            self._rows.append([])
        elif tag in ("td", "th") and self._rows is not None:
            self._cell = []
        elif tag == "img":
            alt = dict(attrs).get("alt") or ""
            if alt.strip():
                self.pieces.append(("image_caption", _collapse(alt)))

    def handle_endtag(self, tag):
        if tag == "p" and self._mode == "p":
            self.pieces.append(("text", _collapse("".join(self._buf))))
            self._mode = None
        elif tag == "figcaption" and self._mode == "figcaption":
            self.pieces.append(("image_caption", _collapse("".join(self._buf))))
            self._mode = None
        elif tag in ("title", "h1") and self._mode == tag:
            if not self.title:
                self.title = _collapse("".join(self._buf))
            self._mode = None
        elif tag in ("td", "th") and self._cell is not None:
            if self._rows and self._rows[-1] is not None:
                self._rows[-1].append(_collapse("".join(self._cell)))
            self._cell = None
        elif tag == "table" and self._rows is not None:
            lines = [
                " | ".join(row) for row in self._rows if any(c for c in row)
            ]
            if lines:
                self.pieces.append(("table", "\n".join(lines)))
            self._rows = None

    def handle_data(self, data):
        if self._cell is not None:
            self._cell.append(data)
        elif self._mode is not None:
            self._buf.append(data)


def _parse_html(content: str) -> tuple[list[tuple[str, str]], str]:
    parser = _BlockHtmlParser()
    parser.feed(content)
    parser.close()
    return parser.pieces, parser.title


_TABLE_CELL_SPLIT = re.compile(r"\t|\|")


def _parse_text(content: str) -> list[tuple[str, str]]:
    """Blank-line-separated paragraphs; runs of tab/pipe-delimited lines
    become table blocks serialized the same way as HTML tables."""
    pieces = []
    for chunk in re.split(r"\n\s*\n", content):
        lines = [line.strip() for line in chunk.splitlines() if line.strip()]
        if not lines:
            continue
        if len(lines) >= 2 and all("|" in l or "\t" in l for l in lines):
            rows = []
            for line in lines:
                cells = [c.strip() for c in _TABLE_CELL_SPLIT.split(line)]
                rows.append(" | ".join(c for c in cells if c))
            pieces.append(("table", "\n".join(rows)))
        else:
            pieces.append(("text", _collapse(chunk)))
    return pieces


def parse_source(doc: SourceDocument) -> list[SourceBlock]:
    """Deterministic block list for one document.

    Block ids are ``<uri>#b<ordinal>`` with ordinals contiguous from 0,
    so re-parsing the same document always yields identical ids.
    """
    if not doc.uri.strip():
        raise IngestionError("document uri must be non-empty")
    if doc.kind not in DOCUMENT_KINDS:
        raise IngestionError(f"{doc.uri}: unsupported document kind {doc.kind!r}")
    if doc.kind == "html":
        pieces, _ = _parse_html(doc.content)
    else:
        pieces = _parse_text(doc.content)
    pieces = [(kind, text) for kind, text in pieces if text.strip()]
    if not pieces:
        raise IngestionError(f"{doc.uri}: no parseable content blocks")
    return [
        SourceBlock(f"{doc.uri}#b{i}", doc.uri, kind, text, i)
        for i, (kind, text) in enumerate(pieces)
    ]


def derive_title(doc: SourceDocument) -> str:
    """Document title: HTML <title>/first <h1>, else the first non-empty
    line; the device name is the part before the first colon."""
    if doc.kind == "html":
        pieces, title = _parse_html(doc.content)
        if title:
            return title
        texts = [text for kind, text in pieces if kind == "text"]
        if texts:
            return first_sentence(texts[0])
    else:
        for line in doc.content.splitlines():
            if line.strip():
                return _collapse(line)
    raise IngestionError(f"{doc.uri}: cannot derive a title")


def extract_tags(
    block: SourceBlock, schema: TaxonomySchema, extractor: ExtractionProvider
) -> list[AttributeAssignment]:
    """One weighted assignment per attribute the extractor finds evidence
    for in this block. Non-schema attribute names are dropped and logged."""
    weight = BLOCK_WEIGHTS[block.kind]
    out = []
    for attr, value in extractor.tag(block.content, schema):
        if attr not in schema:
            logger.warning(
                "extractor proposed unknown attribute %r for %s; skipped",
                attr,
                block.id,
            )
            continue
        out.append(AttributeAssignment(block.id, attr, str(value), weight))
    return out


def aggregate_votes(
    assignments: list[AttributeAssignment], schema: TaxonomySchema
) -> dict[str, AttributeValue]:
    """Weighted voting per attribute over canonicalized values.

    Winner = maximal total weight; ties prefer the value backed by the
    heaviest single block kind, then the lexicographically smaller
    canonical string — content-based, so any permutation of the input
    yields the same consensus. Votes that fail canonicalization are
    skipped and logged, never fatal.
    """
    candidates: dict[str, dict[str, dict]] = {}
    for a in assignments:
        try:
            _, canon = schema.canonicalize(a.attribute, a.value)
        except SchemaValidationError as exc:
            logger.warning(
                "vote dropped (%s=%r from %s): %s", a.attribute, a.value, a.block_id, exc
            )
            continue
        slot = candidates.setdefault(a.attribute, {}).setdefault(
            canon, {"total": 0.0, "max_single": 0.0, "blocks": []}
        )
        slot["total"] += a.weight
        slot["max_single"] = max(slot["max_single"], a.weight)
        slot["blocks"].append(a.block_id)
    taxonomy: dict[str, AttributeValue] = {}
    for attr, by_value in candidates.items():
        canon, info = min(
            by_value.items(),
            key=lambda kv: (-kv[1]["total"], -kv[1]["max_single"], kv[0]),
        )
        typed, _ = schema.canonicalize(attr, canon)
        taxonomy[attr] = AttributeValue(
            value=typed,
            vote_tally={c: i["total"] for c, i in sorted(by_value.items())},
            supporting_blocks=sorted(set(info["blocks"])),
        )
    return taxonomy


class MetadataClient(Protocol):
    def lookup(self, query: str) -> dict | None: ...


class FixtureMetadataClient:
    """Offline bibliographic lookup from a JSON map keyed by query string.

    The table is validated at construction (fail fast on a malformed
    fixture, not on first query)."""

    def __init__(self, path: str | None = None, table: dict | None = None):
        if table is None:
            if path is None:
                table = data_json("fixtures", "scholar.json")
            else:
                try:
                    with open(path, encoding="utf-8") as f:
                        table = json.load(f)
                except (OSError, json.JSONDecodeError) as exc:
                    raise ConfigError(f"metadata fixture {path}: {exc}") from exc
        if not isinstance(table, dict) or not all(
            isinstance(v, dict) and isinstance(v.get("title"), str)
            for v in table.values()
        ):
            raise ConfigError(
                "metadata fixture must map query strings to entries with a 'title'"
            )
        self._table = table

    def lookup(self, query: str) -> dict | None:
        return self._table.get(query)


def fetch_scholar_metadata(query: str, client: MetadataClient) -> Metadata | None:
    """Bibliographic metadata for a title/DOI query, or None on a miss
    (the caller proceeds with document-derived metadata)."""
    entry = client.lookup(query)
    if entry is None:
        logger.info("no scholar metadata for %r", query)
        return None
    return Metadata(
        title=entry.get("title") or query,
        authors=list(entry.get("authors") or []),
        abstract_or_summary=entry.get("abstract", ""),
        publication_year=entry.get("year"),
        citation_count=entry.get("citation_count"),
        citation_sources=list(entry.get("citation_sources") or []),
    )


def summarize_commercial(
    blocks: list[SourceBlock], provider: CompletionProvider
) -> str:
    """Abstract-style summary generated from the document's text blocks."""
    texts = [b for b in blocks if b.kind == "text"]
    if not texts:
        raise IngestionError("summary needs at least one text block")
    prompt = (
        "Summarize the following excerpts from a haptic device document "
        "in a few sentences.\n\n"
        + "\n".join(f"[block]\n{b.content}\n[/block]" for b in texts)
    )
    summary = provider.complete(prompt).strip()
    if not summary:
        raise IngestionError("completion provider returned an empty summary")
    return summary


def embed_device(
    store: CorpusStore, record: DeviceRecord, embedder: EmbeddingProvider
) -> np.ndarray:
    """Embed a reviewed record's canonical text and write it to the
    vector store."""
    if record.review_status not in ("approved", "corrected"):
        raise StateError(
            f"device {record.name!r} is {record.review_status}; only reviewed "
            "records are embedded"
        )
    vec = embedder.embed(canonical_embedding_text(store.schema, record))
    return store.put_embedding(record.id, vec)


def stage_for_review(draft: DeviceRecord, blocks: list[SourceBlock]) -> ReviewItem:
    item_id = f"r{draft.id:08d}"
    return ReviewItem(id=item_id, draft=draft, blocks=list(blocks))


def stable_device_id(uri: str) -> int:
    """Device id derived from the source uri, so re-ingesting a document
    updates its existing record instead of minting a new one."""
    return 1_000_000 + zlib.crc32(uri.encode("utf-8")) % 99_000_000


class IngestionPipeline:
    """Orchestrates parse → extract → vote → metadata → review → embed.

    Staged ReviewItems persist as one JSON file each under
    ``<review_dir>/``, so a restarted process can list and resolve them.
    Without a review_dir the queue is in-memory only.
    """

    def __init__(
        self,
        store: CorpusStore,
        extractor: ExtractionProvider,
        embedder: EmbeddingProvider,
        completion: CompletionProvider,
        metadata_client: MetadataClient | None = None,
        review_dir: str | None = None,
    ):
        self.store = store
        self.extractor = extractor
        self.embedder = embedder
        self.completion = completion
        self.metadata_client = metadata_client
        self.review_dir = review_dir
        self._reviews: dict[str, ReviewItem] = {}
        if review_dir:
            os.makedirs(review_dir, exist_ok=True)
            for name in sorted(os.listdir(review_dir)):
                if not name.endswith(".json"):
                    continue
                with open(os.path.join(review_dir, name), encoding="utf-8") as f:
                    item = ReviewItem.from_dict(json.load(f))
                self._reviews[item.id] = item

    # -- staging ------------------------------------------------------------

    def ingest(self, doc: SourceDocument, source_kind: str) -> ReviewItem:
        """Run the creator pipeline on one document and stage the draft."""
        blocks = parse_source(doc)
        assignments: list[AttributeAssignment] = []
        for block in blocks:
            assignments.extend(extract_tags(block, self.store.schema, self.extractor))
        taxonomy = aggregate_votes(assignments, self.store.schema)

        title = derive_title(doc)
        name = title.split(":")[0].strip() or title
        metadata = None
        if source_kind == "research_paper" and self.metadata_client is not None:
            metadata = fetch_scholar_metadata(title, self.metadata_client)
        if metadata is None:
            metadata = Metadata(
                title=title,
                abstract_or_summary=summarize_commercial(blocks, self.completion),
            )

        draft = DeviceRecord(
            id=stable_device_id(doc.uri),
            name=name,
            source_kind=source_kind,
            metadata=metadata,
            taxonomy=taxonomy,
            review_status="pending",
            source_links=[doc.uri],
        )
        item = stage_for_review(draft, blocks)
        self._reviews[item.id] = item
        self._persist(item)
        logger.info(
            "staged %s as review %s (%d blocks, %d attributes)",
            doc.uri,
            item.id,
            len(blocks),
            len(taxonomy),
        )
        return item

    def ingest_file(self, path: str, kind: str, source_kind: str) -> ReviewItem:
        try:
            with open(path, encoding="utf-8") as f:
                content = f.read()
        except OSError as exc:
            raise IngestionError(f"cannot read {path}: {exc}") from exc
        return self.ingest(SourceDocument(uri=path, kind=kind, content=content), source_kind)

    # -- review -------------------------------------------------------------

    def reviews(self) -> list[ReviewItem]:
        return [self._reviews[k] for k in sorted(self._reviews)]

    def get_review(self, item_id: str) -> ReviewItem:
        try:
            return self._reviews[item_id]
        except KeyError:
            raise NotFoundError(f"no review item {item_id!r}") from None

    def resolve_review(
        self,
        item_id: str,
        decision: str,
        edits: dict[str, object] | None = None,
    ) -> DeviceRecord:
        """Apply the single allowed review transition and populate the store.

        ``edits`` (required for ``corrected``) replace attribute values;
        each edit is marked as a human override with a unit tally.
        """
        item = self.get_review(item_id)
        if item.decision != "pending":
            raise StateError(f"review {item_id} already resolved as {item.decision}")
        if decision not in ("approved", "corrected"):
            raise IngestionError(f"invalid review decision {decision!r}")
        if decision == "corrected" and not edits:
            raise IngestionError("corrected decision requires at least one edit")

        record = item.draft
        if decision == "corrected":
            for attr, raw in (edits or {}).items():
                typed, canon = self.store.schema.canonicalize(attr, raw)
                record.taxonomy[attr] = AttributeValue(
                    value=typed,
                    vote_tally={canon: 1.0},
                    supporting_blocks=[],
                    human_override=True,
                )
        record.review_status = decision
        # Embed before touching the store so a provider failure leaves
        # the store unchanged and the item still pending.
        try:
            vector = self.embedder.embed(
                canonical_embedding_text(self.store.schema, record)
            )
        except Exception:
            record.review_status = "pending"
            raise
        self.store.upsert_device(record)
        self.store.put_embedding(record.id, vector)
        item.decision = decision
        self._persist(item)
        logger.info("review %s resolved as %s (device %d)", item_id, decision, record.id)
        return record

    def _persist(self, item: ReviewItem) -> None:
        if not self.review_dir:
            return
        path = os.path.join(self.review_dir, f"{item.id}.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(item.to_dict(), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        os.replace(tmp, path)
