"""Device records and the dual persistence layer.

One ``CorpusStore`` holds both sides of the knowledge base: the structured
attribute store answering predicate queries, and the vector store
answering exact cosine top-k searches. Vectors are unit-normalized on
write so stored cosine equals a plain dot product; search is an
exhaustive scan (the corpus is hundreds of devices, not millions), which
keeps results exactly reproducible against a brute-force oracle.
"""

from __future__ import annotations

import base64
import json
import logging
import os
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import NotFoundError, SchemaValidationError
from .schema import Predicate, TaxonomySchema, ValueKind

logger = logging.getLogger(__name__)

DEFAULT_EMBED_DIM = 256

SOURCE_KINDS = ("research_paper", "commercial")
REVIEW_STATUSES = ("pending", "approved", "corrected")


@dataclass
class Metadata:
    """Bibliographic / descriptive metadata for one device."""

    title: str = ""
    authors: list[str] = field(default_factory=list)
    abstract_or_summary: str = ""
    publication_year: int | None = None
    citation_count: int | None = None
    citation_sources: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "authors": list(self.authors),
            "abstract_or_summary": self.abstract_or_summary,
            "publication_year": self.publication_year,
            "citation_count": self.citation_count,
            "citation_sources": list(self.citation_sources),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Metadata":
        return cls(
            title=d.get("title", ""),
            authors=list(d.get("authors") or []),
            abstract_or_summary=d.get("abstract_or_summary", ""),
            publication_year=d.get("publication_year"),
            citation_count=d.get("citation_count"),
            citation_sources=list(d.get("citation_sources") or []),
        )


@dataclass
class AttributeValue:
    """A consensus taxonomy value with its voting provenance.

    ``vote_tally`` maps canonical candidate strings to accumulated vote
    weight; the chosen ``value`` always corresponds to one of its keys.
    ``human_override`` marks values set during review correction.
    """

    value: object
    vote_tally: dict[str, float] = field(default_factory=dict)
    supporting_blocks: list[str] = field(default_factory=list)
    human_override: bool = False

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "vote_tally": dict(self.vote_tally),
            "supporting_blocks": list(self.supporting_blocks),
            "human_override": self.human_override,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttributeValue":
        return cls(
            value=d["value"],
            vote_tally={k: float(v) for k, v in (d.get("vote_tally") or {}).items()},
            supporting_blocks=list(d.get("supporting_blocks") or []),
            human_override=bool(d.get("human_override", False)),
        )


@dataclass
class DeviceRecord:
    """One haptic device entry. Taxonomy is sparse: a missing attribute
    means unknown, not false."""

    id: int | None
    name: str
    source_kind: str
    metadata: Metadata = field(default_factory=Metadata)
    taxonomy: dict[str, AttributeValue] = field(default_factory=dict)
    review_status: str = "pending"
    source_links: list[str] = field(default_factory=list)

    def attribute(self, name: str):
        """Stored value for ``name`` or None if unknown."""
        av = self.taxonomy.get(name)
        return None if av is None else av.value

    def to_dict(self, embedding: np.ndarray | None = None) -> dict:
        d = {
            "id": self.id,
            "name": self.name,
            "source_kind": self.source_kind,
            "metadata": self.metadata.to_dict(),
            "taxonomy": {k: v.to_dict() for k, v in sorted(self.taxonomy.items())},
            "review_status": self.review_status,
            "source_links": list(self.source_links),
            "embedding": encode_embedding(embedding) if embedding is not None else None,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceRecord":
        return cls(
            id=d.get("id"),
            name=d["name"],
            source_kind=d["source_kind"],
            metadata=Metadata.from_dict(d.get("metadata") or {}),
            taxonomy={
                k: AttributeValue.from_dict(v)
                for k, v in (d.get("taxonomy") or {}).items()
            },
            review_status=d.get("review_status", "pending"),
            source_links=list(d.get("source_links") or []),
        )


def encode_embedding(vec: np.ndarray) -> str:
    """Base64 of the vector as little-endian float32 bytes."""
    return base64.b64encode(np.asarray(vec, dtype="<f4").tobytes()).decode("ascii")


def decode_embedding(data: str) -> np.ndarray:
    return np.frombuffer(base64.b64decode(data), dtype="<f4").copy()


def normalize(values, dim: int | None = None) -> np.ndarray:
    """Unit-normalize to float32; rejects zero vectors and, when ``dim``
    is given, dimension mismatches."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    if dim is not None and arr.shape[0] != dim:
        raise SchemaValidationError(
            f"embedding dimension {arr.shape[0]} != store dimension {dim}"
        )
    norm = float(np.linalg.norm(arr))
    if norm == 0.0 or not np.isfinite(norm):
        raise SchemaValidationError("cannot normalize zero or non-finite vector")
    return (arr / norm).astype("<f4")


def cosine_between(a, b) -> float:
    """Float64 cosine of two vectors, norm-divided.

    Stored vectors are float32-quantized, so their float64 norm sits a
    few 1e-8 off 1.0; dividing by both norms keeps self-similarity at
    1.0 to float64 precision. Every cosine in the system comes from this
    one expression so oracle comparisons can be exact.
    """
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    return float(np.dot(x, y) / (np.linalg.norm(x) * np.linalg.norm(y)))


class CorpusStore:
    """Structured + vector store over one device corpus.

    Thread contract: one internal lock serializes writers; reads take the
    same lock briefly to snapshot, so a single handle is safe to share
    across request handlers.
    """

    def __init__(self, schema: TaxonomySchema, dim: int = DEFAULT_EMBED_DIM):
        self.schema = schema
        self.dim = dim
        self._devices: dict[int, DeviceRecord] = {}
        self._embeddings: dict[int, np.ndarray] = {}
        self._lock = threading.RLock()

    # -- structured side ---------------------------------------------------

    def upsert_device(self, record: DeviceRecord) -> int:
        """Validate and insert/replace a record; returns its id."""
        self._validate(record)
        with self._lock:
            if record.id is None:
                record.id = max(self._devices, default=0) + 1
            self._devices[record.id] = record
            return record.id

    def get_device(self, device_id: int) -> DeviceRecord:
        with self._lock:
            try:
                return self._devices[device_id]
            except KeyError:
                raise NotFoundError(f"no device with id {device_id}") from None

    def has_device(self, device_id: int) -> bool:
        with self._lock:
            return device_id in self._devices

    def device_ids(self) -> list[int]:
        with self._lock:
            return sorted(self._devices)

    def device_count(self) -> int:
        with self._lock:
            return len(self._devices)

    def devices_by_name(self) -> dict[str, int]:
        with self._lock:
            return {r.name: i for i, r in self._devices.items()}

    def query_structured(self, predicates: list[Predicate]) -> list[DeviceRecord]:
        """Records satisfying every predicate, ordered by id ascending.

        A record missing a predicated attribute never matches (unknown is
        not a match). The empty conjunction matches everything.
        """
        checked = [self.schema.validate_predicate(p) for p in predicates]
        with self._lock:
            records = [self._devices[i] for i in sorted(self._devices)]
        out = []
        for rec in records:
            ok = True
            for pred in checked:
                stored = rec.attribute(pred.attribute)
                if stored is None or not self.schema.predicate_matches(pred, stored):
                    ok = False
                    break
            if ok:
                out.append(rec)
        return out

    # -- vector side ---------------------------------------------------------

    def put_embedding(self, device_id: int, values) -> np.ndarray:
        """Store the (normalized) embedding for a device; returns it."""
        vec = normalize(values, self.dim)
        with self._lock:
            if device_id not in self._devices:
                raise NotFoundError(f"no device with id {device_id}")
            self._embeddings[device_id] = vec
            return vec

    def get_embedding(self, device_id: int) -> np.ndarray | None:
        with self._lock:
            vec = self._embeddings.get(device_id)
            return None if vec is None else vec.copy()

    def vector_search(self, query, k: int) -> list[tuple[int, float]]:
        """Exact top-k by cosine, descending; ties broken by ascending id.

        ``k`` larger than the store returns the full ranking. Scores are
        per-device float64 cosines, matching an exhaustive scan bit for
        bit.
        """
        q = np.asarray(query, dtype=np.float64).ravel()
        if q.shape[0] != self.dim:
            raise SchemaValidationError(
                f"query dimension {q.shape[0]} != store dimension {self.dim}"
            )
        with self._lock:
            items = sorted(self._embeddings.items())
        scored = [(device_id, cosine_between(vec, q)) for device_id, vec in items]
        scored.sort(key=lambda t: (-t[1], t[0]))
        return scored[: max(k, 0)]

    # -- corpus JSON ---------------------------------------------------------

    def export_json(self) -> str:
        """Canonical corpus JSON: array of records sorted by id, embeddings
        inline as base64 little-endian float32. Byte-stable for identical
        store contents."""
        with self._lock:
            payload = [
                self._devices[i].to_dict(self._embeddings.get(i))
                for i in sorted(self._devices)
            ]
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def import_json(self, text: str) -> int:
        """Load a corpus JSON array, replacing current contents."""
        payload = json.loads(text)
        if not isinstance(payload, list):
            raise SchemaValidationError("corpus JSON must be an array of records")
        devices: dict[int, DeviceRecord] = {}
        embeddings: dict[int, np.ndarray] = {}
        for entry in payload:
            rec = DeviceRecord.from_dict(entry)
            if rec.id is None:
                raise SchemaValidationError(f"record {rec.name!r} has no id")
            self._validate(rec)
            devices[rec.id] = rec
            encoded = entry.get("embedding")
            if encoded:
                vec = decode_embedding(encoded)
                if vec.shape[0] != self.dim:
                    raise SchemaValidationError(
                        f"device {rec.id}: embedding dimension {vec.shape[0]} "
                        f"!= store dimension {self.dim}"
                    )
                norm = float(np.linalg.norm(vec.astype(np.float64)))
                if abs(norm - 1.0) >= 1e-6:
                    raise SchemaValidationError(
                        f"device {rec.id}: stored embedding norm {norm} not unit"
                    )
                # Kept verbatim (no renormalization) so export round-trips
                # byte-identically.
                embeddings[rec.id] = vec
        with self._lock:
            self._devices = devices
            self._embeddings = embeddings
            return len(devices)

    # -- directory persistence ----------------------------------------------

    def save(self, store_dir: str) -> None:
        os.makedirs(store_dir, exist_ok=True)
        path = os.path.join(store_dir, "corpus.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            f.write(self.export_json())
        os.replace(tmp, path)
        logger.info("saved %d devices to %s", self.device_count(), path)

    def load(self, store_dir: str) -> int:
        path = os.path.join(store_dir, "corpus.json")
        if not os.path.exists(path):
            return 0
        with open(path, encoding="utf-8") as f:
            return self.import_json(f.read())

    # -- validation -----------------------------------------------------------

    def _validate(self, record: DeviceRecord) -> None:
        if record.source_kind not in SOURCE_KINDS:
            raise SchemaValidationError(
                f"source_kind must be one of {SOURCE_KINDS}, got {record.source_kind!r}"
            )
        if record.review_status not in REVIEW_STATUSES:
            raise SchemaValidationError(
                f"review_status must be one of {REVIEW_STATUSES}, "
                f"got {record.review_status!r}"
            )
        if not record.name.strip():
            raise SchemaValidationError("device name must be non-empty")
        for attr_name, av in record.taxonomy.items():
            if attr_name not in self.schema:
                raise SchemaValidationError(
                    f"unknown attribute {attr_name!r} on device {record.name!r}"
                )
            _, canon = self.schema.canonicalize(attr_name, av.value)
            if canon not in av.vote_tally:
                raise SchemaValidationError(
                    f"{attr_name}: value {canon!r} missing from its vote tally"
                )
            for cand, weight in av.vote_tally.items():
                if weight <= 0:
                    raise SchemaValidationError(
                        f"{attr_name}: non-positive vote weight for {cand!r}"
                    )
        if record.review_status in ("approved", "corrected") and not record.source_links:
            raise SchemaValidationError(
                f"{record.review_status} device {record.name!r} needs >= 1 source link"
            )
        md = record.metadata
        if record.source_kind == "research_paper":
            if not md.title.strip() or not md.abstract_or_summary.strip():
                raise SchemaValidationError(
                    f"research_paper device {record.name!r} needs title and abstract"
                )
        elif not md.abstract_or_summary.strip():
            raise SchemaValidationError(
                f"commercial device {record.name!r} needs a summary"
            )


def free_text_and_enum_lines(schema: TaxonomySchema, record: DeviceRecord) -> list[str]:
    """'name: value' lines for the record's free-text and enum attributes,
    in schema order. This is the semantic half of the canonical embedding
    text; numeric and boolean attributes live on the structured side."""
    lines = []
    for attr in schema.attributes:
        if attr.value_kind not in (ValueKind.FREE_TEXT, ValueKind.ENUM):
            continue
        av = record.taxonomy.get(attr.name)
        if av is not None:
            lines.append(f"{attr.name}: {av.value}")
    return lines


def canonical_embedding_text(schema: TaxonomySchema, record: DeviceRecord) -> str:
    """Deterministic text a device is embedded from: title, then
    abstract/summary, then semantic taxonomy lines in schema order."""
    parts = [record.metadata.title or record.name, record.metadata.abstract_or_summary]
    parts.extend(free_text_and_enum_lines(schema, record))
    return "\n".join(p for p in parts if p)
