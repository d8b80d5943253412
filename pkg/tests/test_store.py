"""Dual store: predicate queries against a linear-scan oracle, exact
vector search against brute force, corpus JSON round-trips."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hapticrec.errors import NotFoundError, QueryError, SchemaValidationError
from hapticrec.schema import Op, Predicate, default_schema
from hapticrec.store import (
    AttributeValue,
    CorpusStore,
    DeviceRecord,
    Metadata,
    canonical_embedding_text,
    decode_embedding,
    encode_embedding,
    normalize,
)

# Frozen output of the independent linear scan for [dof >= 6, grounded = true]
# over the shipped 20-device corpus.
DOF6_GROUNDED_IDS = [1, 3, 5, 8, 10, 14, 16, 18, 20]


def make_record(device_id=None, name="PHANToM-like", dof=6, **attrs):
    taxonomy = {
        "dof": AttributeValue(value=dof, vote_tally={str(dof): 2.0}),
        "grounded": AttributeValue(value=True, vote_tally={"true": 2.0}),
    }
    for attr, value in attrs.items():
        canon = str(value).lower() if isinstance(value, bool) else str(value)
        taxonomy[attr] = AttributeValue(value=value, vote_tally={canon: 1.0})
    return DeviceRecord(
        id=device_id,
        name=name,
        source_kind="commercial",
        metadata=Metadata(title=name, abstract_or_summary=f"{name} summary."),
        taxonomy=taxonomy,
        review_status="approved",
        source_links=[f"https://example.com/{name.lower().replace(' ', '-')}"],
    )


# -- upsert / get -------------------------------------------------------------


def test_upsert_round_trip(empty_store):
    record = make_record(device_id=11)
    assert empty_store.upsert_device(record) == 11
    got = empty_store.get_device(11)
    assert got.name == record.name
    assert got.taxonomy["dof"].value == 6
    assert got.to_dict() == record.to_dict()


def test_upsert_replaces_same_id(empty_store):
    empty_store.upsert_device(make_record(device_id=7, name="First"))
    empty_store.upsert_device(make_record(device_id=7, name="Second"))
    assert empty_store.device_count() == 1
    assert empty_store.get_device(7).name == "Second"


def test_upsert_rejects_unknown_attribute(empty_store):
    record = make_record(device_id=1)
    record.taxonomy["antigravity"] = AttributeValue(value=True, vote_tally={"true": 1.0})
    with pytest.raises(SchemaValidationError, match="antigravity"):
        empty_store.upsert_device(record)


def test_upsert_rejects_value_outside_tally(empty_store):
    record = make_record(device_id=1)
    record.taxonomy["dof"] = AttributeValue(value=6, vote_tally={"7": 1.0})
    with pytest.raises(SchemaValidationError, match="dof"):
        empty_store.upsert_device(record)


def test_upsert_rejects_nonpositive_weight(empty_store):
    record = make_record(device_id=1)
    record.taxonomy["dof"] = AttributeValue(value=6, vote_tally={"6": 0.0})
    with pytest.raises(SchemaValidationError):
        empty_store.upsert_device(record)


def test_approved_record_needs_source_link(empty_store):
    record = make_record(device_id=1)
    record.source_links.clear()
    with pytest.raises(SchemaValidationError, match="source link"):
        empty_store.upsert_device(record)


def test_get_unknown_device(empty_store):
    with pytest.raises(NotFoundError):
        empty_store.get_device(999)


# -- structured queries -------------------------------------------------------


def test_empty_conjunction_returns_everything(store):
    assert [r.id for r in store.query_structured([])] == sorted(store.device_ids())
    assert store.device_count() == 20


def test_dof6_grounded_matches_frozen_oracle_set(store):
    result = store.query_structured(
        [Predicate("dof", Op.GE, 6), Predicate("grounded", Op.EQ, True)]
    )
    assert [r.id for r in result] == DOF6_GROUNDED_IDS


def test_missing_attribute_never_matches(empty_store):
    empty_store.upsert_device(make_record(device_id=1, dof=6))
    no_dof = make_record(device_id=2, name="No DOF")
    del no_dof.taxonomy["dof"]
    empty_store.upsert_device(no_dof)
    result = empty_store.query_structured([Predicate("dof", Op.GE, 6)])
    assert [r.id for r in result] == [1]
    # ... even for negative comparisons: unknown is not "not equal".
    result = empty_store.query_structured([Predicate("dof", Op.NE, 6)])
    assert [r.id for r in result] == []


def test_contains_predicate_on_free_text(empty_store):
    surgical = make_record(device_id=1, name="Scalpel", intended_task="Surgical simulation")
    crafts = make_record(device_id=2, name="Chisel", intended_task="wood carving")
    empty_store.upsert_device(surgical)
    empty_store.upsert_device(crafts)
    result = empty_store.query_structured(
        [Predicate("intended_task", Op.CONTAINS, "surgi")]
    )
    assert [r.id for r in result] == [1]


def test_incompatible_operator_is_query_error(store):
    with pytest.raises(QueryError):
        store.query_structured([Predicate("grounded", Op.GE, True)])
    with pytest.raises(QueryError):
        store.query_structured([Predicate("nonexistent", Op.EQ, 1)])


def test_results_ordered_by_id(store):
    ids = [r.id for r in store.query_structured([Predicate("grounded", Op.EQ, True)])]
    assert ids == sorted(ids)


def test_query_matches_linear_scan_oracle(store, corpus_json):
    records = oracles.corpus_records(corpus_json)
    cases = [
        [("dof", Op.GE, 6)],
        [("dof", Op.LT, 4), ("grounded", Op.EQ, True)],
        [("price_usd", Op.LE, 5000)],
        [("application_domain", Op.EQ, "medical")],
        [("body_part", Op.NE, "finger"), ("update_rate_hz", Op.GE, 1000)],
        [("commercially_available", Op.EQ, False)],
    ]
    for preds in cases:
        expected = oracles.scan(records, [(a, op.symbol, v) for a, op, v in preds])
        got = [r.id for r in store.query_structured([Predicate(*p) for p in preds])]
        assert got == expected, preds


# -- embeddings / vector search ------------------------------------------------


def test_put_get_embedding_round_trip(store):
    vec = store.get_embedding(3)
    assert vec is not None
    stored = store.put_embedding(3, vec)
    again = store.get_embedding(3)
    assert np.array_equal(stored, again)


def test_put_embedding_normalizes_on_write(empty_store):
    empty_store.upsert_device(make_record(device_id=1))
    stored = empty_store.put_embedding(1, np.full(256, 2.0))
    assert abs(float(np.linalg.norm(stored.astype(np.float64))) - 1.0) < 1e-6


def test_put_embedding_rejects_zero_vector(empty_store):
    empty_store.upsert_device(make_record(device_id=1))
    with pytest.raises(SchemaValidationError, match="zero"):
        empty_store.put_embedding(1, np.zeros(256))


def test_put_embedding_unknown_device(empty_store):
    with pytest.raises(NotFoundError):
        empty_store.put_embedding(42, np.ones(256))


def test_vector_search_self_similarity(store):
    query = store.get_embedding(3)
    results = store.vector_search(query, 1)
    device_id, cos = results[0]
    assert device_id == 3
    assert abs(cos - 1.0) < 1e-9


def test_vector_search_matches_brute_force(store, embedder):
    embeddings = {i: store.get_embedding(i) for i in store.device_ids()}
    for text in ("surgical training stylus", "portable gaming haptics", "rehab arm"):
        query = embedder.embed(text)
        expected = oracles.cosine_rank(embeddings, query, 5)
        assert store.vector_search(query, 5) == expected


def test_vector_search_tie_breaks_by_id(empty_store):
    vec = np.ones(256)
    for device_id in (9, 4):
        empty_store.upsert_device(make_record(device_id=device_id, name=f"Twin {device_id}"))
        empty_store.put_embedding(device_id, vec)
    results = empty_store.vector_search(vec, 2)
    assert [device_id for device_id, _ in results] == [4, 9]


def test_vector_search_k_exceeding_store(store):
    results = store.vector_search(store.get_embedding(1), 500)
    assert len(results) == 20


def test_vector_search_dimension_mismatch(store):
    with pytest.raises(SchemaValidationError, match="dimension"):
        store.vector_search(np.ones(64), 3)


@given(st.lists(st.floats(min_value=-100, max_value=100), min_size=8, max_size=8))
def test_normalize_produces_unit_vectors(values):
    arr = np.asarray(values, dtype=np.float64)
    if not np.any(arr):
        with pytest.raises(SchemaValidationError):
            normalize(values, 8)
        return
    unit = normalize(values, 8)
    assert abs(float(np.linalg.norm(unit.astype(np.float64))) - 1.0) < 1e-6
    # Direction preserved to within float32 quantization.
    cos = float(np.dot(unit.astype(np.float64), arr / np.linalg.norm(arr)))
    assert cos == pytest.approx(1.0, abs=1e-6)


# -- corpus JSON ---------------------------------------------------------------


def test_export_import_round_trip_is_byte_identical(store, schema):
    text = store.export_json()
    clone = CorpusStore(schema)
    clone.import_json(text)
    assert clone.export_json() == text


def test_packaged_corpus_is_export_stable(store, corpus_text):
    assert store.export_json() == corpus_text


def test_import_rejects_non_array(empty_store):
    with pytest.raises(SchemaValidationError, match="array"):
        empty_store.import_json('{"not": "a corpus"}')


def test_import_rejects_denormalized_embedding(empty_store, corpus_json):
    entry = dict(corpus_json[0])
    entry["embedding"] = encode_embedding(np.full(256, 0.5, dtype=np.float32))
    with pytest.raises(SchemaValidationError, match="norm"):
        empty_store.import_json(json.dumps([entry]))


def test_embedding_codec_round_trip():
    rng = np.random.default_rng(5)
    vec = rng.standard_normal(256).astype(np.float32)
    assert np.array_equal(decode_embedding(encode_embedding(vec)), vec)


def test_save_load_round_trip(store, schema, tmp_path):
    store.save(str(tmp_path / "db"))
    clone = CorpusStore(schema)
    assert clone.load(str(tmp_path / "db")) == 20
    assert clone.export_json() == store.export_json()


def test_replayed_upserts_are_idempotent(empty_store, schema):
    records = [make_record(device_id=i, name=f"Device {i}", dof=i) for i in (1, 2, 3)]
    for _ in range(2):
        for record in records:
            empty_store.upsert_device(record)
    clone = CorpusStore(schema)
    for record in records:
        clone.upsert_device(record)
    assert empty_store.export_json() == clone.export_json()


def test_canonical_embedding_text_covers_text_attributes(schema, store):
    record = store.get_device(1)
    text = canonical_embedding_text(schema, record)
    assert record.name in text or record.metadata.title in text
    # enum/free-text attributes appear as "name: value" lines in schema order
    assert "end_effector: stylus" in text
