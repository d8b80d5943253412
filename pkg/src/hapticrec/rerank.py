"""Candidate scoring and top-N shortlisting.

A candidate's score is the satisfied-constraint fraction plus the cosine
between its stored embedding and the query embedding, weighted equally:

    score = n_pos / n_all + cosine        (n_all == 0 => fraction is 0)

Both terms are always populated: candidates that only surfaced through
the structured path get their cosine computed here from the stored
vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .retrieval import CandidateSet, QueryPlan
from .store import CorpusStore, cosine_between

SHORTLIST_SIZE = 5


@dataclass(frozen=True)
class RankedDevice:
    device_id: int
    n_pos: int
    n_all: int
    cosine: float
    rank_score: float

    @property
    def spec_fraction(self) -> float:
        return self.n_pos / self.n_all if self.n_all > 0 else 0.0


def rank_score(n_pos: int, n_all: int, cosine: float) -> float:
    """Pure scoring function; also the contract checker for its inputs."""
    if n_all < 0 or n_pos < 0 or n_pos > n_all:
        raise ValueError(f"invalid match counts n_pos={n_pos}, n_all={n_all}")
    if not math.isfinite(cosine) or not -1.0 <= cosine <= 1.0:
        raise ValueError(f"cosine {cosine} outside [-1, 1]")
    fraction = n_pos / n_all if n_all > 0 else 0.0
    return fraction + cosine


def _clamp_cosine(value: float) -> float:
    # Float32 unit vectors can dot to 1 +/- a few ulp; pin to the legal range.
    return max(-1.0, min(1.0, value))


def rerank(
    candidates: CandidateSet,
    plan: QueryPlan,
    store: CorpusStore,
    n: int = SHORTLIST_SIZE,
) -> list[RankedDevice]:
    """Score every candidate and return the top ``n``, highest score
    first, ties broken by ascending device id. Output is independent of
    candidate iteration order."""
    query_vector = candidates.query_vector
    ranked = []
    for entry in candidates.entries.values():
        cosine = entry.cosine
        if cosine is None:
            stored = store.get_embedding(entry.device_id)
            if stored is not None and query_vector is not None:
                cosine = cosine_between(stored, query_vector)
            else:
                cosine = 0.0
        cosine = _clamp_cosine(cosine)
        n_pos = min(entry.matched_predicate_count, plan.n_all)
        ranked.append(
            RankedDevice(
                device_id=entry.device_id,
                n_pos=n_pos,
                n_all=plan.n_all,
                cosine=cosine,
                rank_score=rank_score(n_pos, plan.n_all, cosine),
            )
        )
    ranked.sort(key=lambda r: (-r.rank_score, r.device_id))
    return ranked[: max(n, 0)]
