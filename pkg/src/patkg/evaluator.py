"""Entity-prediction evaluation by corrupt-triple ranking.

For each test triple and requested side the true entity is ranked among
K sampled corruptions; MR, MRR and Hits@{1,3,10} aggregate the ranks.
Ties on the exact score get the midpoint rank by default. Corruptions
are seeded per (seed, triple, side), so processing order cannot change
the report.
"""

from __future__ import annotations

import hashlib
import logging
import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .archive import check_fingerprint
from .errors import EmptyTestSet, PoolTooSmall
from .graph import (
    CandidatePool,
    RELATION_INDEX,
    RelationKind,
    Side,
    Triple,
    TripleStore,
    sample_corrupt,
)
from .models import ModelParams, scores

log = logging.getLogger(__name__)

HITS_CUTOFFS = (1, 3, 10)


class Sides(Enum):
    HEAD_ONLY = "head"
    TAIL_ONLY = "tail"
    BOTH = "both"


class TieRule(Enum):
    MIDPOINT = "midpoint"
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"


@dataclass(frozen=True, slots=True)
class EvalConfig:
    corruptions_per_side: int = 100
    sides: Sides = Sides.BOTH
    pool: CandidatePool = CandidatePool.SAME_KIND
    filtered: bool = False
    seed: int = 0
    tie_rule: TieRule = TieRule.MIDPOINT

    def __post_init__(self) -> None:
        if self.corruptions_per_side < 1:
            raise ValueError("corruptions_per_side must be >= 1")


@dataclass(frozen=True, slots=True)
class RankRecord:
    triple: Triple
    side: Side
    rank: float
    n_corrupts: int


@dataclass(slots=True)
class RelationMetrics:
    queries: int
    mr: float
    mrr: float
    hits: dict[int, float]


@dataclass(slots=True)
class EvalReport:
    mr: float
    mrr: float
    hits: dict[int, float]
    n_queries: int
    per_relation: dict[RelationKind, RelationMetrics]
    config: EvalConfig
    records: list[RankRecord] = field(default_factory=list)


def _rank_from_scores(true_score: float, corrupt_scores: np.ndarray, tie_rule: TieRule) -> float:
    better = int((corrupt_scores > true_score).sum())
    ties = int((corrupt_scores == true_score).sum())
    if tie_rule is TieRule.OPTIMISTIC:
        return 1.0 + better
    if tie_rule is TieRule.PESSIMISTIC:
        return 1.0 + better + ties
    return 1.0 + better + ties / 2.0


def rank_target(
    params: ModelParams,
    triple: Triple,
    side: Side,
    corrupts: list[Triple],
    tie_rule: TieRule = TieRule.MIDPOINT,
) -> float:
    """Rank of the true entity among the given corruptions (1 is best)."""
    heads = np.array([triple.head] + [c.head for c in corrupts], dtype=np.int64)
    tails = np.array([triple.tail] + [c.tail for c in corrupts], dtype=np.int64)
    s = scores(params, heads, triple.relation, tails)
    return _rank_from_scores(float(s[0]), s[1:], tie_rule)


def _record_seed(seed: int, triple: Triple, side: Side) -> int:
    payload = struct.pack(
        "<qqqqq",
        seed,
        triple.head,
        RELATION_INDEX[triple.relation],
        triple.tail,
        0 if side is Side.HEAD else 1,
    )
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def _pool_size(store: TripleStore, triple: Triple, side: Side, config: EvalConfig) -> int:
    original = triple.head if side is Side.HEAD else triple.tail
    if config.pool is CandidatePool.SAME_KIND:
        kind = store.vocab.refs[original].kind
        n = len(store.vocab.ordinals_of_kind(kind)) - 1
    else:
        n = len(store.vocab) - 1
    if config.filtered:
        if side is Side.HEAD:
            known = store.index_tr.get((triple.tail, triple.relation), [])
        else:
            known = store.index_hr.get((triple.head, triple.relation), [])
        n -= len(set(known) - {original})
    return n


def evaluate(
    params: ModelParams,
    test: list[Triple],
    store: TripleStore,
    config: EvalConfig = EvalConfig(),
) -> EvalReport:
    """Rank every test triple on the requested sides and aggregate.

    When K exceeds a triple's candidate pool it is clamped to the pool
    (with a warning), which makes the ranking exhaustive for that query.
    """
    if not test:
        raise EmptyTestSet("no test triples")
    check_fingerprint(params, store.vocab)

    if config.sides is Sides.HEAD_ONLY:
        sides = (Side.HEAD,)
    elif config.sides is Sides.TAIL_ONLY:
        sides = (Side.TAIL,)
    else:
        sides = (Side.HEAD, Side.TAIL)

    clamped = 0
    skipped = 0
    records: list[RankRecord] = []
    for triple in test:
        for side in sides:
            available = _pool_size(store, triple, side, config)
            if available < 1:
                skipped += 1  # nothing to corrupt with; query is unrankable
                continue
            k = min(config.corruptions_per_side, available)
            if k < config.corruptions_per_side:
                clamped += 1
            corrupts = sample_corrupt(
                store,
                triple,
                k,
                side,
                pool=config.pool,
                filtered=config.filtered,
                rng_seed=_record_seed(config.seed, triple, side),
            )
            rank = rank_target(params, triple, side, corrupts, config.tie_rule)
            records.append(RankRecord(triple, side, rank, k))
    if skipped:
        log.warning("skipped %d queries with an empty corruption pool", skipped)
    if not records:
        raise PoolTooSmall("every query had an empty corruption pool")
    if clamped:
        log.warning(
            "K=%d exceeded the candidate pool for %d of %d queries; clamped to exhaustive ranking",
            config.corruptions_per_side, clamped, len(records),
        )

    per_relation: dict[RelationKind, RelationMetrics] = {}
    for rel in RelationKind:
        rel_ranks = np.sort([r.rank for r in records if r.triple.relation is rel])
        if rel_ranks.size:
            per_relation[rel] = RelationMetrics(
                queries=int(rel_ranks.size),
                mr=float(rel_ranks.mean()),
                mrr=float((1.0 / rel_ranks).mean()),
                hits={k: float((rel_ranks <= k).mean()) for k in HITS_CUTOFFS},
            )
    # sorting makes the sums independent of processing order
    ranks = np.sort([r.rank for r in records])
    return EvalReport(
        mr=float(ranks.mean()),
        mrr=float((1.0 / ranks).mean()),
        hits={k: float((ranks <= k).mean()) for k in HITS_CUTOFFS},
        n_queries=len(records),
        per_relation=per_relation,
        config=config,
        records=records,
    )
