"""Mini-batch SGD with negative sampling over a training triple store.

Reference mode (workers=1) is single-threaded and bit-deterministic per
seed; that is the mode every acceptance check uses. Parallel mode shards
each epoch's batches across threads that update disjoint parameter
copies merged by averaging at the end of the epoch, and is explicitly
not bit-deterministic.
"""

from __future__ import annotations

import concurrent.futures
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import archive as _archive
from .errors import EmptyStore, InvalidConfig, NumericalDivergence
from .graph import RELATION_SCHEMA, RelationKind, TripleStore
from .models import ModelKind, ModelParams, init_params, is_translational, weighted_gradients, scores

RELATIONS = list(RelationKind)


class LossKind(Enum):
    MARGIN_RANK = "margin_rank"
    LOGISTIC = "logistic"


@dataclass(frozen=True, slots=True)
class TrainConfig:
    epochs: int = 50
    batch_size: int = 256
    negatives_per_positive: int = 4
    learning_rate: float = 0.05
    margin: float = 1.0
    loss: LossKind = LossKind.MARGIN_RANK
    l2_coefficient: float = 0.0
    normalize_entities: bool = False
    seed: int = 0
    dim: int = 500

    def validate(self) -> None:
        if self.epochs < 1 or self.batch_size < 1 or self.negatives_per_positive < 1:
            raise InvalidConfig("epochs, batch_size and negatives_per_positive must be >= 1")
        if self.learning_rate < 0.0:
            raise InvalidConfig("learning_rate must be >= 0")
        if self.margin < 0.0 or self.l2_coefficient < 0.0 or self.dim < 1:
            raise InvalidConfig("margin/l2_coefficient must be >= 0 and dim >= 1")


@dataclass(slots=True)
class TrainReport:
    kind: ModelKind
    config: TrainConfig
    epoch_losses: list[float] = field(default_factory=list)
    wall_time_s: float = 0.0


_DEFAULT_LR = {
    ModelKind.TRANSE_L1: 0.5,
    ModelKind.TRANSE_L2: 2.0,
    ModelKind.TRANSR: 0.5,
    ModelKind.ROTATE: 1.0,
    ModelKind.RESCAL: 2.0,
    ModelKind.DISTMULT: 8.0,
    ModelKind.COMPLEX: 8.0,
}


def default_config(kind: ModelKind) -> TrainConfig:
    """Per-family defaults: margin loss for translational models, logistic
    for the semantic-matching ones. Either loss stays selectable."""
    if kind in (ModelKind.TRANSE_L1, ModelKind.TRANSE_L2, ModelKind.TRANSR, ModelKind.ROTATE):
        return TrainConfig(
            loss=LossKind.MARGIN_RANK,
            margin=1.0,
            learning_rate=_DEFAULT_LR[kind],
            normalize_entities=kind in (ModelKind.TRANSE_L1, ModelKind.TRANSE_L2),
        )
    return TrainConfig(loss=LossKind.LOGISTIC, l2_coefficient=1e-5, learning_rate=_DEFAULT_LR[kind])


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _log_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = -np.log1p(np.exp(-x[pos]))
    out[~pos] = x[~pos] - np.log1p(np.exp(x[~pos]))
    return out


def _kind_pools(store: TripleStore) -> dict[RelationKind, tuple[np.ndarray, np.ndarray]]:
    """Per relation: (head-kind pool, tail-kind pool) as ordinal arrays."""
    pools: dict[RelationKind, tuple[np.ndarray, np.ndarray]] = {}
    for rel, (hk, tk) in RELATION_SCHEMA.items():
        pools[rel] = (
            np.asarray(store.vocab.ordinals_of_kind(hk), dtype=np.int64),
            np.asarray(store.vocab.ordinals_of_kind(tk), dtype=np.int64),
        )
    return pools


def _draw_replacements(rng: np.random.Generator, pool: np.ndarray, originals: np.ndarray) -> np.ndarray:
    """Uniform draws from pool, rejecting collisions with the original entity."""
    out = pool[rng.integers(0, len(pool), size=len(originals))]
    bad = out == originals
    while np.any(bad):
        out[bad] = pool[rng.integers(0, len(pool), size=int(bad.sum()))]
        bad = out == originals
    return out


class _SgdState:
    """One epoch-sharded training state over a fixed triple array."""

    def __init__(self, params: ModelParams, config: TrainConfig,
                 pools: dict[RelationKind, tuple[np.ndarray, np.ndarray]]):
        self.params = params
        self.config = config
        self.pools = pools
        self.normalize = config.normalize_entities and is_translational(params.kind)

    def run_batch(self, heads: np.ndarray, rels: np.ndarray, tails: np.ndarray,
                  offset: int, rng: np.random.Generator) -> float:
        """One gradient step over `batch` positives; returns summed loss.

        `offset` is the epoch position of the first positive, used by the
        alternating corruption rule: the global negative-sample index
        (position * negatives_per_positive + slot) corrupts the head when
        even and the tail when odd.
        """
        cfg = self.config
        params = self.params
        m = len(heads)
        npp = cfg.negatives_per_positive

        neg_heads = np.repeat(heads, npp)
        neg_tails = np.repeat(tails, npp)
        neg_rels = np.repeat(rels, npp)
        sample_index = (offset + np.arange(m)).repeat(npp) * npp + np.tile(np.arange(npp), m)
        corrupt_head = sample_index % 2 == 0
        neg_valid = np.ones(m * npp, dtype=bool)

        for r_i, rel in enumerate(RELATIONS):
            head_pool, tail_pool = self.pools[rel]
            sel = (neg_rels == r_i) & corrupt_head
            if np.any(sel):
                if len(head_pool) < 2:
                    neg_valid[sel] = False  # no alternative entity to swap in
                else:
                    neg_heads[sel] = _draw_replacements(rng, head_pool, neg_heads[sel])
            sel = (neg_rels == r_i) & ~corrupt_head
            if np.any(sel):
                if len(tail_pool) < 2:
                    neg_valid[sel] = False
                else:
                    neg_tails[sel] = _draw_replacements(rng, tail_pool, neg_tails[sel])

        pos_scores = np.empty(m)
        neg_scores = np.empty(m * npp)
        for r_i, rel in enumerate(RELATIONS):
            sel = rels == r_i
            if np.any(sel):
                pos_scores[sel] = scores(params, heads[sel], rel, tails[sel])
            sel = neg_rels == r_i
            if np.any(sel):
                neg_scores[sel] = scores(params, neg_heads[sel], rel, neg_tails[sel])

        # Batch gradient is the mean over the batch's positives, so step
        # sizes do not scale with batch_size.
        if cfg.loss is LossKind.MARGIN_RANK:
            hinge = cfg.margin - np.repeat(pos_scores, npp) + neg_scores
            active = (hinge > 0.0) & neg_valid
            data_loss = float(hinge[active].sum())
            w_neg = active.astype(np.float64) / m
            w_pos = -active.reshape(m, npp).sum(axis=1).astype(np.float64) / m
        else:
            neg_ll = np.where(neg_valid, _log_sigmoid(-neg_scores), 0.0)
            data_loss = float(-_log_sigmoid(pos_scores).sum() - neg_ll.sum())
            w_pos = -_sigmoid(-pos_scores) / m
            w_neg = np.where(neg_valid, _sigmoid(neg_scores), 0.0) / m

        all_heads = np.concatenate([heads, neg_heads])
        all_tails = np.concatenate([tails, neg_tails])
        all_rels = np.concatenate([rels, neg_rels])
        all_w = np.concatenate([w_pos, w_neg])
        nonzero = all_w != 0.0

        touched = np.unique(np.concatenate([all_heads, all_tails]))
        touched_rels = [rel for r_i, rel in enumerate(RELATIONS) if np.any(all_rels == r_i)]
        loss = data_loss
        if cfg.l2_coefficient > 0.0:
            sq = float((params.entities[touched] ** 2).sum())
            for rel in touched_rels:
                for block in params.relations[rel].values():
                    sq += float((block**2).sum())
            loss += cfg.l2_coefficient * sq
            decay = cfg.learning_rate * 2.0 * cfg.l2_coefficient
            params.entities[touched] -= decay * params.entities[touched]
            for rel in touched_rels:
                for block in params.relations[rel].values():
                    block -= decay * block

        lr = cfg.learning_rate
        for r_i, rel in enumerate(RELATIONS):
            sel = (all_rels == r_i) & nonzero
            if not np.any(sel):
                continue
            dH, dT, dRel = weighted_gradients(
                params, all_heads[sel], rel, all_tails[sel], all_w[sel]
            )
            np.add.at(params.entities, all_heads[sel], -lr * dH)
            np.add.at(params.entities, all_tails[sel], -lr * dT)
            for name, g in dRel.items():
                params.relations[rel][name] -= lr * g

        if self.normalize and lr > 0.0:
            rows = params.entities[touched]
            params.entities[touched] = rows / np.linalg.norm(rows, axis=1, keepdims=True)

        finite = np.isfinite(loss) and np.isfinite(params.entities[touched]).all()
        finite = finite and all(
            np.isfinite(block).all()
            for rel in touched_rels
            for block in params.relations[rel].values()
        )
        if not finite:
            raise NumericalDivergence("non-finite loss or parameter")
        return loss


def _train_shard(state: _SgdState, heads, rels, tails, order, rng_seed: int) -> float:
    rng = np.random.default_rng(rng_seed)
    batch = state.config.batch_size
    total = 0.0
    for start in range(0, len(order), batch):
        sel = order[start : start + batch]
        try:
            total += state.run_batch(heads[sel], rels[sel], tails[sel], start, rng)
        except NumericalDivergence as exc:
            raise NumericalDivergence(f"batch {start // batch}: {exc}") from None
    return total


def train(
    train_store: TripleStore,
    kind: ModelKind,
    config: TrainConfig,
    workers: int = 1,
) -> tuple[ModelParams, TrainReport]:
    """Train `kind` on the store's triples and return (params, report).

    Negatives are drawn per positive from the same-kind pool, unfiltered,
    alternating head/tail corruption by global sample index. With
    learning_rate 0 the parameters come back bit-identical to the init.
    """
    config.validate()
    if len(train_store) == 0:
        raise EmptyStore("training store has no triples")
    t0 = time.perf_counter()
    params = init_params(
        kind, len(train_store.vocab), config.dim, config.seed, train_store.vocab.fingerprint()
    )
    heads, rels, tails = train_store.triple_arrays()
    pools = _kind_pools(train_store)
    report = TrainReport(kind=kind, config=config)
    shuffle_rng = np.random.default_rng(config.seed + 1)

    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(len(heads))
        try:
            if workers <= 1:
                state = _SgdState(params, config, pools)
                total = _train_shard(
                    state, heads, rels, tails, order, rng_seed=config.seed + 10_000 + epoch
                )
            else:
                total = _train_parallel_epoch(params, config, pools, heads, rels, tails, order,
                                              epoch, workers)
        except NumericalDivergence as exc:
            raise NumericalDivergence(f"epoch {epoch}: {exc}") from None
        report.epoch_losses.append(total / len(heads))

    report.wall_time_s = time.perf_counter() - t0
    return params, report


def _train_parallel_epoch(params, config, pools, heads, rels, tails, order, epoch, workers) -> float:
    """Disjoint parameter copies per shard, merged by averaging. Not bit-deterministic."""
    shards = np.array_split(order, workers)
    copies = [params.copy() for _ in shards]
    states = [_SgdState(c, config, pools) for c in copies]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_train_shard, st, heads, rels, tails, shard,
                        config.seed + 10_000 + epoch * workers + i)
            for i, (st, shard) in enumerate(zip(states, shards))
        ]
        total = sum(f.result() for f in futures)
    params.entities[:] = np.mean([c.entities for c in copies], axis=0)
    for rel in RELATIONS:
        for name in params.relations[rel]:
            params.relations[rel][name][:] = np.mean(
                [c.relations[rel][name] for c in copies], axis=0
            )
    return total


def checkpoint(params: ModelParams, path) -> None:
    """Write params so that `restore` reproduces them bit-exactly."""
    _archive.save_archive(path, params, vocab=None, encoding="float64")


def restore(path, store: TripleStore | None = None) -> ModelParams:
    """Load checkpointed params; verify against `store`'s vocabulary if given."""
    params, _ = _archive.load_archive(path)
    if store is not None:
        _archive.check_fingerprint(params, store.vocab)
    return params
