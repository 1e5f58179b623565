"""Parameter tables and score functions for the seven embedding models.

Every model is oriented so that a higher score means a more plausible
fact:

    TransE_L1   -|h + r - t|_1
    TransE_L2   -|h + r - t|_2
    TransR      -|M h + r - M t|_2^2
    RESCAL      h' M t
    DistMult    h' diag(r) t
    ComplEx     Re(sum_i r_i h_i conj(t_i))
    RotatE      -|h o r - t|_2     (o = complex Hadamard, |r_i| = 1)

Complex-valued tables (ComplEx, RotatE) are stored as 2d-real rows with
the real parts in the first d columns and the imaginary parts in the
last d. All score/gradient kernels accept index arrays so callers can
batch; the scalar `score` and `grad` entry points are the single-triple
contract on top of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import UnknownOrdinal
from .graph import RelationKind

WEIGHT_BOUND_NUMERATOR = 6.0  # init entries are uniform in +-6/sqrt(dim)


class ModelKind(Enum):
    TRANSE_L1 = "transe_l1"
    TRANSE_L2 = "transe_l2"
    TRANSR = "transr"
    RESCAL = "rescal"
    DISTMULT = "distmult"
    COMPLEX = "complex"
    ROTATE = "rotate"


COMPLEX_MODELS = frozenset({ModelKind.COMPLEX, ModelKind.ROTATE})
TRANSLATIONAL_MODELS = frozenset(
    {ModelKind.TRANSE_L1, ModelKind.TRANSE_L2, ModelKind.TRANSR, ModelKind.ROTATE}
)


def is_complex(kind: ModelKind) -> bool:
    return kind in COMPLEX_MODELS


def is_translational(kind: ModelKind) -> bool:
    return kind in TRANSLATIONAL_MODELS


def relation_block_shapes(kind: ModelKind, dim: int) -> dict[str, tuple[int, ...]]:
    """Parameter blocks (name -> shape) held per relation by each model."""
    if kind in (ModelKind.TRANSE_L1, ModelKind.TRANSE_L2, ModelKind.DISTMULT):
        return {"vec": (dim,)}
    if kind is ModelKind.COMPLEX:
        return {"vec": (2 * dim,)}
    if kind is ModelKind.ROTATE:
        return {"phase": (dim,)}
    if kind is ModelKind.RESCAL:
        return {"mat": (dim, dim)}
    if kind is ModelKind.TRANSR:
        return {"vec": (dim,), "mat": (dim, dim)}
    raise ValueError(kind)


@dataclass
class ModelParams:
    """Entity table plus per-relation parameter blocks for one model."""

    kind: ModelKind
    dim: int
    entities: np.ndarray  # (n, dim) real models, (n, 2*dim) complex models
    relations: dict[RelationKind, dict[str, np.ndarray]]
    vocab_fingerprint: str

    @property
    def n_entities(self) -> int:
        return self.entities.shape[0]

    @property
    def row_dim(self) -> int:
        return self.entities.shape[1]

    def entity_row(self, ordinal: int) -> np.ndarray:
        if not 0 <= ordinal < self.n_entities:
            raise UnknownOrdinal(f"ordinal {ordinal} outside entity table")
        return self.entities[ordinal]

    def copy(self) -> ModelParams:
        return ModelParams(
            kind=self.kind,
            dim=self.dim,
            entities=self.entities.copy(),
            relations={
                r: {name: block.copy() for name, block in blocks.items()}
                for r, blocks in self.relations.items()
            },
            vocab_fingerprint=self.vocab_fingerprint,
        )


def init_params(
    kind: ModelKind, n_entities: int, dim: int, seed: int = 0, vocab_fingerprint: str = ""
) -> ModelParams:
    """Seeded uniform init in [-6/sqrt(dim), +6/sqrt(dim)].

    Entity rows of translational models are then L2-normalized; RotatE
    relation phases are uniform in [-pi, pi) so every implied rotation
    component has unit modulus by construction.
    """
    if n_entities < 1 or dim < 1:
        raise ValueError("n_entities and dim must be >= 1")
    rng = np.random.default_rng(seed)
    bound = WEIGHT_BOUND_NUMERATOR / np.sqrt(dim)
    row_dim = 2 * dim if is_complex(kind) else dim
    entities = rng.uniform(-bound, bound, size=(n_entities, row_dim))
    if is_translational(kind):
        entities /= np.linalg.norm(entities, axis=1, keepdims=True)
    relations: dict[RelationKind, dict[str, np.ndarray]] = {}
    for rel in RelationKind:
        blocks: dict[str, np.ndarray] = {}
        for name, shape in sorted(relation_block_shapes(kind, dim).items()):
            if name == "phase":
                blocks[name] = rng.uniform(-np.pi, np.pi, size=shape)
            else:
                blocks[name] = rng.uniform(-bound, bound, size=shape)
        relations[rel] = blocks
    return ModelParams(kind, dim, entities, relations, vocab_fingerprint)


def _split_complex(rows: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    return rows[..., :dim], rows[..., dim:]


def _check_ordinals(params: ModelParams, idx: np.ndarray) -> None:
    if idx.size and (idx.min() < 0 or idx.max() >= params.n_entities):
        raise UnknownOrdinal("ordinal outside entity table")


def scores(params: ModelParams, heads: np.ndarray, relation: RelationKind, tails: np.ndarray) -> np.ndarray:
    """Vectorized scores for triples sharing one relation."""
    heads = np.asarray(heads, dtype=np.int64)
    tails = np.asarray(tails, dtype=np.int64)
    _check_ordinals(params, heads)
    _check_ordinals(params, tails)
    H = params.entities[heads]
    T = params.entities[tails]
    blocks = params.relations[relation]
    kind, d = params.kind, params.dim

    if kind is ModelKind.TRANSE_L1:
        return -np.abs(H + blocks["vec"] - T).sum(axis=1)
    if kind is ModelKind.TRANSE_L2:
        return -np.linalg.norm(H + blocks["vec"] - T, axis=1)
    if kind is ModelKind.TRANSR:
        M = blocks["mat"]
        U = (H - T) @ M.T + blocks["vec"]
        return -(U * U).sum(axis=1)
    if kind is ModelKind.RESCAL:
        return ((H @ blocks["mat"]) * T).sum(axis=1)
    if kind is ModelKind.DISTMULT:
        # (H*T)*r keeps score(h,r,t) == score(t,r,h) bit-exact.
        return ((H * T) * blocks["vec"]).sum(axis=1)
    if kind is ModelKind.COMPLEX:
        h_re, h_im = _split_complex(H, d)
        t_re, t_im = _split_complex(T, d)
        r_re, r_im = _split_complex(blocks["vec"], d)
        return (
            r_re * (h_re * t_re + h_im * t_im) + r_im * (h_re * t_im - h_im * t_re)
        ).sum(axis=1)
    if kind is ModelKind.ROTATE:
        h_re, h_im = _split_complex(H, d)
        t_re, t_im = _split_complex(T, d)
        c, s = np.cos(blocks["phase"]), np.sin(blocks["phase"])
        u_re = h_re * c - h_im * s - t_re
        u_im = h_re * s + h_im * c - t_im
        return -np.sqrt((u_re * u_re + u_im * u_im).sum(axis=1))
    raise ValueError(kind)


def score(params: ModelParams, h: int, r: RelationKind, t: int) -> float:
    """Plausibility of one triple; higher is more plausible."""
    return float(scores(params, np.array([h]), r, np.array([t]))[0])


@dataclass(slots=True)
class ScoreGradient:
    """Gradients of one triple's score w.r.t. every touched block.

    `head`/`tail` match the entity-row layout; `relation` maps block
    name to an array shaped like the block. `nondifferentiable` flags
    kink points (L1 coordinate at zero, norms at zero), where the zero
    subgradient component is returned.
    """

    head: np.ndarray
    tail: np.ndarray
    relation: dict[str, np.ndarray]
    nondifferentiable: bool = False


def weighted_gradients(
    params: ModelParams,
    heads: np.ndarray,
    relation: RelationKind,
    tails: np.ndarray,
    weights: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, dict[str, np.ndarray]]:
    """Per-sample entity gradients and weight-summed relation gradients.

    Returns (dH, dT, dRel) where dH[i] = weights[i] * d score_i / d head_i
    (same for tails) and dRel[name] = sum_i weights[i] * d score_i / d block.
    Kink points contribute zero subgradients.
    """
    heads = np.asarray(heads, dtype=np.int64)
    tails = np.asarray(tails, dtype=np.int64)
    _check_ordinals(params, heads)
    _check_ordinals(params, tails)
    w = np.asarray(weights, dtype=np.float64)[:, None]
    H = params.entities[heads]
    T = params.entities[tails]
    blocks = params.relations[relation]
    kind, d = params.kind, params.dim

    if kind is ModelKind.TRANSE_L1:
        S = np.sign(H + blocks["vec"] - T)
        dH = -w * S
        return dH, -dH, {"vec": dH.sum(axis=0)}
    if kind is ModelKind.TRANSE_L2:
        D = H + blocks["vec"] - T
        n = np.linalg.norm(D, axis=1, keepdims=True)
        G = np.divide(D, n, out=np.zeros_like(D), where=n > 0)
        dH = -w * G
        return dH, -dH, {"vec": dH.sum(axis=0)}
    if kind is ModelKind.TRANSR:
        M = blocks["mat"]
        diff = H - T
        U = diff @ M.T + blocks["vec"]
        WU = w * U
        dH = -2.0 * (WU @ M)
        d_mat = -2.0 * WU.T @ diff
        return dH, -dH, {"mat": d_mat, "vec": -2.0 * WU.sum(axis=0)}
    if kind is ModelKind.RESCAL:
        M = blocks["mat"]
        dH = w * (T @ M.T)
        dT = w * (H @ M)
        return dH, dT, {"mat": (w * H).T @ T}
    if kind is ModelKind.DISTMULT:
        r = blocks["vec"]
        return w * (T * r), w * (H * r), {"vec": (w * (H * T)).sum(axis=0)}
    if kind is ModelKind.COMPLEX:
        h_re, h_im = _split_complex(H, d)
        t_re, t_im = _split_complex(T, d)
        r_re, r_im = _split_complex(blocks["vec"], d)
        dH = w * np.concatenate([r_re * t_re + r_im * t_im, r_re * t_im - r_im * t_re], axis=1)
        dT = w * np.concatenate([r_re * h_re - r_im * h_im, r_re * h_im + r_im * h_re], axis=1)
        d_vec = (
            w * np.concatenate([h_re * t_re + h_im * t_im, h_re * t_im - h_im * t_re], axis=1)
        ).sum(axis=0)
        return dH, dT, {"vec": d_vec}
    if kind is ModelKind.ROTATE:
        h_re, h_im = _split_complex(H, d)
        t_re, t_im = _split_complex(T, d)
        c, s = np.cos(blocks["phase"]), np.sin(blocks["phase"])
        hr_re = h_re * c - h_im * s
        hr_im = h_re * s + h_im * c
        u_re = hr_re - t_re
        u_im = hr_im - t_im
        n = np.sqrt((u_re * u_re + u_im * u_im).sum(axis=1, keepdims=True))
        inv = np.divide(1.0, n, out=np.zeros_like(n), where=n > 0)
        g_re, g_im = u_re * inv, u_im * inv  # d(-score)/d u
        dH = -w * np.concatenate([g_re * c + g_im * s, -g_re * s + g_im * c], axis=1)
        dT = w * np.concatenate([g_re, g_im], axis=1)
        d_phase = (w * (g_re * hr_im - g_im * hr_re)).sum(axis=0)
        return dH, dT, {"phase": d_phase}
    raise ValueError(kind)


def grad(params: ModelParams, h: int, r: RelationKind, t: int) -> ScoreGradient:
    """Analytic gradient of `score` for a single triple.

    Matches central finite differences to relative error < 1e-4 away
    from kink points; at kinks the zero subgradient is returned and
    `nondifferentiable` is set.
    """
    heads = np.array([h], dtype=np.int64)
    tails = np.array([t], dtype=np.int64)
    dH, dT, dRel = weighted_gradients(params, heads, r, tails, np.ones(1))
    flag = _at_kink(params, heads, r, tails)
    return ScoreGradient(head=dH[0], tail=dT[0], relation=dRel, nondifferentiable=flag)


def _at_kink(params: ModelParams, heads: np.ndarray, r: RelationKind, tails: np.ndarray) -> bool:
    kind, d = params.kind, params.dim
    H = params.entities[heads]
    T = params.entities[tails]
    blocks = params.relations[r]
    if kind is ModelKind.TRANSE_L1:
        return bool(np.any(H + blocks["vec"] - T == 0.0))
    if kind is ModelKind.TRANSE_L2:
        return bool(np.all(H + blocks["vec"] - T == 0.0))
    if kind is ModelKind.ROTATE:
        h_re, h_im = _split_complex(H, d)
        t_re, t_im = _split_complex(T, d)
        c, s = np.cos(blocks["phase"]), np.sin(blocks["phase"])
        u_re = h_re * c - h_im * s - t_re
        u_im = h_re * s + h_im * c - t_im
        return bool(np.all(u_re == 0.0) and np.all(u_im == 0.0))
    return False
