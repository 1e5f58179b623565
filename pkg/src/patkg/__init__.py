"""Knowledge-graph embeddings and knowledge proximity for patent metadata.

The package builds a five-relation typed graph from patent metadata,
trains translational and semantic-matching embedding models on it,
evaluates them by corrupt-triple ranking, and measures knowledge
proximity between (kind-transformed) entity embeddings, including the
domain-expansion study over agent portfolios.
"""

from .errors import PatkgError
from .graph import (
    CandidatePool,
    EntityKind,
    EntityRef,
    RelationKind,
    Side,
    SplitSpec,
    Triple,
    TripleStore,
    Vocabulary,
    generate_synthetic,
    sample_corrupt,
    split,
    stats,
)
from .ingestion import (
    AgentPortfolio,
    PatentRecord,
    derive_comprise,
    load_portfolios,
    load_store,
    load_universe,
    parse_triples_file,
    write_triples_file,
)
from .models import ModelKind, ModelParams, grad, init_params, score, scores
from .trainer import LossKind, TrainConfig, TrainReport, checkpoint, default_config, restore, train
from .evaluator import EvalConfig, EvalReport, RankRecord, Sides, TieRule, evaluate, rank_target
from .proximity import (
    NeighborHit,
    TransformMode,
    TransformRule,
    cosine,
    knowledge_proximity,
    nearest_neighbors,
    pairwise_matrix,
    transform,
    transform_rule,
)
from .expansion import (
    DomainState,
    ExpansionProfile,
    ExpansionReport,
    auc,
    build_profile,
    combine,
    cumulative_distribution,
    domain_agent_proximity,
    explainability,
    group_proximity,
    group_proximity_matrix,
    percentiles,
    run_study,
)
from .archive import load_archive, save_archive

__version__ = "0.1.0"
