"""Structured text / TSV / CSV exports with stable ordering.

Every writer emits keys in a fixed order and formats floats with
`repr`-faithful 12-significant-digit text, so identical inputs produce
byte-identical files and diffs stay meaningful.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .evaluator import EvalReport, HITS_CUTOFFS
from .expansion import ExpansionReport, cumulative_distribution
from .graph import EntityKind, RelationKind, Vocabulary
from .models import ModelParams
from .proximity import NeighborHit
from .trainer import TrainReport


def fnum(x: float) -> str:
    return format(float(x), ".12g")


def eval_report_text(report: EvalReport, model_name: str) -> str:
    cfg = report.config
    lines = [
        "patkg eval-report",
        f"model: {model_name}",
        f"queries: {report.n_queries}",
        f"mr: {fnum(report.mr)}",
        f"mrr: {fnum(report.mrr)}",
    ]
    lines += [f"hits@{k}: {fnum(report.hits[k])}" for k in HITS_CUTOFFS]
    lines.append(
        "config: K={} sides={} pool={} filtered={} seed={} tie={}".format(
            cfg.corruptions_per_side, cfg.sides.value, cfg.pool.value,
            str(cfg.filtered).lower(), cfg.seed, cfg.tie_rule.value,
        )
    )
    lines.append("per-relation:")
    lines.append("relation\tqueries\tmr\tmrr\t" + "\t".join(f"hits@{k}" for k in HITS_CUTOFFS))
    for rel in RelationKind:
        metrics = report.per_relation.get(rel)
        if metrics is None:
            continue
        lines.append(
            "\t".join(
                [rel.value, str(metrics.queries), fnum(metrics.mr), fnum(metrics.mrr)]
                + [fnum(metrics.hits[k]) for k in HITS_CUTOFFS]
            )
        )
    return "\n".join(lines) + "\n"


def train_report_text(report: TrainReport) -> str:
    cfg = report.config
    lines = [
        "patkg train-report",
        f"model: {report.kind.value}",
        f"epochs: {cfg.epochs}",
        f"batch_size: {cfg.batch_size}",
        f"negatives_per_positive: {cfg.negatives_per_positive}",
        f"learning_rate: {fnum(cfg.learning_rate)}",
        f"margin: {fnum(cfg.margin)}",
        f"loss: {cfg.loss.value}",
        f"l2_coefficient: {fnum(cfg.l2_coefficient)}",
        f"normalize_entities: {str(cfg.normalize_entities).lower()}",
        f"seed: {cfg.seed}",
        f"dim: {cfg.dim}",
        "epoch_mean_loss:",
    ]
    lines += [f"{i + 1}\t{fnum(loss)}" for i, loss in enumerate(report.epoch_losses)]
    return "\n".join(lines) + "\n"


def neighbors_tsv(hits: list[NeighborHit]) -> str:
    lines = ["rank\tentity\tkind\tproximity"]
    for rank, hit in enumerate(hits, start=1):
        label = f"{hit.entity.kind.value}:{hit.entity.source_id}"
        lines.append(f"{rank}\t{label}\t{hit.kind.value}\t{fnum(hit.proximity)}")
    return "\n".join(lines) + "\n"


def matrix_tsv(labels: list[str], matrix: np.ndarray) -> str:
    lines = ["entity\t" + "\t".join(labels)]
    for label, row in zip(labels, matrix):
        lines.append(label + "\t" + "\t".join(fnum(v) for v in row))
    return "\n".join(lines) + "\n"


def embeddings_tsv(params: ModelParams, vocab: Vocabulary,
                   kind_filter: set[EntityKind] | None = None) -> str:
    lines = []
    for ref in vocab.refs:
        if kind_filter and ref.kind not in kind_filter:
            continue
        row = params.entities[ref.ordinal]
        lines.append(f"{ref.kind.value}:{ref.source_id}\t" + "\t".join(fnum(v) for v in row))
    return "\n".join(lines) + ("\n" if lines else "")


def expansion_report_text(report: ExpansionReport) -> str:
    lines = ["patkg expansion-report", f"min_patents: {report.min_patents}"]
    for agent_kind in (EntityKind.INVENTOR, EntityKind.ASSIGNEE):
        result = report.classes.get(agent_kind)
        if result is None:
            continue
        lines.append(f"agent_class: {agent_kind.value}")
        lines.append(f"agents: {len(result.agent_ids)}")
        lines.append("model\tcombined_auc\texplainability\tprofile_entries")
        for name in sorted(result.combined_auc):
            lines.append(
                "\t".join(
                    [
                        name,
                        fnum(result.combined_auc[name]),
                        fnum(result.explainability[name]),
                        str(len(result.combined_profiles[name])),
                    ]
                )
            )
    return "\n".join(lines) + "\n"


def expansion_cdf_csv(report: ExpansionReport, agent_kind: EntityKind) -> str:
    """`model,x,proportion` rows of each model's combined-profile CDF."""
    result = report.classes[agent_kind]
    lines = ["model,x,proportion"]
    for name in sorted(result.combined_profiles):
        for x, proportion in cumulative_distribution(result.combined_profiles[name]):
            lines.append(f"{name},{fnum(x)},{fnum(proportion)}")
    return "\n".join(lines) + "\n"


def expansion_profiles_csv(report: ExpansionReport, agent_kind: EntityKind) -> str:
    """`model,position,percentile` rows of each model's combined profile."""
    result = report.classes[agent_kind]
    lines = ["model,position,percentile"]
    for name in sorted(result.combined_profiles):
        for i, pp in enumerate(result.combined_profiles[name].entries, start=1):
            lines.append(f"{name},{i},{fnum(pp)}")
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
