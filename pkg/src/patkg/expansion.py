"""Domain-expansion study: proximity percentiles, profiles, AUC, explainability.

An agent's home domains are the classification groups it already holds
patents in, weighted by patent counts. The proximity of the home domain
to a target group j is the patent-count-weighted mean of pairwise group
proximities:

    proximity(a, j) = sum_i phi(i, j) * a_i / sum_i a_i      over home i

Targets are ranked by this value, and the rank percentile
(N - r) / (N - 1) of each group the agent actually enters next is
appended to its expansion profile. The cumulative distribution
F(x) = |{pp >= x}| / n of a profile integrates to the profile mean,
which is the AUC used to compare embedding models; explainability is
the fraction of agents for which a model attains the highest AUC.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .archive import check_fingerprint
from .errors import (
    EmptyHome,
    EmptyPortfolio,
    EmptyProfile,
    InconsistentModelSets,
    TargetInHome,
    TooFewTargets,
    UnknownGroup,
    ZeroVector,
)
from .graph import EntityKind, TripleStore, Vocabulary
from .ingestion import AgentPortfolio
from .models import ModelParams

log = logging.getLogger(__name__)


@dataclass(slots=True)
class DomainState:
    """Patent counts per home group; all other universe groups are targets."""

    home: dict[str, int]
    targets: set[str]


@dataclass(slots=True)
class ExpansionProfile:
    agent_id: str
    agent_kind: EntityKind | None
    entries: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)


def group_proximity(params: ModelParams, vocab: Vocabulary, g1: str, g2: str) -> float:
    """Raw cosine between two group embedding rows."""
    from .proximity import cosine

    u = params.entity_row(vocab.ordinal_of(EntityKind.GROUP, g1))
    v = params.entity_row(vocab.ordinal_of(EntityKind.GROUP, g2))
    return cosine(u, v)


def group_proximity_matrix(
    params: ModelParams, vocab: Vocabulary, universe: list[str], floor_negative: bool = True
) -> np.ndarray:
    """Pairwise group cosines over the universe, unit diagonal.

    Negative cosines are floored at 0 by default so the weighted mean
    stays within the study's [0, 1] framing; pass floor_negative=False
    for raw cosines.
    """
    rows = np.stack(
        [params.entity_row(vocab.ordinal_of(EntityKind.GROUP, code)) for code in universe]
    )
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ZeroVector("group embedding has zero norm")
    unit = rows / norms
    phi = np.clip(unit @ unit.T, -1.0, 1.0)
    phi = (phi + phi.T) / 2.0
    np.fill_diagonal(phi, 1.0)
    if floor_negative:
        np.maximum(phi, 0.0, out=phi)
    return phi


def domain_agent_proximity(state: DomainState, j: str, phi) -> float:
    """Patent-count-weighted mean of home-to-target proximities.

    `phi(i, j)` supplies the pairwise group proximity; absent links are
    simply phi = 0. The result lies within [min phi, max phi] over the
    home domains (it is a convex combination).
    """
    if not state.home:
        raise EmptyHome("agent has no home domains")
    if j not in state.targets:
        raise TargetInHome(f"group {j!r} is not a target domain")
    num = 0.0
    den = 0
    for i, count in state.home.items():
        num += phi(i, j) * count
        den += count
    return num / den


def percentiles(values: list[tuple[str, float]]) -> dict[str, float]:
    """Rank percentiles (N - r) / (N - 1), descending by proximity.

    The top-ranked group gets exactly 1 and the bottom-ranked exactly 0;
    exact ties receive the mean of their ranks before the formula.
    """
    n = len(values)
    if n < 2:
        raise TooFewTargets("percentiles need at least two target groups")
    ordered = sorted(values, key=lambda kv: -kv[1])
    out: dict[str, float] = {}
    i = 0
    while i < n:
        j = i
        while j + 1 < n and ordered[j + 1][1] == ordered[i][1]:
            j += 1
        mean_rank = (i + 1 + j + 1) / 2.0
        pp = (n - mean_rank) / (n - 1)
        for k in range(i, j + 1):
            out[ordered[k][0]] = pp
        i = j + 1
    return out


def build_profile(
    params: ModelParams,
    vocab: Vocabulary,
    portfolio: AgentPortfolio,
    universe: list[str],
    floor_negative: bool = True,
) -> ExpansionProfile:
    """Expansion profile of one agent under one model's embeddings."""
    phi = group_proximity_matrix(params, vocab, universe, floor_negative)
    return profile_from_phi(phi, portfolio, universe)


def profile_from_phi(
    phi: np.ndarray, portfolio: AgentPortfolio, universe: list[str]
) -> ExpansionProfile:
    """Same as `build_profile` given a precomputed universe proximity matrix.

    The first patent seeds the home domains without emitting a
    percentile. For each later patent the percentiles of all current
    targets are computed against the pre-patent state; each group of the
    patent not yet in the home appends its percentile (new groups in
    lexicographic order), and only then are the patent's groups counted
    into the home. Emission is skipped (and logged) when fewer than two
    targets remain.
    """
    if len(portfolio) == 0:
        raise EmptyPortfolio(f"agent {portfolio.agent_id} has no patents")
    index = {code: i for i, code in enumerate(universe)}
    for record in portfolio.records:
        for code in record.groups:
            if code not in index:
                raise UnknownGroup(f"group {code!r} not in the study universe")

    n = len(universe)
    counts = np.zeros(n, dtype=np.int64)
    profile = ExpansionProfile(portfolio.agent_id, portfolio.agent_kind)
    first = portfolio.records[0]
    for code in first.groups:
        counts[index[code]] += 1

    for record in portfolio.records[1:]:
        home_mask = counts > 0
        target_idx = np.nonzero(~home_mask)[0]
        new_groups = sorted(g for g in record.groups if not home_mask[index[g]])
        if new_groups:
            if len(target_idx) < 2:
                log.info(
                    "agent %s: %d target domains left, skipping percentile emission",
                    portfolio.agent_id, len(target_idx),
                )
            else:
                weights = counts[home_mask]
                prox = phi[np.ix_(home_mask, ~home_mask)].T @ weights / weights.sum()
                pp = percentiles(
                    [(universe[i], float(p)) for i, p in zip(target_idx, prox)]
                )
                profile.entries.extend(pp[g] for g in new_groups)
        for code in record.groups:
            counts[index[code]] += 1
    return profile


def combine(profiles: list[ExpansionProfile]) -> ExpansionProfile:
    """Concatenate profiles in input order into one composite profile."""
    combined = ExpansionProfile(agent_id="composite", agent_kind=None)
    for p in profiles:
        combined.entries.extend(p.entries)
    return combined


def cumulative_distribution(profile: ExpansionProfile) -> list[tuple[float, float]]:
    """Step samples of F(x) = |{pp >= x}| / n at 0, every distinct value, and 1."""
    if len(profile) == 0:
        raise EmptyProfile("profile has no entries")
    entries = np.asarray(profile.entries)
    xs = sorted({0.0, 1.0} | set(profile.entries))
    return [(float(x), float((entries >= x).mean())) for x in xs]


def auc(profile: ExpansionProfile) -> float:
    """Exact step integral of the cumulative distribution over [0, 1].

    Identically equal to the profile mean, which the test suite checks.
    """
    samples = cumulative_distribution(profile)
    total = 0.0
    for (x0, _), (x1, f1) in zip(samples, samples[1:]):
        # F is constant on (x0, x1], equal to its value at x1
        total += (x1 - x0) * f1
    return total


def explainability(per_agent_auc: dict[str, dict[str, float]]) -> dict[str, float]:
    """Fraction of agents on which each model attains the highest AUC.

    Exact ties split the agent's credit equally, so the fractions sum
    to 1 for any input.
    """
    if not per_agent_auc:
        raise InconsistentModelSets("no agents given")
    agents = list(per_agent_auc)
    model_set = set(per_agent_auc[agents[0]])
    awards = {m: 0.0 for m in sorted(model_set)}
    for agent, by_model in per_agent_auc.items():
        if set(by_model) != model_set:
            raise InconsistentModelSets(f"agent {agent} has a different model set")
        best = max(by_model.values())
        winners = [m for m, v in by_model.items() if v == best]
        for m in winners:
            awards[m] += 1.0 / len(winners)
    return {m: awards[m] / len(agents) for m in awards}


@dataclass(slots=True)
class ClassResult:
    """Per-agent-class study outputs, keyed by model name."""

    agent_ids: list[str]
    combined_auc: dict[str, float]
    explainability: dict[str, float]
    combined_profiles: dict[str, ExpansionProfile]


@dataclass(slots=True)
class ExpansionReport:
    classes: dict[EntityKind, ClassResult]
    min_patents: int


def run_study(
    store_or_vocab: TripleStore | Vocabulary,
    portfolios: list[AgentPortfolio],
    universe: list[str],
    models: dict[str, ModelParams],
    min_patents: int = 30,
    floor_negative: bool = True,
) -> ExpansionReport:
    """Full study: per-agent profiles, combined AUC and explainability per model.

    Agents below `min_patents` or whose profiles never expand are
    excluded. All model fingerprints must match the one vocabulary.
    """
    vocab = store_or_vocab.vocab if isinstance(store_or_vocab, TripleStore) else store_or_vocab
    if not models:
        raise InconsistentModelSets("no models given")
    for params in models.values():
        check_fingerprint(params, vocab)

    phis = {
        name: group_proximity_matrix(params, vocab, universe, floor_negative)
        for name, params in models.items()
    }
    eligible = sorted(
        (p for p in portfolios if len(p) >= min_patents), key=lambda p: p.agent_id
    )
    classes: dict[EntityKind, ClassResult] = {}
    for agent_kind in (EntityKind.INVENTOR, EntityKind.ASSIGNEE):
        members = [p for p in eligible if p.agent_kind is agent_kind]
        if not members:
            continue
        profiles: dict[str, list[ExpansionProfile]] = {name: [] for name in models}
        agent_ids: list[str] = []
        per_agent_auc: dict[str, dict[str, float]] = {}
        for portfolio in members:
            by_model = {
                name: profile_from_phi(phis[name], portfolio, universe) for name in models
            }
            if len(next(iter(by_model.values()))) == 0:
                continue  # never expanded; profile length is model-independent
            agent_ids.append(portfolio.agent_id)
            per_agent_auc[portfolio.agent_id] = {
                name: auc(profile) for name, profile in by_model.items()
            }
            for name, profile in by_model.items():
                profiles[name].append(profile)
        if not agent_ids:
            continue
        combined_profiles = {name: combine(profiles[name]) for name in models}
        classes[agent_kind] = ClassResult(
            agent_ids=agent_ids,
            combined_auc={name: auc(p) for name, p in combined_profiles.items()},
            explainability=explainability(per_agent_auc),
            combined_profiles=combined_profiles,
        )
    return ExpansionReport(classes=classes, min_patents=min_patents)
