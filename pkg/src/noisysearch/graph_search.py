"""Graph search strategies driven by median queries and weight updates.

Three variants share one step primitive:

* a fixed-budget strategy that always spends its full budget and then
  declares the heaviest vertex (bounded error probability),
* a stopping strategy for a known prior that declares as soon as one
  vertex holds a 1-delta fraction of the weight (random length), and
* the same stopping strategy run from a uniform prior with a rescaled
  confidence threshold, which handles an adversarially placed target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import DistanceMatrix, Graph, weighted_median
from .mathcore import Distribution, DomainError, NoiseParams, worst_case_budget_graph
from .oracle import Answer, GraphOracle, heavy_filter
from .weights import (
    WeightState,
    absolute_log2_weight,
    bayesian_update,
    heaviest,
    init_from_distribution,
    init_uniform,
    is_heavy,
)

__all__ = [
    "QueryRecord",
    "SearchTranscript",
    "step_median_update",
    "run_adversarial",
    "run_lv_distributional",
    "run_lv_adversarial",
    "rescaled_confidence",
]


@dataclass(frozen=True)
class QueryRecord:
    step: int
    query: int
    answer: Answer
    compatible_size: int


@dataclass
class SearchTranscript:
    """Full record of one run: what was asked, answered, and declared.

    weight_log, when tracking is on, holds per-step pairs of absolute log2
    weights: (mass outside the currently-heaviest element, mass of the
    realized target). Binary-search runs additionally fill the phase
    split, the marked candidate list, and per-epoch coupled-bound rows
    (step, coupled log2 bound, actual log2 unmarked mass).
    """

    declared: int
    query_count: int
    target_hit: bool
    queries: list[QueryRecord] | None = None
    flagged: bool = False
    weight_log: list[tuple[float, float]] | None = None
    final_target_log2: float | None = None
    phase_one_queries: int | None = None
    verify_queries: int | None = None
    marked: list[int] | None = None
    epoch_log: list[tuple[int, float, float]] | None = None
    completed_epochs: int | None = None


def step_median_update(
    state: WeightState,
    g: Graph,
    d: DistanceMatrix,
    oracle: GraphOracle,
    noise: NoiseParams,
) -> tuple[WeightState, int, Answer, int]:
    """Query the current weighted median, fold the answer into the weights.

    Returns (new state, queried vertex, answer, compatible-set size). The
    heavy filter is applied against the weights as they stood when the
    query was issued.
    """
    q = weighted_median(g, d, state)
    was_heavy = is_heavy(state, q, 0.5)
    answer = oracle.answer(q, state)
    compatible = heavy_filter(answer, q, was_heavy, g, d)
    new_state = bayesian_update(state, compatible, noise)
    return new_state, q, answer, compatible.size


def _snapshot(state: WeightState, target: int) -> tuple[float, float]:
    rel = state.relative
    top = heaviest(state)
    rest = float(rel.sum() - rel[top])
    log_rest = math.log2(rest) + state.log2_total if rest > 0.0 else float("-inf")
    log_target = math.log2(rel[target]) + state.log2_total
    return log_rest, log_target


def _drive(
    state: WeightState,
    g: Graph,
    d: DistanceMatrix,
    oracle: GraphOracle,
    noise: NoiseParams,
    max_steps: int,
    stop_threshold: float | None,
    record_queries: bool,
    track_weights: bool,
) -> tuple[WeightState, list[QueryRecord] | None, list | None, int, bool]:
    """Run median/update steps until the budget or the stop threshold."""
    records: list[QueryRecord] | None = [] if record_queries else None
    wlog: list | None = [] if track_weights else None
    if wlog is not None:
        wlog.append(_snapshot(state, oracle.target))
    steps = 0
    stopped = False
    while steps < max_steps:
        if stop_threshold is not None and float(state.relative.max()) >= stop_threshold:
            stopped = True
            break
        state, q, answer, csize = step_median_update(state, g, d, oracle, noise)
        steps += 1
        if records is not None:
            records.append(QueryRecord(step=steps, query=q, answer=answer, compatible_size=csize))
        if wlog is not None:
            wlog.append(_snapshot(state, oracle.target))
    if stop_threshold is not None and not stopped:
        stopped = float(state.relative.max()) >= stop_threshold
    return state, records, wlog, steps, stopped


def run_adversarial(
    g: Graph,
    noise: NoiseParams,
    delta: float,
    oracle: GraphOracle,
    budget: int | None = None,
    record_queries: bool = True,
    track_weights: bool = False,
) -> SearchTranscript:
    """Fixed-budget search: uniform start, exactly Q median queries,
    declare the heaviest vertex."""
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must satisfy 0 < delta < 1/2, got {delta}")
    q_budget = budget if budget is not None else worst_case_budget_graph(g.n, noise, delta).q
    state = init_uniform(g.n)
    state, records, wlog, steps, _ = _drive(
        state, g, d=oracle.dist, oracle=oracle, noise=noise,
        max_steps=q_budget, stop_threshold=None,
        record_queries=record_queries, track_weights=track_weights,
    )
    declared = heaviest(state)
    return SearchTranscript(
        declared=declared,
        query_count=steps,
        target_hit=declared == oracle.target,
        queries=records,
        weight_log=wlog,
        final_target_log2=absolute_log2_weight(state, [oracle.target]),
    )


def run_lv_distributional(
    g: Graph,
    mu: Distribution,
    noise: NoiseParams,
    delta: float,
    oracle: GraphOracle,
    cap_multiplier: float = 50.0,
    record_queries: bool = True,
    track_weights: bool = False,
) -> SearchTranscript:
    """Stopping search from a prior: declare once a vertex holds 1-delta
    of the weight.

    The expected length is (log2(1/mu(target)) + log2(1/delta) + 1) divided
    by the information rate; the hard cap at cap_multiplier times the
    worst-target value of that bound converts pathological tails into
    flagged failures instead of hangs.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must satisfy 0 < delta < 1/2, got {delta}")
    state = init_from_distribution(mu)
    worst_bits = -math.log2(float(state.relative.min()))
    cap = int(
        math.ceil(
            cap_multiplier * (worst_bits + math.log2(1.0 / delta) + 1.0) / noise.info_rate
        )
    )
    state, records, wlog, steps, stopped = _drive(
        state, g, d=oracle.dist, oracle=oracle, noise=noise,
        max_steps=cap, stop_threshold=1.0 - delta,
        record_queries=record_queries, track_weights=track_weights,
    )
    declared = heaviest(state)
    return SearchTranscript(
        declared=declared,
        query_count=steps,
        target_hit=declared == oracle.target,
        queries=records,
        flagged=not stopped,
        weight_log=wlog,
        final_target_log2=absolute_log2_weight(state, [oracle.target]),
    )


def rescaled_confidence(n: int, delta: float, c_prime: float = 64.0) -> float:
    """Tightened stop threshold for the adversarial stopping strategy.

    delta' = min(1/3, delta^2 / (c_prime * (log2 n + log2(1/delta))^2)).
    The square and the division by the squared log term pay for a union
    bound over the near-declarations a wrong vertex can survive.
    """
    if c_prime <= 0.0:
        raise DomainError(f"c_prime must be positive, got {c_prime}")
    denom = c_prime * (math.log2(max(n, 1)) + math.log2(1.0 / delta)) ** 2
    return min(1.0 / 3.0, delta * delta / denom)


def run_lv_adversarial(
    g: Graph,
    noise: NoiseParams,
    delta: float,
    oracle: GraphOracle,
    c_prime: float = 64.0,
    cap_multiplier: float = 50.0,
    record_queries: bool = True,
    track_weights: bool = False,
) -> SearchTranscript:
    """Stopping search without a prior: uniform start, tightened threshold."""
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must satisfy 0 < delta < 1/2, got {delta}")
    delta_prime = rescaled_confidence(g.n, delta, c_prime)
    return run_lv_distributional(
        g,
        Distribution.uniform(g.n),
        noise,
        delta_prime,
        oracle,
        cap_multiplier=cap_multiplier,
        record_queries=record_queries,
        track_weights=track_weights,
    )
