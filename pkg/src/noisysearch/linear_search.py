"""Comparison search over a linear order, organized in pivot epochs.

Queries are grouped into epochs that repeat one pivot; finished pivots
accumulate in a marked set that doubles as the candidate pool for a second
verification phase. A coupled scalar process, updated only at epoch
boundaries from the answer counts, dominates the absolute weight of the
unmarked elements on every answer sequence; the fixed-budget variant sizes
its budget so the target's weight must exceed that bound, forcing the
target into the candidate pool.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph_search import SearchTranscript
from .mathcore import (
    Distribution,
    DomainError,
    NoiseParams,
    epoch_length,
    worst_case_budget_linear,
)
from .oracle import LinearOracle, ProtocolError
from .weights import (
    WeightState,
    apply_multipliers,
    heaviest,
    init_from_distribution,
    init_uniform,
)

__all__ = [
    "EpochState",
    "CandidateSet",
    "central_element",
    "comparison_update",
    "run_epoch",
    "run_adversarial",
    "run_lv_distributional",
    "run_lv_adversarial",
    "verify_candidates",
    "coupled_epoch_log2",
]

CENTRAL_TOL = 1e-12


@dataclass
class EpochState:
    """Bookkeeping for the epoch schedule and the coupled weight bound.

    marked holds pivots in marking order; coupled_log2 is log2 of the
    coupled process and changes only when an epoch ends; the answer
    counters (less_count, greater_count) belong to the running epoch.
    """

    marked: list[int]
    marked_mask: np.ndarray
    epoch_index: int = 1
    within_epoch: int = 0
    current_pivot: int | None = None
    coupled_log2: float = 0.0
    less_count: int = 0
    greater_count: int = 0

    @classmethod
    def fresh(cls, n: int) -> "EpochState":
        return cls(marked=[], marked_mask=np.zeros(n, dtype=bool))


@dataclass(frozen=True)
class CandidateSet:
    """Pivots queried in phase one, in ascending order."""

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(sorted(self.members)))

    @property
    def size(self) -> int:
        return len(self.members)


def central_element(state: WeightState, marked_mask: np.ndarray) -> int:
    """Smallest unmarked element splitting the unmarked mass in half.

    Returns the smallest unmarked q whose unmarked-prefix and
    unmarked-suffix masses are each at most half the unmarked total. Such
    an element always exists (it is a weighted median of the unmarked
    mass restricted to unmarked positions).
    """
    unmarked = ~marked_mask
    if not unmarked.any():
        raise DomainError("no unmarked elements remain; the epoch phase should have stopped")
    w = state.relative * unmarked
    total = float(w.sum())
    if total <= 0.0:
        raise DomainError("unmarked mass underflowed; instance is beyond float64 range")
    # tolerance must scale with the unmarked mass, which can be 2^-hundreds
    half = (0.5 + CENTRAL_TOL) * total
    csum = np.cumsum(w)
    prefix = csum - w
    suffix = total - csum
    ok = unmarked & (prefix <= half) & (suffix <= half)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        raise DomainError("no central element found; weights are inconsistent")
    return int(idx[0])


def comparison_update(
    state: WeightState, pivot: int, kind: str, noise: NoiseParams
) -> WeightState:
    """Fold in one comparison answer at the pivot.

    Elements on the answered side scale by (1-p), the far side by p, and
    the pivot itself by 1/2: either answer has likelihood exactly one half
    when the target is the pivot, because the truthful reply there is a
    fair coin. Marked elements update like everything else.
    """
    n = state.n
    mult = np.empty(n, dtype=np.float64)
    if kind == "less":
        mult[:pivot] = 1.0 - noise.p
        mult[pivot + 1 :] = noise.p
    elif kind == "greater":
        mult[:pivot] = noise.p
        mult[pivot + 1 :] = 1.0 - noise.p
    else:
        raise ProtocolError(f"comparison reply must be less/greater, got {kind!r}")
    mult[pivot] = 0.5
    return apply_multipliers(state, mult)


def coupled_epoch_log2(x: int, y: int, noise: NoiseParams) -> float:
    """log2 of the coupled-process factor for an epoch with answer counts (x, y).

    The factor is ((1-p)^x p^y + (1-p)^y p^x) / 2, evaluated in log space
    so long epochs cannot underflow.
    """
    l1p = math.log2(1.0 - noise.p)
    lp = math.log2(noise.p)
    return float(np.logaddexp2(x * l1p + y * lp, y * l1p + x * lp)) - 1.0


def _finish_epoch(epoch: EpochState, noise: NoiseParams) -> None:
    epoch.coupled_log2 += coupled_epoch_log2(epoch.less_count, epoch.greater_count, noise)
    pivot = epoch.current_pivot
    assert pivot is not None
    epoch.marked.append(pivot)
    epoch.marked_mask[pivot] = True
    epoch.epoch_index += 1
    epoch.within_epoch = 0
    epoch.current_pivot = None
    epoch.less_count = 0
    epoch.greater_count = 0


def run_epoch(
    state: WeightState,
    epoch: EpochState,
    noise: NoiseParams,
    oracle: LinearOracle,
    max_queries: int | None = None,
    stop_predicate=None,
) -> tuple[WeightState, EpochState, str, int]:
    """Run one epoch: repeat the central pivot, update weights per answer.

    The epoch ends by completing its scheduled length ("completed") or by
    exhausting max_queries ("truncated"); both outcomes mark the pivot and
    fold the answer counts into the coupled bound. A stop_predicate
    trigger ("stopped") returns immediately with the pivot unmarked, since
    the stopping rule is evaluated against the current marked set.

    Returns (state, epoch, status, queries_run).
    """
    pivot = central_element(state, epoch.marked_mask)
    epoch.current_pivot = pivot
    scheduled = epoch_length(epoch.epoch_index, noise)
    budget = scheduled if max_queries is None else min(scheduled, max_queries)
    if budget < 1:
        raise DomainError("an epoch needs at least one query of budget")
    run = 0
    for _ in range(budget):
        answer = oracle.answer(pivot, state)
        state = comparison_update(state, pivot, answer.kind, noise)
        run += 1
        epoch.within_epoch += 1
        if answer.kind == "less":
            epoch.less_count += 1
        else:
            epoch.greater_count += 1
        if stop_predicate is not None and stop_predicate(state, epoch):
            return state, epoch, "stopped", run
    _finish_epoch(epoch, noise)
    status = "completed" if budget == scheduled else "truncated"
    return state, epoch, status, run


def _log2_unmarked(state: WeightState, epoch: EpochState) -> float:
    rest = float(state.relative[~epoch.marked_mask].sum())
    if rest <= 0.0:
        return float("-inf")
    return math.log2(rest) + state.log2_total


def verify_candidates(
    candidates: CandidateSet,
    noise: NoiseParams,
    delta: float,
    oracle: LinearOracle,
    cap_multiplier: float = 50.0,
) -> int:
    """Pick the target out of the candidate pool by comparison queries.

    A weight search restricted to the candidates: uniform start, pivot at
    the weighted median candidate, answers shift candidate weights by
    their position relative to the pivot (pivot scales by 1/2), stop once
    one candidate holds a 1-delta fraction. Comparisons are answered on
    the original order, so answers stay informative about candidates even
    when the true target fell outside the pool.
    """
    members = candidates.members
    if len(members) == 0:
        raise DomainError("candidate set is empty")
    if len(members) == 1:
        return members[0]
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must satisfy 0 < delta < 1/2, got {delta}")
    positions = np.asarray(members, dtype=np.int64)
    m = positions.size
    w = np.full(m, 1.0 / m)
    cap = int(
        math.ceil(
            cap_multiplier
            * (math.log2(m) + math.log2(1.0 / delta) + 1.0)
            / noise.info_rate
        )
    )
    p = noise.p
    for _ in range(cap):
        if float(w.max()) >= 1.0 - delta:
            break
        csum = np.cumsum(w)
        prefix = csum - w
        suffix = 1.0 - csum
        half = 0.5 + CENTRAL_TOL
        pivot_idx = int(np.flatnonzero((prefix <= half) & (suffix <= half))[0])
        pivot = int(positions[pivot_idx])
        answer = oracle.answer(pivot)
        if answer.kind == "less":
            mult = np.where(positions < pivot, 1.0 - p, p)
        else:
            mult = np.where(positions > pivot, 1.0 - p, p)
        mult[pivot_idx] = 0.5
        w = w * mult
        w = w / w.sum()
    return int(positions[int(np.argmax(w))])


def _epoch_phase(
    state: WeightState,
    noise: NoiseParams,
    oracle: LinearOracle,
    max_total: int,
    stop_predicate=None,
) -> tuple[WeightState, EpochState, int, bool, int, list[tuple[int, float, float]]]:
    """Drive epochs until the budget, the stopping rule, or pivot exhaustion.

    Returns (state, epoch, queries_run, stopped_by_rule, completed_epochs,
    boundary_log) where boundary_log rows are (step, coupled bound log2,
    actual unmarked mass log2) recorded at every epoch boundary.
    """
    n = state.n
    epoch = EpochState.fresh(n)
    boundary_log: list[tuple[int, float, float]] = [(0, 0.0, _log2_unmarked(state, epoch))]
    steps = 0
    completed = 0
    stopped = False
    while steps < max_total:
        if stop_predicate is not None and stop_predicate(state, epoch):
            stopped = True
            break
        if len(epoch.marked) >= n:
            break
        state, epoch, status, run = run_epoch(
            state, epoch, noise, oracle,
            max_queries=max_total - steps, stop_predicate=stop_predicate,
        )
        steps += run
        if status == "stopped":
            stopped = True
            break
        if status == "completed":
            completed += 1
        boundary_log.append((steps, epoch.coupled_log2, _log2_unmarked(state, epoch)))
    if stop_predicate is not None and not stopped:
        stopped = stop_predicate(state, epoch)
    return state, epoch, steps, stopped, completed, boundary_log


def run_adversarial(
    n: int,
    noise: NoiseParams,
    delta: float,
    oracle: LinearOracle,
    c_const: float = 4.0,
    budget: int | None = None,
) -> SearchTranscript:
    """Fixed-budget comparison search, then verification over the pivots.

    Exactly Q epoch-phase queries (the final epoch is cut at the budget
    and its pivot still marked), followed by candidate verification at
    confidence delta/3. When fewer than Q queries suffice to mark every
    element, the epoch phase stops early: all elements are candidates and
    further pivotless queries would teach the verifier nothing.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must satisfy 0 < delta < 1/2, got {delta}")
    q_budget = budget if budget is not None else worst_case_budget_linear(n, noise, delta, c_const).q
    state = init_uniform(n)
    state, epoch, steps, _, completed, boundary_log = _epoch_phase(
        state, noise, oracle, max_total=q_budget
    )
    before_verify = oracle.queries_answered
    declared = verify_candidates(CandidateSet(tuple(epoch.marked)), noise, delta / 3.0, oracle)
    verify_queries = oracle.queries_answered - before_verify
    return SearchTranscript(
        declared=declared,
        query_count=steps + verify_queries,
        target_hit=declared == oracle.target,
        phase_one_queries=steps,
        verify_queries=verify_queries,
        marked=list(epoch.marked),
        epoch_log=boundary_log,
        completed_epochs=completed,
    )


def run_lv_distributional(
    n: int,
    mu: Distribution,
    noise: NoiseParams,
    delta: float,
    oracle: LinearOracle,
    c_const: float = 4.0,
    cap_multiplier: float = 50.0,
) -> SearchTranscript:
    """Stopping comparison search from a prior.

    Epochs run until the marked set holds a 1-delta/2 fraction of the
    weight (checked after every query and after every marking), then the
    candidates are verified at confidence delta/2. The cap converts
    pathological tails into flagged failures.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must satisfy 0 < delta < 1/2, got {delta}")
    state = init_from_distribution(mu)
    worst_bits = -math.log2(float(state.relative.min()))
    cap = int(
        math.ceil(
            cap_multiplier
            * (worst_bits + math.log2(1.0 / delta) + 3.0 + math.log2(c_const))
            / noise.info_rate
        )
    )
    threshold = 1.0 - delta / 2.0

    def stop_rule(st: WeightState, ep: EpochState) -> bool:
        return float(st.relative[ep.marked_mask].sum()) >= threshold

    state, epoch, steps, stopped, completed, boundary_log = _epoch_phase(
        state, noise, oracle, max_total=cap, stop_predicate=stop_rule
    )
    flagged = not stopped
    if epoch.marked:
        before_verify = oracle.queries_answered
        declared = verify_candidates(
            CandidateSet(tuple(epoch.marked)), noise, delta / 2.0, oracle
        )
        verify_queries = oracle.queries_answered - before_verify
    else:
        declared = heaviest(state)
        verify_queries = 0
    return SearchTranscript(
        declared=declared,
        query_count=steps + verify_queries,
        target_hit=declared == oracle.target,
        flagged=flagged,
        phase_one_queries=steps,
        verify_queries=verify_queries,
        marked=list(epoch.marked),
        epoch_log=boundary_log,
        completed_epochs=completed,
    )


def run_lv_adversarial(
    n: int,
    noise: NoiseParams,
    delta: float,
    oracle: LinearOracle,
    c_const: float = 4.0,
    cap_multiplier: float = 50.0,
    adv_margin: float = 4.0,
) -> SearchTranscript:
    """Stopping comparison search without a prior.

    Runs the distributional strategy from the uniform prior, whose
    expected length is per-target in log2(1/prior(target)) and hence
    log2(n) for every target simultaneously. The confidence is tightened
    to delta / adv_margin: without randomizing the order, a fixed target
    adjacent to the earliest pivots sees only a handful of queries that
    separate it from its neighbors, which inflates its error by a small
    constant factor over the target-averaged guarantee; the margin buys
    that factor back for log2(adv_margin) extra bits of work.
    """
    if adv_margin < 1.0:
        raise DomainError(f"adv_margin must be >= 1, got {adv_margin}")
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must satisfy 0 < delta < 1/2, got {delta}")
    return run_lv_distributional(
        n, Distribution.uniform(n), noise, delta / adv_margin, oracle,
        c_const=c_const, cap_multiplier=cap_multiplier,
    )
