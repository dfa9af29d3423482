"""The query environment: truthful answers, noise injection, reply filtering.

One oracle owns one trial's hidden target and rng stream. Strategies see
only Answer.kind and Answer.vertex; the is_lie flag is ground truth kept
for diagnostics and statistics, and no strategy module reads it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DistanceMatrix, Graph, consistent_set
from .mathcore import Distribution, DomainError
from .weights import CompatibleSet, WeightState

__all__ = [
    "ProtocolError",
    "Answer",
    "NoisePolicy",
    "TargetModel",
    "graph_answer",
    "linear_answer",
    "heavy_filter",
    "GraphOracle",
    "LinearOracle",
    "load_distribution",
]

TIEBREAKS = ("smallest-id", "random")
LIE_CHOICES = ("uniform-wrong", "adversarial-heaviest")


class ProtocolError(ValueError):
    """A reply that the query model does not allow."""


@dataclass(frozen=True)
class Answer:
    """One reply. kind is yes / neighbor (graph) or less / greater (order).

    is_lie records whether the noise channel corrupted the truthful reply;
    it exists for verification only and is invisible to strategies.
    """

    kind: str
    vertex: int | None = None
    is_lie: bool = False


@dataclass(frozen=True)
class NoisePolicy:
    """Noise channel configuration.

    p                 per-answer corruption probability (i.i.d. across queries)
    truthful_tiebreak how a truthful shortest-path neighbor is picked when
                      several exist: "smallest-id" or "random"
    lie_choice        content of a corrupted graph reply: "uniform-wrong"
                      draws uniformly among the wrong legal replies,
                      "adversarial-heaviest" picks the wrong reply whose
                      consistent set currently holds the most weight
    """

    p: float
    truthful_tiebreak: str = "smallest-id"
    lie_choice: str = "uniform-wrong"

    def __post_init__(self) -> None:
        if not 0.0 <= self.p < 0.5:
            raise DomainError(f"noise policy needs 0 <= p < 1/2, got {self.p}")
        if self.truthful_tiebreak not in TIEBREAKS:
            raise DomainError(f"unknown tiebreak {self.truthful_tiebreak!r}")
        if self.lie_choice not in LIE_CHOICES:
            raise DomainError(f"unknown lie choice {self.lie_choice!r}")


@dataclass
class TargetModel:
    """Where the hidden target comes from: fixed by an adversary or sampled.

    realize() draws the target once, before the first query of a trial.
    """

    mode: str
    element: int | None = None
    mu: Distribution | None = None

    def realize(self, rng: np.random.Generator) -> int:
        if self.mode == "fixed":
            if self.element is None:
                raise DomainError("fixed target model needs an element")
            return int(self.element)
        if self.mode == "sampled":
            if self.mu is None:
                raise DomainError("sampled target model needs a distribution")
            return int(rng.choice(self.mu.n, p=self.mu.masses))
        raise DomainError(f"unknown target mode {self.mode!r}")


def _truthful_graph_reply(
    q: int,
    target: int,
    g: Graph,
    d: DistanceMatrix,
    policy: NoisePolicy,
    rng: np.random.Generator,
) -> Answer:
    if q == target:
        return Answer(kind="yes", vertex=None, is_lie=False)
    dq = int(d.dist[q, target])
    closer = [u for u in g.adjacency[q] if int(d.dist[u, target]) == dq - 1]
    if policy.truthful_tiebreak == "random" and len(closer) > 1:
        u = closer[int(rng.integers(len(closer)))]
    else:
        u = closer[0]
    return Answer(kind="neighbor", vertex=u, is_lie=False)


def graph_answer(
    q: int,
    target: int,
    g: Graph,
    d: DistanceMatrix,
    policy: NoisePolicy,
    rng: np.random.Generator,
    weights: WeightState | None = None,
) -> Answer:
    """Answer a vertex query, corrupted with probability policy.p.

    The truthful reply is yes when q is the target, otherwise a neighbor
    of q one hop closer to the target. A corrupted reply is one of the
    other legal replies at q (yes plus each neighbor), selected per
    policy.lie_choice. The adversarial choice needs the current weights.
    """
    truthful = _truthful_graph_reply(q, target, g, d, policy, rng)
    if rng.random() >= policy.p:
        return truthful

    wrong: list[Answer] = []
    if truthful.kind != "yes":
        wrong.append(Answer(kind="yes", vertex=None, is_lie=True))
    for u in g.adjacency[q]:
        if truthful.kind == "neighbor" and truthful.vertex == u:
            continue
        wrong.append(Answer(kind="neighbor", vertex=u, is_lie=True))
    if not wrong:
        # isolated target on a single-vertex graph: nothing to lie with
        return truthful

    if policy.lie_choice == "uniform-wrong":
        return wrong[int(rng.integers(len(wrong)))]

    if weights is None:
        raise DomainError("adversarial-heaviest lies need the current weight state")
    rel = weights.relative
    best, best_mass = wrong[0], -1.0
    for cand in wrong:
        if cand.kind == "yes":
            mass = float(rel[q])
        else:
            mass = float(rel[consistent_set(g, d, q, cand).mask].sum())
        if mass > best_mass:
            best, best_mass = cand, mass
    return best


def linear_answer(
    q: int, target: int, policy: NoisePolicy, rng: np.random.Generator
) -> Answer:
    """Answer a comparison query, flipped with probability policy.p.

    The reply set is {less, greater}; when the target equals the pivot the
    truthful reply is a fair coin, which makes either answer carry
    likelihood exactly 1/2 for the pivot hypothesis.
    """
    if target < q:
        truthful = "less"
    elif target > q:
        truthful = "greater"
    else:
        truthful = "less" if rng.random() < 0.5 else "greater"
    if rng.random() < policy.p:
        return Answer(kind="greater" if truthful == "less" else "less", is_lie=True)
    return Answer(kind=truthful, is_lie=False)


def heavy_filter(
    answer: Answer, q: int, was_heavy: bool, g: Graph, d: DistanceMatrix
) -> CompatibleSet:
    """Compatible set delivered to the strategy for a graph reply.

    A no-answer at a vertex that held at least half the weight is read
    only as "the target is not q": the direction is discarded and the
    compatible set becomes everything but q. All other replies pass
    through the ordinary consistent-set computation.
    """
    if answer.kind == "yes":
        return CompatibleSet.singleton(g.n, q)
    if answer.kind != "neighbor":
        raise ProtocolError(f"heavy_filter expects a graph reply, got {answer.kind}")
    if was_heavy:
        return CompatibleSet.complement_of(g.n, q)
    return consistent_set(g, d, q, answer)


class GraphOracle:
    """Per-trial answer source for vertex queries; counts answers given."""

    def __init__(
        self,
        g: Graph,
        d: DistanceMatrix,
        target: int,
        policy: NoisePolicy,
        rng: np.random.Generator,
    ):
        if not 0 <= target < g.n:
            raise DomainError(f"target {target} out of range for n={g.n}")
        self.graph = g
        self.dist = d
        self.target = int(target)
        self.policy = policy
        self.rng = rng
        self.queries_answered = 0

    def answer(self, q: int, state: WeightState | None = None) -> Answer:
        self.queries_answered += 1
        return graph_answer(
            q, self.target, self.graph, self.dist, self.policy, self.rng, weights=state
        )


class LinearOracle:
    """Per-trial answer source for comparison queries on 0..n-1."""

    def __init__(self, n: int, target: int, policy: NoisePolicy, rng: np.random.Generator):
        if not 0 <= target < n:
            raise DomainError(f"target {target} out of range for n={n}")
        self.n = int(n)
        self.target = int(target)
        self.policy = policy
        self.rng = rng
        self.queries_answered = 0

    def answer(self, q: int, state: WeightState | None = None) -> Answer:
        self.queries_answered += 1
        return linear_answer(q, self.target, self.policy, self.rng)


def load_distribution(path, n: int) -> tuple[Distribution, float]:
    """Read "element_id mass" pairs; normalize; return (dist, raw mass sum).

    Ids absent from the file get zero mass (callers flooring zeros at
    initialization recover them). The pre-normalization sum is returned so
    callers can report how far the file was from a proper distribution.
    """
    masses = np.zeros(n, dtype=np.float64)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"{path}:{lineno}: expected 'element_id mass'")
            idx = int(parts[0])
            mass = float(parts[1])
            if not 0 <= idx < n:
                raise DomainError(f"{path}:{lineno}: element id {idx} out of range [0, {n})")
            if mass < 0:
                raise DomainError(f"{path}:{lineno}: negative mass {mass}")
            masses[idx] += mass
    total = float(masses.sum())
    if total <= 0.0:
        raise DomainError(f"{path}: distribution file carries no mass")
    return Distribution(masses / total), total
