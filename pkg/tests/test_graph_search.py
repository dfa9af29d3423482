"""Graph strategies: traces, termination, guarantees at small scale."""

import math

import numpy as np
import pytest

from noisysearch.graph import all_pairs_distances, grid_graph, path_graph, star_graph
from noisysearch.graph_search import (
    rescaled_confidence,
    run_adversarial,
    run_lv_adversarial,
    run_lv_distributional,
    step_median_update,
)
from noisysearch.mathcore import (
    Distribution,
    DomainError,
    NoiseParams,
    worst_case_budget_graph,
)
from noisysearch.oracle import GraphOracle, NoisePolicy
from noisysearch.weights import init_from_distribution, init_uniform


def make_oracle(g, d, target, p, seed, **policy_kwargs):
    return GraphOracle(g, d, target, NoisePolicy(p=p, **policy_kwargs), np.random.default_rng(seed))


class TestStepMedianUpdate:
    def test_point_mass_gets_yes(self):
        g = star_graph(6)
        d = all_pairs_distances(g)
        masses = np.full(6, 1e-9)
        masses[4] = 1 - 5e-9
        st = init_from_distribution(Distribution.from_weights(masses))
        oracle = make_oracle(g, d, target=4, p=0.0, seed=0)
        new, q, answer, csize = step_median_update(st, g, d, oracle, NoiseParams.from_p(0.25))
        assert q == 4
        assert answer.kind == "yes"
        assert csize == 1
        assert new.relative[4] > st.relative[4] - 1e-12

    def test_path_trace_by_hand(self):
        # uniform on a 3-path, truthful target at the right end: the
        # median is the middle vertex, the answer points right, and the
        # consistent set is exactly the right endpoint
        g = path_graph(3)
        d = all_pairs_distances(g)
        st = init_uniform(3)
        oracle = make_oracle(g, d, target=2, p=0.0, seed=1)
        new, q, answer, csize = step_median_update(st, g, d, oracle, NoiseParams.from_p(0.25))
        assert q == 1
        assert answer.kind == "neighbor" and answer.vertex == 2
        assert csize == 1
        assert new.relative == pytest.approx([0.2, 0.2, 0.6], abs=1e-12)

    def test_heavy_query_no_answer_decreases_weight(self):
        g = path_graph(5)
        d = all_pairs_distances(g)
        masses = np.array([0.1, 0.6, 0.1, 0.1, 0.1])
        st = init_from_distribution(Distribution(masses))
        oracle = make_oracle(g, d, target=4, p=0.0, seed=2)
        new, q, answer, csize = step_median_update(st, g, d, oracle, NoiseParams.from_p(0.3))
        assert q == 1  # the heavy vertex is the median
        assert answer.kind == "neighbor"
        assert csize == 4  # direction discarded: everything but q
        assert new.relative[1] < st.relative[1]


class TestRunAdversarial:
    def test_single_vertex(self):
        g = path_graph(1)
        d = all_pairs_distances(g)
        oracle = make_oracle(g, d, target=0, p=0.25, seed=3)
        t = run_adversarial(g, NoiseParams.from_p(0.25), 0.2, oracle)
        assert t.declared == 0 and t.target_hit

    def test_truthful_path_all_targets(self):
        # with a truthful answer channel every target on a 15-path is found
        g = path_graph(15)
        d = all_pairs_distances(g)
        noise = NoiseParams.from_p(0.25)
        for target in range(15):
            oracle = make_oracle(g, d, target=target, p=0.0, seed=4)
            t = run_adversarial(g, noise, 0.2, oracle)
            assert t.declared == target

    def test_budget_is_exact_and_recorded(self):
        g = path_graph(32)
        d = all_pairs_distances(g)
        noise = NoiseParams.from_p(0.3)
        budget = worst_case_budget_graph(32, noise, 0.2).q
        oracle = make_oracle(g, d, target=7, p=0.3, seed=5)
        t = run_adversarial(g, noise, 0.2, oracle)
        assert t.query_count == budget
        assert len(t.queries) == t.query_count

    def test_rejects_bad_delta(self):
        g = path_graph(4)
        d = all_pairs_distances(g)
        oracle = make_oracle(g, d, target=0, p=0.25, seed=6)
        with pytest.raises(DomainError):
            run_adversarial(g, NoiseParams.from_p(0.25), 0.6, oracle)

    def test_weight_drop_law_single_run(self):
        g = grid_graph(4, 4)
        d = all_pairs_distances(g)
        noise = NoiseParams.from_p(0.3)
        oracle = make_oracle(g, d, target=9, p=0.3, seed=7)
        t = run_adversarial(g, noise, 0.1, oracle, track_weights=True)
        for tau, (log_rest, _) in enumerate(t.weight_log):
            assert log_rest <= -tau + 1e-6

    def test_reproducible_given_seed(self):
        g = path_graph(20)
        d = all_pairs_distances(g)
        noise = NoiseParams.from_p(0.25)
        runs = []
        for _ in range(2):
            oracle = make_oracle(g, d, target=13, p=0.25, seed=8)
            t = run_adversarial(g, noise, 0.2, oracle)
            runs.append([(r.query, r.answer.kind, r.answer.vertex) for r in t.queries])
        assert runs[0] == runs[1]


class TestRunLvDistributional:
    def test_point_mass_immediate(self):
        g = path_graph(6)
        d = all_pairs_distances(g)
        mu = Distribution(np.array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0]))
        oracle = make_oracle(g, d, target=3, p=0.0, seed=9)
        t = run_lv_distributional(g, mu, NoiseParams.from_p(0.25), 0.1, oracle)
        assert t.declared == 3
        assert t.query_count == 0  # the floored prior already clears 1-delta

    def test_moderate_prior_truthful_count(self):
        # prior (0.6, 0.4) on a 2-path, truthful target 0, delta 0.1:
        # after k yes-answers the posterior of 0 is 0.6*0.75^k over the
        # total; the first k clearing 0.9 is 2
        g = path_graph(2)
        d = all_pairs_distances(g)
        mu = Distribution(np.array([0.6, 0.4]))
        noise = NoiseParams.from_p(0.25)
        w0, w1 = 0.6, 0.4
        k = 0
        while w0 / (w0 + w1) < 0.9:
            w0, w1 = w0 * 0.75, w1 * 0.25
            k += 1
        assert k == 2
        oracle = make_oracle(g, d, target=0, p=0.0, seed=10)
        t = run_lv_distributional(g, mu, noise, 0.1, oracle)
        assert t.query_count == k and t.declared == 0

    def test_star_expected_queries_bound(self):
        # mean queries over trials stays under
        # (log2 n + log2(1/delta) + 1) / info_rate within one standard error
        n, p, delta, trials = 32, 0.25, 0.1, 600
        g = star_graph(n)
        d = all_pairs_distances(g)
        noise = NoiseParams.from_p(p)
        mu = Distribution.uniform(n)
        counts, errors = [], 0
        for i in range(trials):
            rng = np.random.default_rng([100, i])
            target = int(rng.integers(n))
            oracle = GraphOracle(g, d, target, NoisePolicy(p=p), rng)
            t = run_lv_distributional(g, mu, noise, delta, oracle, record_queries=False)
            counts.append(t.query_count)
            errors += not t.target_hit
        bound = (math.log2(n) + math.log2(1 / delta) + 1) / noise.info_rate
        mean = float(np.mean(counts))
        sem = float(np.std(counts, ddof=1)) / math.sqrt(trials)
        assert mean <= bound + sem
        assert errors / trials <= delta

    def test_weak_confidence_two_vertices(self):
        # delta near 1/2 stops almost immediately with error at most delta
        g = path_graph(2)
        d = all_pairs_distances(g)
        noise = NoiseParams.from_p(0.25)
        mu = Distribution.uniform(2)
        errors, counts = 0, []
        for i in range(400):
            rng = np.random.default_rng([101, i])
            target = int(rng.integers(2))
            oracle = GraphOracle(g, d, target, NoisePolicy(p=0.25), rng)
            t = run_lv_distributional(g, mu, noise, 0.49, oracle, record_queries=False)
            counts.append(t.query_count)
            errors += not t.target_hit
        assert max(counts) <= 5
        assert errors / 400 <= 0.49


class TestRunLvAdversarial:
    def test_confidence_rescaling_monotone(self):
        for n in (4, 64, 1024):
            for delta in (0.05, 0.2, 0.45):
                dprime = rescaled_confidence(n, delta)
                assert 0 < dprime <= delta
                assert dprime <= 1 / 3

    def test_worst_target_sweep_small_grid(self):
        n, p, delta, per_target = 9, 0.25, 0.3, 80
        g = grid_graph(3, 3)
        d = all_pairs_distances(g)
        noise = NoiseParams.from_p(p)
        worst_err = 0.0
        for target in range(n):
            errors = 0
            for i in range(per_target):
                rng = np.random.default_rng([102, target, i])
                oracle = GraphOracle(g, d, target, NoisePolicy(p=p), rng)
                t = run_lv_adversarial(g, noise, delta, oracle, record_queries=False)
                errors += not t.target_hit
            worst_err = max(worst_err, errors / per_target)
        assert worst_err <= delta


class TestTargetWeightFloor:
    def test_quantile_at_budget(self):
        # with probability at least 1-delta the target's absolute log2
        # weight at the budget stays above
        # -log2 n - sqrt(Q/2 ln(1/delta)) log2 gamma - H(p) Q
        n, p, delta, trials = 64, 0.3, 0.2, 500
        g = path_graph(n)
        d = all_pairs_distances(g)
        noise = NoiseParams.from_p(p)
        q_budget = worst_case_budget_graph(n, noise, delta).q
        floor = (
            -math.log2(n)
            - math.sqrt(q_budget / 2 * math.log(1 / delta)) * math.log2(noise.gamma)
            - (1 - noise.info_rate) * q_budget
        )
        below = 0
        for i in range(trials):
            rng = np.random.default_rng([103, i])
            target = int(rng.integers(n))
            oracle = GraphOracle(g, d, target, NoisePolicy(p=p), rng)
            t = run_adversarial(g, noise, delta, oracle, record_queries=False)
            if t.final_target_log2 < floor:
                below += 1
        sigma = math.sqrt(delta * (1 - delta) / trials)
        assert below / trials <= delta + 3 * sigma
