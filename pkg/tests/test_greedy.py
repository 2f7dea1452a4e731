import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from influence_partition.exact import ExactObjective
from influence_partition.graph import derive_lt_weights, from_edges
from influence_partition.greedy import (TIE_RTOL, CommunityPartition, ConfigurationError,
                                        PartitionMatroid, best_of_k_roundings, continuous_greedy,
                                        max_weight_independent_set, randomized_round, steps_for,
                                        write_assignment_csv)
from influence_partition.lovasz import in_polytope, lovasz_value

from support import brute_force_opt, mutual_pairs, random_lt_graph


# --- matroid and independent sets -----------------------------------------

def test_mwis_two_by_two_example():
    w = np.array([[3.0, 1.0], [0.0, 5.0]])
    chosen = max_weight_independent_set(w)
    assert chosen.tolist() == [0, 1]
    assert w[chosen, np.arange(2)].sum() == 8.0
    best = max(sum(w[c, j] for j, c in enumerate(a)) for a in itertools.product(range(2), repeat=2))
    assert best == 8.0


def test_mwis_ties_go_to_first_community():
    assert max_weight_independent_set(np.full((3, 4), 2.5)).tolist() == [0, 0, 0, 0]
    assert max_weight_independent_set(np.zeros((2, 3))).tolist() == [0, 0, 0]
    near = np.array([[1.0], [1.0 + 1e-12]])
    assert max_weight_independent_set(near).tolist() == [0]


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.data())
def test_mwis_is_optimal_and_independent(m, n, data):
    w = np.array(data.draw(st.lists(st.floats(0, 10), min_size=m * n, max_size=m * n))).reshape(m, n)
    chosen = max_weight_independent_set(w)
    matroid = PartitionMatroid(m, n)
    elements = [(int(c), j) for j, c in enumerate(chosen)]
    assert matroid.is_base(elements)
    best = max(sum(w[c, j] for j, c in enumerate(a)) for a in itertools.product(range(m), repeat=n))
    # optimal up to the tie tolerance, which is relative with an absolute floor per node
    slack = TIE_RTOL * np.maximum(1.0, w.max(axis=0)).sum()
    assert w[chosen, np.arange(n)].sum() >= best - slack


def test_partition_matroid_predicates():
    mat = PartitionMatroid(2, 3)
    assert mat.is_independent([(0, 0), (1, 2)])
    assert not mat.is_independent([(0, 0), (1, 0)])
    assert not mat.is_independent([(2, 0)])
    assert not mat.is_base([(0, 0), (1, 2)])


# --- time steps -----------------------------------------------------------

def test_steps_for_accepts_unit_fractions():
    assert steps_for(0.2) == 5
    assert steps_for(0.05) == 20
    assert steps_for("1/7") == 7
    assert steps_for(Fraction(1, 3)) == 3


@pytest.mark.parametrize("dt", [0.3, 0.0, -0.5, "2/5", "x", 1.5])
def test_steps_for_rejects_other_steps(dt):
    with pytest.raises(ConfigurationError):
        steps_for(dt)


# --- continuous greedy ----------------------------------------------------

def test_single_community_is_all_ones_for_every_step():
    g = derive_lt_weights(from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]))
    f = ExactObjective(g)
    whole = f([(0, v) for v in range(4)])
    for dt in (0.2, 0.1, 0.05):
        x1, _ = continuous_greedy(g, 1, dt, oracle=f)
        assert np.array_equal(x1, np.ones((1, 4)))
        assert lovasz_value(x1, f) == pytest.approx(whole)


@pytest.mark.parametrize("seed", range(6))
def test_trajectory_stays_in_polytope_and_rises(seed):
    rng = np.random.default_rng(seed)
    g = random_lt_graph(rng, 5, p=0.5)
    f = ExactObjective(g)
    x1, trace = continuous_greedy(g, 2, 0.1, oracle=f, keep_history=True)
    assert len(trace.steps) == 10
    for k, x in enumerate(trace.x_history, start=1):
        assert in_polytope(x)
        assert np.allclose(x.sum(axis=0), k / 10, atol=1e-12)
    assert np.array_equal(x1.sum(axis=0), np.ones(5))
    values = [s.f_hat for s in trace.steps]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
    for s in trace.steps:
        assert PartitionMatroid(2, 5).is_base([(int(c), j) for j, c in enumerate(s.chosen)])


@pytest.mark.parametrize("seed", range(5))
def test_bound_against_brute_force(seed):
    rng = np.random.default_rng(100 + seed)
    g = random_lt_graph(rng, 5, p=0.5)
    f = ExactObjective(g)
    x1, _ = continuous_greedy(g, 2, 0.05, oracle=f)
    opt, _ = brute_force_opt(g, 2)
    assert lovasz_value(x1, f) >= (1 - 1 / np.e) * opt - 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_greedy_concentrates_mass_on_the_first_community(seed):
    # with a supermodular objective and the lowest-id tie rule every step picks community 0
    rng = np.random.default_rng(200 + seed)
    g = random_lt_graph(rng, 5, p=0.5)
    x1, _ = continuous_greedy(g, 3, 0.1, r=200, rng=seed)
    assert np.array_equal(x1[0], np.ones(5))


def test_monte_carlo_run_is_deterministic():
    g = random_lt_graph(np.random.default_rng(4), 8, p=0.3)
    a, ta = continuous_greedy(g, 2, 0.2, r=100, rng=9)
    b, tb = continuous_greedy(g, 2, 0.2, r=100, rng=9)
    assert np.array_equal(a, b)
    assert [s.f_hat for s in ta.steps] == [s.f_hat for s in tb.steps]


def test_bad_arguments():
    g = mutual_pairs()
    with pytest.raises(ConfigurationError):
        continuous_greedy(g, 0, 0.2)
    with pytest.raises(ConfigurationError):
        continuous_greedy(g, 2, 0.3)


def test_trace_and_assignment_files(tmp_path):
    g = mutual_pairs()
    x1, trace = continuous_greedy(g, 2, 0.5, r=20, rng=1)
    lines = trace.log_lines()
    assert lines[0] == "step,t,f_hat_estimate,seconds"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "2"]
    write_assignment_csv(x1, tmp_path / "x.csv")
    rows = (tmp_path / "x.csv").read_text().splitlines()
    assert rows[0] == "node,community,probability"
    assert len(rows) == 1 + 2 * 4


# --- rounding -------------------------------------------------------------

def test_integral_rounding_is_deterministic():
    x = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    for seed in range(5):
        assert randomized_round(x, seed).assignment.tolist() == [0, 1, 0]


def test_half_half_rounding_frequencies():
    x = np.full((2, 1), 0.5)
    rng = np.random.default_rng(0)
    picks = np.array([randomized_round(x, rng).assignment[0] for _ in range(10_000)])
    assert abs(np.sum(picks == 0) - 5000) <= 3 * np.sqrt(10_000 * 0.25)


def test_single_community_rounding():
    assert randomized_round(np.ones((1, 6)), 0).assignment.tolist() == [0] * 6


def test_rounding_rejects_unnormalised_columns():
    with pytest.raises(ValueError):
        randomized_round(np.array([[0.5], [0.4]]), 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 6), st.data())
def test_rounding_output_is_a_partition(m, n, data):
    raw = np.array(data.draw(st.lists(st.floats(0.01, 1.0), min_size=m * n, max_size=m * n)))
    x = raw.reshape(m, n) / raw.reshape(m, n).sum(axis=0)
    part = randomized_round(x, data.draw(st.integers(0, 10**6)))
    assert part.n == n
    assert PartitionMatroid(m, n).is_base(part.elements())
    assert sorted(np.concatenate(part.communities()).tolist()) == list(range(n))


def test_best_of_one_equals_plain_rounding():
    g = mutual_pairs()
    x = np.full((2, 4), 0.5)
    a = best_of_k_roundings(x, 1, g, 50, np.random.default_rng(3))
    b = randomized_round(x, np.random.default_rng(3))
    assert np.array_equal(a.assignment, b.assignment)


def test_best_of_k_on_integral_x():
    g = mutual_pairs()
    x = np.array([[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0]])
    for k in (1, 4, 16):
        assert best_of_k_roundings(x, k, g, 20, k).assignment.tolist() == [0, 0, 1, 1]
    with pytest.raises(ConfigurationError):
        best_of_k_roundings(x, 0, g)


def test_best_of_sixteen_beats_one():
    g = random_lt_graph(np.random.default_rng(8), 6, p=0.5)
    f = ExactObjective(g)
    x = np.full((2, 6), 0.5)
    for seed in range(5):
        one = best_of_k_roundings(x, 1, g, 2000, np.random.default_rng(seed))
        many = best_of_k_roundings(x, 16, g, 2000, np.random.default_rng(seed))
        assert f(many.elements()) >= f(one.elements()) - 1e-9


@pytest.mark.parametrize("seed", range(8))
def test_expected_rounding_never_exceeds_extension(seed):
    """For a supermodular f, independent rounding loses value against the extension.

    The expectation is computed exactly by enumerating every rounding outcome.
    """
    rng = np.random.default_rng(300 + seed)
    g = random_lt_graph(rng, 4, p=0.7)
    f = ExactObjective(g)
    x = rng.dirichlet(np.ones(2), size=4).T
    expected = 0.0
    for assign in itertools.product(range(2), repeat=4):
        p = np.prod([x[c, j] for j, c in enumerate(assign)])
        expected += p * f([(c, j) for j, c in enumerate(assign)])
    assert expected <= lovasz_value(x, f) + 1e-9


def test_partition_csv_uses_one_based_ids(tmp_path):
    part = CommunityPartition(np.array([0, 1, 1]), 2)
    part.write_csv(tmp_path / "p.csv", labels=("a", "b", "c"))
    assert (tmp_path / "p.csv").read_text().splitlines() == [
        "node,community", "a,1", "b,2", "c,2"]
    with pytest.raises(ValueError):
        CommunityPartition(np.array([0, 2]), 2)
    with pytest.raises(ValueError):
        CommunityPartition.from_groups([{0}, {0, 1}], 2)
