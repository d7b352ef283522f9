import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphsom import trajectory
from graphsom.dataset import FeatureSchema, SampleTable
from graphsom.trajectory import (
    ConvergenceError,
    MarkovError,
    ReducibleChainError,
    TrajectorySet,
)

from oracles import count_transitions


def _panel(obs, **attrs):
    """``obs`` = list of (id, time, label[, period])."""
    n = len(obs)
    periods = [o[3] if len(o) > 3 else 1 for o in obs]
    table = SampleTable(FeatureSchema(("a",)), [o[0] for o in obs], [o[1] for o in obs],
                        periods, np.zeros((n, 1)),
                        {k: np.array(v, dtype=object) for k, v in attrs.items()})
    return table, np.array([o[2] for o in obs])


def _seqs(trajs):
    return {k: (t.tolist(), s.tolist()) for k, (t, s) in trajs.sequences.items()}


def test_build_counts_and_order():
    table, labels = _panel([("a", 3, 2), ("b", 1, 1), ("a", 1, 1), ("b", 2, 1), ("a", 2, 2), ("b", 3, 2)])
    trajs = trajectory.build_trajectories(labels, table, 2)
    assert _seqs(trajs) == {"a": ([1, 2, 3], [1, 2, 2]), "b": ([1, 2, 3], [1, 1, 2])}
    assert trajs.n_transitions == 4
    order = np.argsort([f"{i}{t}" for i, t in zip(table.ids, table.times)])
    sorted_trajs = trajectory.build_trajectories(labels[order], table.take(order), 2)
    assert _seqs(sorted_trajs) == _seqs(trajs)


def test_single_observation_contributes_nothing():
    table, labels = _panel([("a", 1, 1), ("b", 1, 2), ("b", 2, 1)])
    trajs = trajectory.build_trajectories(labels, table, 2)
    assert trajs.n_transitions == 1 and len(trajs) == 2


def test_build_rejects_bad_labels():
    table, _ = _panel([("a", 1, 1)])
    with pytest.raises(MarkovError):
        trajectory.build_trajectories(np.array([3]), table, 2)


def test_transition_matrix_hand_example():
    table, labels = _panel([("A", 1, 1), ("A", 2, 2), ("A", 3, 2), ("B", 1, 1), ("B", 2, 1), ("B", 3, 2)])
    tm = trajectory.transition_matrix(trajectory.build_trajectories(labels, table, 2))
    assert tm.counts.tolist() == [[1, 2], [0, 1]]
    assert np.allclose(tm.probs, [[1 / 3, 2 / 3], [0, 1]], rtol=0, atol=1e-15)


def test_constant_trajectories_flag_empty_rows(caplog):
    table, labels = _panel([("a", 1, 3), ("a", 2, 3), ("a", 3, 3)])
    tm = trajectory.transition_matrix(trajectory.build_trajectories(labels, table, 4))
    assert tm.probs[2, 2] == 1.0
    assert tm.empty_rows == [1, 2, 4]
    assert "never observed" in caplog.text


def test_no_transitions_rejected():
    table, labels = _panel([("a", 1, 1), ("b", 1, 2)])
    with pytest.raises(MarkovError):
        trajectory.transition_matrix(trajectory.build_trajectories(labels, table, 2))


@settings(max_examples=100)
@given(st.lists(st.lists(st.integers(1, 4), min_size=1, max_size=8), min_size=1, max_size=20))
def test_counts_match_pair_oracle(seqs):
    obs = [(f"i{k}", t, s) for k, seq in enumerate(seqs) for t, s in enumerate(seq)]
    table, labels = _panel(obs)
    trajs = trajectory.build_trajectories(labels, table, 4)
    if trajs.n_transitions == 0:
        return
    tm = trajectory.transition_matrix(trajs)
    assert np.array_equal(tm.counts, count_transitions(seqs, 4))
    assert tm.counts.sum() == sum(len(s) - 1 for s in seqs)
    sums = tm.probs.sum(axis=1)
    nonempty = tm.row_counts > 0
    assert np.all(np.abs(sums[nonempty] - 1) <= 1e-12)


def test_periodic_chain_needs_damping():
    flip = [[0.0, 1.0], [1.0, 0.0]]
    with pytest.raises(ConvergenceError, match="damping"):
        trajectory.stationary(flip)
    assert np.allclose(trajectory.stationary(flip, damping=0.5), [0.5, 0.5], atol=1e-12)


def test_doubly_stochastic_is_uniform():
    p = [[0.2, 0.5, 0.3], [0.3, 0.2, 0.5], [0.5, 0.3, 0.2]]
    assert np.allclose(trajectory.stationary(p), [1 / 3] * 3, atol=1e-12)


def test_reducible_chain_names_sets():
    p = [[0.5, 0.5, 0, 0], [0.5, 0.5, 0, 0], [0, 0, 0.3, 0.7], [0, 0, 0.6, 0.4]]
    with pytest.raises(ReducibleChainError, match=r"\{1, 2\}; \{3, 4\}") as info:
        trajectory.stationary(p)
    assert info.value.classes == [[1, 2], [3, 4]]


def test_transient_state_is_reducible():
    p = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, 0.5]]
    assert not trajectory.is_irreducible(trajectory.from_probabilities(p))
    with pytest.raises(ReducibleChainError):
        trajectory.stationary(p)


def test_empty_row_excluded_unless_entered():
    # state 3 never a source and never entered: dropped, gets 0
    tm = trajectory.TransitionMatrix(
        np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0]]),
        np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 0.0]]),
    )
    assert np.allclose(trajectory.stationary(tm), [0.5, 0.5, 0.0])
    leaky = trajectory.TransitionMatrix(
        np.array([[1, 1, 1], [1, 1, 0], [0, 0, 0]]),
        np.array([[1 / 3, 1 / 3, 1 / 3], [0.5, 0.5, 0.0], [0.0, 0.0, 0.0]]),
    )
    with pytest.raises(MarkovError, match="without outgoing"):
        trajectory.stationary(leaky)


def _random_stochastic(rng, s):
    p = rng.random((s, s)) + 0.01
    return p / p.sum(axis=1, keepdims=True)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 8))
def test_stationary_fixed_point_and_start_independence(seed, s):
    rng = np.random.default_rng(seed)
    p = _random_stochastic(rng, s)
    tol = 1e-12
    pi = trajectory.stationary(p, tol=tol)
    assert np.max(np.abs(pi @ p - pi)) < tol
    assert abs(pi.sum() - 1) < 1e-12
    start = rng.random(s)
    other = trajectory.stationary(p, tol=tol, initial=start / start.sum())
    assert np.max(np.abs(other - pi)) <= 2 * tol


def test_stationary_matches_eigenvector():
    rng = np.random.default_rng(7)
    p = _random_stochastic(rng, 5)
    w, v = np.linalg.eig(p.T)
    ref = np.real(v[:, np.argmin(np.abs(w - 1))])
    ref /= ref.sum()
    assert np.allclose(trajectory.stationary(p), ref, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.05, 0.95))
def test_damping_preserves_stationary(seed, lam):
    p = _random_stochastic(np.random.default_rng(seed), 4)
    assert np.allclose(trajectory.stationary(p, damping=lam), trajectory.stationary(p), atol=1e-10)


def test_damping_range():
    with pytest.raises(ValueError):
        trajectory.stationary([[0.5, 0.5], [0.5, 0.5]], damping=1.0)


def test_percent_flag_renormalizes():
    tm = trajectory.from_probabilities([[50.0, 49.9], [10.0, 90.1]], percent=True)
    assert np.allclose(tm.probs.sum(axis=1), 1.0, atol=1e-15)
    with pytest.raises(MarkovError):
        trajectory.from_probabilities([[0.5, 0.4], [0.1, 0.9]])
    with pytest.raises(MarkovError):
        trajectory.from_probabilities([[1.0, 0.0, 0.0]])


def test_empirical_distribution():
    table, labels = _panel([("a", 1, 2), ("a", 2, 2), ("b", 1, 2)])
    emp = trajectory.empirical_distribution(trajectory.build_trajectories(labels, table, 3))
    assert emp.tolist() == [0.0, 1.0, 0.0]
    table, labels = _panel([("a", 1, 1), ("a", 2, 3), ("b", 1, 2), ("b", 2, 3), ("b", 3, 1)])
    emp = trajectory.empirical_distribution(trajectory.build_trajectories(labels, table, 3))
    assert emp.tolist() == [0.4, 0.2, 0.4]


def test_filter_trajectories(caplog):
    obs = [("a", 1, 1), ("a", 2, 2), ("b", 1, 2), ("b", 2, 2), ("c", 1, 1), ("c", 2, 1)]
    gender = ["w", "w", "m", "m", "w", "m"]
    table, labels = _panel(obs, gender=gender)
    trajs = trajectory.build_trajectories(labels, table, 2)
    women = trajectory.filter_trajectories(trajs, table, "gender", "w")
    assert set(women.sequences) == {"a"}
    assert "mixed" in caplog.text
    assert len(trajectory.filter_trajectories(trajs, table, "gender", "x")) == 0
    with pytest.raises(KeyError):
        trajectory.filter_trajectories(trajs, table, "age", "30")


def test_filter_universal_value_is_identity():
    table, labels = _panel([("a", 1, 1), ("a", 2, 2), ("b", 1, 2)], g=["u", "u", "u"])
    trajs = trajectory.build_trajectories(labels, table, 2)
    same = trajectory.filter_trajectories(trajs, table, "g", "u")
    assert _seqs(same) == _seqs(trajs)


def test_period_selection():
    table, labels = _panel([("a", 1, 1, 1), ("a", 2, 2, 1), ("a", 10, 2, 2), ("a", 11, 1, 2)])
    p2 = trajectory.build_trajectories(labels, table, 2, period=2)
    assert _seqs(p2) == {"a": ([10, 11], [2, 1])}


def test_simulate_chain_deterministic_and_valid():
    p = _random_stochastic(np.random.default_rng(0), 3)
    a = trajectory.simulate_chain(p, 500, seed=4)
    assert np.array_equal(a, trajectory.simulate_chain(p, 500, seed=4))
    assert a[0] == 1 and set(a.tolist()) <= {1, 2, 3}


def test_matrix_file_round_trip(tmp_path):
    counts = np.array([[3, 1], [0, 5]])
    trajectory.write_matrix(counts, tmp_path / "c.txt", "counts")
    assert (tmp_path / "c.txt").read_text() == "S=2 kind=counts\n3,1\n0,5\n"
    m, kind = trajectory.read_matrix(tmp_path / "c.txt")
    assert kind == "counts" and m.tolist() == [[3, 1], [0, 5]]
    (tmp_path / "bare.txt").write_text("# comment\n1 0\n0.5 0.5\n")
    m, kind = trajectory.read_matrix(tmp_path / "bare.txt")
    assert kind == "probs" and m.shape == (2, 2)
    (tmp_path / "bad.txt").write_text("S=3 kind=probs\n1,0\n0,1\n")
    with pytest.raises(MarkovError):
        trajectory.read_matrix(tmp_path / "bad.txt")


def test_trajectory_set_counts():
    ts = TrajectorySet({"a": (np.array([1, 2, 3]), np.array([1, 1, 2]))}, 2)
    assert ts.n_observations == 3 and ts.n_transitions == 2
