import math

import numpy as np
import pytest

from varident import corpus
from varident.errors import InputError
from varident.graph import DirectedGraph
from varident.sim import (
    SampleBatch,
    auto_threshold,
    burn_in_steps,
    empirical_covariance,
    read_samples_csv,
    recover_from_samples,
    sample_stationary,
    simulate_trajectory,
    write_samples_csv,
)
from varident.stationary import VarParameters, sample_generic_parameters, solve_stationary

# Strong couplings so a modest sample separates zero from nonzero entries.
STRONG = VarParameters(
    corpus.SUPPORT_EXAMPLE_GRAPH,
    np.array([[0.5, 0.8, 0.0], [0.0, 0.3, 0.0], [0.0, 0.8, 0.5]]),
    1.0,
)


def recursion_oracle(p, steps, seed):
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((steps, p.n)) * math.sqrt(p.omega)
    x = [eps[0]]
    for t in range(1, steps):
        x.append(sum(p.lam[i] * x[-1][i] for i in range(p.n)) + eps[t])
    return np.array(x)


class TestSampleBatch:
    def test_shape_checked(self):
        with pytest.raises(InputError):
            SampleBatch(3, np.zeros((4, 2)), "iid_stationary", None)

    def test_readonly(self):
        b = SampleBatch(2, np.zeros((3, 2)), "iid_stationary", 0)
        assert b.count == 3
        with pytest.raises(ValueError):
            b.samples[0, 0] = 1.0


class TestTrajectory:
    def test_burn_in_steps(self):
        assert burn_in_steps(VarParameters(DirectedGraph(2), np.zeros((2, 2)), 1.0)) == 1
        p = VarParameters(DirectedGraph(1), np.array([[0.5]]), 1.0)
        assert burn_in_steps(p) == 200

    @pytest.mark.parametrize("p", [STRONG, VarParameters(DirectedGraph(1), np.array([[-0.7]]), 2.0)])
    def test_matches_recursion(self, p):
        got = simulate_trajectory(p, 50, seed=4).samples
        assert np.allclose(got, recursion_oracle(p, 50, 4), rtol=1e-12, atol=1e-12)

    def test_burn_in_dropped(self):
        full = simulate_trajectory(STRONG, 40, seed=1).samples
        tail = simulate_trajectory(STRONG, 40, seed=1, burn_in=15)
        assert tail.count == 25 and tail.source == "trajectory_tail"
        assert np.array_equal(tail.samples, full[15:])

    @pytest.mark.parametrize("steps,burn", [(0, 0), (5, 5), (5, -1)])
    def test_bad_lengths(self, steps, burn):
        with pytest.raises(InputError):
            simulate_trajectory(STRONG, steps, seed=0, burn_in=burn)

    def test_long_run_covariance(self):
        b = simulate_trajectory(STRONG, 200_000, seed=2, burn_in=burn_in_steps(STRONG))
        sigma = solve_stationary(STRONG).sigma
        assert np.max(np.abs(empirical_covariance(b) - sigma)) <= 0.05 * np.max(np.abs(sigma))


class TestStationarySampling:
    def test_covariance(self):
        p = sample_generic_parameters(corpus.FIG2, 3)
        b = sample_stationary(p, 100_000, seed=3)
        sigma = solve_stationary(p).sigma
        assert b.source == "iid_stationary"
        assert np.max(np.abs(empirical_covariance(b) - sigma)) <= 0.03 * np.max(np.abs(sigma))

    def test_deterministic(self):
        a = sample_stationary(STRONG, 10, seed=5).samples
        assert np.array_equal(a, sample_stationary(STRONG, 10, seed=5).samples)

    def test_bad_count(self):
        with pytest.raises(InputError):
            sample_stationary(STRONG, 0, seed=0)


class TestEmpirical:
    def test_matches_numpy(self):
        x = np.random.default_rng(0).standard_normal((30, 4))
        assert np.allclose(empirical_covariance(SampleBatch(4, x, "iid_stationary", 0)), np.cov(x.T))

    def test_single_column(self):
        x = np.arange(5.0).reshape(5, 1)
        assert empirical_covariance(SampleBatch(1, x, "iid_stationary", 0)).shape == (1, 1)

    def test_too_few(self):
        with pytest.raises(InputError):
            empirical_covariance(SampleBatch(2, np.zeros((1, 2)), "iid_stationary", 0))

    def test_auto_threshold(self):
        cov = np.array([[2.0, -3.0], [-3.0, 1.0]])
        assert auto_threshold(cov, 100) == pytest.approx(4 * 3 * math.sqrt(math.log(2) / 100))


class TestRecovery:
    def test_strong_example_recovered(self):
        rep = recover_from_samples(sample_stationary(STRONG, 100_000, seed=7))
        assert [list(c) for c in rep.classes.classes] == corpus.SUPPORT_EXAMPLE_CLASSES

    def test_explicit_threshold(self):
        b = sample_stationary(STRONG, 100_000, seed=8)
        assert recover_from_samples(b, threshold=0.0).classes.classes == ((1, 2, 3),)
        assert recover_from_samples(b, threshold=1e9).classes.classes == ((1,), (2,), (3,))

    def test_small_variance_keeps_diagonal(self):
        x = np.random.default_rng(0).standard_normal((200, 2)) * np.array([100.0, 0.01])
        rep = recover_from_samples(SampleBatch(2, x, "iid_stationary", 0))
        assert rep.classes.classes == ((1,), (2,))


def test_csv_roundtrip(tmp_path):
    b = sample_stationary(STRONG, 20, seed=1)
    write_samples_csv(tmp_path / "x.csv", b)
    assert np.array_equal(read_samples_csv(tmp_path / "x.csv").samples, b.samples)


def test_bad_csv(tmp_path):
    (tmp_path / "x.csv").write_text("1,2\n3,a\n")
    with pytest.raises(InputError):
        read_samples_csv(tmp_path / "x.csv")
