"""
Tests for advantage estimation and normalization.
"""

# 1. Third-party
import numpy as np
from django.test import SimpleTestCase
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

# 2. Local imports
from app_ppo.exceptions import MissingBootstrapError
from app_ppo.gae import compute_gae, normalize_advantages


def brute_force_advantages(rewards, values, dones, bootstrap, gamma, lam):
    steps = len(rewards)
    extended = np.append(values, bootstrap)
    residuals = [rewards[t] + gamma * extended[t + 1] * (1 - dones[t]) - values[t] for t in range(steps)]
    advantages = np.zeros(steps)
    for t in range(steps):
        total, weight = 0.0, 1.0
        for k in range(t, steps):
            total += weight * residuals[k]
            if dones[k]:
                break
            weight *= gamma * lam
        advantages[t] = total
    return advantages


class GAETests(SimpleTestCase):

    def test_single_terminal_step(self):
        for gamma, lam in ((0.99, 0.95), (0.5, 0.0), (1.0, 1.0)):
            advantages, returns = compute_gae([1.0], [0.0], [True], 0.0, gamma, lam)
            self.assertEqual(advantages[0], 1.0)
            self.assertEqual(returns[0], 1.0)

    def test_lambda_zero_gives_one_step_residuals(self):
        rewards = np.array([1.0, 0.0, 2.0])
        values = np.array([0.5, 0.2, 0.1])
        advantages, _ = compute_gae(rewards, values, [False, False, False], 0.3, 0.9, 0.0)
        expected = rewards + 0.9 * np.array([0.2, 0.1, 0.3]) - values
        np.testing.assert_allclose(advantages, expected, atol=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 50), st.integers(0, 2**32 - 1))
    def test_matches_brute_force_oracle(self, steps, seed):
        rng = np.random.default_rng(seed)
        rewards = rng.normal(size=steps)
        values = rng.normal(size=steps)
        dones = rng.random(steps) < 0.1
        bootstrap = float(rng.normal())
        gamma, lam = rng.uniform(0.8, 1.0), rng.uniform(0.0, 1.0)
        advantages, returns = compute_gae(rewards, values, dones, bootstrap, gamma, lam)
        oracle = brute_force_advantages(rewards, values, dones, bootstrap, gamma, lam)
        np.testing.assert_allclose(advantages, oracle, atol=1e-10, rtol=0)
        np.testing.assert_allclose(returns, oracle + values, atol=1e-10, rtol=0)

    def test_time_major_batches_match_per_worker_results(self):
        rng = np.random.default_rng(1)
        rewards, values = rng.normal(size=(12, 3)), rng.normal(size=(12, 3))
        dones = rng.random((12, 3)) < 0.2
        bootstrap = rng.normal(size=3)
        batched, _ = compute_gae(rewards, values, dones, bootstrap, 0.99, 0.95)
        for w in range(3):
            single, _ = compute_gae(rewards[:, w], values[:, w], dones[:, w], bootstrap[w], 0.99, 0.95)
            np.testing.assert_allclose(batched[:, w], single, atol=1e-14)

    def test_missing_bootstrap_is_rejected(self):
        with self.assertRaises(MissingBootstrapError):
            compute_gae([1.0], [0.0], [False], None, 0.99, 0.95)


class NormalizeAdvantagesTests(SimpleTestCase):

    @settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    @given(arrays(np.float64, st.integers(2, 200), elements=st.floats(min_value=-100, max_value=100)))
    def test_zero_mean_unit_std(self, advantages):
        assume(advantages.std() > 0.1)
        normalized = normalize_advantages(advantages)
        self.assertLessEqual(abs(normalized.mean()), 1e-10)
        self.assertAlmostEqual(normalized.std(), 1.0, delta=1e-6)

    def test_constant_advantages_become_zero(self):
        np.testing.assert_array_equal(normalize_advantages(np.full(5, 3.0)), np.zeros(5))
