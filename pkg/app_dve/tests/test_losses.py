"""
Tests for the confusion-contribution loss: hand values, gradients and the
sparsifying effect of minimising it.
"""

# 1. Third-party
import numpy as np
from django.test import SimpleTestCase

# 2. Local imports
from app_dve.config import CCLossConfig
from app_dve.exceptions import EmptyBatchError
from app_dve.heads import ClusterHead
from app_dve.losses import cc_loss, segment_trajectory_ids, trajectory_average_matrix
from app_dve.metrics import confusion
from app_numerics.gradcheck import check_gradients
from app_numerics.layers import Affine
from app_numerics.optim import AdamState, adam_step
from app_numerics.tensor import Tape, Tensor, softmax, tanh


UNIT = CCLossConfig(k1=1.0, k2=1.0, eps_log=0.0)


class CCLossValueTests(SimpleTestCase):

    def test_uniform_single_step(self):
        loss = cc_loss(Tensor([[0.5, 0.5]]), [0], UNIT)
        self.assertAlmostEqual(loss.item(), np.log(0.5), places=4)
        self.assertAlmostEqual(loss.item(), -0.6931, places=4)

    def test_one_hot_single_step(self):
        loss = cc_loss(Tensor([[1.0, 0.0]]), [0], UNIT)
        self.assertAlmostEqual(loss.item(), np.log(0.5) + np.log(0.25), places=10)
        self.assertAlmostEqual(loss.item(), -2.0794, places=4)

    def test_zero_coefficients_give_zero_loss_and_gradient(self):
        logits = Tensor(np.random.default_rng(0).normal(size=(5, 3)), requires_grad=True)
        config = CCLossConfig(k1=0.0, k2=0.0)
        with Tape() as tape:
            loss = cc_loss(softmax(logits), [0, 0, 1, 1, 1], config)
        (grad,) = tape.gradient(loss, [logits])
        self.assertEqual(loss.item(), 0.0)
        self.assertTrue(np.all(grad == 0.0))

    def test_trajectory_term_averages_per_trajectory(self):
        # Trajectory 0 is uniform, trajectory 1 is one-hot.
        alpha = Tensor([[0.5, 0.5], [0.5, 0.5], [1.0, 0.0]])
        loss = cc_loss(alpha, [0, 0, 1], CCLossConfig(k1=0.0, k2=1.0, eps_log=0.0))
        self.assertAlmostEqual(loss.item(), (np.log(0.5) + np.log(0.25)) / 2, places=10)

    def test_empty_batch_is_rejected(self):
        with self.assertRaises(EmptyBatchError):
            cc_loss(Tensor(np.zeros((0, 2))), [], UNIT)

    def test_negative_coefficient_is_rejected(self):
        with self.assertRaises(ValueError):
            CCLossConfig(k1=-0.1)


class CCLossGradientTests(SimpleTestCase):

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        logits = Tensor(rng.normal(size=(6, 3)), requires_grad=True)
        config = CCLossConfig(k1=0.7, k2=1.3, eps_log=1e-8)
        ids = [0, 0, 1, 1, 1, 2]
        result = check_gradients(lambda: cc_loss(softmax(logits), ids, config), [logits])
        self.assertTrue(result.passed, result.max_rel_error)

    def test_matches_finite_differences_through_head(self):
        rng = np.random.default_rng(4)
        head = ClusterHead(4, 3, rng, assign_gain=1.0)
        x = Tensor(rng.normal(size=(5, 4)))
        config = CCLossConfig(k1=0.5, k2=0.5)
        result = check_gradients(lambda: cc_loss(head(x).alpha, [0, 0, 0, 1, 1], config),
                                 head.assign.parameters())
        self.assertTrue(result.passed, result.max_rel_error)


class TrajectoryIdTests(SimpleTestCase):

    def test_columns_and_episode_starts_split_trajectories(self):
        starts = np.array([[False, True],
                           [False, False],
                           [True, False]])
        ids = segment_trajectory_ids(starts)
        # t-major: (t0,b0) (t0,b1) (t1,b0) (t1,b1) (t2,b0) (t2,b1)
        np.testing.assert_array_equal(ids, [0, 2, 0, 2, 1, 2])

    def test_average_matrix_rows_sum_to_one(self):
        matrix = trajectory_average_matrix([3, 3, 1, 3])
        np.testing.assert_allclose(matrix.sum(axis=1), [1.0, 1.0])
        np.testing.assert_allclose(matrix[1], [1 / 3, 1 / 3, 0.0, 1 / 3])


class DetachedAssignmentTests(SimpleTestCase):

    def test_loss_does_not_reach_encoder_when_detached(self):
        rng = np.random.default_rng(5)
        encoder = Affine(3, 4, rng)
        head = ClusterHead(4, 2, rng, assign_gain=1.0)
        x = Tensor(rng.normal(size=(4, 3)))
        params = encoder.parameters() + head.assign.parameters()
        for detach, reaches_encoder in ((True, False), (False, True)):
            with Tape() as tape:
                out = head(tanh(encoder(x)), detach_for_cc=detach)
                loss = cc_loss(out.alpha_cc, [0, 0, 1, 1], UNIT)
            grads = tape.gradient(loss, params)
            self.assertEqual(any(np.any(g != 0) for g in grads[:2]), reaches_encoder)
            self.assertTrue(np.any(grads[2] != 0))


class SparsificationTests(SimpleTestCase):

    def test_minimising_loss_sharpens_assignments(self):
        states = 24
        rng = np.random.default_rng(11)
        head = ClusterHead(states, 2, rng, assign_gain=0.1)
        x = Tensor(np.eye(states))
        ids = np.arange(states)
        config = CCLossConfig(k1=1.0, k2=1.0)
        weight = head.assign.weight
        adam = AdamState.for_parameters([weight], lr=0.1)

        def max_alpha():
            return np.median(head(x).alpha.data.max(axis=-1))

        self.assertLess(max_alpha(), 0.6)
        deltas = []
        for step in range(300):
            with Tape() as tape:
                loss = cc_loss(head(x).alpha, ids, config)
            adam_step(adam, [weight], tape.gradient(loss, [weight]))
            if step % 20 == 0:
                deltas.append(float(np.mean(confusion(head(x).alpha.data))))
        self.assertGreaterEqual(max_alpha(), 0.99)
        self.assertTrue(all(b <= a + 1e-12 for a, b in zip(deltas, deltas[1:])), deltas)
