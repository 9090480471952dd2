"""
Tests for the correlation coefficient and the association test.
"""

# 1. Third-party
import numpy as np
from django.test import SimpleTestCase
from hypothesis import assume, given, settings
from hypothesis import strategies as st

# 2. Local imports
from app_analysis.exceptions import AnalysisError
from app_analysis.stats import association_p_value, pearson


samples = st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=3, max_size=40)


class PearsonTests(SimpleTestCase):

    def test_perfect_linear(self):
        self.assertEqual(pearson([1, 2, 3], [2, 4, 6]), 1.0)

    def test_perfect_anti_linear(self):
        self.assertEqual(pearson([1, 2, 3], [6, 4, 2]), -1.0)

    def test_hand_computed(self):
        self.assertAlmostEqual(pearson([1, 2, 3], [1, 3, 2]), 0.5)

    def test_zero_variance_is_undefined(self):
        with self.assertRaises(AnalysisError):
            pearson([1, 1, 1], [1, 2, 3])

    def test_needs_two_equal_length_samples(self):
        with self.assertRaises(AnalysisError):
            pearson([1], [2])
        with self.assertRaises(AnalysisError):
            pearson([1, 2], [1, 2, 3])

    @settings(max_examples=100, deadline=None)
    @given(st.data(), samples, st.floats(min_value=0.1, max_value=10), st.floats(min_value=-100, max_value=100))
    def test_symmetric_bounded_and_affine_invariant(self, data, x, scale, shift):
        y = data.draw(st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=len(x), max_size=len(x)))
        assume(np.std(x) > 1e-2 and np.std(y) > 1e-2)
        r = pearson(x, y)
        self.assertTrue(-1.0 <= r <= 1.0)
        self.assertAlmostEqual(r, pearson(y, x), delta=1e-12)
        moved = np.asarray(x) * scale + shift
        self.assertAlmostEqual(pearson(moved, y), r, delta=1e-6)
        self.assertAlmostEqual(pearson(-moved, y), -r, delta=1e-6)


class AssociationTests(SimpleTestCase):

    def test_strong_association_has_small_p(self):
        self.assertLess(association_p_value([[50, 2], [3, 45]]), 1e-6)

    def test_independent_counts_have_large_p(self):
        self.assertGreater(association_p_value([[20, 20], [20, 20]]), 0.5)

    def test_degenerate_tables_give_one(self):
        self.assertEqual(association_p_value([[10, 0], [7, 0]]), 1.0)
        self.assertEqual(association_p_value([[10, 4]]), 1.0)
