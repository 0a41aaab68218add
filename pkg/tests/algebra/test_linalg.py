import unittest
from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis.strategies import integers, lists

from algebra.linalg import exact_rank, exact_solve


class TestLinalg(unittest.TestCase):
    def test_rank(self):
        self.assertEqual(exact_rank([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), 3)
        self.assertEqual(exact_rank([[1, 2], [2, 4]]), 1)
        self.assertEqual(exact_rank([[0, 0], [0, 0]]), 0)
        self.assertEqual(exact_rank([[Fraction(1, 3), Fraction(1, 2)], [2, 3]]), 1)
        self.assertEqual(exact_rank([["-0.65", "-0.80", "1.34"], ["0.14", "-0.73", "1.40"]]), 2)

    @settings(max_examples=50, deadline=None)
    @given(integers(1, 4), integers(1, 5), lists(integers(-3, 3), min_size=20, max_size=20))
    def test_rank_matches_sympy(self, rows, cols, values):
        matrix = [values[r * cols:(r + 1) * cols] for r in range(rows)]
        self.assertEqual(exact_rank(matrix), sympy.Matrix(matrix).rank())

    def test_solve(self):
        self.assertEqual(exact_solve([[2, 1], [1, 3]], [3, 5]), [Fraction(4, 5), Fraction(7, 5)])
        self.assertEqual(exact_solve([[0, 1], [1, 0]], ["1/2", 2]), [2, Fraction(1, 2)])

    def test_solve_errors(self):
        with self.assertRaises(ValueError):
            exact_solve([[1, 2], [2, 4]], [1, 2])
        with self.assertRaises(ValueError):
            exact_solve([[1, 2, 3], [4, 5, 6]], [1, 2])


if __name__ == "__main__":
    unittest.main()
