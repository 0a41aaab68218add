import unittest
from fractions import Fraction

import mpmath
import numpy as np
import sympy
from hypothesis import given, settings
from hypothesis.strategies import dictionaries, integers, lists, tuples

from algebra.polynomial import (
    MonomialOrder,
    MultiPoly,
    PolyMatrix,
    PolynomialIndexError,
    VariableCountError,
    differentiate,
    evaluate,
    evaluate_many,
    poly_arith,
    poly_det,
    to_mp,
    to_rational,
)

SX, SY = sympy.symbols("x y")

polys = dictionaries(
    tuples(integers(0, 3), integers(0, 3)),
    integers(-6, 6),
    max_size=5,
).map(lambda terms: MultiPoly(2, terms))


def to_sympy(p: MultiPoly):
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * SX ** m[0] * SY ** m[1] for m, c in p.terms.items()),
        sympy.Integer(0),
    )


def from_sympy(expr) -> MultiPoly:
    terms = sympy.Poly(sympy.expand(expr), SX, SY).as_dict()
    return MultiPoly(2, {m: Fraction(int(c.p), int(c.q)) for m, c in terms.items()})


class TestMultiPoly(unittest.TestCase):
    def setUp(self):
        self.x = MultiPoly.variable(0, 2)
        self.y = MultiPoly.variable(1, 2)

    def test_to_rational(self):
        self.assertEqual(to_rational("-0.65"), Fraction(-13, 20))
        self.assertEqual(to_rational("3/4"), Fraction(3, 4))
        self.assertEqual(to_rational(0.1), Fraction(1, 10))
        self.assertEqual(to_rational(7), Fraction(7))
        with self.assertRaises(ValueError):
            to_rational("")
        with self.assertRaises(TypeError):
            to_rational(True)

    def test_zero_coefficients_dropped(self):
        p = MultiPoly(2, {(1, 0): 1, (0, 1): 0})
        self.assertEqual(len(p), 1)
        self.assertTrue((self.x - self.x).is_zero())
        self.assertEqual(MultiPoly.zero(2).total_degree(), -1)

    def test_arith_examples(self):
        x, y = self.x, self.y
        self.assertEqual(poly_arith(x + y, x - y, "add"), 2 * x)
        self.assertEqual(poly_arith(x + 1, x - 1, "mul"), x**2 - 1)
        self.assertEqual(poly_arith(x + 2 * y, 3 * x - y, "mul"), 3 * x**2 + 5 * x * y - 2 * y**2)
        self.assertEqual(poly_arith(x, y, "sub"), x - y)

    def test_arith_errors(self):
        z = MultiPoly.variable(0, 3)
        with self.assertRaises(VariableCountError):
            poly_arith(self.x, z, "add")
        with self.assertRaises(VariableCountError):
            self.x * z
        with self.assertRaises(ValueError):
            poly_arith(self.x, self.y, "div")
        with self.assertRaises(PolynomialIndexError):
            MultiPoly.variable(2, 2)
        with self.assertRaises(ValueError):
            MultiPoly(2, {(1, 0, 0): 1})

    @settings(max_examples=40, deadline=None)
    @given(polys, polys, polys)
    def test_ring_axioms(self, a, b, c):
        self.assertEqual(a + b, b + a)
        self.assertEqual(a * b, b * a)
        self.assertEqual((a + b) + c, a + (b + c))
        self.assertEqual((a * b) * c, a * (b * c))
        self.assertEqual(a * (b + c), a * b + a * c)
        self.assertTrue((a - a).is_zero())

    @settings(max_examples=30, deadline=None)
    @given(polys, polys)
    def test_product_matches_sympy(self, a, b):
        self.assertEqual(a * b, from_sympy(to_sympy(a) * to_sympy(b)))

    def test_differentiate(self):
        x, y = self.x, self.y
        self.assertEqual(differentiate(x**3 * y, 0), 3 * x**2 * y)
        self.assertTrue(differentiate(MultiPoly.constant(5, 2), 0).is_zero())
        self.assertEqual(differentiate(x**2 * y + x * y**2, 1), x**2 + 2 * x * y)
        with self.assertRaises(PolynomialIndexError):
            differentiate(x, 2)

    @settings(max_examples=30, deadline=None)
    @given(polys)
    def test_differentiate_matches_sympy(self, p):
        self.assertEqual(differentiate(p, 0), from_sympy(sympy.diff(to_sympy(p), SX)))
        self.assertEqual(differentiate(p, 1), from_sympy(sympy.diff(to_sympy(p), SY)))

    def test_evaluate(self):
        t = MultiPoly.variable(0, 1)
        self.assertEqual(evaluate(t**2 - 1, [3]), 8)
        self.assertIsInstance(evaluate(t**2 - 1, [Fraction(1, 2)]), Fraction)
        self.assertEqual(evaluate(t**2 - 1, [Fraction(1, 2)]), Fraction(-3, 4))
        self.assertAlmostEqual(abs(evaluate(t**2 + 1, [1j])), 0.0)
        self.assertAlmostEqual(evaluate(t**2 - 1, [0.5]), -0.75)

    def test_evaluate_mpmath(self):
        t = MultiPoly.variable(0, 1)
        with mpmath.workprec(128):
            value = evaluate(t**2 - 2, [mpmath.sqrt(2)])
            self.assertLess(abs(value), mpmath.mpf(2) ** -120)

    def test_evaluate_wrong_length(self):
        with self.assertRaises(VariableCountError):
            evaluate(self.x, [1])

    def test_evaluate_many(self):
        p = self.x**2 * self.y - 3 * self.y + 1
        points = np.array([[1.0, 2.0], [0.5, -1.0], [2.0, 0.0]])
        expected = [evaluate(p, list(row)) for row in points]
        np.testing.assert_allclose(evaluate_many(p, points), expected)
        np.testing.assert_array_equal(evaluate_many(MultiPoly.constant(4, 2), points), [4.0, 4.0, 4.0])
        complex_points = np.array([[1j, 1.0], [2.0, -1j]])
        np.testing.assert_allclose(evaluate_many(p, complex_points), [-1 - 3 + 1, -4j + 3j + 1])

    def test_horner_layout(self):
        p = 3 * self.x**2 * self.y + self.x + 2
        self.assertEqual(p.nested(), [[2], [1], [None, 3]])
        self.assertIsNone(MultiPoly.zero(2).nested())

    @given(polys, integers(-5, 5), integers(-5, 5))
    @settings(max_examples=40, deadline=None)
    def test_horner_matches_exact(self, p, a, b):
        exact = evaluate(p, [Fraction(a, 3), Fraction(b, 7)])
        approx = evaluate(p, [a / 3, b / 7])
        self.assertAlmostEqual(approx, float(exact), delta=1e-9)
        with mpmath.workprec(128):
            precise = evaluate(p, [mpmath.mpf(a) / 3, mpmath.mpf(b) / 7])
            self.assertLess(abs(precise - to_mp(exact)), mpmath.mpf(2) ** -100)

    def test_univariate_coefficients(self):
        p = 2 * self.y**3 - self.y + 5
        self.assertEqual(p.univariate_coefficients(1), [2, 0, -1, 5])
        with self.assertRaises(ValueError):
            (self.x * self.y).univariate_coefficients(1)

    def test_leading_terms(self):
        x, y = self.x, self.y
        p = x * y**3 + x**2 * y + 4
        self.assertEqual(p.leading_monomial(MonomialOrder.lex(2)), (2, 1))
        self.assertEqual(p.leading_monomial(MonomialOrder.grevlex(2)), (1, 3))
        reversed_lex = MonomialOrder("lex", (1, 0))
        self.assertEqual(p.leading_monomial(reversed_lex), (1, 3))
        self.assertEqual(reversed_lex.last_variable, 0)

    def test_content_and_primitive(self):
        p = MultiPoly(2, {(1, 0): Fraction(-2, 3), (0, 0): Fraction(4, 9)})
        self.assertEqual(p.content(), Fraction(2, 9))
        self.assertEqual(p.primitive(MonomialOrder.lex(2)), MultiPoly(2, {(1, 0): 3, (0, 0): -2}))


class TestPolyDet(unittest.TestCase):
    def setUp(self):
        self.x = MultiPoly.variable(0, 2)
        self.y = MultiPoly.variable(1, 2)
        self.one = MultiPoly.constant(1, 2)
        self.zero = MultiPoly.zero(2)

    def test_examples(self):
        x, y, one, zero = self.x, self.y, self.one, self.zero
        self.assertEqual(poly_det(PolyMatrix([[x * y + 1]])), x * y + 1)
        self.assertEqual(poly_det(PolyMatrix([[x, zero], [zero, y]])), x * y)
        self.assertEqual(poly_det(PolyMatrix([[x, one], [one, x]])), x**2 - 1)

    def test_errors(self):
        with self.assertRaises(ValueError):
            poly_det(PolyMatrix([[self.x, self.y]]))
        big = PolyMatrix.from_rationals(np.eye(6, dtype=int).tolist(), 2)
        with self.assertRaises(ValueError):
            poly_det(big)

    @settings(max_examples=15, deadline=None)
    @given(lists(polys, min_size=9, max_size=9))
    def test_matches_sympy(self, entries):
        rows = [entries[0:3], entries[3:6], entries[6:9]]
        expected = sympy.Matrix([[to_sympy(p) for p in row] for row in rows]).det(method="berkowitz")
        self.assertEqual(poly_det(PolyMatrix(rows)), from_sympy(expected))

    def test_gram_product(self):
        m = PolyMatrix([[self.x, self.one], [self.y, self.x]])
        self.assertEqual(poly_det(m @ m.transpose()), poly_det(m) ** 2)


if __name__ == "__main__":
    unittest.main()
