import random
import unittest
from fractions import Fraction

from pycyclic.dgfrob import builtin
from pycyclic.errors import MissingPairing, ParseError, ShapeMismatch, UnknownName
from pycyclic.hochschild import (
    Coefficients,
    WeakInvariants,
    build_ch,
    cochain_total,
    connes_B_dual,
    cup_pairing_report,
    format_cochain,
    hc_theories,
    hh,
    is_weakly_invariant,
    lam_dual,
    normalized_agreement_report,
    operad_comparison_report,
    parse_cochain,
    theta_cochain,
    theta_commutation_report,
    theta_inverse_cochain,
    theta_on_ch,
    theta_report,
    weak_invariance_report,
)
from pycyclic.mixed import Grading

COHOMOLOGICAL = Grading.COHOMOLOGICAL


class TestGroundField(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.A, cls.pairing = builtin("ground")
        cls.self_ch = build_ch(cls.A, Coefficients.SELF, 3)
        cls.dual_ch = build_ch(cls.A, Coefficients.DUAL, 3, cls.pairing)

    def test_hochschild(self):

        self.assertEqual([hh(self.self_ch, n, COHOMOLOGICAL).dimension for n in range(4)], [1, 0, 0, 0])
        self.assertEqual(hh(self.self_ch, 0).dimension, 1)
        answer = hh(self.dual_ch, 2, COHOMOLOGICAL)
        self.assertEqual(answer.row(), {"degree": 2, "theory": "hh", "dimension": 0, "stable": True, "certified": True})

    def test_cyclic_theories(self):

        lam = [hc_theories(self.dual_ch, "lambda", n, grading=COHOMOLOGICAL).dimension for n in range(4)]
        self.assertEqual(lam, [1, 0, 1, 0])
        negative = [hc_theories(self.dual_ch, "negative", n, grading=COHOMOLOGICAL).dimension for n in range(3)]
        self.assertEqual(negative, [1, 0, 1])
        positive = {n: hc_theories(self.dual_ch, "positive", n, 1, COHOMOLOGICAL).dimension for n in (-2, -1, 0)}
        self.assertEqual(positive, {-2: 1, -1: 0, 0: 1})

    def test_homological_grading(self):

        answer = hc_theories(self.dual_ch, "lambda", -2)
        self.assertEqual(answer.degree, -2)
        self.assertEqual(answer.dimension, 1)

    def test_errors(self):

        with self.assertRaises(MissingPairing):
            build_ch(self.A, Coefficients.DUAL, 2)
        with self.assertRaises(MissingPairing):
            hc_theories(self.self_ch, "lambda", 0)
        with self.assertRaises(UnknownName):
            hc_theories(self.dual_ch, "cyclic", 0)

    def test_lift(self):

        vector, n = self.self_ch.lift({((0,), 0): Fraction(3)})
        self.assertEqual((vector, n), ({(1, ((0,), 0)): Fraction(3)}, 1))
        with self.assertRaises(ShapeMismatch):
            self.self_ch.lift({((0,), 0): Fraction(1), ((), 0): Fraction(1)})

    def test_lambda_on_dual_cochains(self):

        self.assertEqual(lam_dual(self.A, {((0,), 0): Fraction(1)}), {((0,), 0): Fraction(-1)})
        self.assertEqual(lam_dual(self.A, {((0, 0), 0): Fraction(1)}), {((0, 0), 0): Fraction(1)})

    def test_weak_invariants(self):

        W = WeakInvariants(self.pairing)
        self.assertEqual(W.basis(1, 0), [])
        self.assertEqual(len(W.basis(2, 0)), 1)
        self.assertFalse(is_weakly_invariant(self.pairing, {((0,), 0): Fraction(1)}))

    def test_connes_operator(self):

        image = connes_B_dual(self.dual_ch, {((0,), 0): Fraction(1)})
        self.assertEqual(list(image), [((), 0)])
        self.assertEqual(abs(image[((), 0)]), 2)
        with self.assertRaises(MissingPairing):
            connes_B_dual(self.self_ch, {((0,), 0): Fraction(1)})

    def test_normalized(self):

        report = normalized_agreement_report(self.dual_ch)
        self.assertTrue(report.passed, [c.name for c in report.failures])


class TestSphere(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.A, cls.pairing = builtin("sphere(2)")
        cls.total = cochain_total(cls.A, 3, cls.pairing)

    def test_operad_comparison(self):

        report = operad_comparison_report(build_ch(self.A, Coefficients.SELF, 1))
        self.assertTrue(report.passed, [c.name for c in report.failures])
        skipped = operad_comparison_report(build_ch(self.A, Coefficients.DUAL, 1, self.pairing))
        self.assertEqual(len(skipped.skipped), 1)

    def test_theta_is_cosimplicial(self):

        report = theta_commutation_report(theta_on_ch(self.pairing, 1))
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_theta_inverse(self):

        rng = random.Random("theta")
        for _ in range(5):
            f = self.total.random_element(rng, rng.randint(0, 2))
            self.assertEqual(theta_inverse_cochain(self.pairing, theta_cochain(self.pairing, f)), f)

    def test_multiplication_is_weakly_invariant(self):

        self.assertTrue(is_weakly_invariant(self.pairing, self.total.mu))

    def test_weak_invariance(self):

        H = build_ch(self.A, Coefficients.SELF, 2)
        W = WeakInvariants(self.pairing)
        report = weak_invariance_report(H, W, self.total, random.Random("weak"), 10)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_cup_against_pairing(self):

        report = cup_pairing_report(self.pairing, self.total, random.Random("cup"), 10)
        self.assertTrue(report.passed)

    def test_theta_report(self):

        report = theta_report(self.pairing, 2, range(-2, 1))
        self.assertTrue(report.passed, [c.name for c in report.failures])
        for degree, row in report.meta["degrees"].items():
            self.assertEqual(row["H_theta"], row["HH"], degree)
            self.assertEqual(row["HH"], row["HH_dual"], degree)


class TestCochainLiterals(unittest.TestCase):
    def test_format(self):

        A, _ = builtin("sphere(2)")
        f = parse_cochain(A, "# a comment\n2 | x x | x | 1/2\n0 |  | 1 | -3\n")
        self.assertEqual(f, {((1, 1), 1): Fraction(1, 2), ((), 0): Fraction(-3)})
        self.assertEqual(format_cochain(A, f), "0 |  | 1 | -3/1\n2 | x x | x | 1/2\n")

    def test_errors(self):

        A, _ = builtin("sphere(2)")
        with self.assertRaises(ParseError) as context:
            parse_cochain(A, "\n2 | x | x | 1\n")
        self.assertEqual(context.exception.line, 2)
        with self.assertRaises(ParseError):
            parse_cochain(A, "1 | y | x | 1\n")
        with self.assertRaises(ParseError):
            parse_cochain(A, "1 | x | x | 1/0\n")
        with self.assertRaises(ParseError):
            parse_cochain(A, "1 | x | x\n")


if __name__ == "__main__":
    unittest.main()
