import random
import unittest
from fractions import Fraction

from pycyclic.cocyclic import CocyclicComplex, CosimplicialComplex, validate_cocyclic, validate_cosimplicial
from pycyclic.dgfrob import Pairing, builtin, truncpoly
from pycyclic.errors import ArityOverflow, HypothesisFailed
from pycyclic.operads import (
    OperadTotal,
    end_cyclic_structure,
    endomorphism_operad,
    koszul_sign,
    operadic_composition_sign,
    suspension_sign,
    total_report,
    totalize_operad,
    validate_cyclic,
    validate_mult_unit,
    validate_operad,
)


class TestSigns(unittest.TestCase):
    def test_koszul_sign(self):

        self.assertEqual(koszul_sign([1, 1], [1, 0]), -1)
        self.assertEqual(koszul_sign([2, 1], [1, 0]), 1)
        self.assertEqual(koszul_sign([1, 1, 1], [0, 1, 2]), 1)
        self.assertEqual(koszul_sign([1, 1, 1], [2, 0, 1]), 1)
        self.assertEqual(koszul_sign([1, 1, 1], [2, 1, 0]), -1)

    def test_suspension_sign(self):

        self.assertEqual(suspension_sign([]), 1)
        self.assertEqual(suspension_sign([1]), 1)
        self.assertEqual(suspension_sign([1, 1]), -1)
        self.assertEqual(suspension_sign([2, 3]), 1)

    def test_operadic_composition_sign(self):

        self.assertEqual(operadic_composition_sign(2, 2, 2, 0), -1)
        self.assertEqual(operadic_composition_sign(2, 2, 1, 1), -1)
        self.assertEqual(operadic_composition_sign(1, 0, 1, 3), 1)
        with self.assertRaises(ValueError):
            operadic_composition_sign(2, 1, 3, 0)


class TestEndomorphismOperad(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.A, cls.pairing = builtin("sphere(2)")
        cls.O, cls.mult_unit = endomorphism_operad(cls.A)
        cls.C = end_cyclic_structure(cls.pairing, cls.O)

    def test_axioms(self):

        report = validate_operad(self.O, 2, random.Random("operad"), 50)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_composition_sign(self):

        A, _ = builtin("exterior(2)")
        O, _ = endomorphism_operad(A)
        x1, x2, top = A.index("x1"), A.index("x2"), A.index("x1x2")
        f = {((x1, x2), top): Fraction(1)}
        # g has degree 1 and passes x1
        g = {((0,), x2): Fraction(1)}
        self.assertEqual(O.compose(f, 2, g), {((x1, 0), top): Fraction(-1)})
        self.assertEqual(O.compose(f, 1, g), {})

    def test_cyclic_structure(self):

        report = validate_cyclic(self.O, self.C, 2, random.Random("cyclic"), 50)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_mult_unit(self):

        report = validate_mult_unit(self.O, self.mult_unit, self.C)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_degenerate_pairing(self):

        A, _ = truncpoly(2, 2)
        with self.assertRaises(HypothesisFailed):
            end_cyclic_structure(Pairing(A, -4, {(0, 2): 1, (2, 0): 1}))

    def test_odd_cyclic_structure(self):

        A, pairing = builtin("exterior(2)")
        O, mult_unit = endomorphism_operad(A)
        C = end_cyclic_structure(pairing, O)
        report = validate_cyclic(O, C, 2, random.Random("exterior"), 30)
        self.assertTrue(report.passed, [c.name for c in report.failures])
        self.assertTrue(validate_mult_unit(O, mult_unit, C).passed)


class TestTotalization(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        A, pairing = builtin("ground")
        O, mult_unit = endomorphism_operad(A)
        cls.total = totalize_operad(O, mult_unit, end_cyclic_structure(pairing, O), 3, random.Random("ground"), 10)

    def test_structure(self):

        A, pairing = builtin("sphere(2)")
        O, mult_unit = endomorphism_operad(A)
        total = OperadTotal(O, mult_unit, end_cyclic_structure(pairing, O), 2)
        report = total_report(total, random.Random("sphere"), 10)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_invariants_of_the_ground_field(self):

        self.assertEqual(len(self.total.invariants(0, 0)), 1)
        self.assertEqual(self.total.invariants(1, 0), [])
        self.assertEqual(len(self.total.invariants(2, 0)), 1)

    def test_truncation(self):

        big = {((0, 0, 0, 0), 0): Fraction(1), ((0,), 0): Fraction(2)}
        self.assertEqual(self.total.truncate(big), {((0,), 0): Fraction(2)})
        strict = OperadTotal(self.total.operad, self.total.mult_unit, arity_cap=3, strict=True)
        with self.assertRaises(ArityOverflow):
            strict.truncate(big)

    def test_lambda_needs_cyclic_structure(self):

        plain = OperadTotal(self.total.operad, self.total.mult_unit)
        with self.assertRaises(HypothesisFailed):
            plain.lam({((0,), 0): Fraction(1)})
        self.assertIsInstance(plain.cosimplicial(2), CosimplicialComplex)
        self.assertTrue(validate_cosimplicial(plain.cosimplicial(2)).passed)

    def test_cocyclic_levels(self):

        C = self.total.cosimplicial(3)
        self.assertIsInstance(C, CocyclicComplex)
        self.assertTrue(validate_cocyclic(C).passed)

    def test_b_of_the_identity(self):

        identity = {((0,), 0): Fraction(1)}
        self.assertEqual(self.total.b(identity), {((0, 0), 0): Fraction(-1)})
        self.assertEqual(self.total.b(self.total.epsilon), {})


if __name__ == "__main__":
    unittest.main()
