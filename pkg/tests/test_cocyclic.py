import unittest
from fractions import Fraction

from pycyclic.cocyclic import (
    B_lambda,
    CocyclicComplex,
    CosimplicialComplex,
    S_lambda,
    TotalMixed,
    connes_les_report,
    constant_cocyclic,
    hc_lambda,
    i_lambda_comparison,
    identification_report,
    identity_report,
    normalized_report,
    normalized_subcomplex,
    parse_cocyclic,
    totalize,
    validate_cocyclic,
)
from pycyclic.dgfrob import builtin
from pycyclic.errors import ParseError, ShapeMismatch, ValidationFailed
from pycyclic.hochschild import Coefficients, build_ch
from pycyclic.linalg import GradedSpace
from pycyclic.mixed import gysin_les_reports
from pycyclic.report import CheckStatus


def ground(L: int = 4) -> CocyclicComplex:
    return constant_cocyclic(GradedSpace((0, 0), {0: ["1"]}), L, name="pt")


class TestCocyclicComplex(unittest.TestCase):
    def test_constant_is_cocyclic(self):

        self.assertTrue(validate_cocyclic(ground()).passed)

    def test_broken_cyclic_operator(self):

        def unit(*args):
            return {args[-1]: Fraction(1)}

        def double(k, p, label):
            return {label: Fraction(2)}

        levels = [GradedSpace((0, 0), {0: ["1"]})] * 3
        C = CocyclicComplex.from_rules(levels, unit, unit, double, name="bad")
        report = validate_cocyclic(C)
        self.assertFalse(report.passed)
        self.assertIn("tau^1=1@0,0", [c.name for c in report.failures])
        with self.assertRaises(ValidationFailed) as context:
            totalize(C)
        self.assertIs(context.exception.report.passed, False)

    def test_missing_structure_maps(self):

        level = GradedSpace((0, 0), {0: ["1"]})
        with self.assertRaises(ShapeMismatch):
            CosimplicialComplex([level, level], {}, {})
        with self.assertRaises(ShapeMismatch):
            CosimplicialComplex([], {}, {})

    def test_connes_operator_needs_cyclic_maps(self):

        C = ground(2)
        plain = CosimplicialComplex(C.levels, C.cofaces, C.codegeneracies)
        with self.assertRaises(ShapeMismatch):
            TotalMixed(plain)

    def test_text_dump(self):

        C = parse_cocyclic(ground(3).to_text(), name="pt")
        self.assertIsInstance(C, CocyclicComplex)
        self.assertEqual(C.max_level, 3)
        self.assertTrue(validate_cocyclic(C).passed)

    def test_text_errors(self):

        with self.assertRaises(ParseError) as context:
            parse_cocyclic("cocyclic x\n")
        self.assertEqual(context.exception.line, 1)
        with self.assertRaises(ParseError) as context:
            parse_cocyclic("cosimplicial 1\nlevel 0 0 0 1\nlevel 2 0 0 1\n")
        self.assertEqual(context.exception.line, 3)
        with self.assertRaises(ParseError):
            parse_cocyclic("cosimplicial 0\nlevel 0 0 0 1\nface 0 0\n")


class TestTotalization(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.T = totalize(ground(4))
        cls.column = cls.T.column_at(0)

    def test_columns(self):

        self.assertTrue(self.T.split)
        self.assertEqual(len(self.T.columns()), 1)
        self.assertIsNone(self.T.column_at(1))

    def test_hochschild(self):

        M = self.column.mixed
        self.assertEqual([M.cohomology(n).dimension for n in range(4)], [1, 0, 0, 0])
        self.assertTrue(all(M.cohomology(n).certified for n in range(4)))
        self.assertFalse(M.cohomology(4).certified)

    def test_cyclic_homology_of_the_point(self):

        self.assertEqual([hc_lambda(self.column, n).dimension for n in range(4)], [1, 0, 1, 0])

    def test_identities(self):

        report = identity_report(self.T)
        self.assertTrue(report.passed, [c.name for c in report.failures])
        self.assertEqual(report.meta["max_level"], 4)

    def test_normalized(self):

        report = normalized_report(self.T, self.column)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_normalized_levels_vanish(self):

        (normalized,) = normalized_subcomplex(self.T)
        self.assertEqual([normalized.dim(n) for n in range(5)], [1, 0, 0, 0, 0])
        self.assertEqual(normalized.cohomology(0).dimension, 1)
        self.assertEqual(normalized.include([Fraction(2)], 0), {0: Fraction(2)})
        with self.assertRaises(ShapeMismatch):
            normalized.include([], 0)

    def test_i_lambda(self):

        report = i_lambda_comparison(self.T, range(0, 4))
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_periodicity(self):

        image = S_lambda(self.T, self.column, {(0, "1"): Fraction(1)}, 0)
        self.assertEqual(image, {(2, "1"): Fraction(-1, 2)})
        self.assertNotEqual(hc_lambda(self.column, 2).classify(image), [0])

    def test_connes_sequence(self):

        report = connes_les_report(self.T, range(0, 3))
        self.assertTrue(report.passed, [c.name for c in report.failures])

def passed_named(report, fragment):
    return [c.name for c in report.checks if c.status == CheckStatus.PASS and fragment in c.name]


class TestDualSphere(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        A, pairing = builtin("sphere(2)")
        cls.H = build_ch(A, Coefficients.DUAL, 2, pairing)
        cls.T = cls.H.total
        cls.degrees = range(-10, 2)

    def test_cocyclic(self):

        report = validate_cocyclic(self.H.complex)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_identities(self):

        report = identity_report(self.T)
        self.assertTrue(report.passed, [c.name for c in report.failures])
        self.assertTrue(passed_named(report, "bB+Bb=0"))

    def test_connes_sequence(self):

        report = connes_les_report(self.T, self.degrees)
        self.assertTrue(report.passed, [c.name for c in report.failures])
        self.assertTrue(passed_named(report, "exact@"))
        self.assertTrue(passed_named(report, "B_lambda=B in HC_lambda"))
        self.assertTrue(passed_named(report, "p0.I=i"))

    def test_connecting_map_is_B_up_to_boundaries(self):

        checked = 0
        for column in self.T.columns():
            M = column.mixed
            for n in self.degrees:
                h, hc = M.cohomology(n), hc_lambda(column, n - 1)
                if not (h.certified and hc.certified):
                    continue
                for c in h.representatives:
                    self.assertEqual(hc.classify(B_lambda(self.T, c, n)), hc.classify(M.apply_B(c, n)))
                    checked += 1
        self.assertGreater(checked, 0)

    def test_hc_lambda_matches_negative(self):

        report = i_lambda_comparison(self.T, self.degrees)
        self.assertTrue(report.passed, [c.name for c in report.failures])
        self.assertTrue(passed_named(report, "I_lambda"))

    def test_identification_alone(self):

        for column in self.T.columns():
            report = identification_report(self.T, column, self.degrees)
            self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_gysin_diagram(self):

        for column in self.T.columns():
            report = gysin_les_reports(column.mixed, self.degrees, 1)
            self.assertTrue(report.passed, [c.name for c in report.failures])


class TestDualExterior(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        A, pairing = builtin("exterior(2)")
        cls.H = build_ch(A, Coefficients.DUAL, 2, pairing)

    def test_cocyclic(self):

        report = validate_cocyclic(self.H.complex)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_identities(self):

        report = identity_report(self.H.total)
        self.assertTrue(report.passed, [c.name for c in report.failures])
        self.assertTrue(passed_named(report, "b's+sb'=1"))
        self.assertTrue(passed_named(report, "BB=0"))


if __name__ == "__main__":
    unittest.main()
