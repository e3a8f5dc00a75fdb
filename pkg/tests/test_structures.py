import random
import unittest

from pycyclic.dgfrob import builtin
from pycyclic.errors import MissingPairing, UnknownName, WindowTooSmall
from pycyclic.hochschild import Coefficients, build_ch
from pycyclic.mixed import Grading
from pycyclic.structures import (
    MODELS,
    DualModel,
    b_zero,
    chain_vs_homology_gravity,
    extract_bv,
    gravity_from_bv,
    gravity_model,
    gravity_morphism_checks,
    gravity_report,
    i_lambda,
    isomorphism_report,
    second_bracket_consistency,
)


class TestBV(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.A, cls.pairing = builtin("ground")
        cls.algebra = extract_bv(cls.pairing, 3, range(-2, 1), rng=random.Random("bv"), samples=5)

    def test_degrees_are_internal(self):

        self.assertEqual(self.algebra.degrees, [0, 1, 2])
        self.assertEqual(self.algebra.V.dim(0), 1)
        self.assertEqual(self.algebra.V.dim(1), 0)

    def test_certificate(self):

        report = self.algebra.report
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_unit_class(self):

        (ref, unit), = self.algebra.classes()
        self.assertEqual(ref[0], 0)
        self.assertTrue(any(self.algebra.coordinates(self.algebra.times(unit, unit))))
        self.assertEqual(self.algebra.coordinates(self.algebra.bracket(unit, unit)), [])

    def test_tables(self):

        tables = self.algebra.tables()
        self.assertEqual(sorted(tables), ["bracket", "delta", "product"])
        self.assertEqual(len(tables["product"]), 1)

    def test_errors(self):

        with self.assertRaises(WindowTooSmall):
            extract_bv(self.pairing, 2, [-10])
        with self.assertRaises(MissingPairing):
            DualModel(build_ch(self.A, Coefficients.SELF, 2))
        with self.assertRaises(UnknownName):
            gravity_model(self.algebra.model.H, "cyclic")

    def test_cohomological_window(self):

        algebra = extract_bv(self.pairing, 2, [0], Grading.COHOMOLOGICAL, samples=2)
        self.assertEqual(algebra.degrees, [0])

    def test_truncated_degrees_are_marked(self):

        algebra = extract_bv(self.pairing, 2, range(-5, 1), samples=2)
        classes = algebra.report.meta["classes"]
        self.assertEqual(classes[0], 1)
        self.assertEqual(classes[5], "uncertified")


class TestGravity(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        A, pairing = builtin("ground")
        cls.algebra = extract_bv(pairing, 3, range(-2, 1), samples=5)
        H = cls.algebra.model.H
        cls.data = {which: gravity_from_bv(cls.algebra, gravity_model(H, which), 3) for which in MODELS}

    def test_brackets(self):

        for which, data in self.data.items():
            report = gravity_report(data, random.Random(which), 5)
            self.assertTrue(report.passed, (which, [c.name for c in report.failures]))

    def test_lambda_classes(self):

        W = self.data["lambda"].model.W
        self.assertEqual([W.dim(n) for n in range(3)], [1, 0, 1])

    def test_morphisms(self):

        report = gravity_morphism_checks(self.algebra, rng=random.Random("morphisms"), samples=5)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_inclusion_is_an_isomorphism(self):

        f = i_lambda(self.data["lambda"], self.data["negative"])
        report = isomorphism_report(f)
        self.assertTrue(report.passed, [c.name for c in report.failures])
        self.assertEqual(b_zero(self.data["positive"], self.data["negative"]).shift, -1)

    def test_chain_level(self):

        data = self.data["lambda"]
        report = second_bracket_consistency(data, random.Random("edge"), 5)
        self.assertTrue(report.passed, [c.name for c in report.failures])
        self.assertIn("global_sign", report.meta)
        report = chain_vs_homology_gravity(data, random.Random("chain"), 5)
        self.assertTrue(report.passed, [c.name for c in report.failures])


class TestFrobeniusExamples(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.algebras = {}
        for name, K in (("sphere(2)", 3), ("exterior(2)", 2)):
            _, pairing = builtin(name)
            cls.algebras[name] = extract_bv(pairing, K, range(-2, 1), rng=random.Random(name), samples=5)

    def test_bv_identities(self):

        for name, algebra in self.algebras.items():
            report = algebra.report
            self.assertTrue(report.passed, (name, [c.name for c in report.failures]))
            self.assertTrue(algebra.classes(), name)

    def test_gravity_models(self):

        for name, algebra in self.algebras.items():
            H = algebra.model.H
            for which in MODELS:
                data = gravity_from_bv(algebra, gravity_model(H, which), 3)
                report = gravity_report(data, random.Random(f"{name}/{which}"), 5)
                self.assertTrue(report.passed, (name, which, [c.name for c in report.failures]))

    def test_gravity_morphisms(self):

        for name, algebra in self.algebras.items():
            report = gravity_morphism_checks(algebra, rng=random.Random(name), samples=5)
            self.assertTrue(report.passed, (name, [c.name for c in report.failures]))

    def test_chain_level_brackets(self):

        for name, algebra in self.algebras.items():
            data = gravity_from_bv(algebra, gravity_model(algebra.model.H, "lambda"), 3)
            report = chain_vs_homology_gravity(data, random.Random(name), 5)
            self.assertTrue(report.passed, (name, [c.name for c in report.failures]))


if __name__ == "__main__":
    unittest.main()
