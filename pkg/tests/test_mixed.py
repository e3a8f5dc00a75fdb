import unittest
from fractions import Fraction

from pycyclic.errors import ParseError, ShapeMismatch, UnboundedAssembly
from pycyclic.linalg import GradedMap, GradedSpace, SparseMatrix
from pycyclic.mixed import (
    Grading,
    InfHomotopy,
    InfMorphism,
    MixedComplex,
    Theory,
    UComplex,
    compute_hc,
    diagram_report,
    gysin_les_reports,
    naturality_report,
    quasi_iso_check,
    sequence,
    tautological_les_report,
    validate_inf_homotopy,
    validate_inf_morphism,
    validate_mixed,
)
from pycyclic.report import CheckStatus


def point() -> MixedComplex:
    """The ground field in degree 0 with b = B = 0"""
    space = GradedSpace((0, 0), {0: ["1"]})
    return MixedComplex(space, GradedMap(space, space, 1), GradedMap(space, space, -1), name="k")


def connes_pair() -> MixedComplex:
    """x in degree 0, y in degree -1, b = 0 and B x = y"""
    space = GradedSpace((-1, 0), {-1: ["y"], 0: ["x"]})
    B = GradedMap(space, space, -1, {0: SparseMatrix(1, 1, {(0, 0): 1})})
    return MixedComplex(space, GradedMap(space, space, 1), B, name="E")


class TestMixedComplex(unittest.TestCase):
    def test_axioms(self):

        self.assertTrue(validate_mixed(point()).passed)
        self.assertTrue(validate_mixed(connes_pair()).passed)

    def test_anticommutation_failure(self):

        space = GradedSpace((-1, 0), {-1: ["y"], 0: ["x"]})
        one = SparseMatrix(1, 1, {(0, 0): 1})
        M = MixedComplex(space, GradedMap(space, space, 1, {-1: one}), GradedMap(space, space, -1, {0: one}))
        report = validate_mixed(M)
        self.assertFalse(report.passed)
        self.assertIn("bB+Bb=0@0", [c.name for c in report.failures])

    def test_wrong_degrees(self):

        space = GradedSpace((0, 0), {0: ["1"]})
        with self.assertRaises(ShapeMismatch):
            MixedComplex(space, GradedMap(space, space, 0), GradedMap(space, space, -1))

    def test_hochschild_homology(self):

        M = connes_pair()
        self.assertEqual(M.cohomology(0).dimension, 1)
        self.assertEqual(M.cohomology(-1).dimension, 1)
        self.assertEqual(M.cohomology(1).dimension, 0)

    def test_truncation_ceiling(self):

        space = GradedSpace((0, 2), {0: ["a"], 1: ["b"], 2: ["c"]})
        M = MixedComplex(space, GradedMap(space, space, 1), GradedMap(space, space, -1), ceiling=1)
        self.assertTrue(M.cohomology(0).certified)
        self.assertFalse(M.cohomology(1).certified)
        with self.assertRaises(UnboundedAssembly):
            compute_hc(M, Theory.POSITIVE, 0)

    def test_text_format(self):

        M = MixedComplex.from_text(connes_pair().to_text(), name="E")
        self.assertEqual(M.space.window, (-1, 0))
        self.assertEqual(M.B.block(0), SparseMatrix(1, 1, {(0, 0): 1}))

    def test_text_errors(self):

        with self.assertRaises(ParseError) as context:
            MixedComplex.from_text("window 0 0\nceiling none\ndims 1 2\n")
        self.assertEqual(context.exception.line, 3)
        with self.assertRaises(ParseError):
            MixedComplex.from_text("window 0 0\nceiling none\ndims 1\nd 0\n1 1\n0 0 1/1\n")


class TestTheories(unittest.TestCase):
    def test_point_negative(self):

        M = point()
        for n in range(-3, 5):
            expected = 1 if n >= 0 and n % 2 == 0 else 0
            self.assertEqual(compute_hc(M, Theory.NEGATIVE, n).dimension, expected, n)

    def test_point_periodic_and_positive(self):

        M = point()
        for n in range(-4, 3):
            expected = 1 if n % 2 == 0 else 0
            self.assertEqual(compute_hc(M, Theory.PERIODIC, n, cutoff=3).dimension, expected, n)
        positive = [n for n in range(-6, 3) if compute_hc(M, Theory.POSITIVE, n, cutoff=2).dimension]
        self.assertEqual(positive, [-4, -2, 0])

    def test_connes_operator_kills_periodic(self):

        M = connes_pair()
        for n in (-2, -1, 0, 1):
            self.assertEqual(compute_hc(M, Theory.PERIODIC, n, cutoff=3).dimension, 0, n)

    def test_connes_pair_negative_and_positive(self):

        M = connes_pair()
        self.assertEqual(compute_hc(M, Theory.NEGATIVE, -1).dimension, 1)
        self.assertEqual(compute_hc(M, Theory.NEGATIVE, 0).dimension, 0)
        self.assertEqual(compute_hc(M, Theory.NEGATIVE, 2).dimension, 0)
        result = compute_hc(M, Theory.POSITIVE, 0, cutoff=2)
        self.assertEqual(result.dimension, 1)
        self.assertEqual(result.representatives, [{(0, "x"): Fraction(1)}])
        self.assertTrue(result.stable)
        self.assertEqual(compute_hc(M, Theory.POSITIVE, -2, cutoff=2).dimension, 0)

    def test_unbounded_assembly(self):

        space = GradedSpace((0, 0), {0: ["1"]})
        M = MixedComplex(space, GradedMap(space, space, 1), GradedMap(space, space, -1), floor=0)
        with self.assertRaises(UnboundedAssembly):
            UComplex(M, Theory.NEGATIVE)
        with self.assertRaises(UnboundedAssembly):
            UComplex(M, Theory.PERIODIC, 2)
        self.assertEqual(UComplex(M, Theory.POSITIVE, 2).dim(0), 1)

    def test_assembly_names(self):

        M = connes_pair()
        self.assertEqual(M.assembly(Theory.POSITIVE, 2).name, "POS_2(E)")
        self.assertEqual(M.assembly(Theory.NEGATIVE, 5).name, "NEG(E)")

    def test_unknown_label(self):

        group = connes_pair().cohomology(0)
        with self.assertRaises(ShapeMismatch):
            group.classify({"z": Fraction(1)})


class TestGrading(unittest.TestCase):
    def test_homological_degrees(self):

        self.assertEqual(Grading.HOMOLOGICAL.internal(3), -3)
        self.assertEqual(Grading.COHOMOLOGICAL.internal(3), 3)
        self.assertEqual(Grading.HOMOLOGICAL.window((0, 6)), (-6, 0))


class TestExactSequences(unittest.TestCase):
    def test_sequence_shape(self):

        nodes, maps = sequence("tautological", [0, 1], 2)
        self.assertEqual(len(nodes), len(maps) + 1)
        self.assertEqual(str(nodes[0]), "NEG^-1")
        self.assertEqual(str(nodes[1]), "PER_2^-1")
        with self.assertRaises(ValueError):
            sequence("tautological", [0], 0)
        with self.assertRaises(ValueError):
            sequence("unknown", [0], 1)

    def test_tautological(self):

        for M in (point(), connes_pair()):
            for cutoff in (1, 2):
                report = tautological_les_report(M, range(-4, 2), cutoff)
                self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_gysin(self):

        for M in (point(), connes_pair()):
            report = gysin_les_reports(M, range(-4, 2), 2)
            self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_gysin_diagram_through_classes(self):

        report = diagram_report(connes_pair(), range(-2, 2), 2)
        self.assertTrue(report.passed, [c.name for c in report.failures])
        ran = {c.name.split("@")[0] for c in report.checks if c.status == CheckStatus.PASS}
        self.assertEqual(ran, {"B0.i=B", "B0.u.p=i+.u.B0", "p0.B0=B0"})


class TestInfinityMorphisms(unittest.TestCase):
    def test_identity(self):

        M = connes_pair()
        f = InfMorphism.identity(M)
        self.assertTrue(validate_inf_morphism(f).passed)
        self.assertTrue(quasi_iso_check(f, range(-3, 2), 2).passed)
        self.assertTrue(naturality_report(f, range(-3, 1), 2).passed)

    def test_component_degrees(self):

        M = connes_pair()
        with self.assertRaises(ShapeMismatch):
            InfMorphism(M, M, [GradedMap(M.space, M.space, 1)])
        with self.assertRaises(ShapeMismatch):
            InfMorphism(M, M, [])

    def test_not_compatible_with_B(self):

        M = connes_pair()
        # zero on x, identity on y: commutes with b but not with B
        f0 = GradedMap(M.space, M.space, 0, {-1: SparseMatrix.identity(1)})
        report = validate_inf_morphism(InfMorphism(M, M, [f0]))
        self.assertFalse(report.passed)
        self.assertIn("relation1@0", [c.name for c in report.failures])

    def test_trivial_homotopy(self):

        M = connes_pair()
        f = InfMorphism.identity(M)
        self.assertTrue(validate_inf_homotopy(InfHomotopy(f, f, [])).passed)
        g = InfMorphism(M, M, [GradedMap.zero(M.space, M.space, 0)])
        self.assertFalse(validate_inf_homotopy(InfHomotopy(f, g, [])).passed)


if __name__ == "__main__":
    unittest.main()
