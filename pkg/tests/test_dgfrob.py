import json
import os
import tempfile
import unittest
from fractions import Fraction

from pycyclic.dgfrob import (
    BUILTINS,
    DgAlgebra,
    Pairing,
    builtin,
    dual_of,
    exterior,
    load_algebra,
    parse_spec,
    serialize,
    theta_quasi_iso_report,
    truncpoly,
    validate_algebra,
    validate_pairing,
)
from pycyclic.errors import ParseError, UnknownName, ValidationFailed


class TestBuiltins(unittest.TestCase):
    def test_builtins_are_frobenius(self):

        for name in BUILTINS:
            A, pairing = builtin(name)
            self.assertTrue(validate_algebra(A).passed, name)
            report = validate_pairing(pairing)
            self.assertTrue(report.passed, (name, [c.name for c in report.failures]))
            self.assertTrue(pairing.is_nondegenerate(), name)

    def test_names(self):

        self.assertEqual(builtin("sphere2")[0].name, "sphere(2)")
        self.assertEqual(builtin("truncpoly(2, 2)")[0].name, "truncpoly(2,2)")
        self.assertEqual(builtin("cp2")[1].m, -4)
        for name in ("torus", "sphere(0)", "truncpoly(2)", "exterior()", "sphere(1,2)"):
            with self.assertRaises(UnknownName, msg=name):
                builtin(name)

    def test_odd_generator(self):

        with self.assertRaises(UnknownName):
            truncpoly(2, 1)

    def test_exterior_signs(self):

        A, pairing = exterior(2)
        x1, x2, top = A.index("x1"), A.index("x2"), A.index("x1x2")
        self.assertEqual(A.times(x1, x2), {top: Fraction(1)})
        self.assertEqual(A.times(x2, x1), {top: Fraction(-1)})
        self.assertEqual(A.times(x1, x1), {})
        self.assertEqual(pairing.entry(x2, x1), -1)
        with self.assertRaises(UnknownName):
            A.index("x3")

    def test_theta(self):

        for name in ("sphere(2)", "exterior(2)"):
            report = theta_quasi_iso_report(builtin(name)[1])
            self.assertTrue(report.passed, name)
            self.assertIn("ranks", report.meta)

    def test_dual_degrees(self):

        A, pairing = builtin("sphere(2)")
        dual = dual_of(pairing)
        self.assertEqual([dual.degree(x) for x in range(A.dim)], [2, 0])


class TestValidation(unittest.TestCase):
    def test_degree_of_d(self):

        A = DgAlgebra(["1", "x", "y"], [0, 0, 2], 0, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1}}, {1: {2: 1}})
        report = validate_algebra(A)
        self.assertFalse(report.passed)
        self.assertEqual(report.failures[0].name, "d raises degree by one")
        self.assertEqual(report.failures[0].witness, ("x", "y"))

    def test_acyclic_pair(self):

        unit = {(0, i): {i: 1} for i in range(3)}
        unit.update({(i, 0): {i: 1} for i in range(3)})
        A = DgAlgebra(["1", "a", "b"], [0, -1, 0], 0, unit, {1: {2: 1}})
        self.assertTrue(validate_algebra(A).passed)

    def test_degenerate_pairing(self):

        A, _ = truncpoly(2, 2)
        pairing = Pairing(A, -4, {(0, 2): 1, (2, 0): 1})
        self.assertFalse(pairing.is_nondegenerate())
        self.assertIsNone(pairing.inverse_matrix())

    def test_asymmetric_pairing(self):

        A, _ = truncpoly(1, 2)
        pairing = Pairing(A, -2, {(0, 1): 1, (1, 0): 2})
        report = validate_pairing(pairing)
        self.assertIn("graded symmetry", [c.name for c in report.failures])


class TestDocuments(unittest.TestCase):
    def test_serialized_builtin(self):

        A, pairing = builtin("exterior(2)")
        B, parsed = parse_spec(serialize(A, pairing))
        self.assertEqual(B.mult, A.mult)
        self.assertEqual(parsed.gram, pairing.gram)
        self.assertEqual(parsed.m, -2)

    def test_syntax_error_position(self):

        with self.assertRaises(ParseError) as context:
            parse_spec('{\n  "basis": [["1", 0]],\n  "unit": 0,\n}')
        self.assertEqual(context.exception.line, 4)

    def test_structural_errors(self):

        with self.assertRaises(ParseError):
            parse_spec("[]")
        with self.assertRaises(ParseError):
            parse_spec(json.dumps({"basis": [], "unit": 0}))
        with self.assertRaises(ParseError) as context:
            parse_spec('{\n"basis": [["1", 0]],\n"unit": 3\n}')
        self.assertEqual(context.exception.line, 3)
        with self.assertRaises(ParseError):
            parse_spec(json.dumps({"basis": [["1", 0]], "unit": 0, "mult": [[0, 0, 5, 1]]}))
        with self.assertRaises(ParseError):
            parse_spec(json.dumps({"basis": [["1", 0]], "unit": 0, "mult": [[0, 0, 0, "1/0"]]}))

    def test_invalid_algebra(self):

        document = {"basis": [["1", 0], ["x", 2]], "unit": 0, "mult": [[0, 0, 0, 1], [0, 1, 1, 1]]}
        with self.assertRaises(ValidationFailed) as context:
            parse_spec(json.dumps(document))
        self.assertIn("unit laws", [c.name for c in context.exception.report.failures])
        A, _ = parse_spec(json.dumps(document), validate=False)
        self.assertEqual(A.dim, 2)

    def test_load_from_file(self):

        A, pairing = builtin("sphere(3)")
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "sphere.json")
            with open(path, "w", encoding="utf-8") as stream:
                stream.write(serialize(A, pairing))
            B, parsed = load_algebra(file=path)
        self.assertEqual(B.degrees, [0, 3])
        self.assertEqual(parsed.m, -3)
        with self.assertRaises(UnknownName):
            load_algebra()


if __name__ == "__main__":
    unittest.main()
