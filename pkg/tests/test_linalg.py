import random
import unittest
from fractions import Fraction

import sympy

from pycyclic.errors import CompositionNotZero, ParseError, ShapeMismatch
from pycyclic.linalg import (
    GradedMap,
    GradedSpace,
    SparseMatrix,
    add_to,
    as_rational,
    coordinates,
    homology,
    image_basis,
    inverse,
    kernel_basis,
    rank,
    restrict_map,
    vstack,
)


def random_matrix(rng: random.Random, rows: int, cols: int, density: float = 0.4) -> SparseMatrix:
    entries = {}
    for r in range(rows):
        for c in range(cols):
            if rng.random() < density:
                entries[(r, c)] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return SparseMatrix(rows, cols, entries)


def to_sympy(matrix: SparseMatrix) -> sympy.Matrix:
    return sympy.Matrix(
        matrix.rows,
        matrix.cols,
        lambda r, c: sympy.Rational(matrix[r, c].numerator, matrix[r, c].denominator),
    )


class TestRationals(unittest.TestCase):
    def test_as_rational(self):

        self.assertEqual(as_rational("3/6"), Fraction(1, 2))
        self.assertEqual(as_rational(4), Fraction(4))
        with self.assertRaises(TypeError):
            as_rational(True)

    def test_add_to_drops_zeros(self):

        vector = {"a": Fraction(1), "b": Fraction(2)}
        add_to(vector, {"a": Fraction(1)}, -1)
        self.assertEqual(vector, {"b": Fraction(2)})


class TestSparseMatrix(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        rng = random.Random("linalg")
        cls.matrices = [random_matrix(rng, rng.randint(1, 7), rng.randint(1, 7)) for _ in range(40)]

    def test_rank_against_sympy(self):

        for matrix in self.matrices:
            self.assertEqual(rank(matrix), to_sympy(matrix).rank())

    def test_rank_nullity(self):

        for matrix in self.matrices:
            self.assertEqual(rank(matrix) + len(kernel_basis(matrix)), matrix.cols)

    def test_kernel_vectors_are_killed(self):

        for matrix in self.matrices:
            for vector in kernel_basis(matrix):
                self.assertEqual(matrix.apply(vector), {})

    def test_image_basis_is_independent(self):

        for matrix in self.matrices:
            image = image_basis(matrix)
            self.assertEqual(len(image), rank(matrix))
            self.assertEqual(rank(SparseMatrix.from_columns(matrix.rows, image)), len(image))

    def test_inverse(self):

        rng = random.Random("inverse")
        for _ in range(10):
            matrix = random_matrix(rng, 4, 4, 0.8)
            inv = inverse(matrix)
            if to_sympy(matrix).rank() < 4:
                self.assertIsNone(inv)
            else:
                self.assertEqual(matrix @ inv, SparseMatrix.identity(4))

    def test_singular_inverse(self):

        self.assertIsNone(inverse(SparseMatrix(2, 2, {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 1})))
        with self.assertRaises(ShapeMismatch):
            inverse(SparseMatrix(2, 3))

    def test_shape_mismatch(self):

        with self.assertRaises(ShapeMismatch):
            SparseMatrix(2, 3) @ SparseMatrix(2, 3)
        with self.assertRaises(ShapeMismatch):
            vstack([SparseMatrix(1, 2), SparseMatrix(1, 3)], 2)

    def test_text_format(self):

        matrix = SparseMatrix(2, 3, {(0, 1): Fraction(-2, 3), (1, 2): 5})
        self.assertEqual(matrix.to_text(), "2 3\n0 1 -2/3\n1 2 5/1\n")
        self.assertEqual(SparseMatrix.from_text(matrix.to_text()), matrix)

    def test_text_errors_carry_positions(self):

        with self.assertRaises(ParseError) as context:
            SparseMatrix.from_text("2 2\n0 0 1/1\n5 0 1/1\n")
        self.assertEqual(context.exception.line, 3)
        with self.assertRaises(ParseError):
            SparseMatrix.from_text("2 2\n0 0 1/0\n")

    def test_coordinates(self):

        vectors = [{0: Fraction(1), 1: Fraction(1)}, {1: Fraction(1)}]
        self.assertEqual(coordinates(vectors, {0: Fraction(2), 1: Fraction(5)}), [2, 3])
        self.assertIsNone(coordinates(vectors, {2: Fraction(1)}))

    def test_restrict_map(self):

        swap = SparseMatrix(2, 2, {(0, 1): 1, (1, 0): 1})
        line = [{0: Fraction(1), 1: Fraction(1)}]
        self.assertEqual(restrict_map(swap, line, line), SparseMatrix.identity(1))
        with self.assertRaises(ShapeMismatch):
            restrict_map(swap, [{0: Fraction(1)}], line)


class TestHomology(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        # the simplicial chains of a hollow triangle, cohomologically graded
        cls.space = GradedSpace((-1, 0), {-1: ["e01", "e12", "e02"], 0: ["v0", "v1", "v2"]})
        boundary = SparseMatrix(3, 3, {(0, 0): -1, (1, 0): 1, (1, 1): -1, (2, 1): 1, (0, 2): -1, (2, 2): 1})
        cls.d = GradedMap(cls.space, cls.space, 1, {-1: boundary})

    def test_circle(self):

        self.assertEqual(homology(self.d, self.d, -1).dimension, 1)
        self.assertEqual(homology(self.d, self.d, 0).dimension, 1)

    def test_classify_and_lift(self):

        h = homology(self.d, self.d, 0)
        v0, v1 = {0: Fraction(1)}, {1: Fraction(1)}
        self.assertEqual(h.classify(v0), h.classify(v1))
        difference = add_to(dict(v1), v0, -1)
        self.assertTrue(h.is_boundary(difference))
        self.assertEqual(self.d.block(-1).apply(h.lift(difference)), difference)

    def test_non_cycle(self):

        h = homology(self.d, self.d, -1)
        with self.assertRaises(ValueError):
            h.classify({0: Fraction(1)})

    def test_composition_not_zero(self):

        space = GradedSpace((0, 1), {0: ["a"], 1: ["b"]})
        identity_like = GradedMap(space, space, 1, {0: SparseMatrix.identity(1)})
        looped = GradedMap(space, space, -1, {1: SparseMatrix.identity(1)})
        with self.assertRaises(CompositionNotZero):
            homology(looped, identity_like, 0)

    def test_one_sided(self):

        self.assertEqual(homology(None, self.d, -1).dimension, 1)
        self.assertEqual(homology(self.d, None, 0).dimension, 1)
        with self.assertRaises(ShapeMismatch):
            homology(None, None, 0)

    def test_push_evaluates_touched_columns_only(self):

        calls = []

        def doubling(n, label):
            calls.append(label)
            return {label: Fraction(2)}

        space = GradedSpace((0, 0), {0: ["a", "b", "c"]})
        double = GradedMap(space, space, 0, rule=doubling)
        self.assertEqual(double.push({1: Fraction(3)}, 0), {1: Fraction(6)})
        self.assertEqual(calls, ["b"])
        self.assertEqual(double({"c": Fraction(1)}, 0), {"c": Fraction(2)})
        self.assertEqual(double.block(0).column(1), {1: Fraction(2)})
        self.assertEqual(sorted(calls), ["a", "b", "c"])

    def test_labels_outside_window(self):

        with self.assertRaises(ShapeMismatch):
            GradedSpace((0, 1), {3: ["x"]})
        with self.assertRaises(ShapeMismatch):
            self.space.to_positions(0, {"nowhere": Fraction(1)})


if __name__ == "__main__":
    unittest.main()
