import unittest
from fractions import Fraction

from pycyclic.braces import path_sign_report, tree_identity_report
from pycyclic.errors import CapExceeded, DomainMismatch, ParseError, ShapeMismatch
from pycyclic.trees import (
    ROOT,
    attach_tails,
    canonical,
    chain_tree,
    choose_root,
    corolla,
    enumerate_trees,
    format_combo,
    format_tree,
    forget_root,
    inputs,
    nu,
    parse_tree,
    preorder,
    rho,
    root_cycle,
    rotate_root,
    total_order,
)


class TestCanonicalForms(unittest.TestCase):
    def test_orientation_sign(self):

        sign, tree = canonical([(2,), (1,)], [(2, 1)])
        self.assertEqual(sign, -1)
        self.assertEqual(tree.arrows, ((1, 2),))
        self.assertEqual(canonical([(2,), (1,)], [(1, 2)]), (1, tree))

    def test_rotations_are_minimal(self):

        _, tree = canonical([(3, ROOT, 2), (1,), (1,)])
        self.assertEqual(tree.rotation(1), (ROOT, 2, 3))
        self.assertTrue(tree.rooted)
        self.assertEqual(tree.arrows, ((2, 1), (3, 1)))

    def test_invalid_shapes(self):

        with self.assertRaises(ShapeMismatch):
            canonical([])
        with self.assertRaises(ShapeMismatch):
            canonical([(2,), ()])
        with self.assertRaises(ShapeMismatch):
            canonical([(2, 3), (1, 3), (1, 2)])
        with self.assertRaises(ShapeMismatch):
            canonical([(ROOT, 2), (ROOT, 1)])
        with self.assertRaises(ShapeMismatch):
            canonical([(2,), (1, 3), (2,)], [(1, 2)])


class TestLiterals(unittest.TestCase):
    def test_format(self):

        self.assertEqual(format_tree(corolla(2)), "1(^ 2() 3())")
        self.assertEqual(format_tree(chain_tree(3)), "1(>2(>3()))")
        self.assertEqual(format_tree(chain_tree(3, oriented=False)), "1(2(3()))")

    def test_parse(self):

        self.assertEqual(parse_tree("1(^ 2() 3())"), (corolla(2), 1))
        tree, sign = parse_tree("1(<2(>3()))")
        self.assertEqual((tree, sign), (chain_tree(3), -1))
        self.assertEqual(parse_tree(" 1( *, *, 2(*) ) ")[0].tails(), 3)

    def test_parse_errors(self):

        for text in ("1(2()", "1(1())", "2()", "1(>2(3()))", "1() x", "(^)", "1(2() 4())"):
            with self.assertRaises(ParseError, msg=text):
                parse_tree(text)

    def test_error_column(self):

        with self.assertRaises(ParseError) as context:
            parse_tree("1(* ?)")
        self.assertEqual(context.exception.column, 5)


class TestTraversal(unittest.TestCase):
    def test_corolla(self):

        tree = corolla(2)
        self.assertEqual(preorder(tree), [1, 2, 3])
        self.assertEqual(inputs(tree, 1), [("edge", 2), ("edge", 3)])
        self.assertEqual(inputs(tree, 2), [])
        self.assertEqual(total_order(tree), [("root", 1), ("edge", 1, 2), ("edge", 1, 3)])

    def test_needs_root(self):

        with self.assertRaises(DomainMismatch):
            total_order(chain_tree(2))
        with self.assertRaises(DomainMismatch):
            rotate_root(chain_tree(2))
        with self.assertRaises(DomainMismatch):
            forget_root(chain_tree(2))


class TestTreeMaps(unittest.TestCase):
    def test_rho_of_an_edge(self):

        combo = rho(chain_tree(2))
        self.assertEqual(format_combo(combo), "-1 1(^ 2())\n+1 2(^ 1())")
        with self.assertRaises(DomainMismatch):
            rho(corolla(1))

    def test_choose_and_forget(self):

        tree, _ = parse_tree("1(* >2(*))")
        rooted = choose_root(tree)
        self.assertEqual(len(rooted), 2)
        for t in rooted:
            self.assertEqual(forget_root(t)[1], tree)
        with self.assertRaises(DomainMismatch):
            choose_root(chain_tree(2))

    def test_rotation_of_a_corolla_with_tails(self):

        tree, _ = parse_tree("1(^ * *)")
        sign, moved, reversed_edges = rotate_root(tree)
        self.assertEqual((sign, moved, reversed_edges), (1, tree, 0))
        self.assertEqual(root_cycle(tree), {tree: Fraction(1)})

    def test_rotation_along_an_edge(self):

        tree, _ = parse_tree("1(^ 2(*))")
        sign, moved, reversed_edges = rotate_root(tree)
        self.assertEqual(reversed_edges, 1)
        self.assertEqual(sign, -1)
        self.assertEqual(moved.root_vertex, 2)

    def test_attach_tails(self):

        edge = corolla(1)
        self.assertEqual(len(attach_tails(edge, [2, 0])), 2)
        self.assertEqual(attach_tails(edge, [0, 0]), [])
        with self.assertRaises(ShapeMismatch):
            attach_tails(edge, [1])
        self.assertEqual(len(nu(chain_tree(2), [1, 1])), 1)
        with self.assertRaises(DomainMismatch):
            nu(edge, [1, 1])

    def test_identities(self):

        trees = enumerate_trees(3, tails=1, oriented=True) + enumerate_trees(2, tails=2, rooted=True)
        self.assertTrue(tree_identity_report(trees).passed)
        self.assertTrue(path_sign_report([t for t in trees if t.rooted]).passed)


class TestEnumeration(unittest.TestCase):
    def test_counts(self):

        self.assertEqual(len(enumerate_trees(1)), 1)
        self.assertEqual(len(enumerate_trees(1, tails=2)), 3)
        self.assertEqual(len(enumerate_trees(2)), 1)
        self.assertEqual(len(enumerate_trees(3)), 3)
        self.assertEqual(len(enumerate_trees(1, rooted=True)), 1)
        self.assertEqual(len(enumerate_trees(2, rooted=True)), 2)

    def test_sorted_and_distinct(self):

        trees = enumerate_trees(3, tails=1, oriented=True)
        literals = [format_tree(t) for t in trees]
        self.assertEqual(literals, sorted(set(literals)))
        self.assertTrue(all(parse_tree(text)[0] == tree for text, tree in zip(literals, trees)))

    def test_cap(self):

        with self.assertRaises(CapExceeded):
            enumerate_trees(3, tails=2, limit=2)
        with self.assertRaises(ShapeMismatch):
            enumerate_trees(0)


if __name__ == "__main__":
    unittest.main()
