import random
import unittest
from fractions import Fraction

from pycyclic.braces import (
    BraceContext,
    brace_positions,
    brace_sweep,
    equivalence_check,
    fitting_inputs,
    invariance_check,
    random_invariants,
)
from pycyclic.dgfrob import builtin
from pycyclic.errors import PreconditionFailed
from pycyclic.hochschild import WeakInvariants, cochain_total
from pycyclic.report import CheckStatus
from pycyclic.trees import chain_tree, corolla, enumerate_trees, parse_tree


def seeded(prefix):
    return lambda *keys: random.Random(":".join([prefix] + [str(k) for k in keys]))


class TestBracePositions(unittest.TestCase):
    def test_positions(self):

        self.assertEqual(list(brace_positions(2, [1])), [(1,), (2,)])
        self.assertEqual(list(brace_positions(2, [0, 0])), [(1, 1)])
        self.assertEqual(list(brace_positions(1, [0, 0])), [])
        self.assertEqual(list(brace_positions(2, [2, 1])), [(1, 3)])
        self.assertEqual(list(brace_positions(3, [1, 0])), [(1, 2), (1, 3), (2, 3)])
        self.assertEqual(list(brace_positions(0, [1])), [])


class TestBraces(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.A, cls.pairing = builtin("sphere(2)")
        cls.total = cochain_total(cls.A, 3, cls.pairing)
        cls.context = BraceContext(cls.total, cls.pairing)
        cls.weak = WeakInvariants(cls.pairing)

    def test_single_brace_is_pre_lie(self):

        rng = random.Random("pre-lie")
        for _ in range(10):
            f = self.total.random_element(rng, rng.randint(0, 2))
            g = self.total.random_element(rng, rng.randint(0, 2))
            self.assertEqual(self.context.kappa_formula(f, [g]), self.total.truncate(self.total.pre_lie(f, g)))

    def test_corolla_evaluates_the_brace(self):

        rng = random.Random("corolla")
        for _ in range(6):
            a = self.total.random_element(rng, rng.randint(1, 2))
            b = self.total.random_element(rng, rng.randint(0, 1))
            c = self.total.random_element(rng, rng.randint(0, 1))
            self.assertEqual(self.context.kappa_tree(corolla(2), [a, b, c]), self.context.kappa_formula(a, [b, c]))

    def test_routes_agree(self):

        rng = random.Random("routes")
        fs = random_invariants(self.weak, rng, 2)
        self.assertEqual(len(fs), 2)
        for tree in (chain_tree(2), chain_tree(2, oriented=False)):
            report = equivalence_check(self.context, tree, fs)
            self.assertTrue(report.passed, str(tree))

    def test_cyclic_invariance(self):

        rng = random.Random("invariance")
        fs = random_invariants(self.weak, rng, 2)
        report = invariance_check(self.context, chain_tree(2), fs)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_three_vertex_routes(self):

        rng = random.Random("three")
        fs = random_invariants(self.weak, rng, 3, max_arity=1)
        tree, _ = parse_tree("1(>2() >3())")
        self.assertTrue(equivalence_check(self.context, tree, fs).passed)

    def test_chain_operations(self):

        mu = self.total.mu
        x = {((), self.A.index("x")): Fraction(1)}
        one = {((), 0): Fraction(1)}
        self.assertEqual(self.context.gravity_chain_ops([one, x]), self.context.kappa_formula(mu, [one, x]))
        with self.assertRaises(PreconditionFailed):
            self.context.gravity_chain_ops([x])

    def test_invariance_preconditions(self):

        identity = {((0,), 0): Fraction(1), ((1,), 1): Fraction(1)}
        with self.assertRaises(PreconditionFailed):
            self.context.require_invariant([identity])
        with self.assertRaises(PreconditionFailed):
            BraceContext(self.total).require_invariant([self.total.mu])
        self.context.require_invariant([self.total.mu])


class TestSweep(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.A, cls.pairing = builtin("exterior(2)")
        cls.context = BraceContext(cochain_total(cls.A, 3, cls.pairing), cls.pairing)
        cls.weak = WeakInvariants(cls.pairing)
        cls.trees = [t for n in range(1, 5) for t in enumerate_trees(n, oriented=True)]

    def test_fitting_inputs(self):

        tree, _ = parse_tree("1(2() 3() 4())")
        rng = random.Random("fit")
        for _ in range(10):
            fs = fitting_inputs(self.weak, rng, tree, 6, 3)
            if fs is None:
                continue
            arities = [self.context._arity(f) for f in fs]
            self.assertGreaterEqual(arities[0], 2)
            self.assertLessEqual(sum(arities) - 4 + 2, 6)
            self.assertTrue(all(self.weak.contains(f) for f in fs))
        self.assertIsNone(fitting_inputs(self.weak, rng, tree, 6, 1))

    def test_routes_on_all_small_trees(self):

        report = brace_sweep(
            self.context,
            self.weak,
            self.trees,
            seeded("exterior"),
            tails=6,
            max_arity=2,
            cases=50,
            invariance_cases=50,
        )
        self.assertTrue(report.passed, [c.name for c in report.failures])
        ran = {c.name: c.detail for c in report.checks if c.status == CheckStatus.PASS}
        self.assertIn("equivalence/rho route equals nu route", ran)
        self.assertIn("invariance/cyclic brace output is weakly invariant", ran)
        self.assertGreater(report.meta["tailed trees"], 0)
        signs = ran["root rotation signs/sign of t is (-1)^(path length)"]
        self.assertNotEqual(signs, "0 trees")

    def test_sphere_cases(self):

        A, pairing = builtin("sphere(2)")
        context = BraceContext(cochain_total(A, 3, pairing), pairing)
        trees = [t for n in range(1, 4) for t in enumerate_trees(n, oriented=True)]
        report = brace_sweep(context, WeakInvariants(pairing), trees, seeded("sphere"), cases=50, invariance_cases=200)
        self.assertTrue(report.passed, [c.name for c in report.failures])

    def test_empty_sweep(self):

        report = brace_sweep(self.context, self.weak, [], random.Random)
        self.assertTrue(report.passed)
        self.assertEqual(len(report.skipped), 1)


if __name__ == "__main__":
    unittest.main()
