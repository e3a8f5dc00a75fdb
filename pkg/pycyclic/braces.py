"""Brace operations on the totalization of End_A, by formula and by trees.

Inputs are cochains of CH(A, A) as operad elements. Signs are those of the
operadic suspension: every insertion contributes operadic_composition_sign,
and feeding the inputs to a tree in preorder instead of label order
contributes the Koszul sign of the suspended degrees (internal + arity - 1).
"""

import random
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from pycyclic.dgfrob import Pairing
from pycyclic.errors import PreconditionFailed
from pycyclic.hochschild import is_weakly_invariant, lam_dual, theta_cochain
from pycyclic.linalg import add_to, scaled
from pycyclic.operads import Element, OperadTotal, koszul_sign, operadic_composition_sign
from pycyclic.report import CheckStatus, Report
from pycyclic.trees import (
    PlanarTree,
    apply_map,
    attach_tails,
    choose_root,
    forget_root,
    format_tree,
    inputs,
    nu,
    preorder,
    rho,
    root_cycle,
    rotate_root,
)


def brace_positions(r: int, arities: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Insertion slots i_1, ..., i_n of a{b_1, ..., b_n} for a of arity r.

    i_(j+1) >= i_j + t_j and i_j never passes the arity reached so far.
    """

    def extend(j: int, lowest: int, arity: int, chosen: Tuple[int, ...]):
        if j == len(arities):
            yield chosen
            return
        for i in range(lowest, arity + 1):
            yield from extend(j + 1, i + arities[j], arity + arities[j] - 1, chosen + (i,))

    yield from extend(0, 1, r, ())


class BraceContext:
    """Brace and tree evaluations on a totalized End_A"""

    def __init__(self, total: OperadTotal, pairing: Optional[Pairing] = None):
        self.total = total
        self.operad = total.operad
        self.pairing = pairing

    def _split(self, fs: Sequence[Element]) -> Iterator[Tuple[Element, ...]]:
        """Every choice of a part homogeneous in arity and degree from each input"""
        pieces = [list(self.operad.parts(f).values()) for f in fs]
        yield from product(*pieces)

    def _arity(self, x: Element) -> int:
        return self.operad.arity(next(iter(x)))

    def _degree(self, x: Element) -> int:
        return self.operad.degree(next(iter(x)))

    def kappa_formula(self, a: Element, bs: Sequence[Element]) -> Element:
        """a{b_1, ..., b_n}"""
        result: Element = {}
        for parts in self._split([a] + list(bs)):
            head, rest = parts[0], parts[1:]
            arities = [self._arity(b) for b in rest]
            for slots in brace_positions(self._arity(head), arities):
                x, arity, sign = head, self._arity(head), 1
                for i, b in zip(slots, rest):
                    sign *= operadic_composition_sign(arity, self._arity(b), i, self._degree(b))
                    x = self.operad.compose(x, i, b)
                    arity += self._arity(b) - 1
                add_to(result, x, sign)
        return self.total.truncate(result)

    def kappa_bar(self, tree: PlanarTree, fs: Sequence[Element]) -> Element:
        """Tree-shaped composition of homogeneous inputs on a rooted tree whose
        vertex arities match them exactly"""
        order = preorder(tree)
        suspended = [self._degree(f) + self._arity(f) - 1 for f in fs]
        sign = koszul_sign(suspended, [v - 1 for v in order])
        x = fs[order[0] - 1]
        slots = inputs(tree, order[0])
        for child in order[1:]:
            f = fs[child - 1]
            position = slots.index(("edge", child)) + 1
            sign *= operadic_composition_sign(len(slots), self._arity(f), position, self._degree(f))
            x = self.operad.compose(x, position, f)
            slots[position - 1 : position] = inputs(tree, child)
        return scaled(x, sign)

    def kappa_tree(self, tree: PlanarTree, fs: Sequence[Element]) -> Element:
        """Sum of kappa_bar over all tail attachments matching the input arities"""
        result: Element = {}
        for parts in self._split(fs):
            for exact in attach_tails(tree, [self._arity(f) for f in parts]):
                add_to(result, self.kappa_bar(exact, parts))
        return self.total.truncate(result)

    def cyclic_brace(self, tree: PlanarTree, fs: Sequence[Element]) -> Element:
        """kappa after rho: the sum over roots of the rooted evaluations"""
        result: Element = {}
        for rooted, c in rho(tree).items():
            add_to(result, self.kappa_tree(rooted, fs), c)
        return result

    def cyclic_brace_by_tails(self, tree: PlanarTree, fs: Sequence[Element]) -> Element:
        """The same operation computed by attaching tails first, then choosing
        a tail as the root and evaluating exactly"""
        result: Element = {}
        for parts in self._split(fs):
            for tailed, c in nu(tree, [self._arity(f) for f in parts]).items():
                if not tailed.tails():
                    continue
                for rooted, s in choose_root(tailed).items():
                    add_to(result, self.kappa_bar(rooted, parts), c * s)
        return self.total.truncate(result)

    def gravity_chain_ops(self, fs: Sequence[Element]) -> Element:
        """mu{f_1, mu{f_2, ..., mu{f_(k-1), f_k}...}}"""
        if len(fs) < 2:
            raise PreconditionFailed("the chain operations take at least two inputs")
        mu = self.total.mu
        x = fs[-1]
        for f in reversed(fs[:-1]):
            x = self.kappa_formula(mu, [f, x])
        return x

    def require_invariant(self, fs: Sequence[Element]):
        if self.pairing is None:
            raise PreconditionFailed("weak invariance needs a pairing")
        bad = [i for i, f in enumerate(fs, start=1) if not is_weakly_invariant(self.pairing, f)]
        if bad:
            logger.error(f"inputs {bad} are not weakly cyclic invariant")
            raise PreconditionFailed(f"inputs {bad} are not weakly cyclic invariant")


def equivalence_check(context: BraceContext, tree: PlanarTree, fs: Sequence[Element]) -> Report:
    report = Report(f"cyclic brace routes on {tree}")
    by_roots = context.cyclic_brace(tree, fs)
    by_tails = context.cyclic_brace_by_tails(tree, fs)
    report.add("rho route equals nu route", by_roots == by_tails, f"{len(by_roots)} terms", witness=str(tree))
    return report


def invariance_check(context: BraceContext, tree: PlanarTree, fs: Sequence[Element]) -> Report:
    """Rotating the root of every exact rooted tree acts on the evaluation as the
    signed cyclic operator, and the cyclic brace of weak invariants is one"""
    context.require_invariant(fs)
    pairing = context.pairing
    A = pairing.algebra
    report = Report(f"cyclic invariance on {tree}")
    ok, witness, seen = True, None, 0
    for parts in context._split(fs):
        arities = [context._arity(f) for f in parts]
        for rooted in rho(tree):
            for exact in attach_tails(rooted, arities):
                sign, moved, reversed_edges = rotate_root(exact)
                lhs = theta_cochain(pairing, context.kappa_bar(moved, parts))
                rhs = scaled(lam_dual(A, theta_cochain(pairing, context.kappa_bar(exact, parts))), sign)
                seen += 1
                if lhs != rhs:
                    ok, witness = False, (str(exact), reversed_edges)
                    break
            if not ok:
                break
        if not ok:
            break
    report.add("root rotation acts as lambda", ok, f"{seen} rooted trees", witness)
    output = context.cyclic_brace(tree, fs)
    report.add("cyclic brace output is weakly invariant", is_weakly_invariant(pairing, output), witness=str(tree))
    return report


def path_sign_report(trees: Sequence[PlanarTree]) -> Report:
    """t reverses exactly the edges on the path from the root to the first tail"""
    report = Report("root rotation signs")
    ok, witness = True, None
    for tree in trees:
        sign, _, reversed_edges = rotate_root(tree)
        if sign != (-1) ** reversed_edges:
            ok, witness = False, str(tree)
            break
    report.add("sign of t is (-1)^(path length)", ok, f"{len(trees)} trees", witness)
    return report


def tree_identity_report(trees: Sequence[PlanarTree]) -> Report:
    """(w o r)(T) = |R_0(T)| T and (r o w)(T') = sum of the signed rotations of T'"""
    report = Report("tree map identities")
    ok, witness = True, None
    for tree in trees:
        if tree.rooted or not tree.tails():
            continue
        rooted = choose_root(tree)
        image = apply_map(forget_root, rooted)
        if image != {tree: Fraction(len(rooted))}:
            ok, witness = False, str(tree)
            break
    report.add("w after r is multiplication by the number of roots", ok, witness=witness)
    ok, witness = True, None
    for tree in trees:
        if not tree.rooted:
            continue
        forgotten = apply_map(forget_root, {tree: Fraction(1)})
        if apply_map(choose_root, forgotten) != root_cycle(tree):
            ok, witness = False, str(tree)
            break
    report.add("r after w is the signed sum over root rotations", ok, witness=witness)
    return report


def random_invariants(weak, rng: random.Random, count: int, max_arity: int = 2) -> List[Element]:
    """Nonzero weak invariants drawn from a WeakInvariants instance"""
    found: List[Element] = []
    for _ in range(count * 10):
        f = weak.random(rng, rng.randint(0, max_arity))
        if f:
            found.append(f)
        if len(found) == count:
            break
    return found


def fitting_inputs(
    weak, rng: random.Random, tree: PlanarTree, tails: int, max_arity: int, attempts: int = 40
) -> Optional[List[Element]]:
    """Weak invariants, one per vertex, whose arities give at most `tails` tails.

    A vertex of valence d takes arity at least d - 1, so every draw leaves
    some root placement with a nonzero evaluation.
    """
    lowest = [max(len(tree.rotation(v)) - 1, 0) for v in range(1, tree.n + 1)]
    if any(low > max_arity for low in lowest):
        return None
    for _ in range(attempts):
        arities = [rng.randint(low, max_arity) for low in lowest]
        # a tree on n vertices whose inputs have arities k_v carries sum(k_v) - n + 2 tails
        if sum(arities) - tree.n + 2 > tails:
            continue
        fs = [weak.random(rng, k) for k in arities]
        if all(fs):
            return fs
    return None


def _tally(outcomes: Dict[str, list], report: Report, case: str) -> None:
    for check in report.checks:
        entry = outcomes.setdefault(check.name, [True, 0, None])
        if check.status == CheckStatus.SKIP:
            continue
        entry[1] += 1
        if check.status == CheckStatus.FAIL and entry[0]:
            entry[0], entry[2] = False, case


def brace_sweep(
    context: BraceContext,
    weak,
    trees: Sequence[PlanarTree],
    rng_for: Callable[..., random.Random],
    tails: int = 6,
    max_arity: int = 2,
    cases: int = 50,
    invariance_cases: int = 200,
) -> Report:
    """Seeded cases of the route equivalence and of cyclic invariance.

    Case i runs on trees[i % len(trees)] with inputs drawn from
    rng_for(kind, i), so every tree is visited at least once. The tailed
    trees met on the way feed the sign and tree map identities.
    """
    report = Report(f"cyclic brace sweep over {len(trees)} trees")
    if not trees:
        report.skip("seeded cases", "no trees")
        return report
    met: Dict[PlanarTree, None] = {}
    runs = (("equivalence", cases, equivalence_check), ("invariance", invariance_cases, invariance_check))
    for kind, count, check in runs:
        outcomes: Dict[str, list] = {}
        total = max(count, len(trees)) if count else 0
        logger.info(f"brace sweep: {total} {kind} cases on {len(trees)} trees")
        missing = 0
        for i in range(total):
            tree = trees[i % len(trees)]
            fs = fitting_inputs(weak, rng_for(kind, i), tree, tails, max_arity)
            if fs is None:
                missing += 1
                continue
            _tally(outcomes, check(context, tree, fs), f"case {i} on {format_tree(tree)}")
            if kind == "equivalence":
                for parts in context._split(fs):
                    for tailed in nu(tree, [context._arity(f) for f in parts]):
                        if tailed.tails():
                            met[tailed] = None
                            met.update((t, None) for t in choose_root(tailed))
        for name, (ok, ran, witness) in outcomes.items():
            report.add(f"{kind}/{name}", ok, f"{ran} seeded cases", witness)
        if missing:
            report.skip(f"{kind}/inputs", f"{missing} cases without fitting weak invariants")
    tailed = list(met)
    report.merge(path_sign_report([t for t in tailed if t.rooted and t.tails()]))
    report.merge(tree_identity_report(tailed))
    report.meta["tailed trees"] = len(tailed)
    return report
