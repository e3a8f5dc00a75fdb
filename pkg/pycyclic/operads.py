"""Nonsymmetric dg operads, their cyclic structures and totalizations.

Operad elements are sparse vectors over basis labels; every label knows its
arity and its internal degree. The endomorphism operad of a dg algebra uses
labels `(word, out)` for the operation sending e_word to e_out and every other
tensor word to zero.
"""

import random
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from pycyclic.cocyclic import CocyclicComplex, CosimplicialComplex
from pycyclic.dgfrob import DgAlgebra, Pairing
from pycyclic.errors import ArityOverflow, HypothesisFailed, ValidationFailed
from pycyclic.linalg import GradedSpace, SparseMatrix, add_to, kernel_basis, scaled
from pycyclic.report import Report

Element = Dict[Hashable, Fraction]


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


# sign engine ----------------------------------------------------------------


def koszul_sign(degrees: Sequence[int], permutation: Sequence[int]) -> int:
    """Sign of moving items of the given degrees into the order `permutation`.

    `permutation[j]` is the original position of the item that ends up at j.
    """
    exponent = 0
    for a in range(len(permutation)):
        for b in range(a + 1, len(permutation)):
            if permutation[a] > permutation[b]:
                exponent += degrees[permutation[a]] * degrees[permutation[b]]
    return _sign(exponent)


def suspension_sign(degrees: Sequence[int]) -> int:
    k = len(degrees)
    return _sign(sum((k - i) * d for i, d in enumerate(degrees, start=1)))


def operadic_composition_sign(n: int, m: int, i: int, degree: int) -> int:
    """Sign turning a o_i b in O into the composition of the operadic suspension,
    for a of arity n, b of arity m and internal degree `degree`."""
    if not 1 <= i <= n:
        raise ValueError(f"position {i} outside 1..{n}")
    return _sign((i - 1) * (m - 1) + (n - 1) * degree)


# operads ----------------------------------------------------------------------


class NsDgOperad:
    """A nonsymmetric dg operad given on basis labels.

    Subclasses implement `arity`, `degree`, `basis`, `compose_basis` and
    `differential_basis`, and set `unit`.
    """

    name = "O"
    unit: Element

    def arity(self, label: Hashable) -> int:
        raise NotImplementedError

    def degree(self, label: Hashable) -> int:
        raise NotImplementedError

    def basis(self, k: int) -> List[Hashable]:
        raise NotImplementedError

    def compose_basis(self, x: Hashable, i: int, y: Hashable) -> Element:
        raise NotImplementedError

    def differential_basis(self, x: Hashable) -> Element:
        raise NotImplementedError

    def compose(self, x: Element, i: int, y: Element) -> Element:
        result: Element = {}
        for a, ca in x.items():
            if not 1 <= i <= self.arity(a):
                continue
            for b, cb in y.items():
                add_to(result, self.compose_basis(a, i, b), ca * cb)
        return result

    def differential(self, x: Element) -> Element:
        result: Element = {}
        for a, c in x.items():
            add_to(result, self.differential_basis(a), c)
        return result

    def space(self, k: int) -> GradedSpace:
        labels: Dict[int, List[Hashable]] = {}
        for label in self.basis(k):
            labels.setdefault(self.degree(label), []).append(label)
        degrees = list(labels) or [0]
        return GradedSpace((min(degrees), max(degrees)), labels)

    def parts(self, x: Element) -> Dict[Tuple[int, int], Element]:
        """Splits x into pieces homogeneous in (arity, internal degree)"""
        pieces: Dict[Tuple[int, int], Element] = {}
        for label, c in x.items():
            pieces.setdefault((self.arity(label), self.degree(label)), {})[label] = c
        return pieces


def hom_basis(A: DgAlgebra, k: int, targets: Iterable[int]) -> List[Tuple[Tuple[int, ...], int]]:
    targets = list(targets)
    return [(word, t) for word in product(range(A.dim), repeat=k) for t in targets]


class EndomorphismOperad(NsDgOperad):
    """End_A with (f o_i g)(v) = (-1)^(|g|(|v_1| + ... + |v_(i-1)|)) f(v_1, ..., g(v_i, ...), ...)"""

    def __init__(self, algebra: DgAlgebra):
        self.algebra = algebra
        self.name = f"End({algebra.name})"
        self.unit = {((a,), a): Fraction(1) for a in range(algebra.dim)}
        self._bases: Dict[int, List] = {}

    def arity(self, label) -> int:
        return len(label[0])

    def degree(self, label) -> int:
        word, out = label
        return self.algebra.degree(out) - self.algebra.word_degree(word)

    def basis(self, k: int) -> List:
        if k not in self._bases:
            self._bases[k] = hom_basis(self.algebra, k, range(self.algebra.dim))
        return self._bases[k]

    def compose_basis(self, x, i: int, y) -> Element:
        word, out = x
        inner, middle = y
        if word[i - 1] != middle:
            return {}
        sign = _sign(self.degree(y) * self.algebra.word_degree(word[: i - 1]))
        return {(word[: i - 1] + inner + word[i:], out): Fraction(sign)}

    def differential_basis(self, x) -> Element:
        """d o f - (-1)^|f| f o d on the tensor word"""
        A = self.algebra
        word, out = x
        result: Element = {}
        for target, c in A.d.get(out, {}).items():
            add_to(result, {(word, target): c})
        sign = -_sign(self.degree(x))
        for j, letter in enumerate(word):
            prefix = _sign(A.word_degree(word[:j]))
            for source, c in A.d_sources(letter):
                add_to(result, {(word[:j] + (source,) + word[j + 1 :], out): c}, sign * prefix)
        return result


class CyclicStructure:
    """Maps tau_k on each arity, given on basis labels"""

    def __init__(self, operad: NsDgOperad, rule: Callable[[Hashable], Element]):
        self.operad = operad
        self._rule = rule
        self._cache: Dict[Hashable, Element] = {}

    def tau_basis(self, label) -> Element:
        if label not in self._cache:
            self._cache[label] = self._rule(label)
        return self._cache[label]

    def tau(self, x: Element, times: int = 1) -> Element:
        for _ in range(times):
            result: Element = {}
            for label, c in x.items():
                add_to(result, self.tau_basis(label), c)
            x = result
        return x

    def lam(self, x: Element) -> Element:
        """lambda = (-1)^k tau_k on arity k"""
        result: Element = {}
        for label, c in x.items():
            add_to(result, self.tau_basis(label), _sign(self.operad.arity(label)) * c)
        return result


def rotate_form(A: DgAlgebra, args: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    """(tau F)(v_1, ..., v_(k+1)) = (-1)^(|v_(k+1)|(|v_1| + ... + |v_k|)) F(v_(k+1), v_1, ..., v_k).

    Returns the sign and the argument word v such that tau applied to the
    indicator form of `args` is sign times the indicator form of v.
    """
    first, rest = args[0], args[1:]
    return _sign(A.degree(first) * A.word_degree(rest)), rest + (first,)


def end_cyclic_structure(pairing: Pairing, operad: Optional[EndomorphismOperad] = None) -> CyclicStructure:
    """tau on End_A transported from the rotation of (k+1)-linear forms along
    f -> <f(-), ->. Raises HypothesisFailed when the pairing is degenerate."""
    A = pairing.algebra
    operad = operad or EndomorphismOperad(A)
    inverse = pairing.inverse_matrix()
    if inverse is None:
        logger.error(f"pairing on {A.name} is degenerate; End has no transported cyclic structure")
        raise HypothesisFailed(f"theta is not invertible for {A.name}", witness=A.name)

    def rule(label) -> Element:
        word, out = label
        if not word:
            return {label: Fraction(1)}
        result: Element = {}
        for x, g in pairing.row(out).items():
            sign, args = rotate_form(A, word + (x,))
            for target, c in inverse.column(args[-1]).items():
                add_to(result, {(args[:-1], target): c}, sign * g)
        return result

    return CyclicStructure(operad, rule)


class MultUnit:
    def __init__(self, mu: Element, epsilon: Element):
        self.mu = mu
        self.epsilon = epsilon

    @classmethod
    def of_algebra(cls, A: DgAlgebra) -> "MultUnit":
        mu: Element = {}
        for (a, b), vector in A.mult.items():
            for c, value in vector.items():
                mu[((a, b), c)] = value
        return cls(mu, {((), A.unit): Fraction(1)})


def endomorphism_operad(A: DgAlgebra) -> Tuple[EndomorphismOperad, MultUnit]:
    operad = EndomorphismOperad(A)
    return operad, MultUnit.of_algebra(A)


# validation -----------------------------------------------------------------


def _labels_up_to(O: NsDgOperad, cap: int) -> List[Hashable]:
    return [label for k in range(cap + 1) for label in O.basis(k)]


def sample_tuples(labels: List, size: int, rng: random.Random, samples: int, exhaustive_below: int = 4096):
    if len(labels) ** size <= exhaustive_below:
        return list(product(labels, repeat=size))
    return [tuple(rng.choice(labels) for _ in range(size)) for _ in range(samples)]


def _unit(label) -> Element:
    return {label: Fraction(1)}


def validate_operad(O: NsDgOperad, cap: int, rng: Optional[random.Random] = None, samples: int = 200) -> Report:
    report = Report(f"operad axioms of {O.name}")
    rng = rng or random.Random(0)
    logger.info(f"validating {O.name} up to arity {cap}")
    labels = _labels_up_to(O, cap)
    sequential = parallel = 0
    for x, y, z in sample_tuples(labels, 3, rng, samples):
        X, Y, Z = _unit(x), _unit(y), _unit(z)
        l, m = O.arity(x), O.arity(y)
        for i in range(1, l + 1):
            for j in range(1, m + 1):
                lhs = O.compose(O.compose(X, i, Y), i + j - 1, Z)
                if lhs != O.compose(X, i, O.compose(Y, j, Z)):
                    return _failed(report, "sequential associativity", (x, i, y, j, z))
                sequential += 1
            for j in range(i + 1, l + 1):
                lhs = O.compose(O.compose(X, i, Y), m + j - 1, Z)
                rhs = O.compose(O.compose(X, j, Z), i, Y)
                if lhs != scaled(rhs, _sign(O.degree(y) * O.degree(z))):
                    return _failed(report, "parallel associativity", (x, i, y, j, z))
                parallel += 1
    report.add("sequential associativity", True, f"{sequential} cases")
    report.add("parallel associativity", True, f"{parallel} cases")
    ok, witness = True, None
    for x in labels:
        X = _unit(x)
        if O.compose(O.unit, 1, X) != X or any(O.compose(X, i, O.unit) != X for i in range(1, O.arity(x) + 1)):
            ok, witness = False, x
            break
    report.add("two-sided unit", ok, witness=witness)
    ok, witness = True, None
    for x in labels:
        if O.differential(O.differential(_unit(x))):
            ok, witness = False, x
            break
    report.add("differential squares to zero", ok, witness=witness)
    ok, witness = True, None
    for x, y in sample_tuples(labels, 2, rng, samples):
        X, Y = _unit(x), _unit(y)
        for i in range(1, O.arity(x) + 1):
            lhs = O.differential(O.compose(X, i, Y))
            rhs = O.compose(O.differential(X), i, Y)
            add_to(rhs, O.compose(X, i, O.differential(Y)), _sign(O.degree(x)))
            if lhs != rhs:
                ok, witness = False, (x, i, y)
                break
        if not ok:
            break
    report.add("differential is a derivation of compositions", ok, witness=witness)
    return report


def _failed(report: Report, name: str, witness) -> Report:
    report.add(name, False, witness=witness)
    return report


def validate_cyclic(
    O: NsDgOperad, C: CyclicStructure, cap: int, rng: Optional[random.Random] = None, samples: int = 200
) -> Report:
    report = Report(f"cyclic structure of {O.name}")
    rng = rng or random.Random(0)
    labels = _labels_up_to(O, cap)
    ok, witness = True, None
    for x in labels:
        if C.tau(_unit(x), O.arity(x) + 1) != _unit(x):
            ok, witness = False, x
            break
    report.add("tau has order arity + 1", ok, witness=witness)
    report.add("tau fixes the unit", C.tau(O.unit) == O.unit)
    ok, witness = True, None
    for x, y in sample_tuples(labels, 2, rng, samples):
        X, Y = _unit(x), _unit(y)
        k, l = O.arity(x), O.arity(y)
        for i in range(1, k + 1):
            lhs = C.tau(O.compose(X, i, Y))
            if i >= 2:
                rhs = O.compose(C.tau(X), i - 1, Y)
            elif l >= 1:
                rhs = scaled(O.compose(C.tau(Y), l, C.tau(X)), _sign(O.degree(x) * O.degree(y)))
            else:
                rhs = O.compose(C.tau(X, 2), k, Y)
            if lhs != rhs:
                ok, witness = False, (x, i, y)
                break
        if not ok:
            break
    report.add("tau is compatible with compositions", ok, witness=witness)
    return report


def validate_mult_unit(O: NsDgOperad, mu_eps: MultUnit, C: Optional[CyclicStructure] = None) -> Report:
    report = Report(f"multiplication and unit of {O.name}")
    mu, eps = mu_eps.mu, mu_eps.epsilon
    report.add("mu has arity 2 and degree 0", all(O.arity(a) == 2 and O.degree(a) == 0 for a in mu))
    report.add("epsilon has arity 0 and degree 0", all(O.arity(a) == 0 and O.degree(a) == 0 for a in eps))
    report.add("mu is closed", not O.differential(mu))
    report.add("epsilon is closed", not O.differential(eps))
    report.add("mu is associative", O.compose(mu, 1, mu) == O.compose(mu, 2, mu))
    report.add("epsilon is a unit for mu", O.compose(mu, 1, eps) == O.unit == O.compose(mu, 2, eps))
    if C is not None:
        report.add("mu is cyclically invariant", C.tau(mu) == mu)
    return report


# totalization -----------------------------------------------------------------


class OperadTotal:
    """The product over arities with the pre-Lie product, bracket, cup product
    and b = d + delta from the multiplication and unit.

    The total degree of an arity-k element of internal degree p is p + k.
    """

    def __init__(
        self,
        operad: NsDgOperad,
        mult_unit: MultUnit,
        cyclic: Optional[CyclicStructure] = None,
        arity_cap: int = 3,
        strict: bool = False,
    ):
        self.operad = operad
        self.mu = mult_unit.mu
        self.epsilon = mult_unit.epsilon
        self.mult_unit = mult_unit
        self.cyclic = cyclic
        self.arity_cap = arity_cap
        self.strict = strict

    def total_degree(self, label) -> int:
        return self.operad.degree(label) + self.operad.arity(label)

    def _bilinear(self, op: Callable[[Hashable, Hashable], Element], x: Element, y: Element) -> Element:
        result: Element = {}
        for a, ca in x.items():
            for b, cb in y.items():
                add_to(result, op(a, b), ca * cb)
        return result

    def _pre_lie(self, a, b) -> Element:
        O = self.operad
        l, m, q = O.arity(a), O.arity(b), O.degree(b)
        result: Element = {}
        for i in range(1, l + 1):
            add_to(result, O.compose_basis(a, i, b), operadic_composition_sign(l, m, i, q))
        return result

    def pre_lie(self, x: Element, y: Element) -> Element:
        return self._bilinear(self._pre_lie, x, y)

    def _bracket(self, a, b) -> Element:
        result = self._pre_lie(a, b)
        sign = _sign((self.total_degree(a) - 1) * (self.total_degree(b) - 1))
        return add_to(result, self._pre_lie(b, a), -sign)

    def bracket(self, x: Element, y: Element) -> Element:
        return self._bilinear(self._bracket, x, y)

    def _cup(self, a, b) -> Element:
        O = self.operad
        l, m, q = O.arity(a), O.arity(b), O.degree(b)
        outer = O.compose(self.mu, 1, _unit(a))
        return scaled(O.compose(outer, l + 1, _unit(b)), _sign(l * (q + m)))

    def cup(self, x: Element, y: Element) -> Element:
        return self._bilinear(self._cup, x, y)

    def coface(self, x: Element, i: int) -> Element:
        """delta_i on an element homogeneous in arity"""
        result: Element = {}
        for a, c in x.items():
            k = self.operad.arity(a)
            if i == 0:
                image = self.operad.compose(self.mu, 2, _unit(a))
            elif i <= k:
                image = self.operad.compose(_unit(a), i, self.mu)
            else:
                image = self.operad.compose(self.mu, 1, _unit(a))
            add_to(result, image, c)
        return result

    def codegeneracy(self, x: Element, i: int) -> Element:
        return self.operad.compose(x, i + 1, self.epsilon)

    def delta(self, x: Element) -> Element:
        result: Element = {}
        for (k, p), part in self.operad.parts(x).items():
            for i in range(k + 2):
                add_to(result, self.coface(part, i), _sign(p + k + i))
        return result

    def b(self, x: Element) -> Element:
        return add_to(self.operad.differential(x), self.delta(x))

    def lam(self, x: Element) -> Element:
        if self.cyclic is None:
            raise HypothesisFailed(f"{self.operad.name} carries no cyclic structure")
        return self.cyclic.lam(x)

    def truncate(self, x: Element) -> Element:
        """Projection to arities up to the cap"""
        kept = {a: c for a, c in x.items() if self.operad.arity(a) <= self.arity_cap}
        if len(kept) != len(x):
            if self.strict:
                raise ArityOverflow(f"result reaches past arity {self.arity_cap}")
            logger.warning(f"dropping terms above arity {self.arity_cap}")
        return kept

    def invariants(self, k: int, p: int) -> List[Element]:
        """A basis of Ker(1 - lambda) in arity k and internal degree p"""
        space = self.operad.space(k)
        columns = []
        for label in space.basis(p):
            image = _unit(label)
            add_to(image, self.lam(_unit(label)), -1)
            columns.append(space.to_positions(p, image))
        matrix = SparseMatrix.from_columns(space.dim(p), columns)
        return [space.from_positions(p, v) for v in kernel_basis(matrix)]

    def random_element(self, rng: random.Random, arity: int, degree: Optional[int] = None, terms: int = 3) -> Element:
        space = self.operad.space(arity)
        degrees = [p for p in space.degrees() if space.dim(p)]
        if degree is None:
            degree = rng.choice(degrees)
        basis = space.basis(degree)
        x: Element = {}
        for _ in range(terms):
            if basis:
                add_to(x, {rng.choice(basis): Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))})
        return x

    def cosimplicial(self, max_level: int) -> CosimplicialComplex:
        """The cosimplicial (cocyclic when tau is present) complex of levels O(k)"""
        O = self.operad
        levels = [O.space(k) for k in range(max_level + 1)]

        def coface(k, i, p, label):
            return self.coface(_unit(label), i)

        def codegeneracy(k, i, p, label):
            return self.codegeneracy(_unit(label), i)

        def differential(k, p, label):
            return O.differential_basis(label)

        name = f"{O.name} cosimplicial"
        if self.cyclic is None:
            return CosimplicialComplex.from_rules(levels, coface, codegeneracy, differential, name=name)
        return CocyclicComplex.from_rules(
            levels, coface, codegeneracy, lambda k, p, label: self.cyclic.tau_basis(label), differential, name=name
        )


def totalize_operad(
    operad: NsDgOperad,
    mult_unit: MultUnit,
    cyclic: Optional[CyclicStructure] = None,
    arity_cap: int = 3,
    rng: Optional[random.Random] = None,
    samples: int = 20,
) -> OperadTotal:
    """Validates the inputs and the algebraic structure of the totalization"""
    total = OperadTotal(operad, mult_unit, cyclic, arity_cap)
    report = validate_mult_unit(operad, mult_unit, cyclic)
    if cyclic is not None:
        report.merge(validate_cyclic(operad, cyclic, min(arity_cap, 2), rng, samples))
    report.merge(total_report(total, rng, samples))
    if not report.passed:
        failure = report.failures[0]
        raise ValidationFailed(f"{operad.name}: {failure.name} fails at {failure.witness}", report)
    return total


def _triples(total: OperadTotal, rng: random.Random, samples: int, size: int) -> List[Tuple[Element, ...]]:
    cap = min(total.arity_cap, 2)
    return [tuple(total.random_element(rng, rng.randint(0, cap)) for _ in range(size)) for _ in range(samples)]


def _degree(total: OperadTotal, x: Element) -> int:
    label = next(iter(x))
    return total.total_degree(label)


def total_report(total: OperadTotal, rng: Optional[random.Random] = None, samples: int = 20) -> Report:
    """Pre-Lie, Lie and dg-algebra identities on random homogeneous elements"""
    report = Report(f"totalization of {total.operad.name}")
    rng = rng or random.Random(0)
    O = total.operad
    checks: Dict[str, object] = {}

    def record(name, ok, witness):
        # keep the first failing witness per identity
        if checks.get(name) is None:
            checks[name] = None if ok else witness

    for x, y, z in _triples(total, rng, samples, 3):
        if not (x and y and z):
            continue
        dx, dy, dz = _degree(total, x), _degree(total, y), _degree(total, z)
        sign_yz = _sign((dy - 1) * (dz - 1))

        def associator(a, b, c):
            result = total.pre_lie(total.pre_lie(a, b), c)
            return add_to(result, total.pre_lie(a, total.pre_lie(b, c)), -1)

        record("pre-Lie identity", associator(x, y, z) == scaled(associator(x, z, y), sign_yz), (x, y, z))
        sign_xy = _sign((dx - 1) * (dy - 1))
        record("bracket skew-symmetry", total.bracket(x, y) == scaled(total.bracket(y, x), -sign_xy), (x, y))
        lhs = total.bracket(x, total.bracket(y, z))
        rhs = total.bracket(total.bracket(x, y), z)
        add_to(rhs, total.bracket(y, total.bracket(x, z)), sign_xy)
        record("Jacobi identity", lhs == rhs, (x, y, z))
        record("cup associativity", total.cup(total.cup(x, y), z) == total.cup(x, total.cup(y, z)), (x, y, z))
        lhs = total.b(total.cup(x, y))
        rhs = total.cup(total.b(x), y)
        add_to(rhs, total.cup(x, total.b(y)), _sign(dx))
        record("b is a derivation of the cup product", lhs == rhs, (x, y))
        lhs = total.b(total.bracket(x, y))
        rhs = total.bracket(total.b(x), y)
        add_to(rhs, total.bracket(x, total.b(y)), _sign(dx - 1))
        record("b is a derivation of the bracket", lhs == rhs, (x, y))
        record("b squares to zero", not total.b(total.b(x)), x)
        expected = O.differential(x)
        add_to(expected, total.bracket(total.mu, x), -1)
        record("b is d minus the bracket with mu", total.b(x) == expected, x)
    for name, witness in checks.items():
        report.add(name, witness is None, witness=witness)
    if total.cyclic is not None:
        report.merge(invariant_bracket_report(total, rng, samples), "")
    return report


def invariant_bracket_report(total: OperadTotal, rng: Optional[random.Random] = None, samples: int = 20) -> Report:
    """[,] maps pairs of lambda-invariants to lambda-invariants"""
    report = Report("bracket preserves cyclic invariants")
    rng = rng or random.Random(0)
    O = total.operad
    pools = []
    for k in range(min(total.arity_cap, 2) + 1):
        space = O.space(k)
        for p in space.degrees():
            pools.extend(total.invariants(k, p))
    if not pools:
        report.skip("bracket of invariants", "no invariants in range")
        return report
    ok, witness = True, None
    for _ in range(samples):
        x, y = rng.choice(pools), rng.choice(pools)
        z = total.bracket(x, y)
        if total.lam(z) != z:
            ok, witness = False, (x, y)
            break
    report.add("bracket of invariants is invariant", ok, f"{samples} pairs", witness)
    return report
