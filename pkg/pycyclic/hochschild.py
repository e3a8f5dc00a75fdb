"""Hochschild cochains of a dg algebra with coefficients in A or A∨[m].

SELF cochains use labels (word, out) for the map sending e_word to e_out.
DUAL cochains use labels (word, x): through Hom(A^k, A∨[m]) = Hom(A^(k+1), Q)
the label is the indicator form of the argument word `word + (x,)`, so
φ(e_word)(e_y) is the coefficient of (word, y).
"""

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from loguru import logger

from pycyclic.cocyclic import (
    Column,
    CocyclicComplex,
    CosimplicialComplex,
    TotalComplex,
    TotalMixed,
    cyclic_invariants,
    hc_lambda,
    normalized_report,
    subcomplex_group,
)
from pycyclic.dgfrob import DgAlgebra, Pairing
from pycyclic.errors import HypothesisFailed, MissingPairing, ParseError, ShapeMismatch, UnknownName, ValidationFailed
from pycyclic.linalg import (
    GradedMap,
    GradedSpace,
    SparseMatrix,
    add_to,
    as_rational,
    combine,
    format_rational,
    kernel_basis,
    rank,
    restrict_map,
    scaled,
)
from pycyclic.mixed import Grading, HomologyGroup, Theory, compute_hc, induced_matrix
from pycyclic.operads import (
    Element,
    EndomorphismOperad,
    MultUnit,
    OperadTotal,
    end_cyclic_structure,
    rotate_form,
)
from pycyclic.report import Report


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


class Coefficients(Enum):
    SELF = "self"
    DUAL = "dual"


def to_form(label: Tuple[Tuple[int, ...], int]) -> Tuple[int, ...]:
    """The argument word of a DUAL label under the Hom-tensor adjunction"""
    word, x = label
    return tuple(word) + (x,)


def from_form(args: Sequence[int]) -> Tuple[Tuple[int, ...], int]:
    args = tuple(args)
    return args[:-1], args[-1]


def dual_space(A: DgAlgebra, m: int, k: int) -> GradedSpace:
    labels: Dict[int, List] = {}
    for word in product(range(A.dim), repeat=k):
        for x in range(A.dim):
            labels.setdefault(-m - A.word_degree(word) - A.degree(x), []).append((word, x))
    degrees = list(labels) or [0]
    return GradedSpace((min(degrees), max(degrees)), labels)


def _dual_vector(forms: Dict[Tuple[int, ...], Fraction]) -> Element:
    return {from_form(args): c for args, c in forms.items() if c}


class HochschildComplex:
    """CH(A, A) or CH(A, A∨[m]) through level K + 2, with its totalization"""

    def __init__(self, algebra: DgAlgebra, coeff: Coefficients, K: int, pairing: Optional[Pairing] = None):
        if coeff is Coefficients.DUAL and pairing is None:
            raise MissingPairing(f"CH({algebra.name}, dual) needs a pairing")
        self.algebra = algebra
        self.coeff = coeff
        self.pairing = pairing
        self.K = K
        self.L = K + 2
        self.operad = EndomorphismOperad(algebra)
        self.name = f"CH({algebra.name},{'A' if coeff is Coefficients.SELF else 'dual'})"
        logger.info(f"building {self.name} through level {self.L}")
        differential = None if algebra.is_zero_differential() else self._differential
        if coeff is Coefficients.SELF:
            levels = [self.operad.space(k) for k in range(self.L + 1)]
            self.complex: CosimplicialComplex = CosimplicialComplex.from_rules(
                levels, self._self_coface, self._self_codegeneracy, differential, name=self.name
            )
            self.total: TotalComplex = TotalComplex(self.complex)
        else:
            levels = [dual_space(algebra, pairing.m, k) for k in range(self.L + 1)]
            self.complex = CocyclicComplex.from_rules(
                levels, self._dual_coface, self._dual_codegeneracy, self._dual_tau, differential, name=self.name
            )
            self.total = TotalMixed(self.complex)

    # SELF structure maps: the A-bimodule formulas

    def _self_coface(self, k: int, i: int, p: int, label) -> Element:
        A = self.algebra
        word, out = label
        result: Element = {}
        if i == 0:
            for a in range(A.dim):
                sign = _sign(p * A.degree(a))
                for c, v in A.times(a, out).items():
                    add_to(result, {((a,) + word, c): v}, sign)
        elif i < k:
            j = i - 1
            for a, b, v in A.factorizations(word[j]):
                add_to(result, {(word[:j] + (a, b) + word[j + 1 :], out): v})
        else:
            for a in range(A.dim):
                for c, v in A.times(out, a).items():
                    add_to(result, {(word + (a,), c): v})
        return result

    def _self_codegeneracy(self, k: int, i: int, p: int, label) -> Element:
        word, out = label
        if word[i] != self.algebra.unit:
            return {}
        return {(word[:i] + word[i + 1 :], out): Fraction(1)}

    # DUAL structure maps on indicator forms

    def _dual_coface(self, k: int, i: int, p: int, label) -> Element:
        A = self.algebra
        u = to_form(label)
        forms: Dict[Tuple[int, ...], Fraction] = {}
        if i == 0:
            # (delta_0 F)(v) = (-1)^(|v_1|(|v_2| + ... )) F(v_2, ..., v_k, v_(k+1) v_1)
            middle = u[:-1]
            for b, a, v in A.factorizations(u[-1]):
                sign = _sign(A.degree(a) * (A.word_degree(middle) + A.degree(b)))
                add_to(forms, {(a,) + middle + (b,): v}, sign)
        else:
            j = i - 1
            for a, b, v in A.factorizations(u[j]):
                add_to(forms, {u[:j] + (a, b) + u[j + 1 :]: v})
        return _dual_vector(forms)

    def _dual_codegeneracy(self, k: int, i: int, p: int, label) -> Element:
        u = to_form(label)
        if u[i] != self.algebra.unit:
            return {}
        return {from_form(u[:i] + u[i + 1 :]): Fraction(1)}

    def _dual_tau(self, k: int, p: int, label) -> Element:
        sign, args = rotate_form(self.algebra, to_form(label))
        return {from_form(args): Fraction(sign)}

    def _differential(self, k: int, p: int, label) -> Element:
        if self.coeff is Coefficients.SELF:
            return self.operad.differential_basis(label)
        A = self.algebra
        u = to_form(label)
        forms: Dict[Tuple[int, ...], Fraction] = {}
        for j, letter in enumerate(u):
            sign = -_sign(p) * _sign(A.word_degree(u[:j]))
            for a, v in A.d_sources(letter):
                add_to(forms, {u[:j] + (a,) + u[j + 1 :]: v}, sign)
        return _dual_vector(forms)

    # total-level helpers

    def lift(self, cochain: Element) -> Tuple[Dict, int]:
        """A level-keyed total vector and its total degree from a homogeneous cochain"""
        degrees = set()
        vector = {}
        for label, c in cochain.items():
            k = len(label[0])
            degrees.add(self._internal(label) + k)
            vector[(k, label)] = c
        if len(degrees) > 1:
            raise ShapeMismatch(f"cochain is not homogeneous: total degrees {sorted(degrees)}")
        return vector, degrees.pop() if degrees else 0

    def _internal(self, label) -> int:
        A = self.algebra
        word, last = label
        if self.coeff is Coefficients.SELF:
            return A.degree(last) - A.word_degree(word)
        return -self.pairing.m - A.word_degree(word) - A.degree(last)

    @staticmethod
    def lower(vector: Dict) -> Element:
        return {label: c for (_, label), c in vector.items()}

    def columns(self) -> List[Column]:
        return self.total.columns()


def build_ch(A: DgAlgebra, coeff: Coefficients, K: int, pairing: Optional[Pairing] = None) -> HochschildComplex:
    return HochschildComplex(A, coeff, K, pairing)


def operad_comparison_report(H: HochschildComplex) -> Report:
    """The SELF structure maps agree entrywise with those induced by (mu, epsilon) on End_A"""
    report = Report(f"{H.name} versus End({H.algebra.name})")
    if H.coeff is not Coefficients.SELF:
        report.skip("operad comparison", "only for A coefficients")
        return report
    induced = OperadTotal(H.operad, MultUnit.of_algebra(H.algebra)).cosimplicial(H.L)
    for kind, ours, theirs in (
        ("coface", H.complex.cofaces, induced.cofaces),
        ("codegeneracy", H.complex.codegeneracies, induced.codegeneracies),
    ):
        ok, witness = True, None
        for key, f in sorted(ours.items()):
            for p in f.source.degrees():
                if f.block(p) != theirs[key].block(p):
                    ok, witness = False, (kind, key, p)
                    break
            if not ok:
                break
        report.add(f"{kind} maps agree", ok, witness=witness)
    return report


# answers aggregated over columns --------------------------------------------


@dataclass
class DegreeAnswer:
    """A dimension at truncation K together with the one at K + 1"""

    degree: int
    kind: str
    dimension: int
    next_dimension: Optional[int]
    certified: bool = True
    groups: List[Tuple[Optional[int], HomologyGroup]] = field(default_factory=list)

    @property
    def stable(self) -> bool:
        return self.next_dimension is None or self.next_dimension == self.dimension

    @property
    def representatives(self) -> List[Dict]:
        return [r for _, group in self.groups for r in group.representatives]

    def row(self) -> Dict:
        return {
            "degree": self.degree,
            "theory": self.kind,
            "dimension": self.dimension,
            "stable": self.stable,
            "certified": self.certified,
        }


def _reach(theory: Optional[Theory], cutoff: Optional[int]) -> int:
    if theory in (Theory.POSITIVE, Theory.PERIODIC):
        return 2 * (cutoff or 0)
    return 0


def _group(column: Column, kind: str, n: int, cutoff: Optional[int]) -> HomologyGroup:
    if kind == "hh":
        return column.mixed.cohomology(n)
    if kind == "lambda":
        return hc_lambda(column, n)
    return compute_hc(column.mixed, Theory(kind), n, cutoff).group


def aggregate(H: HochschildComplex, kind: str, n: int, cutoff: Optional[int] = None) -> DegreeAnswer:
    """Sum over columns of the groups at cohomological degree n.

    The answer at K takes the columns reaching at most level K; the one at
    K + 1 adds the next level. A nonsplit total has a single piece.
    """
    theory = Theory(kind) if kind not in ("hh", "lambda") else None
    reach = _reach(theory, cutoff)
    answer = DegreeAnswer(n, kind, 0, 0)
    for column in H.columns():
        if column.internal is None:
            group = _group(column, kind, n, cutoff)
            return DegreeAnswer(n, kind, group.dimension, None, group.certified, [(None, group)])
        level = n - column.internal + reach
        if level < 0 or level > H.K + 1:
            continue
        group = _group(column, kind, n, cutoff)
        answer.certified = answer.certified and group.certified
        answer.next_dimension += group.dimension
        if level <= H.K:
            answer.dimension += group.dimension
            answer.groups.append((column.internal, group))
    if not answer.stable:
        logger.warning(f"{H.name}: {kind} at degree {n} changes between truncations {H.K} and {H.K + 1}")
    return answer


def hh(H: HochschildComplex, n: int, grading: Grading = Grading.HOMOLOGICAL) -> DegreeAnswer:
    answer = aggregate(H, "hh", grading.internal(n))
    answer.degree = n
    return answer


def hc_theories(
    H: HochschildComplex, theory: str, n: int, cutoff: Optional[int] = None, grading: Grading = Grading.HOMOLOGICAL
) -> DegreeAnswer:
    """HC_lambda ("lambda") or the negative, periodic or positive theory of the DUAL total"""
    if H.coeff is not Coefficients.DUAL:
        raise MissingPairing("cyclic theories live on the dual coefficients")
    if theory not in ("lambda",) + tuple(t.value for t in Theory):
        raise UnknownName(f"unknown theory {theory!r}")
    answer = aggregate(H, theory, grading.internal(n), cutoff)
    answer.degree = n
    return answer


# theta ------------------------------------------------------------------------


def theta_cochain(pairing: Pairing, f: Element) -> Element:
    """Theta(f)(a_1, ..., a_k)(c) = <f(a_1, ..., a_k), c>"""
    result: Element = {}
    for (word, out), c in f.items():
        for x, g in pairing.row(out).items():
            add_to(result, {(word, x): g}, c)
    return result


def theta_inverse_cochain(pairing: Pairing, phi: Element) -> Element:
    inverse = pairing.inverse_matrix()
    if inverse is None:
        raise HypothesisFailed(f"the pairing on {pairing.algebra.name} is degenerate", witness=pairing.algebra.name)
    result: Element = {}
    for (word, y), c in phi.items():
        for out, v in inverse.column(y).items():
            add_to(result, {(word, out): v}, c)
    return result


def lam_dual(A: DgAlgebra, phi: Element) -> Element:
    """lambda = (-1)^k tau_k on DUAL cochains of any arity"""
    result: Element = {}
    for label, c in phi.items():
        sign, args = rotate_form(A, to_form(label))
        add_to(result, {from_form(args): Fraction(sign)}, _sign(len(label[0])) * c)
    return result


def is_weakly_invariant(pairing: Pairing, f: Element) -> bool:
    image = theta_cochain(pairing, f)
    return lam_dual(pairing.algebra, image) == image


class ThetaMap:
    """Levelwise Theta: CH(A, A) -> CH(A, A∨[m])"""

    def __init__(self, source: HochschildComplex, target: HochschildComplex):
        if source.coeff is not Coefficients.SELF or target.coeff is not Coefficients.DUAL:
            raise ShapeMismatch("Theta goes from A coefficients to dual coefficients")
        self.source = source
        self.target = target
        self.pairing = target.pairing
        self.levels = [
            GradedMap(
                source.complex.levels[k],
                target.complex.levels[k],
                0,
                rule=lambda p, label: theta_cochain(self.pairing, {label: Fraction(1)}),
            )
            for k in range(min(source.L, target.L) + 1)
        ]

    def level(self, k: int) -> GradedMap:
        return self.levels[k]

    def on_total(self, vector: Dict) -> Dict:
        result: Dict = {}
        for (k, label), c in vector.items():
            add_to(result, {(k, y): v for y, v in theta_cochain(self.pairing, {label: c}).items()})
        return result

    def column_matrix(self, source: Column, target: Column, n: int) -> SparseMatrix:
        columns = []
        for label in source.space.basis(n):
            image = self.on_total({label: Fraction(1)})
            columns.append(target.space.to_positions(n, image))
        return SparseMatrix.from_columns(target.space.dim(n), columns)


def theta_on_ch(pairing: Pairing, K: int) -> ThetaMap:
    A = pairing.algebra
    return ThetaMap(build_ch(A, Coefficients.SELF, K), build_ch(A, Coefficients.DUAL, K, pairing))


def theta_commutation_report(theta_map: ThetaMap) -> Report:
    report = Report("Theta is a cosimplicial map")
    S, D = theta_map.source.complex, theta_map.target.complex
    for kind, ours, theirs, shift in (
        ("coface", S.cofaces, D.cofaces, -1),
        ("codegeneracy", S.codegeneracies, D.codegeneracies, 1),
    ):
        ok, witness = True, None
        for (k, i), f in sorted(ours.items()):
            g = theirs[(k, i)]
            for p in f.source.degrees():
                lhs = theta_map.level(k).block(p) @ f.block(p)
                rhs = g.block(p) @ theta_map.level(k + shift).block(p)
                if lhs != rhs:
                    ok, witness = False, (kind, k, i, p)
                    break
            if not ok:
                break
        report.add(f"Theta commutes with {kind} maps", ok, witness=witness)
    ok, witness = True, None
    for k in range(len(theta_map.levels)):
        f, g = S.differential(k), D.differential(k)
        for p in f.source.degrees():
            if theta_map.level(k).block(p + 1) @ f.block(p) != g.block(p) @ theta_map.level(k).block(p):
                ok, witness = False, (k, p)
                break
        if not ok:
            break
    report.add("Theta commutes with d", ok, witness=witness)
    return report


class WeakInvariants:
    """Theta^{-1}(Ker(1 - lambda)) inside CH(A, A), per arity and internal degree"""

    def __init__(self, pairing: Pairing):
        self.pairing = pairing
        self.algebra = pairing.algebra
        self.operad = EndomorphismOperad(self.algebra)
        self._bases: Dict[Tuple[int, int], List[Element]] = {}
        self._duals: Dict[int, GradedSpace] = {}

    def basis(self, k: int, p: int) -> List[Element]:
        if (k, p) not in self._bases:
            space = self.operad.space(k)
            if k not in self._duals:
                self._duals[k] = dual_space(self.algebra, self.pairing.m, k)
            dual = self._duals[k]
            columns = []
            for label in space.basis(p):
                image = theta_cochain(self.pairing, {label: Fraction(1)})
                add_to(image, lam_dual(self.algebra, image), -1)
                columns.append(dual.to_positions(p, image))
            matrix = SparseMatrix.from_columns(dual.dim(p), columns)
            self._bases[(k, p)] = [space.from_positions(p, v) for v in kernel_basis(matrix)]
        return self._bases[(k, p)]

    def random(self, rng: random.Random, k: int, p: Optional[int] = None) -> Element:
        if p is None:
            degrees = [q for q in self.operad.space(k).degrees() if self.basis(k, q)]
        else:
            degrees = [p] if self.basis(k, p) else []
        if not degrees:
            return {}
        q = rng.choice(degrees)
        return combine((v, Fraction(rng.choice([-2, -1, 1, 2]))) for v in self.basis(k, q) if rng.random() < 0.7)

    def contains(self, f: Element) -> bool:
        return is_weakly_invariant(self.pairing, f)

    def total_basis(self, H: HochschildComplex, column: Column, n: int) -> List[Dict[int, Fraction]]:
        """W in a SELF column at total degree n, as positional vectors"""
        vectors = []
        for k in range(H.L + 1):
            p = n - k
            if column.internal is not None and p != column.internal:
                continue
            for w in self.basis(k, p):
                vectors.append(column.space.to_positions(n, {(k, label): c for label, c in w.items()}))
        return vectors


def weak_invariance_report(
    H: HochschildComplex, W: WeakInvariants, total: OperadTotal, rng: random.Random, samples: int = 20
) -> Report:
    """W is closed under b and under the Gerstenhaber bracket"""
    report = Report(f"weak invariants of {H.algebra.name}")
    for column in H.columns():
        for n in column.space.degrees():
            if n + 1 - (column.internal or 0) > H.L:
                continue
            here = W.total_basis(H, column, n)
            there = W.total_basis(H, column, n + 1)
            try:
                restrict_map(column.ops["b"].block(n), here, there)
                report.add(f"b preserves W@{column.internal},{n}", True)
            except ShapeMismatch:
                report.add(f"b preserves W@{column.internal},{n}", False, witness=(column.internal, n))
    ok, witness, tried = True, None, 0
    for _ in range(samples):
        f = W.random(rng, rng.randint(0, 2))
        g = W.random(rng, rng.randint(0, 2))
        if not f or not g:
            continue
        tried += 1
        if not W.contains(total.bracket(f, g)):
            ok, witness = False, (f, g)
            break
    report.add("bracket preserves W", ok, f"{tried} pairs", witness)
    return report


def theta_report(pairing: Pairing, K: int, degrees: Sequence[int], grading: Grading = Grading.HOMOLOGICAL) -> Report:
    """Degreewise ranks of Theta, of its restriction W -> cyclic invariants and of
    the maps they induce on homology. The quasi-isomorphism question is recorded
    in the metadata, never asserted."""
    theta_map = theta_on_ch(pairing, K)
    source, target = theta_map.source, theta_map.target
    report = theta_commutation_report(theta_map)
    report.title = f"Theta on Hochschild cochains of {pairing.algebra.name}"
    W = WeakInvariants(pairing)
    rows = {}
    for external in degrees:
        n = grading.internal(external)
        row = {k: 0 for k in ("theta", "W", "cyc", "theta|W", "HH", "HH_dual", "H_theta", "H_W", "HC", "H_theta|W")}
        certified = True
        for column in source.columns():
            p = column.internal
            if p is None:
                dual = target.columns()[0]
            elif 0 <= n - p <= K:
                dual = target.total.column_at(p)
            else:
                continue
            if dual is None:
                continue
            certified = certified and column.certified(n) and dual.certified(n)
            matrix = theta_map.column_matrix(column, dual, n)
            row["theta"] += rank(matrix)
            w = W.total_basis(source, column, n)
            row["W"] += len(w)
            invariants = cyclic_invariants(dual, n)
            row["cyc"] += len(invariants)
            if w:
                row["theta|W"] += rank(SparseMatrix.from_columns(dual.space.dim(n), [matrix.apply(v) for v in w]))
            h_self, h_dual = column.mixed.cohomology(n), dual.mixed.cohomology(n)
            row["HH"] += h_self.dimension
            row["HH_dual"] += h_dual.dimension
            row["H_theta"] += rank(induced_matrix(h_self, h_dual, theta_map.on_total))
            h_w = subcomplex_group("W", column.mixed, n, lambda m, column=column: W.total_basis(source, column, m), True)
            h_cyc = hc_lambda(dual, n)
            row["H_W"] += h_w.dimension
            row["HC"] += h_cyc.dimension
            row["H_theta|W"] += rank(induced_matrix(h_w, h_cyc, theta_map.on_total))
        row["certified"] = certified
        row["quasi-iso"] = row["H_W"] == row["HC"] == row["H_theta|W"]
        rows[external] = row
        logger.debug(f"Theta at degree {external}: {row}")
    report.meta["degrees"] = rows
    return report


# operations on cochains -------------------------------------------------------


def cochain_total(A: DgAlgebra, K: int, pairing: Optional[Pairing] = None, strict: bool = False) -> OperadTotal:
    """End_A totalized with its multiplication; cyclic when the pairing is nondegenerate"""
    operad = EndomorphismOperad(A)
    cyclic = None
    if pairing is not None and pairing.is_nondegenerate():
        cyclic = end_cyclic_structure(pairing, operad)
    return OperadTotal(operad, MultUnit.of_algebra(A), cyclic, arity_cap=K, strict=strict)


def cup(total: OperadTotal, f: Element, g: Element) -> Element:
    return total.truncate(total.cup(f, g))


def gerstenhaber_bracket(total: OperadTotal, f: Element, g: Element) -> Element:
    return total.truncate(total.bracket(f, g))


def connes_B_dual(H: HochschildComplex, phi: Element) -> Element:
    """Connes' operator on a homogeneous DUAL cochain"""
    if H.coeff is not Coefficients.DUAL:
        raise MissingPairing("Connes' operator lives on the dual coefficients")
    vector, n = H.lift(phi)
    return H.lower(H.total.B(vector, n))


def cup_pairing_report(pairing: Pairing, total: OperadTotal, rng: random.Random, samples: int = 10) -> Report:
    """Theta(f.g)(a, b, c) = (-1)^(k(q + l) + q|a|) <f(a), g(b) c> on all argument words"""
    A = pairing.algebra
    report = Report(f"cup product against the pairing on {A.name}")
    ok, witness = True, None
    for _ in range(samples):
        k, l = rng.randint(0, 2), rng.randint(0, 2)
        f, g = total.random_element(rng, k), total.random_element(rng, l)
        if not f or not g:
            continue
        q = total.operad.degree(next(iter(g)))
        lhs = theta_cochain(pairing, total.cup(f, g))
        rhs: Element = {}
        for (u, o1), c1 in f.items():
            for (v, o2), c2 in g.items():
                sign = _sign(k * (q + l) + q * A.word_degree(u))
                for c in range(A.dim):
                    value = pairing.value({o1: Fraction(1)}, A.times(o2, c))
                    if value:
                        add_to(rhs, {(u + v, c): value}, sign * c1 * c2)
        if lhs != rhs:
            ok, witness = False, (f, g)
            break
    report.add("Theta of a cup product is the pairing expansion", ok, witness=witness)
    return report


def normalized_agreement_report(H: HochschildComplex) -> Report:
    report = Report(f"normalized cochains of {H.name}")
    for column in H.columns():
        report.merge(normalized_report(H.total, column), column.mixed.name)
    return report


# cochain literals -------------------------------------------------------------


def format_cochain(A: DgAlgebra, f: Element) -> str:
    """One line per term: `k | a_1 ... a_k | out | p/q`"""
    lines = []
    for (word, out), c in sorted(f.items()):
        letters = " ".join(A.labels[i] for i in word)
        lines.append(f"{len(word)} | {letters} | {A.labels[out]} | {format_rational(c)}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_cochain(A: DgAlgebra, text: str) -> Element:
    result: Element = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = [part.strip() for part in line.split("|")]
        if len(fields) != 4:
            raise ParseError("expected `k | word | out | coefficient`", lineno, 1)
        try:
            k = int(fields[0])
        except ValueError:
            raise ParseError(f"arity {fields[0]!r} is not an integer", lineno, 1)
        letters = fields[1].split()
        if len(letters) != k:
            raise ParseError(f"word has {len(letters)} letters, arity says {k}", lineno, line.index("|") + 2)
        try:
            word = tuple(A.index(letter) for letter in letters)
            out = A.index(fields[2])
        except UnknownName as e:
            raise ParseError(str(e), lineno, 1)
        try:
            value = as_rational(fields[3])
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad coefficient {fields[3]!r}", lineno, line.rindex("|") + 2)
        add_to(result, {(word, out): value})
    return result


def require_valid(report: Report, what: str):
    if not report.passed:
        failure = report.failures[0]
        raise ValidationFailed(f"{what}: {failure.name} fails at {failure.witness}", report)
