"""BV and gravity structures on the homology of a DUAL Hochschild totalization.

Products and brackets are computed on CH(A, A) and carried over by Theta,
Delta is Connes' operator. Identities are checked on classes: both sides are
evaluated on representatives and their difference must be a boundary. Any
case whose terms reach an uncertified column is skipped, never passed.

Degrees are cohomological throughout; signs only see parities.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from loguru import logger

from pycyclic.braces import BraceContext
from pycyclic.cocyclic import B_lambda, Column, hc_lambda
from pycyclic.dgfrob import Pairing
from pycyclic.errors import HypothesisFailed, MissingPairing, ShapeMismatch, UnknownName, WindowTooSmall
from pycyclic.hochschild import (
    Coefficients,
    HochschildComplex,
    build_ch,
    cochain_total,
    theta_cochain,
    theta_inverse_cochain,
)
from pycyclic.linalg import SparseMatrix, add_to, coordinates, format_rational, rank
from pycyclic.mixed import Grading, HomologyGroup, Theory
from pycyclic.operads import Element, koszul_sign, sample_tuples
from pycyclic.report import Report
from pycyclic.trees import PlanarTree, canonical

# a cocycle of the DUAL total (or of one of its assemblies) with its degree
Chain = Tuple[Dict, int]
Ref = Tuple[int, int]

EXHAUSTIVE_BELOW = 512


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def _positions(coords: Sequence[Fraction]) -> Dict[int, Fraction]:
    return {i: v for i, v in enumerate(coords) if v}


def _level(label) -> int:
    return label[0]


def _assembled_level(label) -> int:
    power, (k, _) = label
    return k + 2 * power


def _include_at_zero(vector: Dict) -> Dict:
    return {(0, label): v for label, v in vector.items()}


def _component_zero(vector: Dict) -> Dict:
    return {label: v for (i, label), v in vector.items() if i == 0}


def _combine(terms: Iterable[Tuple[Optional[Chain], int]]) -> Optional[Dict]:
    """Signed sum of chains of one degree; None as soon as a term is None"""
    result: Dict = {}
    for chain, coef in terms:
        if chain is None:
            return None
        add_to(result, chain[0], coef)
    return result


# classes ----------------------------------------------------------------------


@dataclass
class Piece:
    """One column's share of a class space in one degree"""

    internal: Optional[int]
    basis: HomologyGroup
    classify: HomologyGroup
    images: List[Dict[int, Fraction]] = field(default_factory=list)


class ClassSpace:
    """Classes of one homology theory of a DUAL total, summed over certified columns.

    `build(column, n)` returns the group whose representatives form the basis
    and the group in which vectors are classified. They differ only for the
    positive theory, whose boundaries need one more negative power of u.
    `reach` is how many levels above n - p the two groups look, and `shift`
    turns a degree of the theory into the degree used for signs.
    """

    def __init__(
        self,
        name: str,
        H: HochschildComplex,
        build: Callable[[Column, int], Tuple[HomologyGroup, HomologyGroup]],
        level_of: Callable[[object], int],
        reach: int = 0,
        shift: int = 0,
    ):
        self.name = name
        self.H = H
        self.build = build
        self.level_of = level_of
        self.reach = reach
        self.shift = shift
        self._pieces: Dict[int, List[Piece]] = {}
        self._dropped: Dict[int, int] = {}

    def pieces(self, n: int) -> List[Piece]:
        if n not in self._pieces:
            pieces, dropped = [], 0
            for column in self.H.columns():
                if column.internal is not None:
                    lowest = n - column.internal + self.reach
                    if lowest < 0:
                        continue
                    if lowest > self.H.K + 1:
                        dropped += 1
                        continue
                basis, classify = self.build(column, n)
                if not (basis.certified and classify.certified):
                    dropped += 1
                    continue
                images = [_positions(classify.classify(r)) for r in basis.representatives]
                pieces.append(Piece(column.internal, basis, classify, images))
            self._pieces[n] = pieces
            self._dropped[n] = dropped
            logger.debug(f"{self.name}^{n}: {sum(p.basis.dimension for p in pieces)} classes in {len(pieces)} columns")
        return self._pieces[n]

    def dim(self, n: int) -> int:
        return sum(piece.basis.dimension for piece in self.pieces(n))

    def certified_dim(self, n: int) -> Union[int, str]:
        """dim(n), or "uncertified" when a column the truncation cuts off could contribute"""
        pieces = self.pieces(n)
        if self._dropped[n]:
            return "uncertified"
        return sum(piece.basis.dimension for piece in pieces)

    def representatives(self, n: int) -> List[Dict]:
        return [r for piece in self.pieces(n) for r in piece.basis.representatives]

    def classes(self, degrees: Iterable[int]) -> List[Tuple[Ref, Chain]]:
        return [((n, i), (r, n)) for n in degrees for i, r in enumerate(self.representatives(n))]

    def _parts(self, vector: Dict, n: int) -> Optional[Dict[Optional[int], Dict]]:
        known = {piece.internal for piece in self.pieces(n)}
        parts: Dict[Optional[int], Dict] = {}
        for label, v in vector.items():
            internal = n - self.level_of(label) if self.H.total.split else None
            if internal not in known:
                return None
            parts.setdefault(internal, {})[label] = v
        return parts

    def _class_of(self, piece: Piece, part: Dict, n: int) -> List[Fraction]:
        try:
            return piece.classify.classify(part)
        except ValueError:
            logger.error(f"{self.name}: vector of degree {n} is not a cycle")
            raise ShapeMismatch(f"{self.name}: vector of degree {n} is not a cycle")

    def classify(self, vector: Dict, n: int) -> Optional[List[Fraction]]:
        """Coordinates in the representative basis, or None when the vector
        reaches an uncertified column or a class outside the basis span"""
        parts = self._parts(vector, n)
        if parts is None:
            return None
        coords: List[Fraction] = []
        for piece in self.pieces(n):
            target = _positions(self._class_of(piece, parts.get(piece.internal, {}), n))
            solution = coordinates(piece.images, target)
            if solution is None:
                return None
            coords.extend(solution)
        return coords

    def is_zero(self, vector: Optional[Dict], n: int) -> Optional[bool]:
        if vector is None:
            return None
        parts = self._parts(vector, n)
        if parts is None:
            return None
        return all(not any(self._class_of(p, parts.get(p.internal, {}), n)) for p in self.pieces(n))


def _hh_groups(column: Column, n: int) -> Tuple[HomologyGroup, HomologyGroup]:
    group = column.mixed.cohomology(n)
    return group, group


def _lambda_groups(column: Column, n: int) -> Tuple[HomologyGroup, HomologyGroup]:
    group = hc_lambda(column, n)
    return group, group


def _negative_groups(column: Column, n: int) -> Tuple[HomologyGroup, HomologyGroup]:
    group = column.mixed.assembly(Theory.NEGATIVE).homology(n)
    return group, group


# transported operations -------------------------------------------------------


class DualModel:
    """The cup product and Gerstenhaber bracket of CH(A, A) carried to the
    DUAL totalization by Theta, next to Connes' operator"""

    def __init__(self, H: HochschildComplex):
        if H.coeff is not Coefficients.DUAL:
            raise MissingPairing("BV structures live on the dual coefficients")
        if not H.pairing.is_nondegenerate():
            raise HypothesisFailed(f"the pairing on {H.algebra.name} is degenerate", witness=H.algebra.name)
        self.H = H
        self.pairing: Pairing = H.pairing
        self.T = H.total
        self.total = cochain_total(H.algebra, H.L, H.pairing)

    def to_self(self, vector: Dict) -> Element:
        return theta_inverse_cochain(self.pairing, self.H.lower(vector))

    def to_dual(self, f: Element) -> Optional[Dict]:
        """Theta(f) as a total vector, or None past the top level"""
        phi = theta_cochain(self.pairing, f)
        if any(len(word) > self.H.L for word, _ in phi):
            return None
        return {(len(label[0]), label): c for label, c in phi.items()}

    def multiply(self, x: Dict, y: Dict) -> Optional[Dict]:
        return self.to_dual(self.total.cup(self.to_self(x), self.to_self(y)))

    def bracket(self, x: Dict, y: Dict) -> Optional[Dict]:
        return self.to_dual(self.total.bracket(self.to_self(x), self.to_self(y)))

    def delta(self, x: Dict, n: int) -> Dict:
        return self.T.B(x, n)


class HomologyAlgebra:
    """HH of the DUAL total with product, BV operator and Gerstenhaber bracket"""

    def __init__(self, model: DualModel, degrees: Sequence[int]):
        self.model = model
        self.name = model.H.algebra.name
        self.V = ClassSpace("HH", model.H, _hh_groups, _level)
        self.degrees = list(degrees)
        self.report: Optional[Report] = None

    def classes(self) -> List[Tuple[Ref, Chain]]:
        return self.V.classes(self.degrees)

    def times(self, *chains: Optional[Chain]) -> Optional[Chain]:
        result = chains[0]
        for chain in chains[1:]:
            if result is None or chain is None:
                return None
            vector = self.model.multiply(result[0], chain[0])
            if vector is None:
                return None
            result = (vector, result[1] + chain[1])
        return result

    def delta(self, chain: Optional[Chain]) -> Optional[Chain]:
        if chain is None:
            return None
        return self.model.delta(chain[0], chain[1]), chain[1] - 1

    def bracket(self, a: Optional[Chain], b: Optional[Chain]) -> Optional[Chain]:
        if a is None or b is None:
            return None
        vector = self.model.bracket(a[0], b[0])
        return None if vector is None else (vector, a[1] + b[1] - 1)

    def delta_bracket(self, a: Chain, b: Chain) -> Optional[Chain]:
        """(-1)^|a| Delta(ab) - (-1)^|a| Delta(a) b - a Delta(b)"""
        s = _sign(a[1])
        vector = _combine(
            [
                (self.delta(self.times(a, b)), s),
                (self.times(self.delta(a), b), -s),
                (self.times(a, self.delta(b)), -1),
            ]
        )
        return None if vector is None else (vector, a[1] + b[1] - 1)

    def zero(self, vector: Optional[Dict], n: int) -> Optional[bool]:
        return self.V.is_zero(vector, n)

    def coordinates(self, chain: Optional[Chain]) -> Optional[List[Fraction]]:
        return None if chain is None else self.V.classify(*chain)

    def tables(self) -> Dict[str, List[Tuple]]:
        """Product, Delta and bracket on the representative basis"""
        rows: Dict[str, List[Tuple]] = {"product": [], "delta": [], "bracket": []}
        classes = self.classes()
        for ra, a in classes:
            rows["delta"].append((ra, _coords_text(self.coordinates(self.delta(a)))))
            for rb, b in classes:
                rows["product"].append((ra, rb, _coords_text(self.coordinates(self.times(a, b)))))
                rows["bracket"].append((ra, rb, _coords_text(self.coordinates(self.bracket(a, b)))))
        return rows


def _coords_text(coords: Optional[List[Fraction]]) -> str:
    if coords is None:
        return "uncertified"
    return "[" + " ".join(format_rational(c) for c in coords) + "]"


def _identity(report: Report, name: str, cases: Iterable[Tuple[object, Optional[bool]]]) -> Optional[bool]:
    """Records one check over cases that may be undecidable (None)"""
    checked = skipped = 0
    for witness, ok in cases:
        if ok is None:
            skipped += 1
            continue
        checked += 1
        if not ok:
            return report.add(name, False, f"after {checked} cases", witness)
    if not checked:
        report.skip(name, f"{skipped} cases reach uncertified columns" if skipped else "no cases")
        return None
    return report.add(name, True, f"{checked} cases, {skipped} skipped")


def _tuples(classes: List[Tuple[Ref, Chain]], size: int, rng: random.Random, samples: int):
    chains = dict(classes)
    for refs in sample_tuples([r for r, _ in classes], size, rng, samples, EXHAUSTIVE_BELOW):
        yield refs, [chains[r] for r in refs]


def bv_report(algebra: HomologyAlgebra, rng: Optional[random.Random] = None, samples: int = 20) -> Report:
    report = Report(f"BV structure on HH of {algebra.name}")
    rng = rng or random.Random(0)
    classes = algebra.classes()
    report.meta["classes"] = {n: algebra.V.certified_dim(n) for n in algebra.degrees}
    if not classes:
        report.skip("BV identities", "no certified classes in the window")
        return report
    logger.info(f"checking BV identities on {len(classes)} classes of HH({algebra.name})")
    m, d, br = algebra.times, algebra.delta, algebra.bracket

    def commutative():
        for refs, (a, b) in _tuples(classes, 2, rng, samples):
            diff = _combine([(m(a, b), 1), (m(b, a), -_sign(a[1] * b[1]))])
            yield refs, algebra.zero(diff, a[1] + b[1])

    def associative():
        for refs, (a, b, c) in _tuples(classes, 3, rng, samples):
            diff = _combine([(m(m(a, b), c), 1), (m(a, m(b, c)), -1)])
            yield refs, algebra.zero(diff, a[1] + b[1] + c[1])

    def delta_squared():
        for ref, a in classes:
            yield ref, algebra.zero(d(d(a))[0], a[1] - 2)

    def seven_term():
        for refs, (a, b, c) in _tuples(classes, 3, rng, samples):
            x, y = a[1], b[1]
            diff = _combine(
                [
                    (d(m(a, b, c)), 1),
                    (m(d(m(a, b)), c), -1),
                    (m(a, d(m(b, c))), -_sign(x)),
                    (m(b, d(m(a, c))), -_sign((x + 1) * y)),
                    (m(d(a), b, c), 1),
                    (m(a, d(b), c), _sign(x)),
                    (m(a, b, d(c)), _sign(x + y)),
                ]
            )
            yield refs, algebra.zero(diff, x + y + c[1] - 1)

    def four_factors():
        k = 4
        for refs, chains in _tuples(classes, k, rng, samples):
            degrees = [c[1] for c in chains]
            terms = [(d(m(*chains)), 1)]
            for i, j in combinations(range(k), 2):
                rest = [c for t, c in enumerate(chains) if t not in (i, j)]
                order = [i, j] + [t for t in range(k) if t not in (i, j)]
                terms.append((m(d(m(chains[i], chains[j])), *rest), -koszul_sign(degrees, order)))
            for i in range(k):
                factors = chains[:i] + [d(chains[i])] + chains[i + 1 :]
                terms.append((m(*factors), (k - 2) * _sign(sum(degrees[:i]))))
            yield refs, algebra.zero(_combine(terms), sum(degrees) - 1)

    def skew():
        for refs, (a, b) in _tuples(classes, 2, rng, samples):
            diff = _combine([(br(a, b), 1), (br(b, a), _sign((a[1] - 1) * (b[1] - 1)))])
            yield refs, algebra.zero(diff, a[1] + b[1] - 1)

    def jacobi():
        for refs, (a, b, c) in _tuples(classes, 3, rng, samples):
            diff = _combine(
                [
                    (br(a, br(b, c)), 1),
                    (br(br(a, b), c), -1),
                    (br(b, br(a, c)), -_sign((a[1] - 1) * (b[1] - 1))),
                ]
            )
            yield refs, algebra.zero(diff, a[1] + b[1] + c[1] - 2)

    def poisson():
        for refs, (a, b, c) in _tuples(classes, 3, rng, samples):
            diff = _combine(
                [
                    (br(a, m(b, c)), 1),
                    (m(br(a, b), c), -1),
                    (m(b, br(a, c)), -_sign((a[1] + 1) * b[1])),
                ]
            )
            yield refs, algebra.zero(diff, a[1] + b[1] + c[1] - 1)

    _identity(report, "product is graded commutative", commutative())
    _identity(report, "product is associative", associative())
    _identity(report, "Delta squares to zero", delta_squared())
    _identity(report, "seven-term BV identity", seven_term())
    _identity(report, "generalized BV identity for four factors", four_factors())
    _identity(report, "bracket is skew-symmetric of degree 1", skew())
    _identity(report, "bracket satisfies the Jacobi identity of degree 1", jacobi())
    _identity(report, "Poisson relation", poisson())
    compatibility = compatibility_report(algebra, rng, samples)
    report.merge(compatibility, "")
    report.meta.update(compatibility.meta)
    return report


def compatibility_report(algebra: HomologyAlgebra, rng: random.Random, samples: int) -> Report:
    """The transported Gerstenhaber bracket is c times the bracket built from
    Delta, for one global sign c"""
    report = Report("bracket compatibility")
    found: Dict[str, Optional[Fraction]] = {"c": None}

    def cases():
        for refs, (a, b) in _tuples(algebra.classes(), 2, rng, samples):
            ours = algebra.coordinates(algebra.bracket(a, b))
            theirs = algebra.coordinates(algebra.delta_bracket(a, b))
            if ours is None or theirs is None:
                yield refs, None
                continue
            if found["c"] is None:
                index = next((i for i, v in enumerate(theirs) if v), None)
                if index is not None:
                    found["c"] = ours[index] / theirs[index]
            c = found["c"] if found["c"] is not None else Fraction(1)
            yield refs, ours == [c * v for v in theirs]

    _identity(report, "bracket agrees with the Delta bracket up to a global sign", cases())
    c = found["c"]
    report.meta["bracket_sign"] = "undetermined" if c is None else format_rational(c)
    if c is not None:
        report.add("global factor is a sign", abs(c) == 1, format_rational(c), witness=format_rational(c))
    return report


def extract_bv(
    pairing: Pairing,
    K: int,
    degrees: Sequence[int],
    grading: Grading = Grading.HOMOLOGICAL,
    rng: Optional[random.Random] = None,
    samples: int = 20,
) -> HomologyAlgebra:
    """HH(A, A∨[m]) through truncation K as a BV algebra, with its certificate.

    `degrees` are read in `grading`; classes are indexed by cohomological degree.
    """
    H = build_ch(pairing.algebra, Coefficients.DUAL, K, pairing)
    internal = sorted(grading.internal(n) for n in degrees)
    algebra = HomologyAlgebra(DualModel(H), internal)
    if not any(algebra.V.pieces(n) for n in algebra.degrees):
        logger.error(f"no certified degree of HH({algebra.name}) in {list(degrees)} at K={K}")
        raise WindowTooSmall(f"no certified degree of HH({algebra.name}) in the window at K={K}")
    algebra.report = bv_report(algebra, rng, samples)
    return algebra


# gravity ----------------------------------------------------------------------


@dataclass
class GravityModel:
    """W with alpha: W -> V and beta: V -> W.

    alpha sends theory degree n to V-degree n + shift, beta sends V-degree m to
    theory degree m + beta_shift. Signs use the V-degree of alpha(x).
    """

    name: str
    W: ClassSpace
    alpha: Callable[[Dict, int], Dict]
    beta: Callable[[Dict, int], Dict]
    shift: int = 0
    beta_shift: int = -1


def lambda_model(H: HochschildComplex) -> GravityModel:
    """HC_lambda with the inclusion of invariants and B_lambda"""
    T = H.total
    W = ClassSpace("HC_lambda", H, _lambda_groups, _level)
    return GravityModel("HC_lambda", W, lambda y, n: dict(y), lambda x, n: B_lambda(T, x, n))


def negative_model(H: HochschildComplex) -> GravityModel:
    """Negative cyclic homology with the u^0 component and x -> B(x) u^0"""
    T = H.total
    W = ClassSpace("NEG", H, _negative_groups, _assembled_level)
    return GravityModel("NEG", W, lambda y, n: _component_zero(y), lambda x, n: _include_at_zero(T.B(x, n)))


def positive_model(H: HochschildComplex, cutoff: int = 1) -> GravityModel:
    """Positive cyclic homology shifted by one, with y -> B(y_0) and x -> x u^0"""
    T = H.total

    def groups(column: Column, n: int) -> Tuple[HomologyGroup, HomologyGroup]:
        M = column.mixed
        return (
            M.assembly(Theory.POSITIVE, cutoff).homology(n),
            M.assembly(Theory.POSITIVE, cutoff + 1).homology(n),
        )

    W = ClassSpace(f"POS_{cutoff}[-1]", H, groups, _assembled_level, reach=2 * cutoff + 2, shift=-1)
    return GravityModel(
        W.name,
        W,
        lambda y, n: T.B(_component_zero(y), n),
        lambda x, n: _include_at_zero(x),
        shift=-1,
        beta_shift=0,
    )


class GravityData:
    """Brackets {x_1, ..., x_k} = beta(alpha(x_1) ... alpha(x_k)) on W"""

    def __init__(self, algebra: HomologyAlgebra, model: GravityModel, kmax: int = 3):
        self.algebra = algebra
        self.model = model
        self.kmax = kmax
        self.name = model.name

    def classes(self) -> List[Tuple[Ref, Chain]]:
        return self.model.W.classes(self.algebra.degrees)

    def degree(self, chain: Chain) -> int:
        return chain[1] + self.model.shift

    def alpha(self, chain: Optional[Chain]) -> Optional[Chain]:
        if chain is None:
            return None
        y, n = chain
        return self.model.alpha(y, n), n + self.model.shift

    def beta(self, chain: Optional[Chain]) -> Optional[Chain]:
        if chain is None:
            return None
        x, m = chain
        return self.model.beta(x, m), m + self.model.beta_shift

    def bracket(self, *chains: Optional[Chain]) -> Optional[Chain]:
        if any(c is None for c in chains):
            return None
        return self.beta(self.algebra.times(*[self.alpha(c) for c in chains]))

    def zero(self, vector: Optional[Dict], n: int) -> Optional[bool]:
        return self.model.W.is_zero(vector, n)

    def table(self, k: int, rng: Optional[random.Random] = None, samples: int = 20) -> List[Tuple]:
        rows = []
        for refs, chains in _tuples(self.classes(), k, rng or random.Random(0), samples):
            result = self.bracket(*chains)
            coords = None if result is None else self.model.W.classify(*result)
            rows.append((refs, _coords_text(coords)))
        return rows


def gravity_from_bv(algebra: HomologyAlgebra, model: GravityModel, kmax: int = 3) -> GravityData:
    """Checks alpha beta = Delta on V and beta alpha = 0 on W, on classes"""
    data = GravityData(algebra, model, kmax)
    logger.info(f"inducing gravity brackets on {model.name} of {algebra.name}")
    for ref, x in algebra.classes():
        diff = _combine([(data.alpha(data.beta(x)), 1), (algebra.delta(x), -1)])
        if algebra.zero(diff, x[1] - 1) is False:
            logger.error(f"alpha beta differs from Delta on {ref}")
            raise HypothesisFailed(f"{model.name}: alpha beta differs from Delta on class {ref}", witness=ref)
    for ref, y in data.classes():
        image = data.beta(data.alpha(y))
        if data.zero(image[0], image[1]) is False:
            logger.error(f"beta alpha is nonzero on {ref}")
            raise HypothesisFailed(f"{model.name}: beta alpha is nonzero on class {ref}", witness=ref)
    return data


def _swap(chains: List[Chain], i: int) -> List[Chain]:
    swapped = list(chains)
    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    return swapped


def _jacobi_terms(data: GravityData, a: List[Chain], b: List[Chain]) -> List[Tuple[Optional[Chain], int]]:
    """sum over i < j of the signed {{a_i, a_j}, rest of a, b}"""
    k = len(a)
    degrees = [data.degree(c) for c in a]
    terms = []
    for i, j in combinations(range(k), 2):
        order = [i, j] + [t for t in range(k) if t not in (i, j)]
        rest = [a[t] for t in order[2:]]
        terms.append((data.bracket(data.bracket(a[i], a[j]), *rest, *b), koszul_sign(degrees, order)))
    return terms


def _output_degree(data: GravityData, chains: Sequence[Chain], nested: int = 0) -> int:
    """Theory degree of a bracket of the chains nested `nested` levels deep"""
    shift, beta_shift = data.model.shift, data.model.beta_shift
    return sum(c[1] + shift for c in chains) + nested * shift + (nested + 1) * beta_shift


def gravity_report(data: GravityData, rng: Optional[random.Random] = None, samples: int = 20) -> Report:
    report = Report(f"gravity brackets on {data.name} of {data.algebra.name}")
    rng = rng or random.Random(0)
    classes = data.classes()
    report.meta["classes"] = {n: data.model.W.certified_dim(n) for n in data.algebra.degrees}
    if not classes:
        report.skip("gravity identities", f"{data.name} has no certified classes in the window")
        return report
    algebra = data.algebra
    deg = data.degree

    def symmetric(k: int):
        for refs, chains in _tuples(classes, k, rng, samples):
            lhs = data.bracket(*chains)
            for i in range(k - 1):
                sign = _sign(deg(chains[i]) * deg(chains[i + 1]))
                diff = _combine([(lhs, 1), (data.bracket(*_swap(chains, i)), -sign)])
                yield (refs, i), data.zero(diff, _output_degree(data, chains))

    def relation(k: int, l: int, tuples=None):
        for refs, chains in tuples or _tuples(classes, k + l, rng, samples):
            a, b = chains[:k], chains[k:]
            terms = _jacobi_terms(data, a, b)
            if l:
                terms.append((data.bracket(data.bracket(*a), *b), -1))
            yield refs, data.zero(_combine(terms), _output_degree(data, chains, nested=1))

    def part_two():
        for refs, (x1, x2) in _tuples(classes, 2, rng, samples):
            lhs = data.alpha(data.bracket(x1, x2))
            rhs = algebra.delta_bracket(data.alpha(x1), data.alpha(x2))
            if lhs is None or rhs is None:
                yield refs, None
                continue
            yield refs, algebra.zero(_combine([(lhs, 1), (rhs, -_sign(deg(x1)))]), lhs[1])

    def shifted(x: Optional[Chain], y: Optional[Chain]) -> Optional[Chain]:
        """[x, y] = (-1)^|x| {x, y}"""
        if x is None or y is None:
            return None
        result = data.bracket(x, y)
        if result is None:
            return None
        return {label: _sign(deg(x)) * v for label, v in result[0].items()}, result[1]

    def shifted_skew():
        for refs, (a, b) in _tuples(classes, 2, rng, samples):
            diff = _combine([(shifted(a, b), 1), (shifted(b, a), _sign((deg(a) - 1) * (deg(b) - 1)))])
            yield refs, data.zero(diff, _output_degree(data, [a, b]))

    def shifted_jacobi(tuples=None):
        for refs, (a, b, c) in tuples or _tuples(classes, 3, rng, samples):
            diff = _combine(
                [
                    (shifted(a, shifted(b, c)), 1),
                    (shifted(shifted(a, b), c), -1),
                    (shifted(b, shifted(a, c)), -_sign((deg(a) - 1) * (deg(b) - 1))),
                ]
            )
            yield refs, data.zero(diff, _output_degree(data, [a, b, c], nested=1))

    def agreement():
        triples = list(_tuples(classes, 3, rng, samples))
        for (refs, jacobi), (_, three) in zip(shifted_jacobi(triples), relation(3, 0, triples)):
            yield refs, None if jacobi is None or three is None else jacobi == three

    _identity(report, "2-bracket is graded symmetric", symmetric(2))
    if data.kmax >= 3:
        _identity(report, "3-bracket is graded symmetric", symmetric(3))
    for k, l in ((3, 0), (4, 0), (3, 1)):
        _identity(report, f"generalized Jacobi relation ({k},{l})", relation(k, l))
    _identity(report, "alpha of the 2-bracket is the signed Delta bracket", part_two())
    _identity(report, "shifted 2-bracket is skew-symmetric", shifted_skew())
    _identity(report, "shifted 2-bracket satisfies the Jacobi identity", shifted_jacobi())
    _identity(report, "(3,0) relation agrees with the shifted Jacobi identity", agreement())
    return report


MODELS = ("lambda", "negative", "positive")


def gravity_model(H: HochschildComplex, which: str, cutoff: int = 1) -> GravityModel:
    if which == "lambda":
        return lambda_model(H)
    if which == "negative":
        return negative_model(H)
    if which == "positive":
        return positive_model(H, cutoff)
    raise UnknownName(f"unknown gravity model {which!r}, expected one of {', '.join(MODELS)}")


# morphisms --------------------------------------------------------------------


@dataclass
class GravityMorphism:
    """f: W -> W' sending theory degree n to n + shift, over g = id on HH"""

    name: str
    source: GravityData
    target: GravityData
    apply: Callable[[Dict, int], Dict]
    shift: int = 0

    def __call__(self, chain: Optional[Chain]) -> Optional[Chain]:
        if chain is None:
            return None
        return self.apply(*chain), chain[1] + self.shift


def i_lambda(source: GravityData, target: GravityData) -> GravityMorphism:
    """HC_lambda -> NEG, x -> x u^0"""
    return GravityMorphism("I_lambda", source, target, lambda y, n: _include_at_zero(y))


def b_zero(source: GravityData, target: GravityData) -> GravityMorphism:
    """POS[-1] -> NEG, y -> B(y_0) u^0"""
    T = source.algebra.model.T
    return GravityMorphism("B_0", source, target, lambda y, n: _include_at_zero(T.B(_component_zero(y), n)), -1)


def morphism_report(f: GravityMorphism, rng: random.Random, samples: int = 20) -> Report:
    """f is a morphism of gravity algebras, and the pair (id, f) makes the
    alpha and beta squares commute on classes"""
    source, target = f.source, f.target
    report = Report(f"{f.name}: {source.name} -> {target.name}")
    classes = source.classes()
    if source.model.shift != f.shift + target.model.shift:
        raise ShapeMismatch(f"{f.name} does not preserve the degrees seen by alpha")

    def brackets(k: int):
        for refs, chains in _tuples(classes, k, rng, samples):
            diff = _combine([(f(source.bracket(*chains)), 1), (target.bracket(*[f(c) for c in chains]), -1)])
            yield refs, target.zero(diff, _output_degree(source, chains) + f.shift)

    def alpha_square():
        for ref, y in classes:
            image = source.alpha(y)
            yield ref, source.algebra.zero(_combine([(target.alpha(f(y)), 1), (image, -1)]), image[1])

    def beta_square():
        for ref, x in source.algebra.classes():
            image = target.beta(x)
            yield ref, target.zero(_combine([(f(source.beta(x)), 1), (image, -1)]), image[1])

    for k in range(2, min(source.kmax, 3) + 1):
        _identity(report, f"{f.name} preserves the {k}-bracket", brackets(k))
    report.add("g = id is a morphism of BV algebras", True, "identity of HH")
    _identity(report, "alpha square commutes", alpha_square())
    _identity(report, "beta square commutes", beta_square())
    return report


def isomorphism_report(f: GravityMorphism) -> Report:
    """rank of f on classes equals the dimension of both sides in every degree"""
    report = Report(f"{f.name} on classes")
    W, target = f.source.model.W, f.target.model.W
    for n in f.source.algebra.degrees:
        images = [target.classify(*f((r, n))) for r in W.representatives(n)]
        if any(image is None for image in images) or not (W.pieces(n) and target.pieces(n + f.shift)):
            report.skip(f"degree {n}", "uncertified")
            continue
        rows = target.dim(n + f.shift)
        matrix = SparseMatrix.from_columns(rows, [_positions(image) for image in images])
        r = rank(matrix)
        report.add(f"degree {n}", r == W.dim(n) == rows, f"rank {r}, dimensions {W.dim(n)} and {rows}", witness=n)
    return report


def gravity_morphism_checks(
    algebra: HomologyAlgebra, cutoff: int = 1, kmax: int = 3, rng: Optional[random.Random] = None, samples: int = 20
) -> Report:
    """The three gravity structures and the morphisms I_lambda and B_0 between them"""
    rng = rng or random.Random(0)
    H = algebra.model.H
    report = Report(f"gravity morphisms for {algebra.name}")
    data: Dict[str, GravityData] = {}
    for which in MODELS:
        model = gravity_model(H, which, cutoff)
        try:
            data[which] = gravity_from_bv(algebra, model, kmax)
        except HypothesisFailed as error:
            report.add(f"{model.name} hypotheses", False, str(error), error.witness)
            continue
        report.add(f"{model.name} hypotheses", True)
    if "lambda" in data and "negative" in data:
        f = i_lambda(data["lambda"], data["negative"])
        report.merge(morphism_report(f, rng, samples))
        report.merge(isomorphism_report(f))
    if "positive" in data and "negative" in data:
        report.merge(morphism_report(b_zero(data["positive"], data["negative"]), rng, samples))
    return report


# chain level comparisons ------------------------------------------------------


def _brace_context(data: GravityData) -> BraceContext:
    model = data.algebra.model
    return BraceContext(model.total, model.pairing)


def one_edge_tree() -> PlanarTree:
    return canonical([(2,), (1,)], [(1, 2)])[1]


def second_bracket_consistency(data: GravityData, rng: Optional[random.Random] = None, samples: int = 20) -> Report:
    """The cyclic brace on the one-edge tree induces the 2-bracket of HC_lambda,
    up to one global sign"""
    rng = rng or random.Random(0)
    report = Report(f"cyclic brace and the 2-bracket on {data.name}")
    model, W = data.algebra.model, data.model.W
    context = _brace_context(data)
    tree = one_edge_tree()
    found: Dict[str, Optional[int]] = {"sign": None}

    def cases():
        for refs, (x1, x2) in _tuples(data.classes(), 2, rng, samples):
            image = model.to_dual(context.cyclic_brace(tree, [model.to_self(x1[0]), model.to_self(x2[0])]))
            bracket = data.bracket(x1, x2)
            if image is None or bracket is None:
                yield refs, None
                continue
            try:
                lhs = W.classify(image, bracket[1])
            except ShapeMismatch:
                yield refs, False
                continue
            rhs = W.classify(*bracket)
            if lhs is None or rhs is None:
                yield refs, None
                continue
            rhs = [_sign(data.degree(x1)) * v for v in rhs]
            if found["sign"] is None and any(rhs):
                index = next(i for i, v in enumerate(rhs) if v)
                found["sign"] = 1 if lhs[index] == rhs[index] else -1
            yield refs, lhs == [(found["sign"] or 1) * v for v in rhs]

    _identity(report, "cyclic brace on one edge is the signed 2-bracket", cases())
    report.meta["global_sign"] = found["sign"] if found["sign"] is not None else "undetermined"
    return report


def chain_vs_homology_gravity(data: GravityData, rng: Optional[random.Random] = None, samples: int = 20) -> Report:
    """B_lambda of the chain operations mu{f_1, mu{f_2, ...}} induces the k-brackets"""
    rng = rng or random.Random(0)
    report = Report(f"chain level gravity operations on {data.name}")
    model, W = data.algebra.model, data.model.W
    context = _brace_context(data)

    def cases(k: int):
        for refs, chains in _tuples(data.classes(), k, rng, samples):
            n = sum(c[1] for c in chains)
            image = model.to_dual(context.gravity_chain_ops([model.to_self(c[0]) for c in chains]))
            bracket = data.bracket(*chains)
            if image is None or bracket is None:
                yield refs, None
                continue
            try:
                lhs = W.classify(B_lambda(model.T, image, n), n - 1)
            except HypothesisFailed as error:
                logger.warning(f"connecting map undecided on {refs}: {error}")
                yield refs, None
                continue
            rhs = W.classify(*bracket)
            if lhs is None or rhs is None:
                yield refs, None
                continue
            sign = _sign(sum(c[1] for c in chains[:-1]))
            yield refs, lhs == [sign * v for v in rhs]

    for k in range(2, data.kmax + 1):
        _identity(report, f"chain operations induce the {k}-bracket", cases(k))
    return report
