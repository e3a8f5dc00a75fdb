"""Finite-dimensional dg algebras with degree-m symmetric pairings.

Basis elements are addressed by their index in `DgAlgebra.labels`; vectors
are dictionaries index -> Fraction, as everywhere in `pycyclic.linalg`.
"""

import json
import re
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from pycyclic.errors import ParseError, UnknownName, ValidationFailed
from pycyclic.linalg import (
    GradedMap,
    GradedSpace,
    SparseMatrix,
    add_to,
    as_rational,
    format_rational,
    homology,
    inverse,
    rank,
)
from pycyclic.report import Report

Vector = Dict[int, Fraction]


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def _clean(vector: Dict) -> Dict[int, Fraction]:
    return {int(k): as_rational(v) for k, v in vector.items() if as_rational(v)}


class DgAlgebra:
    """A unital dg algebra given by structure constants.

    `mult[(i, j)]` is the vector e_i * e_j and `d[i]` the vector d(e_i);
    missing keys mean zero.
    """

    def __init__(
        self,
        labels: Sequence[str],
        degrees: Sequence[int],
        unit: int,
        mult: Dict[Tuple[int, int], Dict],
        d: Optional[Dict[int, Dict]] = None,
        name: str = "A",
    ):
        if len(labels) != len(degrees):
            raise ValueError("every basis label needs a degree")
        self.labels = [str(label) for label in labels]
        self.degrees = [int(n) for n in degrees]
        self.unit = int(unit)
        self.name = name
        self.mult: Dict[Tuple[int, int], Vector] = {}
        for key, vector in mult.items():
            clean = _clean(vector)
            if clean:
                self.mult[(int(key[0]), int(key[1]))] = clean
        self.d: Dict[int, Vector] = {}
        for key, vector in (d or {}).items():
            clean = _clean(vector)
            if clean:
                self.d[int(key)] = clean
        self._index = {label: i for i, label in enumerate(self.labels)}
        self._space = None
        self._factors = None
        self._d_sources = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownName(f"{label!r} is not a basis label of {self.name}")

    def is_zero_differential(self) -> bool:
        return not self.d

    def reduced(self) -> List[int]:
        """Basis indices spanning the augmentation complement of the unit"""
        return [i for i in range(self.dim) if i != self.unit]

    @property
    def space(self) -> GradedSpace:
        if self._space is None:
            window = (min(self.degrees, default=0), max(self.degrees, default=0))
            labels: Dict[int, List[int]] = {}
            for i, n in enumerate(self.degrees):
                labels.setdefault(n, []).append(i)
            self._space = GradedSpace(window, labels)
        return self._space

    def times(self, i: int, j: int) -> Vector:
        return self.mult.get((i, j), {})

    def product(self, x: Dict, y: Dict) -> Vector:
        result: Vector = {}
        for i, a in x.items():
            for j, b in y.items():
                add_to(result, self.times(i, j), a * b)
        return result

    def differential(self, x: Dict) -> Vector:
        result: Vector = {}
        for i, a in x.items():
            add_to(result, self.d.get(i, {}), a)
        return result

    def differential_map(self) -> GradedMap:
        return GradedMap(self.space, self.space, 1, rule=lambda n, i: self.d.get(i, {}))

    def factorizations(self, k: int) -> List[Tuple[int, int, Fraction]]:
        """All (i, j, c) with c the coefficient of e_k in e_i * e_j"""
        if self._factors is None:
            self._factors = {}
            for (i, j), vector in sorted(self.mult.items()):
                for target, c in vector.items():
                    self._factors.setdefault(target, []).append((i, j, c))
        return self._factors.get(k, [])

    def d_sources(self, k: int) -> List[Tuple[int, Fraction]]:
        """All (i, c) with c the coefficient of e_k in d(e_i)"""
        if self._d_sources is None:
            self._d_sources = {}
            for i, vector in sorted(self.d.items()):
                for target, c in vector.items():
                    self._d_sources.setdefault(target, []).append((i, c))
        return self._d_sources.get(k, [])

    def word_degree(self, word: Iterable[int]) -> int:
        return sum(self.degrees[i] for i in word)

    def __repr__(self):
        return f"DgAlgebra({self.name}, dim={self.dim})"


class Pairing:
    """A bilinear form of degree m, stored as its Gram matrix"""

    def __init__(self, algebra: DgAlgebra, m: int, gram: Dict[Tuple[int, int], object]):
        self.algebra = algebra
        self.m = int(m)
        self.gram: Dict[Tuple[int, int], Fraction] = {}
        for (i, j), value in gram.items():
            value = as_rational(value)
            if value:
                self.gram[(int(i), int(j))] = value
        self._inverse = None
        self._inverted = False

    def value(self, x: Dict, y: Dict) -> Fraction:
        total = Fraction(0)
        for i, a in x.items():
            for j, b in y.items():
                g = self.gram.get((i, j))
                if g:
                    total += a * b * g
        return total

    def entry(self, i: int, j: int) -> Fraction:
        return self.gram.get((i, j), Fraction(0))

    def row(self, i: int) -> Vector:
        return {j: g for (a, j), g in self.gram.items() if a == i}

    def matrix(self) -> SparseMatrix:
        # rows are functionals, columns are basis elements: column a is theta(e_a)
        n = self.algebra.dim
        return SparseMatrix(n, n, {(j, i): g for (i, j), g in self.gram.items()})

    def inverse_matrix(self) -> Optional[SparseMatrix]:
        if not self._inverted:
            self._inverse = inverse(self.matrix())
            self._inverted = True
        return self._inverse

    def is_nondegenerate(self) -> bool:
        return self.inverse_matrix() is not None

    def __repr__(self):
        return f"Pairing({self.algebra.name}, m={self.m})"


class DualBimodule:
    """The bimodule A∨[m] on the basis of coordinate functionals.

    The functional with index x sends e_y to 1 when y == x and to 0 otherwise;
    it sits in degree -|x| - m.
    """

    def __init__(self, algebra: DgAlgebra, m: int):
        self.algebra = algebra
        self.m = m
        labels: Dict[int, List[int]] = {}
        for x in range(algebra.dim):
            labels.setdefault(self.degree(x), []).append(x)
        degrees = list(labels) or [0]
        self.space = GradedSpace((min(degrees), max(degrees)), labels)

    def degree(self, x: int) -> int:
        return -self.algebra.degree(x) - self.m

    @staticmethod
    def evaluate(phi: Dict, a: Dict) -> Fraction:
        return sum((phi.get(i, 0) * v for i, v in a.items()), Fraction(0))

    def right(self, phi: Dict, a: Dict) -> Vector:
        """(phi . a)(b) = phi(a b)"""
        A = self.algebra
        result: Vector = {}
        for x, c in phi.items():
            for i, ai in a.items():
                for y in range(A.dim):
                    coef = A.times(i, y).get(x)
                    if coef:
                        add_to(result, {y: coef}, c * ai)
        return result

    def left(self, a: Dict, phi: Dict) -> Vector:
        """(b . phi)(y) = (-1)^((|y| + |phi|)|b|) phi(y b)"""
        A = self.algebra
        result: Vector = {}
        for i, ai in a.items():
            for x, c in phi.items():
                for y in range(A.dim):
                    coef = A.times(y, i).get(x)
                    if coef:
                        sign = _sign((A.degree(y) + self.degree(x)) * A.degree(i))
                        add_to(result, {y: coef}, sign * c * ai)
        return result

    def differential(self, phi: Dict) -> Vector:
        """(d phi)(a) = -(-1)^|phi| phi(d a)"""
        A = self.algebra
        result: Vector = {}
        for x, c in phi.items():
            for y, coef in A.d_sources(x):
                add_to(result, {y: coef}, -_sign(self.degree(x)) * c)
        return result

    def differential_map(self) -> GradedMap:
        return GradedMap(self.space, self.space, 1, rule=lambda n, x: self.differential({x: Fraction(1)}))


def dual_of(pairing: Pairing) -> DualBimodule:
    return DualBimodule(pairing.algebra, pairing.m)


def theta(pairing: Pairing) -> GradedMap:
    """theta(a)(b) = <a, b> as a degree-0 map A -> A∨[m]"""
    dual = dual_of(pairing)
    return GradedMap(pairing.algebra.space, dual.space, 0, rule=lambda n, a: pairing.row(a))


def _unit(i: int) -> Vector:
    return {i: Fraction(1)}


def _check_all(report: Report, name: str, cases: Iterable[Tuple[object, bool]]) -> bool:
    """Records one check for an axiom, naming the first failing case as witness"""
    count = 0
    for witness, ok in cases:
        count += 1
        if not ok:
            return report.add(name, False, "", witness)
    return report.add(name, True, f"{count} cases")


def validate_algebra(A: DgAlgebra) -> Report:
    report = Report(f"dg algebra {A.name}")
    logger.info(f"validating dg algebra {A.name} of dimension {A.dim}")
    basis = range(A.dim)
    L = A.labels

    def differential_degrees():
        for i in basis:
            for k in A.d.get(i, {}):
                yield (L[i], L[k]), A.degree(k) == A.degree(i) + 1

    def product_degrees():
        for (i, j), vector in A.mult.items():
            for k in vector:
                yield (L[i], L[j], L[k]), A.degree(k) == A.degree(i) + A.degree(j)

    def square_zero():
        for i in basis:
            yield L[i], not A.differential(A.differential(_unit(i)))

    def leibniz():
        for i, j in product(basis, basis):
            lhs = A.differential(A.times(i, j))
            rhs = A.product(A.differential(_unit(i)), _unit(j))
            add_to(rhs, A.product(_unit(i), A.differential(_unit(j))), _sign(A.degree(i)))
            yield (L[i], L[j]), lhs == rhs

    def associativity():
        for i, j, k in product(basis, basis, basis):
            lhs = A.product(A.times(i, j), _unit(k))
            rhs = A.product(_unit(i), A.times(j, k))
            yield (L[i], L[j], L[k]), lhs == rhs

    def unit_laws():
        if not 0 <= A.unit < A.dim:
            yield "unit index", False
            return
        yield L[A.unit], A.degree(A.unit) == 0
        for i in basis:
            yield L[i], A.times(A.unit, i) == _unit(i) and A.times(i, A.unit) == _unit(i)

    _check_all(report, "d raises degree by one", differential_degrees())
    _check_all(report, "product is degree-additive", product_degrees())
    _check_all(report, "d squared is zero", square_zero())
    _check_all(report, "Leibniz rule", leibniz())
    _check_all(report, "associativity", associativity())
    _check_all(report, "unit laws", unit_laws())
    return report


def validate_dual_bimodule(pairing: Pairing, report: Optional[Report] = None) -> Report:
    A = pairing.algebra
    dual = dual_of(pairing)
    report = report if report is not None else Report(f"dual bimodule of {A.name}")
    basis = range(A.dim)
    L = A.labels

    def action_relations():
        for x, i, j in product(basis, basis, basis):
            phi, a, b = _unit(x), _unit(i), _unit(j)
            value = dual.evaluate(phi, A.times(i, j))
            left = _sign((A.degree(i) + dual.degree(x)) * A.degree(j)) * dual.evaluate(dual.left(b, phi), a)
            right = dual.evaluate(dual.right(phi, a), b)
            yield (L[x], L[i], L[j]), value == left == right

    def associative_actions():
        for x, i, j in product(basis, basis, basis):
            phi, a, b = _unit(x), _unit(i), _unit(j)
            ok = (
                dual.left(A.times(i, j), phi) == dual.left(a, dual.left(b, phi))
                and dual.right(phi, A.times(i, j)) == dual.right(dual.right(phi, a), b)
                and dual.right(dual.left(a, phi), b) == dual.left(a, dual.right(phi, b))
            )
            yield (L[x], L[i], L[j]), ok

    def compatible_differential():
        for x, i in product(basis, basis):
            phi, a = _unit(x), _unit(i)
            lhs = dual.differential(dual.left(a, phi))
            rhs = dual.left(A.differential(a), phi)
            add_to(rhs, dual.left(a, dual.differential(phi)), _sign(A.degree(i)))
            lhs_r = dual.differential(dual.right(phi, a))
            rhs_r = dual.right(dual.differential(phi), a)
            add_to(rhs_r, dual.right(phi, A.differential(a)), _sign(dual.degree(x)))
            yield (L[x], L[i]), lhs == rhs and lhs_r == rhs_r

    _check_all(report, "dual action relations", action_relations())
    _check_all(report, "dual actions are associative", associative_actions())
    _check_all(report, "dual differential is a derivation", compatible_differential())
    return report


def validate_theta(pairing: Pairing, report: Optional[Report] = None) -> Report:
    A = pairing.algebra
    dual = dual_of(pairing)
    report = report if report is not None else Report(f"theta of {A.name}")
    basis = range(A.dim)
    L = A.labels

    def bimodule_map():
        for i, j in product(basis, basis):
            image = _theta_vector(pairing, A.times(i, j))
            left = dual.left(_unit(i), pairing.row(j))
            right = dual.right(pairing.row(i), _unit(j))
            yield (L[i], L[j]), image == left == right

    def chain_map():
        for i in basis:
            yield L[i], _theta_vector(pairing, A.differential(_unit(i))) == dual.differential(pairing.row(i))

    _check_all(report, "theta is a bimodule map", bimodule_map())
    _check_all(report, "theta commutes with d", chain_map())
    return report


def _theta_vector(pairing: Pairing, a: Dict) -> Vector:
    result: Vector = {}
    for i, c in a.items():
        add_to(result, pairing.row(i), c)
    return result


def validate_pairing(pairing: Pairing) -> Report:
    A = pairing.algebra
    report = Report(f"pairing on {A.name}")
    logger.info(f"validating degree {pairing.m} pairing on {A.name}")
    basis = range(A.dim)
    L = A.labels
    g = pairing.entry

    def homogeneity():
        for (i, j) in pairing.gram:
            yield (L[i], L[j]), A.degree(i) + A.degree(j) + pairing.m == 0

    def symmetry():
        for i, j in product(basis, basis):
            yield (L[i], L[j]), g(i, j) == _sign(A.degree(i) * A.degree(j)) * g(j, i)

    def leibniz():
        for i, j in product(basis, basis):
            value = pairing.value(A.differential(_unit(i)), _unit(j))
            value += _sign(A.degree(i)) * pairing.value(_unit(i), A.differential(_unit(j)))
            yield (L[i], L[j]), value == 0

    def invariance():
        for i, j, k in product(basis, basis, basis):
            yield (L[i], L[j], L[k]), pairing.value(A.times(i, j), _unit(k)) == pairing.value(_unit(i), A.times(j, k))

    def cyclicity():
        for i, j, k in product(basis, basis, basis):
            sign = _sign(A.degree(i) * (A.degree(j) + A.degree(k)))
            lhs = pairing.value(A.times(i, j), _unit(k))
            yield (L[i], L[j], L[k]), lhs == sign * pairing.value(A.times(j, k), _unit(i))

    _check_all(report, "degree-m homogeneity", homogeneity())
    _check_all(report, "graded symmetry", symmetry())
    _check_all(report, "Leibniz rule", leibniz())
    _check_all(report, "invariance", invariance())
    _check_all(report, "cyclicity", cyclicity())
    validate_dual_bimodule(pairing, report)
    validate_theta(pairing, report)
    return report


def theta_quasi_iso_report(pairing: Pairing, window: Optional[Tuple[int, int]] = None) -> Report:
    """Compares H(A, d) with H(A∨[m], d) through the map induced by theta"""
    A = pairing.algebra
    dual = dual_of(pairing)
    report = Report(f"theta quasi-isomorphism on {A.name}")
    validate_theta(pairing, report)
    f = theta(pairing)
    dA, dD = A.differential_map(), dual.differential_map()
    if window is None:
        lo = min(A.space.window[0], dual.space.window[0])
        hi = max(A.space.window[1], dual.space.window[1])
    else:
        lo, hi = window
    table = {}
    for n in range(lo, hi + 1):
        source = homology(dA, dA, n)
        target = homology(dD, dD, n)
        columns = []
        for z in source.representatives:
            image = f.block(n).apply(z)
            columns.append({i: c for i, c in enumerate(target.classify(image)) if c})
        induced = SparseMatrix.from_columns(target.dimension, columns)
        r = rank(induced)
        table[n] = (source.dimension, target.dimension, r)
        logger.debug(f"theta at degree {n}: H(A)={source.dimension} H(dual)={target.dimension} rank={r}")
        ok = source.dimension == target.dimension == r
        report.add(f"theta induces an isomorphism at degree {n}", ok, f"ranks {table[n]}", n)
    report.meta["ranks"] = {n: list(v) for n, v in table.items()}
    return report


# builtin algebras -----------------------------------------------------------


def ground() -> Tuple[DgAlgebra, Pairing]:
    A = DgAlgebra(["1"], [0], 0, {(0, 0): {0: 1}}, name="ground")
    return A, Pairing(A, 0, {(0, 0): 1})


def truncpoly(n: int, deg: int, name: Optional[str] = None) -> Tuple[DgAlgebra, Pairing]:
    """Q[x]/(x^(n+1)) with |x| = deg and the top-coefficient pairing"""
    if n < 1:
        raise UnknownName(f"truncpoly needs n >= 1, got {n}")
    if deg % 2 and n > 1:
        raise UnknownName("an odd generator squares to zero; use n = 1")
    labels = ["1", "x"] + [f"x^{i}" for i in range(2, n + 1)]
    mult = {(i, j): {i + j: 1} for i in range(n + 1) for j in range(n + 1) if i + j <= n}
    A = DgAlgebra(labels, [i * deg for i in range(n + 1)], 0, mult, name=name or f"truncpoly({n},{deg})")
    return A, Pairing(A, -n * deg, {(i, n - i): 1 for i in range(n + 1)})


def sphere(n: int) -> Tuple[DgAlgebra, Pairing]:
    if n < 1:
        raise UnknownName(f"sphere needs dimension >= 1, got {n}")
    return truncpoly(1, n, name=f"sphere({n})")


def cp2() -> Tuple[DgAlgebra, Pairing]:
    return truncpoly(2, 2, name="cp2")


def _merge_sign(left: Tuple[int, ...], right: Tuple[int, ...]) -> int:
    inversions = sum(1 for s in left for t in right if s > t)
    return _sign(inversions)


def exterior(g: int) -> Tuple[DgAlgebra, Pairing]:
    """The exterior algebra on g generators of degree 1 (cohomology of a g-torus)"""
    if g < 1:
        raise UnknownName(f"exterior needs g >= 1, got {g}")
    subsets = [s for k in range(g + 1) for s in combinations(range(1, g + 1), k)]
    index = {s: i for i, s in enumerate(subsets)}
    labels = ["1" if not s else "".join(f"x{v}" for v in s) for s in subsets]
    mult = {}
    for s, t in product(subsets, subsets):
        if set(s) & set(t):
            continue
        mult[(index[s], index[t])] = {index[tuple(sorted(s + t))]: _merge_sign(s, t)}
    A = DgAlgebra(labels, [len(s) for s in subsets], 0, mult, name=f"exterior({g})")
    top = index[tuple(range(1, g + 1))]
    gram = {}
    for (i, j), vector in mult.items():
        if top in vector:
            gram[(i, j)] = vector[top]
    return A, Pairing(A, -g, gram)


_BUILTIN = re.compile(r"^(?P<kind>sphere|exterior|truncpoly)\(?(?P<args>[0-9, ]*)\)?$")


def builtin(name: str) -> Tuple[DgAlgebra, Pairing]:
    """Looks up ground, cp2, sphere(n), exterior(g) or truncpoly(n,deg).

    The parentheses may be dropped for one-argument names, as in `sphere2`.
    """
    key = name.strip()
    if key == "ground":
        return ground()
    if key == "cp2":
        return cp2()
    match = _BUILTIN.match(key)
    if match is None or not match.group("args").strip():
        raise UnknownName(f"unknown builtin algebra {name!r}")
    try:
        args = [int(a) for a in match.group("args").split(",")]
    except ValueError:
        raise UnknownName(f"unknown builtin algebra {name!r}")
    kind = match.group("kind")
    if kind == "truncpoly" and len(args) == 2:
        return truncpoly(*args)
    if kind in ("sphere", "exterior") and len(args) == 1:
        return sphere(args[0]) if kind == "sphere" else exterior(args[0])
    raise UnknownName(f"unknown builtin algebra {name!r}")


BUILTINS = ("ground", "sphere(2)", "sphere(3)", "exterior(2)", "truncpoly(2,2)", "cp2")


# algebra spec documents -----------------------------------------------------


def serialize(A: DgAlgebra, pairing: Optional[Pairing] = None) -> str:
    document = {
        "name": A.name,
        "basis": [[label, n] for label, n in zip(A.labels, A.degrees)],
        "unit": A.unit,
        "d": [[i, j, format_rational(c)] for i in sorted(A.d) for j, c in sorted(A.d[i].items())],
        "mult": [
            [i, j, k, format_rational(c)] for (i, j) in sorted(A.mult) for k, c in sorted(A.mult[(i, j)].items())
        ],
    }
    if pairing is not None:
        document["pairing"] = {
            "m": pairing.m,
            "entries": [[i, j, format_rational(c)] for (i, j), c in sorted(pairing.gram.items())],
        }
    return json.dumps(document, indent=2) + "\n"


def _position(text: str, key: str) -> Tuple[int, int]:
    offset = text.find(f'"{key}"')
    if offset < 0:
        return 1, 1
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


def _rational(text: str, key: str, value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError(f"{key}: {value!r} is not a rational", *_position(text, key))
    try:
        return as_rational(value)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{key}: {value!r} is not a rational", *_position(text, key))


def _rows(text: str, document: Dict, key: str, width: int, dim: int) -> List[List]:
    rows = document.get(key, [])
    if not isinstance(rows, list):
        raise ParseError(f"{key} must be a list", *_position(text, key))
    for row in rows:
        if not isinstance(row, list) or len(row) != width:
            raise ParseError(f"{key} entries must have {width} fields", *_position(text, key))
        for i in row[:-1]:
            if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < dim:
                raise ParseError(f"{key}: basis index {i!r} out of range", *_position(text, key))
    return rows


def parse_spec(text: str, validate: bool = True) -> Tuple[DgAlgebra, Optional[Pairing]]:
    """Reads an algebra document; raises ParseError or ValidationFailed"""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        logger.error(f"cannot parse algebra document: {e.msg}")
        raise ParseError(e.msg, e.lineno, e.colno)
    if not isinstance(document, dict):
        raise ParseError("an algebra document is a JSON object", 1, 1)
    basis = document.get("basis")
    if not isinstance(basis, list) or not basis:
        raise ParseError("basis must be a nonempty list of [label, degree]", *_position(text, "basis"))
    for entry in basis:
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not isinstance(entry[0], str)
            or isinstance(entry[1], bool)
            or not isinstance(entry[1], int)
        ):
            raise ParseError(f"bad basis entry {entry!r}", *_position(text, "basis"))
    dim = len(basis)
    unit = document.get("unit")
    if isinstance(unit, bool) or not isinstance(unit, int) or not 0 <= unit < dim:
        raise ParseError(f"unit {unit!r} is not a basis index", *_position(text, "unit"))
    d: Dict[int, Dict[int, Fraction]] = {}
    for i, j, c in _rows(text, document, "d", 3, dim):
        add_to(d.setdefault(i, {}), {j: _rational(text, "d", c)})
    mult: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for i, j, k, c in _rows(text, document, "mult", 4, dim):
        add_to(mult.setdefault((i, j), {}), {k: _rational(text, "mult", c)})
    A = DgAlgebra(
        [label for label, _ in basis], [n for _, n in basis], unit, mult, d, name=str(document.get("name", "A"))
    )
    pairing = None
    if "pairing" in document:
        spec = document["pairing"]
        if not isinstance(spec, dict) or isinstance(spec.get("m"), bool) or not isinstance(spec.get("m"), int):
            raise ParseError("pairing needs an integer m and entries", *_position(text, "pairing"))
        gram: Dict[Tuple[int, int], Fraction] = {}
        for i, j, c in _rows(text, spec, "entries", 3, dim):
            gram[(i, j)] = gram.get((i, j), 0) + _rational(text, "entries", c)
        pairing = Pairing(A, spec["m"], gram)
    if validate:
        report = validate_algebra(A)
        if pairing is not None:
            report.merge(validate_pairing(pairing), "pairing")
        if not report.passed:
            failure = report.failures[0]
            raise ValidationFailed(f"{A.name}: {failure.name} fails at {failure.witness}", report)
    return A, pairing


def load_algebra(name: Optional[str] = None, file: Optional[str] = None) -> Tuple[DgAlgebra, Optional[Pairing]]:
    """A builtin by name or a spec document from a file"""
    if file is not None:
        with open(file, "r", encoding="utf-8") as stream:
            text = stream.read()
        logger.info(f"reading algebra document {file}")
        return parse_spec(text)
    if name is None:
        raise UnknownName("neither a builtin name nor a file was given")
    return builtin(name)
