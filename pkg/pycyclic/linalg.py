"""Exact linear algebra over the rationals.

Vectors are sparse dictionaries from keys (column positions or basis labels)
to `Fraction` values with no stored zeros. Matrices are stored by columns.
Elimination is fraction-free: every row kept in an `EchelonBasis` is a
primitive integer vector, and rational bookkeeping is confined to the
combination coefficients.
"""

from bisect import insort
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from pycyclic.errors import CompositionNotZero, ParseError, ShapeMismatch

Vector = Dict[Hashable, Fraction]


def as_rational(value) -> Fraction:
    """Reads an int, a Fraction or a "p/q" string as a normalized Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def add_to(target: Dict, source: Dict, coef=1) -> Dict:
    """target += coef * source, in place, dropping zeros"""
    if not coef:
        return target
    for key, value in source.items():
        new = target.get(key, 0) + coef * value
        if new:
            target[key] = new
        else:
            target.pop(key, None)
    return target


def scaled(vector: Dict, coef) -> Dict:
    if not coef:
        return {}
    return {k: coef * v for k, v in vector.items()}


def combine(terms: Iterable[Tuple[Dict, object]]) -> Dict:
    result: Dict = {}
    for vector, coef in terms:
        add_to(result, vector, coef)
    return result


def _primitive(vector: Dict[int, Fraction]) -> Tuple[Fraction, Dict[int, int]]:
    """Splits a nonzero vector as scale * ints with ints primitive and
    its smallest-key entry positive."""
    den = 1
    for value in vector.values():
        den = den * value.denominator // gcd(den, value.denominator)
    ints = {k: int(v * den) for k, v in vector.items()}
    g = 0
    for x in ints.values():
        g = gcd(g, x)
    if ints[min(ints)] < 0:
        g = -g
    return Fraction(g, den), {k: x // g for k, x in ints.items()}


class EchelonBasis:
    """Incrementally built echelon form with generator bookkeeping.

    Each stored row is a primitive integer vector whose pivot is its smallest
    key, together with a combination of the generators that produced it.
    """

    def __init__(self):
        self._rows: Dict[int, Tuple[Dict[int, int], Dict[Hashable, Fraction]]] = {}
        self._pivots: List[int] = []

    def __len__(self):
        return len(self._pivots)

    def copy(self) -> "EchelonBasis":
        other = EchelonBasis()
        other._rows = dict(self._rows)
        other._pivots = list(self._pivots)
        return other

    def _reduce(self, vector):
        # invariant: vector == factor * residual + sum(coefs[p] * row[p])
        coefs: Dict[int, Fraction] = {}
        if not vector:
            return Fraction(0), {}, coefs
        factor, residual = _primitive(vector)
        for pivot in self._pivots:
            r = residual.get(pivot)
            if not r:
                continue
            row = self._rows[pivot][0]
            w = row[pivot]
            new = {k: w * x for k, x in residual.items()}
            for k, x in row.items():
                value = new.get(k, 0) - r * x
                if value:
                    new[k] = value
                else:
                    new.pop(k, None)
            coefs[pivot] = coefs.get(pivot, 0) + factor * Fraction(r, w)
            factor = factor / w
            if not new:
                return factor, {}, coefs
            g = 0
            for x in new.values():
                g = gcd(g, x)
            residual = {k: x // g for k, x in new.items()}
            factor = factor * g
        return factor, residual, coefs

    def _combination(self, coefs: Dict[int, Fraction]) -> Dict[Hashable, Fraction]:
        result: Dict[Hashable, Fraction] = {}
        for pivot, c in coefs.items():
            add_to(result, self._rows[pivot][1], c)
        return result

    def insert(self, vector, generator: Hashable = None) -> Optional[Dict]:
        """Adds vector if independent and returns None; otherwise returns its
        expression in the generators added so far."""
        factor, residual, coefs = self._reduce(vector)
        if not residual:
            return self._combination(coefs)
        pivot = min(residual)
        if residual[pivot] < 0:
            residual = {k: -x for k, x in residual.items()}
            factor = -factor
        combo: Dict[Hashable, Fraction] = {}
        if generator is not None:
            combo[generator] = 1 / factor
        for p, c in coefs.items():
            add_to(combo, self._rows[p][1], -c / factor)
        self._rows[pivot] = (residual, combo)
        insort(self._pivots, pivot)
        return None

    def add(self, vector, generator: Hashable = None) -> bool:
        return self.insert(vector, generator) is None

    def contains(self, vector) -> bool:
        return not self._reduce(vector)[1]

    def solve(self, vector) -> Optional[Dict[Hashable, Fraction]]:
        """Coefficients on generators reproducing vector, or None if outside the span"""
        factor, residual, coefs = self._reduce(vector)
        if residual:
            return None
        return self._combination(coefs)


class SparseMatrix:
    def __init__(self, rows: int, cols: int, entries: Optional[Dict] = None):
        self.rows = rows
        self.cols = cols
        self._columns: Dict[int, Dict[int, Fraction]] = {}
        for (r, c), value in (entries or {}).items():
            self._check(r, c)
            value = as_rational(value)
            if value:
                self._columns.setdefault(c, {})[r] = value

    def _check(self, r, c):
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise ShapeMismatch(f"entry ({r}, {c}) outside a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Dict[int, Fraction]]) -> "SparseMatrix":
        matrix = cls(rows, len(columns))
        for c, column in enumerate(columns):
            clean = {r: Fraction(v) for r, v in column.items() if v}
            for r in clean:
                matrix._check(r, c)
            if clean:
                matrix._columns[c] = clean
        return matrix

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls.from_columns(n, [{j: Fraction(1)} for j in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def column(self, c: int) -> Dict[int, Fraction]:
        return dict(self._columns.get(c, {}))

    def entries(self) -> Dict[Tuple[int, int], Fraction]:
        return {(r, c): v for c, col in self._columns.items() for r, v in col.items()}

    def __getitem__(self, key) -> Fraction:
        r, c = key
        return self._columns.get(c, {}).get(r, Fraction(0))

    def nonzero_count(self) -> int:
        return sum(len(col) for col in self._columns.values())

    def is_zero(self) -> bool:
        return not self._columns

    def apply(self, vector: Dict[int, Fraction]) -> Dict[int, Fraction]:
        result: Dict[int, Fraction] = {}
        for c, value in vector.items():
            column = self._columns.get(c)
            if column:
                add_to(result, column, value)
        return result

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot compose {self.shape} after {other.shape}")
        return SparseMatrix.from_columns(
            self.rows, [self.apply(other._columns.get(c, {})) for c in range(other.cols)]
        )

    def _combine(self, other: "SparseMatrix", sign) -> "SparseMatrix":
        if self.shape != other.shape:
            raise ShapeMismatch(f"shapes {self.shape} and {other.shape} differ")
        columns = [dict(self._columns.get(c, {})) for c in range(self.cols)]
        for c, col in other._columns.items():
            add_to(columns[c], col, sign)
        return SparseMatrix.from_columns(self.rows, columns)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, coef) -> "SparseMatrix":
        return SparseMatrix.from_columns(
            self.rows, [scaled(self._columns.get(c, {}), coef) for c in range(self.cols)]
        )

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries().items()})

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseMatrix":
        position = {r: i for i, r in enumerate(rows)}
        columns = []
        for c in cols:
            col = self._columns.get(c, {})
            columns.append({position[r]: v for r, v in col.items() if r in position})
        return SparseMatrix.from_columns(len(rows), columns)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._columns == other._columns

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nonzero_count()})"

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        for (r, c), v in sorted(self.entries().items()):
            lines.append(f"{r} {c} {format_rational(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, first_line: int = 1) -> "SparseMatrix":
        lines = text.splitlines()
        if not lines:
            raise ParseError("empty matrix text", first_line, 1)
        header = lines[0].split()
        if len(header) != 2 or not all(h.isdigit() for h in header):
            raise ParseError("matrix header must be `rows cols`", first_line, 1)
        matrix = cls(int(header[0]), int(header[1]))
        for offset, line in enumerate(lines[1:], start=1):
            if not line.strip():
                continue
            fields = line.split()
            lineno = first_line + offset
            if len(fields) != 3:
                raise ParseError("matrix entry must be `row col num/den`", lineno, 1)
            try:
                r, c = int(fields[0]), int(fields[1])
            except ValueError:
                raise ParseError("row and column must be integers", lineno, 1)
            try:
                value = as_rational(fields[2])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad rational {fields[2]!r}", lineno, line.index(fields[2]) + 1)
            if not (0 <= r < matrix.rows and 0 <= c < matrix.cols):
                raise ParseError(f"entry ({r}, {c}) outside the matrix", lineno, 1)
            if (r, c) in matrix.entries():
                raise ParseError(f"duplicate entry ({r}, {c})", lineno, 1)
            if value:
                matrix._columns.setdefault(c, {})[r] = value
        return matrix


def vstack(matrices: Sequence[SparseMatrix], cols: int) -> SparseMatrix:
    """Stacks matrices with a common column count on top of each other"""
    columns: List[Dict[int, Fraction]] = [{} for _ in range(cols)]
    offset = 0
    for matrix in matrices:
        if matrix.cols != cols:
            raise ShapeMismatch(f"cannot stack {matrix.shape} over {cols} columns")
        for c in range(cols):
            for r, v in matrix.column(c).items():
                columns[c][r + offset] = v
        offset += matrix.rows
    return SparseMatrix.from_columns(offset, columns)


def rank(matrix: SparseMatrix) -> int:
    basis = EchelonBasis()
    return sum(1 for c in range(matrix.cols) if basis.add(matrix.column(c)))


def kernel_basis(matrix: SparseMatrix) -> List[Dict[int, Fraction]]:
    """A basis of Ker(matrix): one vector per dependent column, e_j minus its expression"""
    basis = EchelonBasis()
    kernel = []
    for c in range(matrix.cols):
        column = matrix.column(c)
        if not column:
            kernel.append({c: Fraction(1)})
            continue
        expression = basis.insert(column, c)
        if expression is not None:
            vector = {c: Fraction(1)}
            add_to(vector, expression, -1)
            kernel.append(vector)
    return kernel


def image_basis(matrix: SparseMatrix) -> List[Dict[int, Fraction]]:
    basis = EchelonBasis()
    return [matrix.column(c) for c in range(matrix.cols) if basis.add(matrix.column(c))]


def coordinates(vectors: Sequence[Dict], vector: Dict) -> Optional[List[Fraction]]:
    """Coordinates of vector in the (independent) list vectors, or None"""
    basis = EchelonBasis()
    for i, v in enumerate(vectors):
        basis.add(v, i)
    solution = basis.solve(vector)
    if solution is None:
        return None
    return [solution.get(i, Fraction(0)) for i in range(len(vectors))]


def restrict_map(
    matrix: SparseMatrix, source: Sequence[Dict[int, Fraction]], target: Sequence[Dict[int, Fraction]]
) -> SparseMatrix:
    """Matrix of `matrix` between the spans of source and target vectors.

    Raises ShapeMismatch if the image of a source vector leaves the target span.
    """
    basis = EchelonBasis()
    for i, v in enumerate(target):
        basis.add(v, i)
    columns = []
    for j, v in enumerate(source):
        solution = basis.solve(matrix.apply(v))
        if solution is None:
            raise ShapeMismatch(f"image of source vector {j} leaves the target subspace")
        columns.append(solution)
    return SparseMatrix.from_columns(len(target), columns)


class Homology:
    """Cycles modulo boundaries with exact membership oracles.

    `boundaries[j]` must equal the differential applied to `preimages[j]`
    (unit vectors when preimages are not given).
    """

    def __init__(
        self,
        cycles: Sequence[Dict],
        boundaries: Sequence[Dict],
        preimages: Optional[Sequence[Dict]] = None,
    ):
        self._boundaries = EchelonBasis()
        for j, v in enumerate(boundaries):
            self._boundaries.add(v, ("b", j))
        self._preimages = preimages
        self._classes = self._boundaries.copy()
        self.representatives: List[Dict] = []
        for z in cycles:
            if self._classes.add(z, ("h", len(self.representatives))):
                self.representatives.append(dict(z))

    @property
    def dimension(self) -> int:
        return len(self.representatives)

    def is_boundary(self, vector: Dict) -> bool:
        return self._boundaries.contains(vector)

    def is_cycle_class(self, vector: Dict) -> bool:
        return self._classes.contains(vector)

    def classify(self, vector: Dict) -> List[Fraction]:
        """Coordinates of the class of vector in the representative basis"""
        solution = self._classes.solve(vector)
        if solution is None:
            raise ValueError("vector is not a cycle of this complex")
        coords = [Fraction(0)] * self.dimension
        for (kind, index), value in solution.items():
            if kind == "h":
                coords[index] += value
        return coords

    def lift(self, vector: Dict) -> Optional[Dict]:
        """A preimage of vector under the incoming differential, if it is a boundary"""
        solution = self._boundaries.solve(vector)
        if solution is None:
            return None
        result: Dict = {}
        for (_, j), value in solution.items():
            add_to(result, self._preimages[j] if self._preimages is not None else {j: 1}, value)
        return result


class GradedSpace:
    """Finite-dimensional pieces in a window of cohomological degrees.

    Queries outside the window see the zero space.
    """

    def __init__(self, window: Tuple[int, int], labels: Optional[Dict[int, Sequence[Hashable]]] = None):
        self.window = (int(window[0]), int(window[1]))
        self._labels: Dict[int, List[Hashable]] = {}
        self._index: Dict[int, Dict[Hashable, int]] = {}
        for n, names in (labels or {}).items():
            if not self.window[0] <= n <= self.window[1]:
                if names:
                    raise ShapeMismatch(f"degree {n} lies outside the window {self.window}")
                continue
            self._labels[n] = list(names)
            self._index[n] = {name: i for i, name in enumerate(self._labels[n])}
            if len(self._index[n]) != len(self._labels[n]):
                raise ShapeMismatch(f"repeated basis label in degree {n}")

    def degrees(self) -> range:
        return range(self.window[0], self.window[1] + 1)

    def dim(self, n: int) -> int:
        return len(self._labels.get(n, ()))

    def basis(self, n: int) -> List[Hashable]:
        return self._labels.get(n, [])

    def index(self, n: int, label: Hashable) -> int:
        return self._index[n][label]

    def to_positions(self, n: int, vector: Dict) -> Dict[int, Fraction]:
        index = self._index.get(n, {})
        try:
            return {index[k]: v for k, v in vector.items() if v}
        except KeyError as e:
            raise ShapeMismatch(f"label {e.args[0]!r} is not a basis label in degree {n}")

    def from_positions(self, n: int, vector: Dict[int, Fraction]) -> Dict:
        labels = self._labels.get(n, [])
        return {labels[i]: v for i, v in vector.items() if v}

    def __eq__(self, other):
        if not isinstance(other, GradedSpace):
            return NotImplemented
        return self.window == other.window and all(
            self.basis(n) == other.basis(n) for n in self.degrees()
        )

    def __repr__(self):
        dims = {n: self.dim(n) for n in self.degrees() if self.dim(n)}
        return f"GradedSpace({self.window}, {dims})"


class GradedMap:
    """A degree-homogeneous map: blocks[n] sends source degree n to target degree n + shift."""

    def __init__(
        self,
        source: GradedSpace,
        target: GradedSpace,
        shift: int,
        blocks: Optional[Dict[int, SparseMatrix]] = None,
        rule: Optional[Callable[[int, Hashable], Dict]] = None,
    ):
        self.source = source
        self.target = target
        self.shift = shift
        self._blocks: Dict[int, SparseMatrix] = {}
        self._rule = rule
        self._images: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        for n, block in (blocks or {}).items():
            expected = (target.dim(n + shift), source.dim(n))
            if block.shape != expected:
                raise ShapeMismatch(f"block at degree {n} has shape {block.shape}, expected {expected}")
            self._blocks[n] = block

    def block(self, n: int) -> SparseMatrix:
        if n not in self._blocks:
            rows, cols = self.target.dim(n + self.shift), self.source.dim(n)
            if self._rule is None or not rows or not cols:
                self._blocks[n] = SparseMatrix.zero(rows, cols)
            else:
                columns = [self.image(n, c) for c in range(cols)]
                self._blocks[n] = SparseMatrix.from_columns(rows, columns)
                for c in range(cols):
                    self._images.pop((n, c), None)
        return self._blocks[n]

    def image(self, n: int, c: int) -> Dict[int, Fraction]:
        """Positional image of the c-th basis vector of degree n.

        Uses the block when it is built, otherwise the rule on that label only.
        """
        if n in self._blocks:
            return self._blocks[n].column(c)
        if (n, c) not in self._images:
            image: Dict[int, Fraction] = {}
            if self._rule is not None and self.target.dim(n + self.shift):
                image = self.target.to_positions(n + self.shift, self._rule(n, self.source.basis(n)[c]))
            self._images[(n, c)] = image
        return self._images[(n, c)]

    def push(self, vector: Dict[int, Fraction], n: int) -> Dict[int, Fraction]:
        """Positional vector of degree n to its image, evaluating only the columns it touches"""
        result: Dict[int, Fraction] = {}
        for c, value in vector.items():
            add_to(result, self.image(n, c), value)
        return result

    def __call__(self, vector: Dict, n: int) -> Dict:
        """Applies the map to a label-keyed vector of degree n"""
        image = self.push(self.source.to_positions(n, vector), n)
        return self.target.from_positions(n + self.shift, image)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self after other"""
        if other.target != self.source:
            raise ShapeMismatch("composed maps do not share a space")
        degrees = other.source.degrees()
        return GradedMap(
            other.source,
            self.target,
            self.shift + other.shift,
            {n: self.block(n + other.shift) @ other.block(n) for n in degrees},
        )

    def _combine(self, other: "GradedMap", sign) -> "GradedMap":
        if self.shift != other.shift or self.source != other.source or self.target != other.target:
            raise ShapeMismatch("added maps differ in shape")
        return GradedMap(
            self.source,
            self.target,
            self.shift,
            {n: self.block(n)._combine(other.block(n), sign) for n in self.source.degrees()},
        )

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scaled(self, coef) -> "GradedMap":
        return GradedMap(
            self.source, self.target, self.shift, {n: self.block(n).scaled(coef) for n in self.source.degrees()}
        )

    def is_zero_at(self, n: int) -> bool:
        return self.block(n).is_zero()

    @classmethod
    def identity(cls, space: GradedSpace) -> "GradedMap":
        return cls(space, space, 0, {n: SparseMatrix.identity(space.dim(n)) for n in space.degrees()})

    @classmethod
    def zero(cls, source: GradedSpace, target: GradedSpace, shift: int) -> "GradedMap":
        return cls(source, target, shift)


def homology(d_in: Optional[GradedMap], d_out: Optional[GradedMap], n: int) -> Homology:
    """Ker(d_out at n) / Im(d_in into n), with label-free positional vectors"""
    if d_in is None and d_out is None:
        logger.error(f"homology at degree {n} asked without differentials")
        raise ShapeMismatch("homology needs at least one differential to fix the ambient space")
    incoming = d_in.block(n - d_in.shift) if d_in is not None else None
    outgoing = d_out.block(n) if d_out is not None else None
    if incoming is not None and outgoing is not None:
        if not (outgoing @ incoming).is_zero():
            logger.error(f"composite of differentials is nonzero at degree {n}")
            raise CompositionNotZero(f"d_out after d_in is nonzero at degree {n}")
    if outgoing is not None:
        cycles = kernel_basis(outgoing)
    else:
        space = d_in.target
        cycles = [{j: Fraction(1)} for j in range(space.dim(n))]
    boundaries = [incoming.column(j) for j in range(incoming.cols)] if incoming is not None else []
    result = Homology(cycles, boundaries)
    logger.debug(f"homology at degree {n}: dimension {result.dimension}")
    return result


def inverse(matrix: SparseMatrix) -> Optional[SparseMatrix]:
    """Exact inverse of a square matrix, or None when it is singular"""
    if matrix.rows != matrix.cols:
        raise ShapeMismatch(f"cannot invert a {matrix.rows}x{matrix.cols} matrix")
    basis = EchelonBasis()
    for c in range(matrix.cols):
        if not basis.add(matrix.column(c), c):
            return None
    columns = []
    for j in range(matrix.rows):
        columns.append(basis.solve({j: Fraction(1)}))
    return SparseMatrix.from_columns(matrix.cols, columns)
