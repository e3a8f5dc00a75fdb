"""Cosimplicial and cocyclic complexes and their mixed totalizations.

Levels are graded by an internal (cohomological) degree p. A cochain of
level k and internal degree p sits in total degree p + k. Cofaces are keyed
(k, i) and map level k - 1 to level k; codegeneracies are keyed (k, i) and
map level k + 1 to level k.

A build keeps levels 0..L. Dropping higher levels is compatible with b but
not with B, so every group carries a certification flag: with zero internal
differential the total splits into columns of fixed internal degree, and
column p is exact at total degree n whenever n - p + 1 <= L.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from loguru import logger

from pycyclic.errors import HypothesisFailed, NNotInvertible, ParseError, ShapeMismatch, ValidationFailed
from pycyclic.linalg import (
    EchelonBasis,
    GradedMap,
    GradedSpace,
    Homology,
    SparseMatrix,
    add_to,
    combine,
    kernel_basis,
    rank,
    restrict_map,
    scaled,
)
from pycyclic.mixed import (
    HomologyGroup,
    MixedComplex,
    Theory,
    _component_zero,
    _include_at_zero,
    exactness_report,
    induced_matrix,
)
from pycyclic.report import Report


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


class _Composite:
    """maps[0] after maps[1] after ... at internal degree p, one basis vector at a time"""

    def __init__(self, maps: Sequence[GradedMap], p: int):
        self.maps = list(maps)
        self.p = p

    def column(self, c: int) -> Dict[int, Fraction]:
        vector, q = {c: Fraction(1)}, self.p
        for m in reversed(self.maps):
            vector = m.push(vector, q)
            q += m.shift
        return vector


def _chain(maps: Sequence[GradedMap], p: int) -> _Composite:
    return _Composite(maps, p)


class CosimplicialComplex:
    def __init__(
        self,
        levels: Sequence[GradedSpace],
        cofaces: Dict[Tuple[int, int], GradedMap],
        codegeneracies: Dict[Tuple[int, int], GradedMap],
        differentials: Optional[Dict[int, GradedMap]] = None,
        name: str = "X",
    ):
        if not levels:
            raise ShapeMismatch("a cosimplicial complex needs at least level 0")
        self.levels = list(levels)
        self.name = name
        L = len(self.levels) - 1
        for k in range(1, L + 1):
            for i in range(k + 1):
                if (k, i) not in cofaces:
                    raise ShapeMismatch(f"missing coface delta_{i} into level {k}")
        for k in range(L):
            for i in range(k + 1):
                if (k, i) not in codegeneracies:
                    raise ShapeMismatch(f"missing codegeneracy sigma_{i} onto level {k}")
        self.cofaces = dict(cofaces)
        self.codegeneracies = dict(codegeneracies)
        self.differentials = dict(differentials or {})

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    def internal_window(self) -> Tuple[int, int]:
        windows = [level.window for level in self.levels if level.window[0] <= level.window[1]]
        if not windows:
            return (0, -1)
        return min(w[0] for w in windows), max(w[1] for w in windows)

    def coface(self, k: int, i: int) -> GradedMap:
        return self.cofaces[(k, i)]

    def codegeneracy(self, k: int, i: int) -> GradedMap:
        return self.codegeneracies[(k, i)]

    def differential(self, k: int) -> GradedMap:
        if k not in self.differentials:
            self.differentials[k] = GradedMap.zero(self.levels[k], self.levels[k], 1)
        return self.differentials[k]

    def has_differential(self) -> bool:
        return any(
            not d.is_zero_at(p) for k, d in self.differentials.items() for p in self.levels[k].degrees()
        )

    @classmethod
    def _maps_from_rules(cls, levels, coface_rule, codegeneracy_rule, differential_rule):
        L = len(levels) - 1
        cofaces = {
            (k, i): GradedMap(levels[k - 1], levels[k], 0, rule=lambda p, label, k=k, i=i: coface_rule(k, i, p, label))
            for k in range(1, L + 1)
            for i in range(k + 1)
        }
        codegeneracies = {
            (k, i): GradedMap(
                levels[k + 1], levels[k], 0, rule=lambda p, label, k=k, i=i: codegeneracy_rule(k, i, p, label)
            )
            for k in range(L)
            for i in range(k + 1)
        }
        differentials = {}
        if differential_rule is not None:
            differentials = {
                k: GradedMap(levels[k], levels[k], 1, rule=lambda p, label, k=k: differential_rule(k, p, label))
                for k in range(L + 1)
            }
        return cofaces, codegeneracies, differentials

    @classmethod
    def from_rules(
        cls,
        levels: Sequence[GradedSpace],
        coface_rule: Callable,
        codegeneracy_rule: Callable,
        differential_rule: Optional[Callable] = None,
        name: str = "X",
    ) -> "CosimplicialComplex":
        """Structure maps given on basis labels: rule(k, i, p, label) -> vector"""
        cofaces, codegeneracies, differentials = cls._maps_from_rules(
            levels, coface_rule, codegeneracy_rule, differential_rule
        )
        return cls(levels, cofaces, codegeneracies, differentials, name=name)

    def to_text(self) -> str:
        cyclic = getattr(self, "cyclic", None)
        lines = [f"{'cocyclic' if cyclic is not None else 'cosimplicial'} {self.max_level}"]
        for k, level in enumerate(self.levels):
            lo, hi = level.window
            dims = " ".join(str(level.dim(p)) for p in level.degrees())
            lines.append(f"level {k} {lo} {hi} {dims}".rstrip())
        sections = [("coface", key, m) for key, m in sorted(self.cofaces.items())]
        sections += [("codegeneracy", key, m) for key, m in sorted(self.codegeneracies.items())]
        sections += [("differential", (k,), m) for k, m in sorted(self.differentials.items())]
        if cyclic is not None:
            sections += [("cyclic", (k,), m) for k, m in sorted(cyclic.items())]
        for kind, key, m in sections:
            for p in m.source.degrees():
                block = m.block(p)
                if block.is_zero():
                    continue
                lines.append(" ".join([kind] + [str(x) for x in key] + [str(p)]))
                lines.extend(block.to_text().splitlines())
        return "\n".join(lines) + "\n"


class CocyclicComplex(CosimplicialComplex):
    def __init__(
        self,
        levels: Sequence[GradedSpace],
        cofaces: Dict[Tuple[int, int], GradedMap],
        codegeneracies: Dict[Tuple[int, int], GradedMap],
        cyclic: Dict[int, GradedMap],
        differentials: Optional[Dict[int, GradedMap]] = None,
        name: str = "X",
    ):
        super().__init__(levels, cofaces, codegeneracies, differentials, name)
        for k in range(self.max_level + 1):
            if k not in cyclic:
                raise ShapeMismatch(f"missing cyclic map tau_{k}")
        self.cyclic = dict(cyclic)

    def tau(self, k: int) -> GradedMap:
        return self.cyclic[k]

    @classmethod
    def from_rules(
        cls,
        levels: Sequence[GradedSpace],
        coface_rule: Callable,
        codegeneracy_rule: Callable,
        cyclic_rule: Callable = None,
        differential_rule: Optional[Callable] = None,
        name: str = "X",
    ) -> "CocyclicComplex":
        cofaces, codegeneracies, differentials = cls._maps_from_rules(
            levels, coface_rule, codegeneracy_rule, differential_rule
        )
        cyclic = {
            k: GradedMap(levels[k], levels[k], 0, rule=lambda p, label, k=k: cyclic_rule(k, p, label))
            for k in range(len(levels))
        }
        return cls(levels, cofaces, codegeneracies, cyclic, differentials, name=name)


def constant_cocyclic(space: GradedSpace, max_level: int, name: str = "const") -> CocyclicComplex:
    """Every level a copy of space and every structure map the identity"""
    def unit(*args):
        return {args[-1]: Fraction(1)}

    levels = [space] * (max_level + 1)
    return CocyclicComplex.from_rules(levels, unit, unit, unit, name=name)


def parse_cocyclic(text: str, name: str = "X") -> CosimplicialComplex:
    """Reads the dump written by `to_text`; labels become positions"""
    lines = text.splitlines()
    header = lines[0].split() if lines else []
    if len(header) != 2 or header[0] not in ("cocyclic", "cosimplicial") or not header[1].isdigit():
        raise ParseError("first line must be `cocyclic L` or `cosimplicial L`", 1, 1)
    L = int(header[1])
    levels: List[GradedSpace] = []
    i = 1
    for k in range(L + 1):
        fields = lines[i].split() if i < len(lines) else []
        try:
            if fields[:2] != ["level", str(k)]:
                raise ValueError
            lo, hi = int(fields[2]), int(fields[3])
            dims = [int(x) for x in fields[4:]]
        except (ValueError, IndexError):
            raise ParseError(f"expected `level {k} lo hi dims...`", i + 1, 1)
        if len(dims) != max(0, hi - lo + 1):
            raise ParseError("level dims do not match its window", i + 1, 1)
        levels.append(GradedSpace((lo, hi), {p: list(range(d)) for p, d in zip(range(lo, hi + 1), dims)}))
        i += 1
    blocks: Dict[Tuple, Dict[int, SparseMatrix]] = {}
    arity = {"coface": 2, "codegeneracy": 2, "differential": 1, "cyclic": 1}
    while i < len(lines):
        fields = lines[i].split()
        if not fields:
            i += 1
            continue
        kind = fields[0]
        if kind not in arity or len(fields) != arity[kind] + 2:
            raise ParseError(f"unexpected section header {lines[i]!r}", i + 1, 1)
        try:
            key = tuple(int(x) for x in fields[1:-1])
            p = int(fields[-1])
        except ValueError:
            raise ParseError(f"non-integer section key in {lines[i]!r}", i + 1, 1)
        j = i + 1
        while j < len(lines) and not (lines[j].split()[:1] and lines[j].split()[0] in arity):
            j += 1
        blocks.setdefault((kind,) + key, {})[p] = SparseMatrix.from_text("\n".join(lines[i + 1 : j]), i + 2)
        i = j

    def graded(kind, key, source, target, shift):
        try:
            return GradedMap(source, target, shift, blocks.get((kind,) + key, {}))
        except ShapeMismatch as e:
            raise ParseError(f"{kind} {key}: {e}")

    cofaces = {
        (k, j): graded("coface", (k, j), levels[k - 1], levels[k], 0) for k in range(1, L + 1) for j in range(k + 1)
    }
    codegeneracies = {
        (k, j): graded("codegeneracy", (k, j), levels[k + 1], levels[k], 0) for k in range(L) for j in range(k + 1)
    }
    differentials = {
        k: graded("differential", (k,), levels[k], levels[k], 1) for k in range(L + 1) if ("differential", k) in blocks
    }
    if header[0] == "cosimplicial":
        return CosimplicialComplex(levels, cofaces, codegeneracies, differentials, name=name)
    cyclic = {k: graded("cyclic", (k,), levels[k], levels[k], 0) for k in range(L + 1)}
    return CocyclicComplex(levels, cofaces, codegeneracies, cyclic, differentials, name=name)


def _compare(report: Report, name: str, lhs, rhs, level: GradedSpace, p: int, k: int):
    """lhs and rhs are matrices or composites; compared column by column"""
    for c in range(level.dim(p)):
        if lhs.column(c) != rhs.column(c):
            report.add(name, False, witness=(k, p, level.basis(p)[c]))
            return
    report.add(name, True)


def validate_cosimplicial(C: CosimplicialComplex, report: Optional[Report] = None) -> Report:
    report = report or Report(f"cosimplicial identities of {C.name}")
    L = C.max_level
    delta, sigma = C.coface, C.codegeneracy
    for k in range(1, L):
        for p in C.levels[k - 1].degrees():
            for j in range(k + 2):
                for i in range(j):
                    _compare(
                        report,
                        f"d{j}d{i}=d{i}d{j - 1}@{k - 1},{p}",
                        _chain([delta(k + 1, j), delta(k, i)], p),
                        _chain([delta(k + 1, i), delta(k, j - 1)], p),
                        C.levels[k - 1],
                        p,
                        k - 1,
                    )
    for k in range(L - 1):
        for p in C.levels[k + 2].degrees():
            for j in range(k + 1):
                for i in range(j + 1):
                    _compare(
                        report,
                        f"s{j}s{i}=s{i}s{j + 1}@{k + 2},{p}",
                        _chain([sigma(k, j), sigma(k + 1, i)], p),
                        _chain([sigma(k, i), sigma(k + 1, j + 1)], p),
                        C.levels[k + 2],
                        p,
                        k + 2,
                    )
    for k in range(L):
        for p in C.levels[k].degrees():
            unit = SparseMatrix.identity(C.levels[k].dim(p))
            for j in range(k + 1):
                for i in range(k + 2):
                    lhs = _chain([sigma(k, j), delta(k + 1, i)], p)
                    if i < j:
                        rhs = _chain([delta(k, i), sigma(k - 1, j - 1)], p)
                    elif i in (j, j + 1):
                        rhs = unit
                    else:
                        rhs = _chain([delta(k, i - 1), sigma(k - 1, j)], p)
                    _compare(report, f"s{j}d{i}@{k},{p}", lhs, rhs, C.levels[k], p, k)
    if C.differentials:
        for k in range(L + 1):
            d = C.differential(k)
            for p in C.levels[k].degrees():
                zero = SparseMatrix.zero(C.levels[k].dim(p + 2), C.levels[k].dim(p))
                _compare(report, f"dd=0@{k},{p}", _chain([d, d], p), zero, C.levels[k], p, k)
            if k >= 1:
                for i in range(k + 1):
                    for p in C.levels[k - 1].degrees():
                        _compare(
                            report,
                            f"d.delta{i}@{k - 1},{p}",
                            _chain([d, delta(k, i)], p),
                            _chain([delta(k, i), C.differential(k - 1)], p),
                            C.levels[k - 1],
                            p,
                            k - 1,
                        )
            if k < L:
                for i in range(k + 1):
                    for p in C.levels[k + 1].degrees():
                        _compare(
                            report,
                            f"d.sigma{i}@{k + 1},{p}",
                            _chain([d, sigma(k, i)], p),
                            _chain([sigma(k, i), C.differential(k + 1)], p),
                            C.levels[k + 1],
                            p,
                            k + 1,
                        )
    return report


def validate_cocyclic(C: CocyclicComplex) -> Report:
    report = validate_cosimplicial(C, Report(f"cocyclic identities of {C.name}"))
    L = C.max_level
    tau, delta, sigma = C.tau, C.coface, C.codegeneracy
    for k in range(L + 1):
        for p in C.levels[k].degrees():
            power = _chain([tau(k)] * (k + 1), p)
            _compare(report, f"tau^{k + 1}=1@{k},{p}", power, SparseMatrix.identity(C.levels[k].dim(p)), C.levels[k], p, k)
            if C.differentials:
                _compare(
                    report,
                    f"d.tau@{k},{p}",
                    _chain([C.differential(k), tau(k)], p),
                    _chain([tau(k), C.differential(k)], p),
                    C.levels[k],
                    p,
                    k,
                )
    for k in range(1, L + 1):
        for p in C.levels[k - 1].degrees():
            _compare(report, f"t{k}d0=d{k}@{k - 1},{p}", _chain([tau(k), delta(k, 0)], p), _chain([delta(k, k)], p), C.levels[k - 1], p, k - 1)
            for i in range(1, k + 1):
                _compare(
                    report,
                    f"t{k}d{i}=d{i - 1}t@{k - 1},{p}",
                    _chain([tau(k), delta(k, i)], p),
                    _chain([delta(k, i - 1), tau(k - 1)], p),
                    C.levels[k - 1],
                    p,
                    k - 1,
                )
    for k in range(L):
        for p in C.levels[k + 1].degrees():
            _compare(
                report,
                f"t{k}s0=s{k}tt@{k + 1},{p}",
                _chain([tau(k), sigma(k, 0)], p),
                _chain([sigma(k, k), tau(k + 1), tau(k + 1)], p),
                C.levels[k + 1],
                p,
                k + 1,
            )
            for i in range(1, k + 1):
                _compare(
                    report,
                    f"t{k}s{i}=s{i - 1}t@{k + 1},{p}",
                    _chain([tau(k), sigma(k, i)], p),
                    _chain([sigma(k, i - 1), tau(k + 1)], p),
                    C.levels[k + 1],
                    p,
                    k + 1,
                )
    return report


@dataclass
class Column:
    """One direct summand of a totalization with its operators.

    `internal` is the internal degree of a column, or None when the total
    does not split.
    """

    internal: Optional[int]
    mixed: MixedComplex
    ops: Dict[str, GradedMap] = field(default_factory=dict)
    groups: Dict[Tuple[str, int], HomologyGroup] = field(default_factory=dict)
    solvers: Dict[Tuple[str, int], EchelonBasis] = field(default_factory=dict, repr=False)

    @property
    def space(self) -> GradedSpace:
        return self.mixed.space

    def certified(self, n: int) -> bool:
        return self.mixed.certified(n)


class TotalComplex:
    """Product totalization of a cosimplicial complex, b = d + delta.

    delta on level k - 1 in internal degree p is
    (-1)^(p + k - 1) * sum_{i=0..k} (-1)^i delta_i.
    """

    def __init__(self, cosimplicial: CosimplicialComplex):
        self.complex = cosimplicial
        self.name = cosimplicial.name
        self.L = cosimplicial.max_level
        self.split = not cosimplicial.has_differential()
        plo, phi = cosimplicial.internal_window()
        self.window = (plo, phi + self.L)
        logger.info(f"totalizing {self.name} through level {self.L} ({'columns' if self.split else 'single piece'})")
        self.space = GradedSpace(self.window, {n: self._labels(n) for n in range(self.window[0], self.window[1] + 1)})
        self._columns: Optional[List[Column]] = None

    def _labels(self, n: int, internal: Optional[int] = None) -> List[Tuple[int, Hashable]]:
        labels = []
        for k, level in enumerate(self.complex.levels):
            p = n - k
            if internal is not None and p != internal:
                continue
            labels.extend((k, label) for label in level.basis(p))
        return labels

    @staticmethod
    def by_level(vector: Dict) -> Dict[int, Dict]:
        parts: Dict[int, Dict] = {}
        for (k, label), v in vector.items():
            parts.setdefault(k, {})[label] = v
        return parts

    def _lift(self, k: int, vector: Dict) -> Dict:
        return {(k, label): v for label, v in vector.items()}

    def delta(self, vector: Dict, n: int, last: bool = True) -> Dict:
        """delta (or delta' when last is False) on a total vector of degree n"""
        result: Dict = {}
        for k, part in self.by_level(vector).items():
            if k + 1 > self.L:
                continue
            p = n - k
            top = k + 1 if last else k
            for i in range(top + 1):
                image = self.complex.coface(k + 1, i)(part, p)
                add_to(result, self._lift(k + 1, image), _sign(p + k + i))
        return result

    def d(self, vector: Dict, n: int) -> Dict:
        result: Dict = {}
        for k, part in self.by_level(vector).items():
            if k in self.complex.differentials:
                add_to(result, self._lift(k, self.complex.differential(k)(part, n - k)))
        return result

    def b(self, vector: Dict, n: int) -> Dict:
        return add_to(self.d(vector, n), self.delta(vector, n))

    def b_prime(self, vector: Dict, n: int) -> Dict:
        return add_to(self.d(vector, n), self.delta(vector, n, last=False))

    def _rule(self, op: Callable[[Dict, int], Dict]):
        return lambda n, label: op({label: Fraction(1)}, n)

    def _operators(self, space: GradedSpace) -> Dict[str, GradedMap]:
        return {"b": GradedMap(space, space, 1, rule=self._rule(self.b))}

    def _B_map(self, space: GradedSpace) -> GradedMap:
        return GradedMap.zero(space, space, -1)

    def _ceiling(self, internal: Optional[int]) -> int:
        base = internal if internal is not None else self.complex.internal_window()[0]
        return base + self.L

    def columns(self) -> List[Column]:
        if self._columns is None:
            self._columns = []
            if self.split:
                plo, phi = self.complex.internal_window()
                for p in range(plo, phi + 1):
                    window = (p, p + self.L)
                    labels = {n: self._labels(n, p) for n in range(window[0], window[1] + 1)}
                    if not any(labels.values()):
                        continue
                    self._columns.append(self._column(p, GradedSpace(window, labels)))
            else:
                self._columns.append(self._column(None, self.space))
        return self._columns

    def _column(self, internal: Optional[int], space: GradedSpace) -> Column:
        ops = self._operators(space)
        suffix = f"[p={internal}]" if internal is not None else ""
        mixed = MixedComplex(
            space, ops["b"], self._B_map(space), ceiling=self._ceiling(internal), name=f"{self.name}{suffix}"
        )
        return Column(internal, mixed, ops)

    def column_at(self, internal: int) -> Optional[Column]:
        for column in self.columns():
            if column.internal == internal:
                return column
        return None


class TotalMixed(TotalComplex):
    """Totalization of a cocyclic complex with Connes' operator B = N s (1 - lambda).

    lambda = (-1)^k tau_k on level k, N = sum of the powers of lambda, and the
    extra degeneracy s on level k >= 1 is (-1)^(p + k - 1) sigma_{k-1} tau_k.
    """

    def __init__(self, cocyclic: CocyclicComplex):
        if not isinstance(cocyclic, CocyclicComplex):
            raise ShapeMismatch("Connes' operator needs cyclic maps")
        super().__init__(cocyclic)

    def lam(self, vector: Dict, n: int) -> Dict:
        result: Dict = {}
        for k, part in self.by_level(vector).items():
            add_to(result, self._lift(k, self.complex.tau(k)(part, n - k)), _sign(k))
        return result

    def one_minus_lam(self, vector: Dict, n: int) -> Dict:
        return add_to(dict(vector), self.lam(vector, n), -1)

    def norm(self, vector: Dict, n: int) -> Dict:
        result: Dict = {}
        for k, part in self.by_level(vector).items():
            current = self._lift(k, part)
            add_to(result, current)
            for _ in range(k):
                current = self.lam(current, n)
                add_to(result, current)
        return result

    def s(self, vector: Dict, n: int) -> Dict:
        result: Dict = {}
        for k, part in self.by_level(vector).items():
            if k == 0:
                continue
            p = n - k
            turned = self.complex.tau(k)(part, p)
            image = self.complex.codegeneracy(k - 1, k - 1)(turned, p)
            add_to(result, self._lift(k - 1, image), _sign(p + k - 1))
        return result

    def B(self, vector: Dict, n: int) -> Dict:
        return self.norm(self.s(self.one_minus_lam(vector, n), n), n - 1)

    def _operators(self, space: GradedSpace) -> Dict[str, GradedMap]:
        ops = super()._operators(space)
        ops["b'"] = GradedMap(space, space, 1, rule=self._rule(self.b_prime))
        ops["lambda"] = GradedMap(space, space, 0, rule=self._rule(self.lam))
        ops["N"] = GradedMap(space, space, 0, rule=self._rule(self.norm))
        ops["s"] = GradedMap(space, space, -1, rule=self._rule(self.s))
        ops["B"] = GradedMap(space, space, -1, rule=self._rule(self.B))
        return ops

    def _column(self, internal: Optional[int], space: GradedSpace) -> Column:
        ops = self._operators(space)
        suffix = f"[p={internal}]" if internal is not None else ""
        mixed = MixedComplex(space, ops["b"], ops["B"], ceiling=self._ceiling(internal), name=f"{self.name}{suffix}")
        return Column(internal, mixed, ops)


def totalize(C: CocyclicComplex) -> TotalMixed:
    report = validate_cocyclic(C)
    if not report.passed:
        logger.error(f"{C.name} fails {len(report.failures)} cocyclic identities")
        raise ValidationFailed(f"{C.name} is not a cocyclic complex", report)
    return TotalMixed(C)


def _within(space: GradedSpace, n: int, L: int, reach: int) -> List[int]:
    """Positions of the degree n labels whose level leaves room for `reach` more levels"""
    return [c for c, (k, _) in enumerate(space.basis(n)) if k + reach <= L]


def _evaluate(terms: Sequence[Tuple[int, Sequence[GradedMap]]], c: int, n: int) -> Dict[int, Fraction]:
    """sum of coef * (maps[0] after maps[1] after ...) on the c-th basis vector of degree n"""
    result: Dict[int, Fraction] = {}
    for coef, maps in terms:
        add_to(result, _Composite(maps, n).column(c), coef)
    return result


def identity_report(T: TotalMixed) -> Report:
    """The Connes operator identities on every level they can be decided.

    Each identity is evaluated on the basis vectors far enough below the top
    level, applying the operator rules to those vectors only.
    """
    report = Report(f"Connes identities of {T.name}", meta={"max_level": T.L})
    for column in T.columns():
        o = column.ops
        b, bp, lam, N, s, B = o["b"], o["b'"], o["lambda"], o["N"], o["s"], o["B"]
        space = column.space
        tag = column.mixed.name
        identities = [
            ("b'b'=0", 2, [(1, [bp, bp])], []),
            ("N(1-lambda)=0", 0, [(1, [N]), (-1, [N, lam])], []),
            ("(1-lambda)N=0", 0, [(1, [N]), (-1, [lam, N])], []),
            ("(1-lambda)b=b'(1-lambda)", 1, [(1, [b]), (-1, [lam, b])], [(1, [bp]), (-1, [bp, lam])]),
            ("bN=Nb'", 1, [(1, [b, N])], [(1, [N, bp])]),
            ("b's+sb'=1", 1, [(1, [bp, s]), (1, [s, bp])], [(1, [])]),
            ("BB=0", 0, [(1, [B, B])], []),
            ("bB+Bb=0", 1, [(1, [b, B]), (1, [B, b])], []),
        ]
        for n in space.degrees():
            for name, reach, lhs, rhs in identities:
                positions = _within(space, n, T.L, reach)
                if not positions:
                    continue
                bad = next((c for c in positions if _evaluate(lhs, c, n) != _evaluate(rhs, c, n)), None)
                witness = None if bad is None else (n,) + tuple(space.basis(n)[bad])
                report.add(f"{tag}/{name}@{n}", bad is None, witness=witness)
            invariants = cyclic_invariants(column, n)
            closed = True
            for v in invariants:
                if _top_level(space, n, v) < T.L:
                    image = b.push(v, n)
                    closed = closed and not add_to(image, lam.push(image, n + 1), -1)
            report.add(f"{tag}/b preserves Ker(1-lambda)@{n}", closed, witness=n)
            report.add(f"{tag}/B vanishes on Ker(1-lambda)@{n}", all(not B.push(v, n) for v in invariants), witness=n)
        report.merge(b_prime_acyclicity(T, column), tag)
    return report


def _top_level(space: GradedSpace, n: int, vector: Dict[int, Fraction]) -> int:
    labels = space.basis(n)
    return max((labels[c][0] for c in vector), default=-1)


def b_prime_acyclicity(T: TotalMixed, column: Column) -> Report:
    report = Report("acyclicity of b'")
    bp = column.ops["b'"]
    for n in column.space.degrees():
        if not column.certified(n):
            report.skip(f"H(b')@{n}", "uncertified")
            continue
        homology = Homology(
            kernel_basis(bp.block(n)), [bp.block(n - 1).column(j) for j in range(bp.block(n - 1).cols)]
        )
        report.add(f"H(b')@{n}=0", homology.dimension == 0, witness=n)
    return report


def cyclic_invariants(column: Column, n: int) -> List[Dict[int, Fraction]]:
    """Basis of Ker(1 - lambda) in degree n, as positional vectors"""
    block = SparseMatrix.identity(column.space.dim(n)) - column.ops["lambda"].block(n)
    return kernel_basis(block)


def normalized_basis(T: TotalComplex, column: Column, n: int) -> List[Dict[int, Fraction]]:
    """Basis of the intersection of the kernels of sigma_i, i < k, on each level k"""
    labels = column.space.basis(n)
    positions: Dict[int, List[int]] = {}
    for c, (k, _) in enumerate(labels):
        positions.setdefault(k, []).append(c)
    entries = {}
    row = 0
    for k, cols in positions.items():
        p = n - k
        for i in range(k):
            block = T.complex.codegeneracy(k - 1, i).block(p)
            for (r, c), v in block.entries().items():
                entries[(row + r, cols[c])] = v
            row += block.rows
    return kernel_basis(SparseMatrix(row, len(labels), entries))


@dataclass
class NormalizedColumn:
    """The normalized subcomplex of one column and its inclusion into the column"""

    total: TotalComplex
    column: Column
    _bases: Dict[int, List[Dict[int, Fraction]]] = field(default_factory=dict, repr=False)

    def basis(self, n: int) -> List[Dict[int, Fraction]]:
        if n not in self._bases:
            self._bases[n] = normalized_basis(self.total, self.column, n)
        return self._bases[n]

    def dim(self, n: int) -> int:
        return len(self.basis(n))

    def include(self, coefficients: Sequence[Fraction], n: int) -> Dict[int, Fraction]:
        """Positional vector of the column for coordinates in basis(n)"""
        basis = self.basis(n)
        if len(coefficients) != len(basis):
            raise ShapeMismatch(f"expected {len(basis)} coordinates in degree {n}, got {len(coefficients)}")
        return combine(zip(basis, coefficients))

    def cohomology(self, n: int) -> HomologyGroup:
        mixed = self.column.mixed
        return subcomplex_group(f"N({mixed.name})", mixed, n, self.basis, self.column.certified(n))


def normalized_subcomplex(T: TotalComplex) -> List[NormalizedColumn]:
    """One normalized subcomplex per column of T"""
    return [NormalizedColumn(T, column) for column in T.columns()]


def subcomplex_group(
    name: str, mixed: MixedComplex, n: int, basis: Callable[[int], List[Dict[int, Fraction]]], certified: bool
) -> HomologyGroup:
    """H^n of the b-closed subcomplex spanned by basis(n) in each degree"""
    here = basis(n)
    d = mixed.b.block(n)
    images = SparseMatrix.from_columns(mixed.space.dim(n + 1), [d.apply(v) for v in here])
    cycles = [combine((here[j], c) for j, c in z.items()) for z in kernel_basis(images)]
    before = basis(n - 1)
    d_prev = mixed.b.block(n - 1)
    boundaries = [d_prev.apply(v) for v in before]
    homology = Homology(cycles, boundaries, preimages=before)
    logger.debug(f"{name}^{n}: dimension {homology.dimension}")
    return HomologyGroup(name, n, mixed.space.basis(n), homology, certified, mixed.space.basis(n - 1))


def hc_lambda(column: Column, n: int) -> HomologyGroup:
    """HC_lambda^n: homology of the cyclic invariants under b"""
    cache = column.groups
    if ("HC_lambda", n) not in cache:
        cache[("HC_lambda", n)] = subcomplex_group(
            f"HC_lambda({column.mixed.name})",
            column.mixed,
            n,
            lambda m: cyclic_invariants(column, m),
            column.certified(n),
        )
    return cache[("HC_lambda", n)]


def normalized_report(T: TotalComplex, column: Column) -> Report:
    """Closure of the normalized subcomplex and the quasi-isomorphism of its
    inclusion; for cocyclic totals also B = Ns and s.lambda = 0 on it."""
    report = Report(f"normalized subcomplex of {column.mixed.name}")
    o = column.ops
    space = column.space
    mixed = column.mixed
    normalized = NormalizedColumn(T, column)
    cyclic = "B" in o
    for n in space.degrees():
        here = normalized.basis(n)
        closures = [("b", o["b"], 1)] + ([("B", o["B"], -1)] if cyclic else [])
        for name, op, shift in closures:
            target = normalized.basis(n + shift)
            try:
                restrict_map(op.block(n), here, target)
                report.add(f"{name} preserves normalized@{n}", True)
            except ShapeMismatch:
                report.add(f"{name} preserves normalized@{n}", False, witness=n)
        if cyclic:
            Ns = o["N"].block(n - 1) @ o["s"].block(n)
            report.add(
                f"B=Ns on normalized@{n}", all(o["B"].block(n).apply(v) == Ns.apply(v) for v in here), witness=n
            )
            s_lam = o["s"].block(n) @ o["lambda"].block(n)
            report.add(f"s.lambda=0 on normalized@{n}", all(not s_lam.apply(v) for v in here), witness=n)
        if not column.certified(n):
            report.skip(f"inclusion quasi-iso@{n}", "uncertified")
            continue
        normal = normalized.cohomology(n)
        full = mixed.cohomology(n)
        matrix = induced_matrix(normal, full, lambda v: v)
        ok = normal.dimension == full.dimension == rank(matrix)
        report.add(f"inclusion quasi-iso@{n}", ok, f"dims {normal.dimension}->{full.dimension}", witness=n)
    return report


def i_lambda_comparison(T: TotalMixed, degrees: Sequence[int]) -> Report:
    """I_lambda: HC_lambda -> NEG, x -> x u^0, is an isomorphism degreewise"""
    report = Report(f"HC_lambda versus negative cyclic homology of {T.name}")
    for column in T.columns():
        negative = column.mixed.assembly(Theory.NEGATIVE)
        for n in degrees:
            if n not in column.space.degrees():
                continue
            source, target = hc_lambda(column, n), negative.homology(n)
            name = f"{column.mixed.name}/I_lambda@{n}"
            if not (source.certified and target.certified):
                report.skip(name, "uncertified")
                continue
            matrix = induced_matrix(source, target, _include_at_zero)
            ok = source.dimension == target.dimension == rank(matrix)
            report.add(name, ok, f"dims {source.dimension}->{target.dimension}", witness=n)
    return report


def check_norm_on_invariants(T: TotalMixed, column: Column, vector: Dict, n: int):
    """N acts as (k + 1) on level k of a cyclic invariant"""
    normed = column.mixed.space.to_positions(n, T.norm(vector, n))
    expected = column.mixed.space.to_positions(
        n, {(k, label): (k + 1) * v for (k, label), v in vector.items()}
    )
    if normed != expected:
        logger.error(f"N is not (k + 1) on the invariants of {column.mixed.name} at degree {n}")
        raise NNotInvertible(f"N restricted to cyclic invariants is not invertible at degree {n}")


def _solver(column: Column, name: str, n: int, block: Callable[[], SparseMatrix]) -> EchelonBasis:
    """Echelon form of the columns of a block of degree n, kept on the column"""
    if (name, n) not in column.solvers:
        matrix = block()
        basis = EchelonBasis()
        for j in range(matrix.cols):
            basis.add(matrix.column(j), j)
        column.solvers[(name, n)] = basis
    return column.solvers[(name, n)]


def S_lambda(T: TotalMixed, column: Column, vector: Dict, n: int) -> Dict:
    """Connes' periodicity on a cyclic cycle x of degree n: [b(y)] of degree n + 2
    where (1 - lambda) y = b'(N^{-1} x)."""
    check_norm_on_invariants(T, column, vector, n)
    shrunk = {(k, label): v / (k + 1) for (k, label), v in vector.items()}
    target = T.b_prime(shrunk, n)
    space = column.space
    basis = _solver(
        column,
        "1-lambda",
        n + 1,
        lambda: SparseMatrix.identity(space.dim(n + 1)) - column.ops["lambda"].block(n + 1),
    )
    solution = basis.solve(space.to_positions(n + 1, target))
    if solution is None:
        logger.error(f"b'(N^-1 x) leaves the image of 1 - lambda at degree {n + 1}")
        raise NNotInvertible(f"cannot invert N on cyclic invariants at degree {n}")
    y = space.from_positions(n + 1, solution)
    return T.b(y, n + 1)


def _connecting(T: TotalMixed, column: Column, vector: Dict, n: int) -> Dict:
    space = column.space
    target = space.to_positions(n, T.one_minus_lam(vector, n))
    if not target:
        return {}
    basis = _solver(column, "b'", n - 1, lambda: column.ops["b'"].block(n - 1))
    solution = basis.solve(target)
    if solution is None:
        logger.error(f"(1 - lambda) x is not a b' boundary in {column.mixed.name} at degree {n}")
        raise HypothesisFailed(f"b' is not acyclic at degree {n} of {column.mixed.name}", witness=n)
    return T.norm(space.from_positions(n - 1, solution), n - 1)


def _by_column(T: TotalComplex, vector: Dict, n: int) -> List[Tuple[Column, Dict]]:
    if not T.split:
        return [(T.columns()[0], vector)] if vector else []
    parts: Dict[int, Dict] = {}
    for (k, label), v in vector.items():
        parts.setdefault(n - k, {})[(k, label)] = v
    return [(T.column_at(p), part) for p, part in sorted(parts.items())]


def B_lambda(T: TotalMixed, vector: Dict, n: int) -> Dict:
    """Connecting map H^n -> HC_lambda^(n-1) of 0 -> C_lambda -> C -> C/C_lambda -> 0.

    C/C_lambda is identified with Ker N = Im(1 - lambda) under b', which is
    acyclic: for a b-cycle x, (1 - lambda) x = b'(y) for some y found by
    elimination, and N y is a cyclic cycle. Another choice of y changes N y
    by a boundary of C_lambda; y = s(1 - lambda) x gives B x.
    """
    result: Dict = {}
    for column, part in _by_column(T, vector, n):
        add_to(result, _connecting(T, column, part, n))
    return result


def connes_les_report(T: TotalMixed, degrees: Sequence[int]) -> Report:
    """HC_lambda^n -> H^n -> HC_lambda^{n-1} -> HC_lambda^{n+1} -> H^{n+1}, and
    its identification with NEG^{n-2} -> NEG^n -> H^n -> NEG^{n-1}."""
    report = Report(f"Connes sequence of {T.name}", meta={"max_level": T.L})
    degrees = list(degrees)
    if not degrees:
        return report
    for column in T.columns():
        M = column.mixed
        nodes, maps = [], []
        for n in range(degrees[0] - 1, degrees[-1] + 1):
            nodes += [(f"HC^{n}", hc_lambda(column, n)), (f"H^{n}", M.cohomology(n)), (f"HC^{n - 1}", hc_lambda(column, n - 1))]
            maps += [
                ("i", dict),
                ("B_lambda", lambda v, n=n: B_lambda(T, v, n)),
                ("S_lambda", lambda v, n=n, column=column: S_lambda(T, column, v, n - 1)),
            ]
        nodes.append((f"HC^{degrees[-1] + 1}", hc_lambda(column, degrees[-1] + 1)))
        report.merge(exactness_report("exactness", nodes, maps), M.name)
        report.merge(identification_report(T, column, degrees), M.name)
    return report


def identification_report(T: TotalMixed, column: Column, degrees: Sequence[int]) -> Report:
    """The three squares identifying the Connes sequence with NEG^{n-2} -> NEG^n -> H^n -> NEG^{n-1}.

    Classes are pushed through each side separately: p0 is applied to the
    basis representative of the class of I(x) in NEG, B_lambda is the
    connecting map and is compared with B both in HC_lambda and after I.
    """
    report = Report("identification with the Gysin sequence")
    M = column.mixed
    negative = M.assembly(Theory.NEGATIVE)
    for n in degrees:
        hc, h, neg = hc_lambda(column, n), M.cohomology(n), negative.homology(n)
        if hc.certified and h.certified and neg.certified:
            ok = True
            for x in hc.representatives:
                coords = neg.classify(_include_at_zero(x))
                z = combine(zip(neg.representatives, coords))
                if h.classify(_component_zero(z)) != h.classify(x):
                    ok = False
                    break
            report.add(f"p0.I=i@{n}", ok, witness=n)
        else:
            report.skip(f"p0.I=i@{n}", "uncertified")

        cyclic_below, below = hc_lambda(column, n - 1), negative.homology(n - 1)
        if h.certified and cyclic_below.certified and below.certified:
            ok_cyclic, ok_negative = True, True
            for c in h.representatives:
                connecting, direct = B_lambda(T, c, n), M.apply_B(c, n)
                difference = add_to(dict(connecting), direct, -1)
                ok_cyclic = ok_cyclic and cyclic_below.is_boundary(difference)
                ok_negative = ok_negative and below.is_boundary(_include_at_zero(difference))
            report.add(f"B_lambda=B in HC_lambda@{n}", ok_cyclic, "modulo boundaries", witness=n)
            report.add(f"I.B_lambda=B@{n}", ok_negative, "modulo boundaries", witness=n)
        else:
            report.skip(f"B_lambda=B in HC_lambda@{n}", "uncertified")
            report.skip(f"I.B_lambda=B@{n}", "uncertified")

        source, above = hc_lambda(column, n - 1), negative.homology(n + 1)
        if source.certified and above.certified and hc_lambda(column, n + 1).certified:
            ok = True
            for x in source.representatives:
                lhs = scaled(_include_at_zero(S_lambda(T, column, x, n - 1)), -1)
                rhs = {(i + 1, k): v for (i, k), v in _include_at_zero(x).items()}
                if not above.is_boundary(add_to(lhs, rhs, -1)):
                    ok = False
                    break
            report.add(f"I.(-S_lambda)=u.I@{n}", ok, "modulo boundaries", witness=n)
        else:
            report.skip(f"I.(-S_lambda)=u.I@{n}", "uncertified")
    return report
