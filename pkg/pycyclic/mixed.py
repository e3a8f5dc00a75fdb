"""Mixed complexes, their cyclic homology theories and exact sequences.

All degrees are cohomological: b raises degree by one, B lowers it by one and
the formal variable u has degree 2. A component c_i u^i of an assembled
cochain of degree n lives in C^{n-2i}; assembled vectors are keyed by
(i, label).
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from loguru import logger

from pycyclic.errors import CompositionNotZero, ParseError, ShapeMismatch, UnboundedAssembly
from pycyclic.linalg import (
    GradedMap,
    GradedSpace,
    Homology,
    SparseMatrix,
    add_to,
    kernel_basis,
    rank,
)
from pycyclic.report import Report


class Theory(Enum):
    NEGATIVE = "negative"
    PERIODIC = "periodic"
    POSITIVE = "positive"


class Grading(Enum):
    COHOMOLOGICAL = "cohomological"
    HOMOLOGICAL = "homological"

    def internal(self, n: int) -> int:
        """Cohomological degree of a user-facing degree (C_* = C^{-*})"""
        return n if self is Grading.COHOMOLOGICAL else -n

    def external(self, n: int) -> int:
        return self.internal(n)

    def window(self, window: Tuple[int, int]) -> Tuple[int, int]:
        a, b = self.internal(window[0]), self.internal(window[1])
        return (min(a, b), max(a, b)) if window[0] <= window[1] else (1, 0)


class HomologyGroup:
    """A homology group whose vectors are keyed by basis labels"""

    def __init__(
        self,
        name: str,
        degree: int,
        labels: Sequence[Hashable],
        homology: Homology,
        certified: bool = True,
        preimage_labels: Optional[Sequence[Hashable]] = None,
        cutoff: Optional[int] = None,
    ):
        self.name = name
        self.degree = degree
        self.labels = list(labels)
        self._index = {label: i for i, label in enumerate(self.labels)}
        self.homology = homology
        self.certified = certified
        self.preimage_labels = list(preimage_labels or [])
        self.cutoff = cutoff

    @property
    def dimension(self) -> int:
        return self.homology.dimension

    @property
    def representatives(self) -> List[Dict]:
        return [self._to_labels(r) for r in self.homology.representatives]

    def _to_labels(self, vector):
        return {self.labels[i]: v for i, v in vector.items()}

    def _to_positions(self, vector: Dict) -> Dict[int, Fraction]:
        positions = {}
        for label, value in vector.items():
            if not value:
                continue
            if label not in self._index:
                raise ShapeMismatch(f"{label!r} is not a basis label of {self.name} in degree {self.degree}")
            positions[self._index[label]] = value
        return positions

    def classify(self, vector: Dict) -> List[Fraction]:
        return self.homology.classify(self._to_positions(vector))

    def is_boundary(self, vector: Dict) -> bool:
        return self.homology.is_boundary(self._to_positions(vector))

    def contains(self, vector: Dict) -> bool:
        return all(label in self._index for label, v in vector.items() if v)

    def lift(self, vector: Dict) -> Optional[Dict]:
        preimage = self.homology.lift(self._to_positions(vector))
        if preimage is None:
            return None
        return {self.preimage_labels[i]: v for i, v in preimage.items()}

    def __repr__(self):
        flag = "" if self.certified else ", uncertified"
        return f"HomologyGroup({self.name}^{self.degree}, dim={self.dimension}{flag})"


def build_group(
    name: str,
    degree: int,
    labels: Sequence[Hashable],
    prev_labels: Sequence[Hashable],
    d_prev: Optional[SparseMatrix],
    d_next: Optional[SparseMatrix],
    certified: bool = True,
    cutoff: Optional[int] = None,
) -> HomologyGroup:
    """Homology at the middle of prev --d_prev--> here --d_next--> next.

    Uncertified groups come from truncated complexes whose top level breaks
    d^2 = 0; they are computed anyway and carry the flag.
    """
    if certified and d_prev is not None and d_next is not None and not (d_next @ d_prev).is_zero():
        logger.error(f"{name}: differential does not square to zero at degree {degree}")
        raise CompositionNotZero(f"{name}: d after d is nonzero at degree {degree}")
    if d_next is not None:
        cycles = kernel_basis(d_next)
    else:
        cycles = [{j: Fraction(1)} for j in range(len(labels))]
    boundaries = [d_prev.column(j) for j in range(d_prev.cols)] if d_prev is not None else []
    homology = Homology(cycles, boundaries)
    logger.debug(f"{name}^{degree}: dimension {homology.dimension} (certified={certified})")
    return HomologyGroup(name, degree, labels, homology, certified, prev_labels, cutoff)


class MixedComplex:
    """(C, b, B) with b of degree +1 and B of degree -1.

    `ceiling` is the highest degree up to which C is known to be complete
    (None for a genuinely bounded complex); `floor` marks a complex that
    continues below its window.
    """

    def __init__(
        self,
        space: GradedSpace,
        b: GradedMap,
        B: GradedMap,
        ceiling: Optional[int] = None,
        floor: Optional[int] = None,
        name: str = "C",
    ):
        if b.shift != 1 or B.shift != -1:
            raise ShapeMismatch(f"b and B must have degrees +1 and -1, got {b.shift} and {B.shift}")
        for m in (b, B):
            if m.source != space or m.target != space:
                raise ShapeMismatch("b and B must be endomorphisms of the mixed complex space")
        self.space = space
        self.b = b
        self.B = B
        self.ceiling = ceiling
        self.floor = floor
        self.name = name
        self._assemblies: Dict = {}
        self._groups: Dict = {}

    def degrees(self) -> range:
        return self.space.degrees()

    def apply_b(self, vector: Dict, n: int) -> Dict:
        return self.b(vector, n) if vector else {}

    def apply_B(self, vector: Dict, n: int) -> Dict:
        return self.B(vector, n) if vector else {}

    def complete_up_to(self, top: int) -> bool:
        return self.ceiling is None or top <= self.ceiling

    def certified(self, n: int) -> bool:
        return self.complete_up_to(n + 1) and (self.floor is None or n - 1 >= self.floor)

    def cohomology(self, n: int) -> HomologyGroup:
        """H^n(C, b)"""
        key = ("H", n, None)
        if key not in self._groups:
            self._groups[key] = build_group(
                f"H({self.name})",
                n,
                self.space.basis(n),
                self.space.basis(n - 1),
                self.b.block(n - 1),
                self.b.block(n),
                self.certified(n),
            )
        return self._groups[key]

    def assembly(self, theory: Theory, cutoff: Optional[int] = None) -> "UComplex":
        key = (theory, cutoff)
        if key not in self._assemblies:
            self._assemblies[key] = UComplex(self, theory, cutoff)
        return self._assemblies[key]

    def group(self, kind: str, n: int, cutoff: Optional[int] = None) -> HomologyGroup:
        if kind == "H":
            return self.cohomology(n)
        return self.assembly(Theory(_KINDS[kind]), cutoff).homology(n)

    def to_text(self) -> str:
        lo, hi = self.space.window
        lines = [f"window {lo} {hi}", f"ceiling {'none' if self.ceiling is None else self.ceiling}"]
        lines.append("dims " + " ".join(str(self.space.dim(n)) for n in self.degrees()))
        for name, m in (("b", self.b), ("B", self.B)):
            for n in self.degrees():
                block = m.block(n)
                if block.is_zero():
                    continue
                lines.append(f"{name} {n}")
                lines.extend(block.to_text().splitlines())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "C") -> "MixedComplex":
        lines = text.splitlines()
        try:
            _, lo, hi = lines[0].split()
            window = (int(lo), int(hi))
            ceiling_text = lines[1].split()[1]
            ceiling = None if ceiling_text == "none" else int(ceiling_text)
            dims = [int(x) for x in lines[2].split()[1:]]
        except (IndexError, ValueError):
            raise ParseError("mixed complex header must be window/ceiling/dims lines", 1, 1)
        if len(dims) != max(0, window[1] - window[0] + 1):
            raise ParseError("dims line does not match the window", 3, 1)
        space = GradedSpace(window, {n: list(range(d)) for n, d in zip(range(window[0], window[1] + 1), dims)})
        blocks: Dict[str, Dict[int, SparseMatrix]] = {"b": {}, "B": {}}
        i = 3
        while i < len(lines):
            head = lines[i].split()
            if not head:
                i += 1
                continue
            if len(head) != 2 or head[0] not in blocks or not head[1].lstrip("-").isdigit():
                raise ParseError(f"expected `b n` or `B n`, got {lines[i]!r}", i + 1, 1)
            j = i + 1
            while j < len(lines) and not (lines[j].split()[:1] in (["b"], ["B"])):
                j += 1
            blocks[head[0]][int(head[1])] = SparseMatrix.from_text("\n".join(lines[i + 1 : j]), i + 2)
            i = j
        b = GradedMap(space, space, 1, blocks["b"])
        B = GradedMap(space, space, -1, blocks["B"])
        return cls(space, b, B, ceiling=ceiling, name=name)


_KINDS = {"NEG": "negative", "PER": "periodic", "POS": "positive"}
_SHORT = {Theory.NEGATIVE: "NEG", Theory.PERIODIC: "PER", Theory.POSITIVE: "POS"}


def validate_mixed(M: MixedComplex) -> Report:
    report = Report(f"mixed complex {M.name}")
    for n in M.degrees():
        if not M.complete_up_to(n + 1):
            report.skip(f"axioms@{n}", "above the truncation ceiling")
            continue
        for name, lhs in (
            ("b^2=0", M.b.block(n + 1) @ M.b.block(n)),
            ("B^2=0", M.B.block(n - 1) @ M.B.block(n)),
            ("bB+Bb=0", M.b.block(n - 1) @ M.B.block(n) + M.B.block(n + 1) @ M.b.block(n)),
        ):
            witness = _first_nonzero_column(lhs, M.space.basis(n))
            report.add(f"{name}@{n}", witness is None, witness=witness)
    return report


def _first_nonzero_column(matrix: SparseMatrix, labels):
    for c in range(matrix.cols):
        if matrix.column(c):
            return labels[c]
    return None


class UComplex:
    """The b + uB assembly of a mixed complex for one theory.

    POSITIVE keeps powers -cutoff..0, PERIODIC keeps powers >= -cutoff and
    NEGATIVE keeps powers >= 0. Components u^i c with u^i outside the
    assembly are dropped by the differential.
    """

    def __init__(self, mixed: MixedComplex, theory: Theory, cutoff: Optional[int] = None):
        self.mixed = mixed
        self.theory = theory
        if theory in (Theory.NEGATIVE, Theory.PERIODIC) and mixed.floor is not None:
            raise UnboundedAssembly(f"{theory.value} assembly of {mixed.name} is infinite below its window")
        if theory in (Theory.POSITIVE, Theory.PERIODIC) and cutoff is None and mixed.ceiling is not None:
            raise UnboundedAssembly(
                f"{theory.value} assembly of the truncated complex {mixed.name} needs a cutoff"
            )
        if theory is Theory.NEGATIVE:
            cutoff = None
        self.cutoff = cutoff
        self._labels: Dict[int, List[Tuple[int, Hashable]]] = {}
        self._offsets: Dict[int, Dict[int, int]] = {}
        self._differentials: Dict[int, SparseMatrix] = {}
        self._groups: Dict[int, HomologyGroup] = {}

    @property
    def name(self) -> str:
        short = _SHORT[self.theory]
        if self.cutoff is not None and self.theory is not Theory.NEGATIVE:
            return f"{short}_{self.cutoff}({self.mixed.name})"
        return f"{short}({self.mixed.name})"

    def powers(self, n: int) -> List[int]:
        lo, hi = self.mixed.space.window
        top = (n - lo) // 2  # n - 2i >= lo
        bottom = -((hi - n) // 2)  # n - 2i <= hi
        if self.theory is Theory.NEGATIVE:
            bottom = max(bottom, 0)
        else:
            if self.cutoff is not None:
                bottom = max(bottom, -self.cutoff)
            if self.theory is Theory.POSITIVE:
                top = min(top, 0)
        return [i for i in range(bottom, top + 1) if self.mixed.space.dim(n - 2 * i)]

    def labels(self, n: int) -> List[Tuple[int, Hashable]]:
        if n not in self._labels:
            labels, offsets = [], {}
            for i in self.powers(n):
                offsets[i] = len(labels)
                labels.extend((i, label) for label in self.mixed.space.basis(n - 2 * i))
            self._labels[n] = labels
            self._offsets[n] = offsets
        return self._labels[n]

    def dim(self, n: int) -> int:
        return len(self.labels(n))

    def differential(self, n: int) -> SparseMatrix:
        """b + uB from degree n to n + 1"""
        if n not in self._differentials:
            source = self.labels(n)
            target = self.labels(n + 1)
            offsets_in, offsets_out = self._offsets[n], self._offsets[n + 1]
            entries = {}
            for i, start in offsets_in.items():
                c = n - 2 * i
                if i in offsets_out:
                    for (r, col), v in self.mixed.b.block(c).entries().items():
                        entries[(offsets_out[i] + r, start + col)] = v
                if i + 1 in offsets_out:
                    for (r, col), v in self.mixed.B.block(c).entries().items():
                        entries[(offsets_out[i + 1] + r, start + col)] = v
            self._differentials[n] = SparseMatrix(len(target), len(source), entries)
        return self._differentials[n]

    def top_component(self, n: int) -> int:
        """Largest C-degree involved in the homology at n"""
        if self.theory is Theory.NEGATIVE:
            return n + 1
        lo, hi = self.mixed.space.window
        if self.cutoff is None:
            return hi
        return n + 1 + 2 * self.cutoff

    def certified(self, n: int) -> bool:
        return self.mixed.complete_up_to(self.top_component(n))

    def apply(self, vector: Dict, n: int) -> Dict:
        """(b + uB) on an assembled vector of degree n"""
        result: Dict = {}
        allowed = set(self.powers(n + 1))
        by_power: Dict[int, Dict] = {}
        for (i, label), v in vector.items():
            by_power.setdefault(i, {})[label] = v
        for i, part in by_power.items():
            c = n - 2 * i
            if i in allowed:
                add_to(result, {(i, k): v for k, v in self.mixed.apply_b(part, c).items()})
            if i + 1 in allowed:
                add_to(result, {(i + 1, k): v for k, v in self.mixed.apply_B(part, c).items()})
        return result

    def homology(self, n: int) -> HomologyGroup:
        if n not in self._groups:
            self._groups[n] = build_group(
                self.name,
                n,
                self.labels(n),
                self.labels(n - 1),
                self.differential(n - 1),
                self.differential(n),
                self.certified(n),
                self.cutoff,
            )
        return self._groups[n]


@dataclass
class HcResult:
    theory: Theory
    degree: int
    cutoff: Optional[int]
    group: HomologyGroup
    next_dimension: Optional[int] = None

    @property
    def dimension(self) -> int:
        return self.group.dimension

    @property
    def representatives(self) -> List[Dict]:
        return self.group.representatives

    @property
    def certified(self) -> bool:
        return self.group.certified

    @property
    def stable(self) -> bool:
        return self.next_dimension is None or self.next_dimension == self.dimension


def natural_cutoff(M: MixedComplex, n: int) -> int:
    return max(0, (M.space.window[1] - n) // 2)


def compute_hc(M: MixedComplex, theory: Theory, n: int, cutoff: Optional[int] = None) -> HcResult:
    """HC of the given theory at degree n, also evaluated at cutoff + 1"""
    if theory is Theory.NEGATIVE:
        return HcResult(theory, n, None, M.assembly(theory).homology(n))
    if cutoff is None:
        if M.ceiling is not None:
            raise UnboundedAssembly(f"{theory.value} homology of a truncated complex needs a cutoff")
        cutoff = natural_cutoff(M, n)
    group = M.assembly(theory, cutoff).homology(n)
    following = M.assembly(theory, cutoff + 1).homology(n)
    next_dimension = following.dimension if following.certified else None
    if next_dimension is not None and next_dimension != group.dimension:
        logger.warning(f"{theory.value} homology at degree {n} unstable between cutoffs {cutoff} and {cutoff + 1}")
    return HcResult(theory, n, cutoff, group, next_dimension)


# chain-level maps between assembled complexes, all on label-keyed vectors


def _include_at_zero(vector: Dict) -> Dict:
    return {(0, k): v for k, v in vector.items()}


def _component_zero(vector: Dict) -> Dict:
    return {k: v for (i, k), v in vector.items() if i == 0}


def _times_u(vector: Dict) -> Dict:
    return {(i + 1, k): v for (i, k), v in vector.items()}


def _u_times_negative_part(vector: Dict) -> Dict:
    return {(i + 1, k): v for (i, k), v in vector.items() if i <= -1}


def _identity(vector: Dict) -> Dict:
    return dict(vector)


@dataclass
class Node:
    kind: str
    degree: int
    cutoff: Optional[int] = None

    def __str__(self):
        cut = f"_{self.cutoff}" if self.cutoff is not None and self.kind in ("PER", "POS") else ""
        return f"{self.kind}{cut}^{self.degree}"


SequenceMap = Tuple[str, Callable[[MixedComplex, Dict], Dict]]


def _B_zero(n: int, wrap: bool):
    """B on the u^0 component of a degree n vector, as a plain or u^0 vector"""

    def apply(M: MixedComplex, vector: Dict) -> Dict:
        image = M.apply_B(_component_zero(vector), n)
        return _include_at_zero(image) if wrap else image

    return apply


def _B_plain(n: int):
    def apply(M: MixedComplex, vector: Dict) -> Dict:
        return _include_at_zero(M.apply_B(vector, n))

    return apply


def _lifted(f):
    return lambda M, vector: f(vector)


def sequence(which: str, degrees: Sequence[int], cutoff: int) -> Tuple[List[Node], List[SequenceMap]]:
    """Nodes and chain maps of one long exact sequence over the degrees."""
    if cutoff < 1:
        raise ValueError("long exact sequences need a cutoff of at least 1")
    degrees = list(degrees)
    nodes: List[Node] = []
    maps: List[SequenceMap] = []
    if not degrees:
        return nodes, maps
    for n in range(degrees[0] - 1, degrees[-1] + 1):
        if which == "tautological":
            nodes += [Node("NEG", n), Node("PER", n, cutoff), Node("POS", n + 2, cutoff - 1)]
            maps += [
                ("i", _lifted(_identity)),
                ("u.p", _lifted(_u_times_negative_part)),
                ("B0", _B_zero(n + 2, wrap=True)),
            ]
        elif which == "gysin-a":
            nodes += [Node("H", n), Node("POS", n, cutoff), Node("POS", n + 2, cutoff - 1)]
            maps += [
                ("i", _lifted(_include_at_zero)),
                ("u.p", _lifted(_u_times_negative_part)),
                ("B0", _B_zero(n + 2, wrap=False)),
            ]
        elif which == "gysin-b":
            nodes += [Node("NEG", n - 2), Node("NEG", n), Node("H", n)]
            maps += [
                ("i+.u", _lifted(_times_u)),
                ("p0", _lifted(_component_zero)),
                ("B", _B_plain(n)),
            ]
        else:
            raise ValueError(f"unknown sequence {which}")
    last = degrees[-1] + 1
    nodes.append({"tautological": Node("NEG", last), "gysin-a": Node("H", last), "gysin-b": Node("NEG", last - 2)}[which])
    return nodes, maps


def induced_matrix(
    source: HomologyGroup, target: HomologyGroup, f: Callable[[Dict], Dict]
) -> SparseMatrix:
    columns = []
    for representative in source.representatives:
        coords = target.classify(f(representative))
        columns.append({r: v for r, v in enumerate(coords) if v})
    return SparseMatrix.from_columns(target.dimension, columns)


def exactness_report(
    title: str,
    nodes: Sequence[Tuple[str, HomologyGroup]],
    maps: Sequence[Tuple[str, Callable[[Dict], Dict]]],
) -> Report:
    """Rank certificate of exactness at every interior node whose
    neighbourhood is certified. maps[k] goes from nodes[k] to nodes[k + 1]."""
    report = Report(title)
    groups = [group for _, group in nodes]
    induced: List[Optional[SparseMatrix]] = []
    for k, (name, f) in enumerate(maps):
        source, target = groups[k], groups[k + 1]
        if not (source.certified and target.certified):
            induced.append(None)
            continue
        try:
            induced.append(induced_matrix(source, target, f))
        except ValueError:
            report.add(f"{name}:{nodes[k][0]}->{nodes[k + 1][0]} maps cycles to cycles", False)
            induced.append(None)
    for k in range(1, len(nodes) - 1):
        incoming, outgoing = induced[k - 1], induced[k]
        node = nodes[k][0]
        if incoming is None or outgoing is None:
            report.skip(f"exact@{node}", "uncertified neighbourhood")
            continue
        composite = outgoing @ incoming
        report.add(f"composite-zero@{node}", composite.is_zero(), witness=str(node))
        total = rank(incoming) + rank(outgoing)
        report.add(
            f"exact@{node}",
            total == groups[k].dimension,
            f"rank in + rank out = {total}, dim = {groups[k].dimension}",
            witness=str(node),
        )
    return report


def sequence_report(which: str, M: MixedComplex, degrees: Sequence[int], cutoff: int = 1) -> Report:
    nodes, maps = sequence(which, degrees, cutoff)
    groups = [(str(node), M.group(node.kind, node.degree, node.cutoff)) for node in nodes]
    bound = [(name, lambda v, f=f: f(M, v)) for name, f in maps]
    return exactness_report(f"{which} sequence of {M.name}", groups, bound)


def tautological_les_report(M: MixedComplex, degrees: Sequence[int], cutoff: int = 1) -> Report:
    return sequence_report("tautological", M, degrees, cutoff)


def _class_representative(group: HomologyGroup, vector: Dict) -> Dict:
    """The combination of basis representatives in the class of a cycle"""
    result: Dict = {}
    for representative, c in zip(group.representatives, group.classify(vector)):
        add_to(result, representative, c)
    return result


def diagram_report(M: MixedComplex, degrees: Sequence[int], cutoff: int = 1) -> Report:
    """The three squares relating the two Gysin-Connes sequences.

    The vertical maps are B0: POS -> NEG and the identity on H. Where one
    route passes through a homology group, the class is replaced by its basis
    representative before the next map, and the two routes are compared
    modulo boundaries.
    """
    report = Report(f"Gysin diagram of {M.name}")
    for n in degrees:
        h = M.cohomology(n)
        pos_top = M.group("POS", n, cutoff)
        pos_next = M.group("POS", n + 2, cutoff - 1)
        neg_below = M.group("NEG", n - 1)
        neg_above = M.group("NEG", n + 1)
        h_next = M.cohomology(n + 1)

        if h.certified and neg_below.certified and pos_top.certified:
            ok = True
            for c in h.representatives:
                through_pos = _class_representative(pos_top, _include_at_zero(c))
                lhs = _include_at_zero(M.apply_B(_component_zero(through_pos), n))
                rhs = _include_at_zero(M.apply_B(c, n))
                if not neg_below.is_boundary(add_to(lhs, rhs, -1)):
                    ok = False
                    break
            report.add(f"B0.i=B@{n}", ok, "modulo boundaries", witness=n)
        else:
            report.skip(f"B0.i=B@{n}", "uncertified")

        if pos_top.certified and pos_next.certified and neg_below.certified and neg_above.certified:
            ok = True
            for c in pos_top.representatives:
                shifted = _class_representative(pos_next, _u_times_negative_part(c))
                lhs = _include_at_zero(M.apply_B(_component_zero(shifted), n + 2))
                below = _class_representative(neg_below, _include_at_zero(M.apply_B(_component_zero(c), n)))
                difference = add_to(lhs, _times_u(below), -1)
                if not neg_above.is_boundary(difference):
                    ok = False
                    break
            report.add(f"B0.u.p=i+.u.B0@{n}", ok, "modulo boundaries", witness=n)
        else:
            report.skip(f"B0.u.p=i+.u.B0@{n}", "uncertified")

        if pos_next.certified and h_next.certified and neg_above.certified:
            ok = True
            for c in pos_next.representatives:
                through_neg = _class_representative(neg_above, _include_at_zero(M.apply_B(_component_zero(c), n + 2)))
                difference = add_to(_component_zero(through_neg), M.apply_B(_component_zero(c), n + 2), -1)
                if not h_next.is_boundary(difference):
                    ok = False
                    break
            report.add(f"p0.B0=B0@{n}", ok, "modulo boundaries", witness=n)
        else:
            report.skip(f"p0.B0=B0@{n}", "uncertified")
    return report


def gysin_les_reports(M: MixedComplex, degrees: Sequence[int], cutoff: int = 1) -> Report:
    report = Report(f"Gysin-Connes sequences of {M.name}")
    for which in ("gysin-a", "gysin-b"):
        report.merge(sequence_report(which, M, degrees, cutoff), which)
    report.merge(diagram_report(M, degrees, cutoff), "diagram")
    return report


class InfMorphism:
    """f = sum_i f_i u^i with f_i of degree -2i"""

    def __init__(self, source: MixedComplex, target: MixedComplex, components: Sequence[GradedMap]):
        if not components:
            raise ShapeMismatch("an infinity-morphism needs at least the component f_0")
        for i, f in enumerate(components):
            if f.shift != -2 * i:
                raise ShapeMismatch(f"component f_{i} has degree {f.shift}, expected {-2 * i}")
            if f.source != source.space or f.target != target.space:
                raise ShapeMismatch(f"component f_{i} does not map {source.name} to {target.name}")
        self.source = source
        self.target = target
        self.components = list(components)

    @classmethod
    def identity(cls, M: MixedComplex) -> "InfMorphism":
        return cls(M, M, [GradedMap.identity(M.space)])

    def component(self, i: int) -> Optional[GradedMap]:
        return self.components[i] if 0 <= i < len(self.components) else None

    def _block(self, i: int, n: int) -> SparseMatrix:
        f = self.component(i)
        if f is None:
            return SparseMatrix.zero(self.target.space.dim(n - 2 * i), self.source.space.dim(n))
        return f.block(n)

    def apply(self, theory: Optional[Theory], vector: Dict, n: int, cutoff: Optional[int] = None) -> Dict:
        """Induced map on an assembled vector of degree n (or on C^n when theory is None)"""
        if theory is None:
            return self.components[0](vector, n)
        allowed = set(self.target.assembly(theory, cutoff).powers(n))
        result: Dict = {}
        by_power: Dict[int, Dict] = {}
        for (j, label), v in vector.items():
            by_power.setdefault(j, {})[label] = v
        for j, part in by_power.items():
            for i, f in enumerate(self.components):
                if i + j not in allowed:
                    continue
                image = f(part, n - 2 * j)
                add_to(result, {(i + j, k): v for k, v in image.items()})
        return result


def validate_inf_morphism(f: InfMorphism) -> Report:
    report = Report(f"infinity-morphism {f.source.name} -> {f.target.name}")
    b, B = f.source.b, f.source.B
    bb, BB = f.target.b, f.target.B
    for n in f.source.degrees():
        lhs = bb.block(n) @ f._block(0, n)
        rhs = f._block(0, n + 1) @ b.block(n)
        report.add(f"b''f0=f0b@{n}", lhs == rhs, witness=n)
        for i in range(1, len(f.components) + 1):
            lhs = BB.block(n - 2 * (i - 1)) @ f._block(i - 1, n) + bb.block(n - 2 * i) @ f._block(i, n)
            rhs = f._block(i - 1, n - 1) @ B.block(n) + f._block(i, n + 1) @ b.block(n)
            report.add(f"relation{i}@{n}", lhs == rhs, witness=(i, n))
    return report


class InfHomotopy:
    def __init__(self, f: InfMorphism, g: InfMorphism, components: Sequence[GradedMap]):
        if f.source is not g.source or f.target is not g.target:
            raise ShapeMismatch("homotopic morphisms must share source and target")
        for i, h in enumerate(components):
            if h.shift != -2 * i - 1:
                raise ShapeMismatch(f"component h_{i} has degree {h.shift}, expected {-2 * i - 1}")
            if h.source != f.source.space or h.target != f.target.space:
                raise ShapeMismatch(f"component h_{i} has the wrong spaces")
        self.f = f
        self.g = g
        self.components = list(components)

    def _block(self, i: int, n: int) -> SparseMatrix:
        if 0 <= i < len(self.components):
            return self.components[i].block(n)
        return SparseMatrix.zero(self.f.target.space.dim(n - 2 * i - 1), self.f.source.space.dim(n))


def validate_inf_homotopy(h: InfHomotopy) -> Report:
    f, g = h.f, h.g
    report = Report(f"infinity-homotopy on {f.source.name} -> {f.target.name}")
    b, B = f.source.b, f.source.B
    bb, BB = f.target.b, f.target.B
    top = max(len(f.components), len(g.components), len(h.components) + 1)
    for n in f.source.degrees():
        for i in range(top):
            lhs = f._block(i, n) - g._block(i, n)
            rhs = bb.block(n - 2 * i - 1) @ h._block(i, n) + h._block(i, n + 1) @ b.block(n)
            if i > 0:
                rhs = rhs + BB.block(n - 2 * i + 1) @ h._block(i - 1, n) + h._block(i - 1, n - 1) @ B.block(n)
            report.add(f"relation{i}@{n}", lhs == rhs, witness=(i, n))
    return report


def induced_hc_map(
    f: InfMorphism, theory: Optional[Theory], n: int, cutoff: Optional[int] = None
) -> SparseMatrix:
    """Matrix of the induced map on HC^n of the theory (H(b) when theory is None)"""
    if theory is None:
        source, target = f.source.cohomology(n), f.target.cohomology(n)
    else:
        source = f.source.assembly(theory, cutoff).homology(n)
        target = f.target.assembly(theory, cutoff).homology(n)
    return induced_matrix(source, target, lambda v: f.apply(theory, v, n, cutoff))


def quasi_iso_check(f: InfMorphism, degrees: Sequence[int], cutoff: int = 1) -> Report:
    report = Report(f"quasi-isomorphism {f.source.name} -> {f.target.name}")
    theories = [(None, "H"), (Theory.NEGATIVE, "NEG"), (Theory.PERIODIC, "PER"), (Theory.POSITIVE, "POS")]
    for n in degrees:
        for theory, name in theories:
            kappa = None if theory in (None, Theory.NEGATIVE) else cutoff
            if theory is None:
                source, target = f.source.cohomology(n), f.target.cohomology(n)
            else:
                source = f.source.assembly(theory, kappa).homology(n)
                target = f.target.assembly(theory, kappa).homology(n)
            if not (source.certified and target.certified):
                report.skip(f"{name}@{n}", "uncertified")
                continue
            matrix = induced_hc_map(f, theory, n, kappa)
            ok = source.dimension == target.dimension == rank(matrix)
            report.add(f"{name}@{n}", ok, f"dims {source.dimension}->{target.dimension}", witness=n)
    return report


def naturality_report(f: InfMorphism, degrees: Sequence[int], cutoff: int = 1) -> Report:
    """Induced maps commute with every map of the three long exact sequences"""
    report = Report(f"naturality of {f.source.name} -> {f.target.name}")
    for which in ("tautological", "gysin-a", "gysin-b"):
        nodes, maps = sequence(which, degrees, cutoff)
        for k, (name, phi) in enumerate(maps):
            start, end = nodes[k], nodes[k + 1]
            source = f.source.group(start.kind, start.degree, start.cutoff)
            target = f.target.group(end.kind, end.degree, end.cutoff)
            if not (source.certified and target.certified):
                report.skip(f"{which}/{name}@{start}", "uncertified")
                continue
            ok = True
            for r in source.representatives:
                lhs = f.apply(_theory_of(end.kind), phi(f.source, r), end.degree, end.cutoff)
                rhs = phi(f.target, f.apply(_theory_of(start.kind), r, start.degree, start.cutoff))
                if not target.is_boundary(add_to(dict(lhs), rhs, -1)):
                    ok = False
                    break
            report.add(f"{which}/{name}@{start}", ok, witness=str(start))
    return report


def _theory_of(kind: str) -> Optional[Theory]:
    return None if kind == "H" else Theory(_KINDS[kind])
