"""Labeled planar trees with tails, roots and edge orientations.

A tree on vertices 1..n stores, per vertex, the cyclic order of its items: a
neighbouring vertex label, a tail (TAIL) or the root (ROOT, a distinguished
tail). Cyclic orders are kept at their lexicographically smallest rotation.
Nonrooted trees may carry one arrow per edge; rooted trees always carry the
arrows pointing towards the root. Reversing an arrow of a nonrooted tree
negates it, so canonical forms orient every edge from the smaller to the
larger label and return the sign of doing so.
"""

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from pycyclic.errors import CapExceeded, DomainMismatch, ParseError, ShapeMismatch
from pycyclic.linalg import add_to

TAIL = 0
ROOT = -1

Rotation = Tuple[int, ...]


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def _min_rotation(items: Sequence[int]) -> Rotation:
    items = tuple(items)
    if not items:
        return ()
    return min(items[i:] + items[:i] for i in range(len(items)))


@dataclass(frozen=True)
class PlanarTree:
    rotations: Tuple[Rotation, ...]
    arrows: Tuple[Tuple[int, int], ...] = ()

    @property
    def n(self) -> int:
        return len(self.rotations)

    def rotation(self, v: int) -> Rotation:
        return self.rotations[v - 1]

    def neighbours(self, v: int) -> List[int]:
        return [x for x in self.rotation(v) if x > 0]

    def degree(self, v: int) -> int:
        return len(self.neighbours(v))

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((u, x) for u in range(1, self.n + 1) for x in self.neighbours(u) if u < x)

    @property
    def rooted(self) -> bool:
        return self.root_vertex is not None

    @property
    def root_vertex(self) -> Optional[int]:
        for v, rotation in enumerate(self.rotations, start=1):
            if ROOT in rotation:
                return v
        return None

    @property
    def oriented(self) -> bool:
        return bool(self.arrows)

    def tails(self) -> int:
        return sum(rotation.count(TAIL) for rotation in self.rotations)

    def arity(self, v: int) -> int:
        """Number of inputs of the operation placed at v"""
        return len(self.rotation(v)) - 1

    def key(self) -> Tuple:
        return (self.rotations, self.arrows)

    def __str__(self):
        return format_tree(self)


TreeCombo = Dict[PlanarTree, Fraction]


def _check(rotations: Sequence[Rotation]) -> None:
    n = len(rotations)
    if n == 0:
        raise ShapeMismatch("a tree needs at least one vertex")
    edges = set()
    roots = 0
    for v, rotation in enumerate(rotations, start=1):
        seen = set()
        for x in rotation:
            if x == ROOT:
                roots += 1
            elif x != TAIL:
                if not 1 <= x <= n or x == v or x in seen:
                    raise ShapeMismatch(f"vertex {v} has a bad neighbour {x}")
                if v not in rotations[x - 1]:
                    raise ShapeMismatch(f"edge {v}-{x} is not symmetric")
                seen.add(x)
                edges.add((min(v, x), max(v, x)))
    if roots > 1:
        raise ShapeMismatch("a tree has at most one root")
    if len(edges) != n - 1:
        raise ShapeMismatch(f"{n} vertices need {n - 1} edges, found {len(edges)}")
    reached = {1}
    stack = [1]
    while stack:
        v = stack.pop()
        for x in rotations[v - 1]:
            if x > 0 and x not in reached:
                reached.add(x)
                stack.append(x)
    if len(reached) != n:
        raise ShapeMismatch("the underlying graph is not connected")


def _towards(rotations: Sequence[Rotation], target: int) -> FrozenSet[Tuple[int, int]]:
    """Arrows of every edge pointing towards vertex `target`"""
    arrows = set()
    stack = [target]
    seen = {target}
    while stack:
        v = stack.pop()
        for x in rotations[v - 1]:
            if x > 0 and x not in seen:
                seen.add(x)
                arrows.add((x, v))
                stack.append(x)
    return frozenset(arrows)


def canonical(rotations: Sequence[Sequence[int]], arrows: Iterable[Tuple[int, int]] = ()) -> Tuple[int, PlanarTree]:
    """The canonical tree and the sign relating it to the given data.

    For a rooted tree the sign counts given arrows that disagree with the
    towards-root orientation; for a nonrooted one it counts arrows pointing
    from a larger to a smaller label.
    """
    rotations = tuple(_min_rotation(r) for r in rotations)
    _check(rotations)
    given = set(arrows)
    root_vertex = next((v for v, r in enumerate(rotations, start=1) if ROOT in r), None)
    if root_vertex is not None:
        natural = _towards(rotations, root_vertex)
        flipped = sum(1 for arrow in given if arrow not in natural)
        return _sign(flipped), PlanarTree(rotations, tuple(sorted(natural)))
    if not given:
        return 1, PlanarTree(rotations)
    edges = {(min(u, v), max(u, v)) for u, v in given}
    if len(edges) != len(given) or len(edges) != len(rotations) - 1:
        raise ShapeMismatch("an oriented tree needs exactly one arrow per edge")
    flipped = sum(1 for u, v in given if u > v)
    return _sign(flipped), PlanarTree(rotations, tuple(sorted(edges)))


def _add(combo: TreeCombo, sign: int, tree: PlanarTree, coef=1) -> None:
    add_to(combo, {tree: Fraction(sign)}, coef)


# traversal --------------------------------------------------------------------


def _after(tree: PlanarTree, v: int, start: int) -> List[Tuple[int, int]]:
    """(index, item) pairs of v's rotation following the item `start`"""
    rotation = tree.rotation(v)
    at = rotation.index(start)
    return [((at + j) % len(rotation), rotation[(at + j) % len(rotation)]) for j in range(1, len(rotation))]


def total_order(tree: PlanarTree) -> List[Tuple]:
    """Edges and tails met walking counterclockwise around the tree from the root.

    Entries are ("root", v), ("edge", parent, child) and ("tail", v, index).
    """
    if not tree.rooted:
        raise DomainMismatch("the total order needs a root")
    rv = tree.root_vertex
    order: List[Tuple] = [("root", rv)]

    def walk(v: int, start: int):
        for index, item in _after(tree, v, start):
            if item == TAIL:
                order.append(("tail", v, index))
            else:
                order.append(("edge", v, item))
                walk(item, v)

    walk(rv, ROOT)
    return order


def preorder(tree: PlanarTree) -> List[int]:
    return [tree.root_vertex] + [entry[2] for entry in total_order(tree) if entry[0] == "edge"]


def inputs(tree: PlanarTree, v: int) -> List[Tuple]:
    """Inputs of the operation at v in order: ("tail",) or ("edge", child)"""
    parent = ROOT if v == tree.root_vertex else _parent(tree, v)
    return [("tail",) if item == TAIL else ("edge", item) for _, item in _after(tree, v, parent)]


def _parent(tree: PlanarTree, v: int) -> int:
    for u, x in tree.arrows:
        if u == v:
            return x
    raise DomainMismatch(f"vertex {v} has no outgoing arrow")


def path_length(tree: PlanarTree, source: int, target: int) -> int:
    if source == target:
        return 0
    arrows = _towards(tree.rotations, target)
    steps, v = 0, source
    while v != target:
        v = next(x for u, x in arrows if u == v)
        steps += 1
    return steps


# tree maps --------------------------------------------------------------------


def _replaced(rotations: Sequence[Rotation], changes: Dict[Tuple[int, int], int]) -> List[List[int]]:
    result = [list(r) for r in rotations]
    for (v, index), item in changes.items():
        result[v - 1][index] = item
    return result


def rho(tree: PlanarTree) -> TreeCombo:
    """Sum over all ways of adding a root to a nonrooted tree without tails,
    signed by the arrows that disagree with the direction towards the root."""
    if tree.rooted or tree.tails():
        raise DomainMismatch("rho takes nonrooted trees without tails")
    combo: TreeCombo = {}
    for v, rotation in enumerate(tree.rotations, start=1):
        for gap in range(max(len(rotation), 1)):
            rotations = list(tree.rotations)
            rotations[v - 1] = rotation[: gap + 1] + (ROOT,) + rotation[gap + 1 :]
            sign, rooted = canonical(rotations, tree.arrows)
            _add(combo, sign, rooted)
    return combo


def forget_root(tree: PlanarTree) -> Tuple[int, PlanarTree]:
    """w: the root becomes an ordinary tail and the arrows are kept"""
    if not tree.rooted:
        raise DomainMismatch("w takes rooted trees")
    rotations = [tuple(TAIL if x == ROOT else x for x in r) for r in tree.rotations]
    return canonical(rotations, tree.arrows)


def choose_root(tree: PlanarTree) -> TreeCombo:
    """r: every distinct rooted tree obtained by promoting one tail to the root"""
    if tree.rooted or not tree.tails():
        raise DomainMismatch("r takes nonrooted trees with tails")
    combo: TreeCombo = {}
    for v, rotation in enumerate(tree.rotations, start=1):
        for index, item in enumerate(rotation):
            if item != TAIL:
                continue
            sign, rooted = canonical(_replaced(tree.rotations, {(v, index): ROOT}), tree.arrows)
            if rooted not in combo:
                combo[rooted] = Fraction(sign)
    return combo


def rotate_root(tree: PlanarTree) -> Tuple[int, PlanarTree, int]:
    """t: move the root to the first non-root tail of the total order.

    Returns the sign, the new tree and the number of reversed edges.
    """
    if not tree.rooted:
        raise DomainMismatch("t takes rooted trees")
    first = next((entry for entry in total_order(tree) if entry[0] == "tail"), None)
    if first is None:
        return 1, tree, 0
    _, u, index = first
    rv = tree.root_vertex
    changes = {(rv, tree.rotation(rv).index(ROOT)): TAIL, (u, index): ROOT}
    sign, moved = canonical(_replaced(tree.rotations, changes), tree.arrows)
    return sign, moved, path_length(tree, rv, u)


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _spread(rotation: Rotation, extra: int) -> List[Rotation]:
    if not rotation:
        return [(TAIL,) * extra]
    spreads = set()
    for counts in _compositions(extra, len(rotation)):
        items: List[int] = []
        for item, count in zip(rotation, counts):
            items.append(item)
            items.extend([TAIL] * count)
        spreads.add(_min_rotation(items))
    return sorted(spreads)


def attach_tails(tree: PlanarTree, arities: Sequence[int]) -> List[PlanarTree]:
    """All trees obtained by adding tails so that vertex v has arities[v - 1] inputs"""
    if len(arities) != tree.n:
        raise ShapeMismatch(f"{tree.n} vertices but {len(arities)} arities")
    choices = []
    for v, k in enumerate(arities, start=1):
        extra = k + 1 - len(tree.rotation(v))
        if extra < 0:
            return []
        choices.append(_spread(tree.rotation(v), extra))
    found = {canonical(rotations, tree.arrows)[1] for rotations in product(*choices)}
    return sorted(found, key=PlanarTree.key)


def nu(tree: PlanarTree, arities: Sequence[int]) -> TreeCombo:
    """The sum of all tail attachments of a nonrooted tree with the given arities"""
    if tree.rooted or tree.tails():
        raise DomainMismatch("nu takes nonrooted trees without tails")
    return {t: Fraction(1) for t in attach_tails(tree, arities)}


def apply_map(f, combo: TreeCombo) -> TreeCombo:
    """Extends a map tree -> combo (or -> (sign, tree)) linearly"""
    result: TreeCombo = {}
    for tree, c in combo.items():
        image = f(tree)
        if isinstance(image, tuple):
            image = {image[1]: Fraction(image[0])}
        add_to(result, image, c)
    return result


def root_cycle(tree: PlanarTree) -> TreeCombo:
    """sum_i (-1)^(reversed edges) t^i(T) over one period of t"""
    combo: TreeCombo = {}
    sign, current = 1, tree
    for _ in range(tree.tails() + 1):
        if current in combo:
            break
        combo[current] = Fraction(sign)
        step, current, _ = rotate_root(current)
        sign *= step
    return combo


# enumeration ------------------------------------------------------------------


def _prufer_edges(sequence: Sequence[int], n: int) -> List[Tuple[int, int]]:
    degree = [1] * (n + 1)
    for x in sequence:
        degree[x] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in sequence:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return edges


def labeled_trees(n: int) -> Iterator[List[List[int]]]:
    """Neighbour lists of every labeled tree on 1..n"""
    if n == 1:
        yield [[]]
        return
    for sequence in product(range(1, n + 1), repeat=n - 2):
        neighbours: List[List[int]] = [[] for _ in range(n)]
        for u, v in _prufer_edges(sequence, n):
            neighbours[u - 1].append(v)
            neighbours[v - 1].append(u)
        yield [sorted(x) for x in neighbours]


def _cyclic_orders(items: Sequence[int]) -> List[Rotation]:
    if len(items) <= 2:
        return [tuple(items)]
    first, rest = items[0], items[1:]
    return [(first,) + p for p in permutations(rest)]


def enumerate_trees(
    n: int, tails: int = 0, rooted: bool = False, oriented: bool = False, limit: int = 50000
) -> List[PlanarTree]:
    """Every planar tree on 1..n with at most `tails` non-root tails, sorted by encoding"""
    if n < 1:
        raise ShapeMismatch("trees need at least one vertex")
    logger.info(f"enumerating trees: n={n} tails<={tails} rooted={rooted} oriented={oriented}")
    found = set()
    for neighbours in labeled_trees(n):
        for rotations in product(*(_cyclic_orders(x) for x in neighbours)):
            arrows = [(u, v) for u in range(1, n + 1) for v in rotations[u - 1] if u < v] if oriented else []
            bases = [(list(rotations), arrows)]
            if rooted:
                bases = [(list(t.rotations), t.arrows) for t in rho(canonical(rotations, arrows)[1])]
            for base, base_arrows in bases:
                for extra in range(tails + 1):
                    for tree in _with_tails(base, base_arrows, extra):
                        found.add(tree)
                        if len(found) > limit:
                            logger.error(f"tree enumeration passed {limit} trees")
                            raise CapExceeded(f"more than {limit} trees with n={n} and {tails} tails")
    return sorted(found, key=format_tree)


def _with_tails(rotations: Sequence[Rotation], arrows, extra: int) -> Iterator[PlanarTree]:
    gaps = [max(len(r), 1) for r in rotations]
    for counts in _compositions(extra, sum(gaps)):
        at = 0
        pieces = []
        for r, g in zip(rotations, gaps):
            share = counts[at : at + g]
            at += g
            if not r:
                pieces.append((TAIL,) * share[0])
                continue
            items: List[int] = []
            for item, count in zip(r, share):
                items.append(item)
                items.extend([TAIL] * count)
            pieces.append(tuple(items))
        yield canonical(pieces, arrows)[1]


# literals -----------------------------------------------------------------------


def format_tree(tree: PlanarTree) -> str:
    """Canonical literal, e.g. `1(^ * >2(*) 3)`.

    The top vertex (the root vertex, else vertex 1) lists its whole cyclic
    order; every other vertex lists the items following its parent edge.
    `>` marks an arrow from the listing vertex to the child, `<` the reverse;
    rooted trees omit the marks.
    """
    arrows = set(tree.arrows)
    marked = tree.oriented and not tree.rooted

    def item_text(v: int, item: int) -> str:
        if item == ROOT:
            return "^"
        if item == TAIL:
            return "*"
        mark = (">" if (v, item) in arrows else "<") if marked else ""
        return mark + vertex_text(item, v)

    def vertex_text(v: int, parent: Optional[int]) -> str:
        if parent is None:
            items = list(tree.rotation(v))
        else:
            items = [item for _, item in _after(tree, v, parent)]
        return f"{v}(" + " ".join(item_text(v, x) for x in items) + ")"

    top = tree.root_vertex or 1
    return vertex_text(top, None)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.at = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, 1, self.at + 1)

    def skip(self):
        while self.at < len(self.text) and self.text[self.at] in " ,\t":
            self.at += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.at] if self.at < len(self.text) else ""

    def expect(self, char: str):
        if self.peek() != char:
            raise self.error(f"expected {char!r}")
        self.at += 1

    def number(self) -> int:
        self.skip()
        start = self.at
        while self.at < len(self.text) and self.text[self.at].isdigit():
            self.at += 1
        if start == self.at:
            raise self.error("expected a vertex label")
        return int(self.text[start : self.at])


def parse_tree(text: str) -> Tuple[PlanarTree, int]:
    """Reads a tree literal; returns the canonical tree and its orientation sign"""
    reader = _Reader(text.strip())
    rotations: Dict[int, List[int]] = {}
    arrows: List[Tuple[int, int]] = []

    def vertex(parent: Optional[int]) -> int:
        v = reader.number()
        if v in rotations:
            raise reader.error(f"vertex {v} appears twice")
        rotations[v] = [] if parent is None else [parent]
        reader.expect("(")
        while reader.peek() != ")":
            char = reader.peek()
            if not char:
                raise reader.error("unclosed vertex")
            if char == "*":
                reader.at += 1
                rotations[v].append(TAIL)
            elif char == "^":
                reader.at += 1
                rotations[v].append(ROOT)
            else:
                mark = None
                if char in "<>":
                    mark = char
                    reader.at += 1
                child = vertex(v)
                rotations[v].append(child)
                if mark == ">":
                    arrows.append((v, child))
                elif mark == "<":
                    arrows.append((child, v))
        reader.expect(")")
        return v

    vertex(None)
    if reader.peek():
        raise reader.error("trailing characters")
    n = len(rotations)
    if sorted(rotations) != list(range(1, n + 1)):
        raise ParseError(f"vertex labels must be 1..{n}", 1, 1)
    if arrows and len(arrows) != n - 1:
        raise ParseError("mark every edge or none", 1, 1)
    try:
        sign, tree = canonical([rotations[v] for v in range(1, n + 1)], arrows)
    except ShapeMismatch as e:
        raise ParseError(str(e), 1, 1)
    return tree, sign


def format_combo(combo: TreeCombo) -> str:
    lines = []
    for tree, c in sorted(combo.items(), key=lambda item: format_tree(item[0])):
        if c:
            lines.append(f"{'+' if c > 0 else '-'}{abs(c)} {format_tree(tree)}")
    return "\n".join(lines)


def corolla(n: int) -> PlanarTree:
    """The rooted corolla: vertex 1 carries the root followed by children 2..n+1"""
    rotations = [(ROOT,) + tuple(range(2, n + 2))] + [(1,)] * n
    return canonical(rotations)[1]


def chain_tree(n: int, oriented: bool = True) -> PlanarTree:
    """The nonrooted path 1 - 2 - ... - n, arrows from smaller to larger labels"""
    rotations = [tuple(x for x in (v - 1, v + 1) if 1 <= x <= n) for v in range(1, n + 1)]
    arrows = [(v, v + 1) for v in range(1, n)] if oriented else []
    return canonical(rotations, arrows)[1]
