"""Structure trees: classification of spaces, order formulas, and the inverse builders.

A tree is ``Leaf`` (one ordering), ``Ext(m, child)`` (a connected space whose
translation group has dimension m over the quotient ``child``), or
``Free(children)`` (the components of a disconnected space).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterator, Union

from . import f2algebra as f2
from .axioms import AxiomReport, verify_axioms
from .cgroup import (
    ExtractionError,
    PresentedCGroup,
    candidate_space_raw,
    generators_are_involutions,
    quotient_order,
)
from .formats import Word
from .orderspace import (
    SpaceOfOrderings,
    components,
    is_connected,
    normalize,
    quotient_by_translations,
    rank as space_rank,
    translation_group,
)


@dataclass(frozen=True)
class Leaf:
    def encode(self) -> str:
        return "L"


@dataclass(frozen=True)
class Ext:
    m: int
    child: "StructureTree"

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("Ext needs m >= 1")
        if isinstance(self.child, Ext):
            raise ValueError("an Ext child cannot be an Ext node")

    def encode(self) -> str:
        return f"E{self.m}({self.child.encode()})"


@dataclass(frozen=True)
class Free:
    children: tuple["StructureTree", ...]

    def __post_init__(self) -> None:
        flat: list[StructureTree] = []
        for c in self.children:
            flat += list(c.children) if isinstance(c, Free) else [c]
        if len(flat) < 2:
            raise ValueError("Free needs at least two children")
        object.__setattr__(self, "children", tuple(sorted(flat, key=lambda t: t.encode())))

    def encode(self) -> str:
        return "F(" + ",".join(c.encode() for c in self.children) + ")"


StructureTree = Union[Leaf, Ext, Free]
LEAF = Leaf()


class TreeSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"column {position + 1}: {message}")


def parse_tree(text: str) -> StructureTree:
    """Parse the text encoding (``L``, ``E<m>(t)``, ``F(t1,...,tk)``)."""
    s = text.strip()
    pos = 0

    def expect(ch: str) -> None:
        nonlocal pos
        if pos >= len(s) or s[pos] != ch:
            raise TreeSyntaxError(f"expected {ch!r}", pos)
        pos += 1

    def node() -> StructureTree:
        nonlocal pos
        if pos >= len(s):
            raise TreeSyntaxError("unexpected end of tree", pos)
        head = s[pos]
        if head == "L":
            pos += 1
            return LEAF
        if head == "E":
            start = pos = pos + 1
            while pos < len(s) and s[pos].isdigit():
                pos += 1
            if pos == start:
                raise TreeSyntaxError("expected the extension rank after 'E'", pos)
            m = int(s[start:pos])
            expect("(")
            at = pos
            child = node()
            expect(")")
            try:
                return Ext(m, child)
            except ValueError as exc:
                raise TreeSyntaxError(str(exc), at) from None
        if head == "F":
            pos += 1
            expect("(")
            starts, kids = [pos], [node()]
            while pos < len(s) and s[pos] == ",":
                pos += 1
                starts.append(pos)
                kids.append(node())
            at = pos
            expect(")")
            for k, where in zip(kids, starts):
                if isinstance(k, Free):
                    raise TreeSyntaxError("Free children cannot be Free nodes", where)
            try:
                return Free(tuple(kids))
            except ValueError as exc:
                raise TreeSyntaxError(str(exc), at) from None
        raise TreeSyntaxError(f"unexpected {head!r}", pos)

    tree = node()
    if pos != len(s):
        raise TreeSyntaxError("trailing characters", pos)
    return tree


def to_json(t: StructureTree) -> dict:
    if isinstance(t, Leaf):
        return {"kind": "leaf"}
    if isinstance(t, Ext):
        return {"kind": "ext", "m": t.m, "child": to_json(t.child)}
    return {"kind": "free", "children": [to_json(c) for c in t.children]}


def from_json(obj: dict | str) -> StructureTree:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("kind")
    if kind == "leaf":
        return LEAF
    if kind == "ext":
        return Ext(int(obj["m"]), from_json(obj["child"]))
    if kind == "free":
        return Free(tuple(from_json(c) for c in obj["children"]))
    raise ValueError(f"unknown tree kind {kind!r}")


# -- formulas -----------------------------------------------------------------------

def rank(t: StructureTree) -> int:
    if isinstance(t, Leaf):
        return 1
    if isinstance(t, Ext):
        return t.m + rank(t.child)
    return sum(rank(c) for c in t.children)


def order_log2(t: StructureTree) -> int:
    if isinstance(t, Leaf):
        return 1
    if isinstance(t, Ext):
        return 2 * t.m + order_log2(t.child)
    ranks = [rank(c) for c in t.children]
    cross = sum(ranks[i] * ranks[j] for i in range(len(ranks)) for j in range(i + 1, len(ranks)))
    return sum(order_log2(c) for c in t.children) + cross


def frattini_log2(t: StructureTree) -> int:
    return order_log2(t) - rank(t)


def size(t: StructureTree) -> int:
    """Number of orderings of build(t)."""
    if isinstance(t, Leaf):
        return 1
    if isinstance(t, Ext):
        return (1 << t.m) * size(t.child)
    return sum(size(c) for c in t.children)


def is_canonical(t: StructureTree) -> bool:
    """Whether ``t`` is a possible classification output.

    ``E1(L)`` describes the same space as ``F(L,L)``, and an Ext over
    ``F(L,L)`` is an Ext over a Leaf with one more translation; neither occurs
    as an output.
    """
    if isinstance(t, Leaf):
        return True
    if isinstance(t, Ext):
        if t.child == LEAF and t.m == 1:
            return False
        if t.child == Free((LEAF, LEAF)):
            return False
        return is_canonical(t.child)
    return all(is_canonical(c) for c in t.children)


def enumerate_trees(max_rank: int) -> list[StructureTree]:
    """All canonical trees of rank <= max_rank, ordered by rank then encoding."""
    by_rank: dict[int, list[StructureTree]] = {}
    for r in range(1, max_rank + 1):
        found: list[StructureTree] = [LEAF] if r == 1 else []
        for m in range(1, r):
            for child in by_rank[r - m]:
                if not isinstance(child, Ext):
                    t = Ext(m, child)
                    if is_canonical(t):
                        found.append(t)
        found += _free_trees(r, by_rank)
        by_rank[r] = sorted(set(found), key=lambda t: t.encode())
    return [t for r in range(1, max_rank + 1) for t in by_rank[r]]


def _free_trees(r: int, by_rank: dict[int, list[StructureTree]]) -> Iterator[Free]:
    for parts in _partitions(r):
        if len(parts) < 2:
            continue
        pools = [[t for t in by_rank[p] if not isinstance(t, Free)] for p in parts]
        yield from _multiset_products(parts, pools)


def _partitions(r: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = r if largest is None else largest
    if r == 0:
        yield ()
        return
    for p in range(min(r, largest), 0, -1):
        for rest in _partitions(r - p, p):
            yield (p,) + rest


def _multiset_products(parts, pools) -> Iterator[Free]:
    """Free nodes choosing one tree per part, unordered among equal parts."""
    groups: dict[int, int] = {}
    for p in parts:
        groups[p] = groups.get(p, 0) + 1
    choices = [list(combinations_with_replacement(pools[parts.index(p)], k)) for p, k in groups.items()]

    def rec(i: int, acc: tuple) -> Iterator[Free]:
        if i == len(choices):
            yield Free(acc)
            return
        for pick in choices[i]:
            yield from rec(i + 1, acc + pick)

    yield from rec(0, ())


# -- build --------------------------------------------------------------------------

def build(t: StructureTree) -> SpaceOfOrderings:
    """A canonical space of orderings with structure tree ``t``."""
    dim, chars = _build(t)
    return SpaceOfOrderings.canonical(dim, chars, t.encode())


def _build(t: StructureTree) -> tuple[int, list[int]]:
    if isinstance(t, Leaf):
        return 1, [1]
    if isinstance(t, Ext):
        d, chars = _build(t.child)
        return d + t.m, [(s << t.m) | tail for s in chars for tail in range(1 << t.m)]
    # Layout: shared -1, one selector per component after the first, then each
    # component's remaining coordinates.
    parts = [_build(c) for c in t.children]
    k = len(parts)
    dim = sum(d for d, _ in parts)
    out = []
    offset = dim - 1 - (k - 1)  # bits left for the component bodies
    for idx, (d, chars) in enumerate(parts):
        offset -= d - 1
        for s in chars:
            body = s & ((1 << (d - 1)) - 1)
            v = (1 << (dim - 1)) | (body << offset)
            if idx:
                v |= 1 << (dim - 1 - idx)
            out.append(v)
    return dim, out


# -- classification -----------------------------------------------------------------

class InconsistentSpace(ValueError):
    """The input cannot be a space of orderings."""


class AxiomFailure(InconsistentSpace):
    def __init__(self, report: AxiomReport):
        self.report = report
        check, _ = report.witness
        what = "saturation fails" if check == "saturation" else f"axiom ({check}) fails at bound {report.max_len}"
        super().__init__(what)


def classify(space: SpaceOfOrderings, max_len: int | None = None) -> StructureTree:
    """Structure tree of ``space``; with ``max_len`` the axioms are checked first."""
    if max_len is not None:
        report = verify_axioms(space, max_len)
        if not report.ok:
            raise AxiomFailure(report)
    return _classify(space)


def _classify(space: SpaceOfOrderings) -> StructureTree:
    if space.size == 1:
        return LEAF
    if is_connected(space):
        if space_rank(space) <= 1:  # pragma: no cover - distinct chars force rank > 1
            raise InconsistentSpace("connected with several characters but rank 1")
        trans = translation_group(space)
        if trans.dim == 0:
            raise InconsistentSpace("connected, rank > 1, but the translation group is trivial")
        child = _classify(quotient_by_translations(space))
        if isinstance(child, Ext):
            raise InconsistentSpace("quotient by translations is connected")
        return Ext(trans.dim, child)
    return Free(tuple(_classify(c) for c in components(space)))


# -- realization ----------------------------------------------------------------------

def presentation_of_space(space: SpaceOfOrderings) -> PresentedCGroup:
    """Involution generators for a basis of X; one square relator per character."""
    basis: list[int] = []
    acc = f2.zero_subspace(space.dim)
    for s in space.chars:
        grown = acc.add(s)
        if grown.dim > acc.dim:
            basis.append(s)
            acc = grown
    index = {b: i for i, b in enumerate(basis)}
    relators: list[Word] = [((i, 2),) for i in range(len(basis))]
    for s in space.chars:
        if s in index:
            continue
        letters = tuple((i, 1) for i in _expand(basis, s))
        relators.append(letters + letters)
    return PresentedCGroup(len(basis), tuple(relators))


def _expand(basis: list[int], target: int) -> list[int]:
    from .orderspace import _combination

    return _combination(basis, target, 0)


def realize(t: StructureTree) -> PresentedCGroup:
    if isinstance(t, Leaf):
        return PresentedCGroup(1, (((0, 2),),))
    if isinstance(t, Ext):
        return presentation_of_space(build(t))
    parts = [realize(c) for c in t.children]
    shift = 0
    relators: list[Word] = []
    for p in parts:
        relators += [tuple((i + shift, e) for i, e in w) for w in p.relators]
        shift += p.n
    return PresentedCGroup(shift, tuple(relators))


# -- realizability --------------------------------------------------------------------

@dataclass(frozen=True)
class RealizabilityVerdict:
    consistent: bool
    reasons: tuple[str, ...]
    max_len: int
    candidate: SpaceOfOrderings | None = None
    axioms: AxiomReport | None = None
    tree: StructureTree | None = None
    presented_log2: int | None = None
    required_log2: int | None = None

    @property
    def summary(self) -> str:
        if self.consistent:
            return f"consistent with realizability at bound {self.max_len}"
        return "not realizable (" + "; ".join(self.reasons) + ")"


def realizable(p: PresentedCGroup, max_len: int = 6) -> RealizabilityVerdict:
    """Look for obstructions to ``p`` being the W-group of a Pythagorean formally real field."""
    if not generators_are_involutions(p):
        raise ValueError("realizable needs every generator square among the relations")
    presented = quotient_order(p)
    try:
        candidate = normalize(candidate_space_raw(p))
    except ExtractionError as exc:
        return RealizabilityVerdict(False, (f"no -1: {exc}",), max_len, presented_log2=presented)
    reasons = []
    report = verify_axioms(candidate, max_len)
    if not report.axiom2_ok:
        reasons.append(f"axiom (2) witness: {f2.to_bits(report.axiom2_witness, candidate.dim)}")
    if not report.axiom3_ok:
        reasons.append(f"axiom (3) witness: {f2.to_bits(report.axiom3_witness, candidate.dim)}")
    if not report.axiom4_ok:
        reasons.append(f"axiom (4) witness: {report.axiom4_witness.describe(candidate.dim)}")
    if not report.saturation_ok:
        reasons.append(f"phantom ordering: {f2.to_bits(report.phantom, candidate.dim)}")
    tree = required = None
    try:
        tree = _classify(candidate)
    except Exception as exc:  # noqa: BLE001 - any failure here is evidence
        reasons.append(f"classification fails: {exc}")
    else:
        required = quotient_order(realize(tree))
        if required != presented:
            reasons.append(f"order obstruction: presented 2^{presented} vs required 2^{required}")
    return RealizabilityVerdict(
        not reasons, tuple(reasons), max_len, candidate, report, tree, presented, required
    )


__all__ = [
    "Leaf", "Ext", "Free", "LEAF", "StructureTree", "TreeSyntaxError", "parse_tree", "to_json",
    "from_json", "rank", "order_log2", "frattini_log2", "size", "is_canonical", "enumerate_trees",
    "build", "classify", "InconsistentSpace", "AxiomFailure", "presentation_of_space", "realize",
    "RealizabilityVerdict", "realizable",
]
