"""Independent brute-force checks.

Nothing here reuses the fast paths: group elements are packed into one
integer and multiplied by letter-by-letter collection, the relation subgroup
is an explicit element set, quotients are enumerated breadth first, and
value sets come straight from their definition.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .axioms import Axiom4Witness, AxiomReport
from .formats import Word
from .orderspace import SpaceOfOrderings

MAX_GENS = 9
MAX_QUOTIENT_LOG2 = 22
MAX_RELATION_SUBGROUP = 1 << 16


class OracleLimit(RuntimeError):
    """The instance is beyond what brute force handles."""


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


class PackedW:
    """W(n) elements as ``exps (2 bits per generator, g1 highest) << C | comms``."""

    def __init__(self, n: int) -> None:
        if not 1 <= n <= MAX_GENS:
            raise OracleLimit(f"oracle supports 1..{MAX_GENS} generators")
        self.n = n
        self.c = n * (n - 1) // 2
        pos = {}
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                pos[i, j] = self.c - 1 - k
                k += 1
        self.pair_pos = pos
        self.exp_shift = [self.c + 2 * (n - 1 - i) for i in range(n)]
        # For a right factor g_i: commutator bits picked up from odd e_j, j > i.
        self.cross = [[(self.exp_shift[j], 1 << pos[i, j]) for j in range(i + 1, n)] for i in range(n)]
        self.low_mask = sum(1 << s for s in self.exp_shift)
        self.comm_mask = (1 << self.c) - 1

    # scalar ------------------------------------------------------------------------
    def exp(self, x: int, i: int) -> int:
        return (x >> self.exp_shift[i]) & 3

    def times_gen(self, x: int, i: int) -> int:
        for shift, bit in self.cross[i]:
            if (x >> shift) & 1:
                x ^= bit
        e = (self.exp(x, i) + 1) & 3
        return (x & ~(3 << self.exp_shift[i])) | (e << self.exp_shift[i])

    def mul(self, x: int, y: int) -> int:
        for i in range(self.n):
            for _ in range(self.exp(y, i)):
                x = self.times_gen(x, i)
        return x ^ (y & self.comm_mask)

    def inv(self, x: int) -> int:
        return self.mul(self.mul(x, x), x)

    def word(self, w: Word) -> int:
        x = 0
        for i, e in w:
            for _ in range(e):
                x = self.times_gen(x, i)
        return x

    def gen(self, i: int) -> int:
        return 1 << self.exp_shift[i]

    # vectorised --------------------------------------------------------------------
    def vtimes_gen(self, x: np.ndarray, i: int, where: np.ndarray | None = None) -> np.ndarray:
        flip = np.zeros_like(x)
        for shift, bit in self.cross[i]:
            flip |= ((x >> np.uint64(shift)) & np.uint64(1)) * np.uint64(bit)
        sh = np.uint64(self.exp_shift[i])
        e = (((x >> sh) & np.uint64(3)) + np.uint64(1)) & np.uint64(3)
        out = ((x ^ flip) & ~(np.uint64(3) << sh)) | (e << sh)
        return out if where is None else np.where(where, out, x)

    def vmul(self, x: np.ndarray, y: np.ndarray | int) -> np.ndarray:
        y = np.broadcast_to(np.asarray(y, dtype=np.uint64), x.shape)
        for i in range(self.n):
            e = (y >> np.uint64(self.exp_shift[i])) & np.uint64(3)
            for r in range(1, 4):
                x = self.vtimes_gen(x, i, e >= np.uint64(r))
        return x ^ (y & np.uint64(self.comm_mask))


def relation_subgroup(w: PackedW, relators: list[Word]) -> set[int]:
    """Explicit normal closure of the relator values."""
    gens: list[int] = []
    members = {0}

    def close() -> None:
        frontier = list(members)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = w.mul(x, g)
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            if len(members) > MAX_RELATION_SUBGROUP:
                raise OracleLimit("relation subgroup exceeds the explicit-set limit")
            frontier = nxt

    pending = [w.word(r) for r in relators]
    while pending:
        r = pending.pop()
        if r in members:
            continue
        gens.append(r)
        close()
        for i in range(w.n):
            g = w.gen(i)
            pending.append(w.mul(w.mul(w.inv(g), r), g))
        for h in list(gens):
            for i in range(w.n):
                g = w.gen(i)
                conj = w.mul(w.mul(w.inv(g), h), g)
                if conj not in members:
                    pending.append(conj)
    return members


@dataclass
class QuotientTable:
    """All elements of W(n)/N, each as the least normal form in its coset."""

    w: PackedW
    relation: set[int]
    elements: np.ndarray  # sorted canonical keys
    _exp_min: np.ndarray
    _exp_fix: np.ndarray
    _central_rows: list[int]

    @property
    def log2_order(self) -> int:
        size = len(self.elements)
        if size & (size - 1):  # pragma: no cover - quotient of a 2-group
            raise AssertionError("quotient order is not a power of two")
        return size.bit_length() - 1

    def canonical(self, keys: np.ndarray) -> np.ndarray:
        c = self.w.c
        code = (keys >> np.uint64(c)).astype(np.int64)
        moved = self.w.vmul(keys, self._exp_fix[code])
        comms = moved & np.uint64(self.w.comm_mask)
        for row in self._central_rows:
            top = np.uint64(1 << (row.bit_length() - 1))
            hit = (comms & top) != 0
            comms = np.where(hit, comms ^ np.uint64(row), comms)
        return (moved & ~np.uint64(self.w.comm_mask)) | comms

    def mul(self, x: np.ndarray, y) -> np.ndarray:
        return self.canonical(self.w.vmul(x, y))

    def contains(self, keys: np.ndarray) -> np.ndarray:
        return np.isin(keys, self.elements)


def _add_exps(a: np.ndarray, b: int, low: int) -> np.ndarray:
    """Field-wise sum mod 4 of packed 2-bit exponent codes."""
    carry = (a & np.int64(b) & np.int64(low)) << 1
    return a ^ np.int64(b) ^ carry


def enumerate_quotient(n: int, relators: list[Word]) -> QuotientTable:
    w = PackedW(n)
    rel = relation_subgroup(w, relators)
    c = w.c
    # Exponent parts of N, with one element of N realising each.
    realiser: dict[int, int] = {}
    for x in sorted(rel):
        realiser.setdefault(x >> c, x)
    codes = np.arange(4 ** n, dtype=np.int64)
    if len(realiser) * codes.size > 1 << 27:
        raise OracleLimit("exponent table too large")
    low = sum(1 << (2 * k) for k in range(n))
    best = np.full(codes.size, np.iinfo(np.int64).max)
    fix = np.zeros(codes.size, dtype=np.uint64)
    for u, x in realiser.items():
        moved = _add_exps(codes, u, low)
        better = moved < best
        best = np.where(better, moved, best)
        fix = np.where(better, np.uint64(x), fix)
    # Central part of N as an echelon basis of commutator words.
    rows: list[int] = []
    for x in rel:
        if x >> c:
            continue
        v = x
        for r in rows:
            if v ^ r < v:
                v ^= r
        if v:
            top = 1 << (v.bit_length() - 1)
            rows = [r ^ v if r & top else r for r in rows]
            rows.append(v)
    rows.sort(reverse=True)
    table = QuotientTable(w, rel, np.zeros(0, dtype=np.uint64), best, fix, rows)
    seen = table.canonical(np.zeros(1, dtype=np.uint64))
    frontier = seen
    while frontier.size:
        cand = np.concatenate([table.canonical(w.vtimes_gen(frontier, i)) for i in range(n)])
        fresh = np.setdiff1d(np.unique(cand), seen, assume_unique=True)
        seen = np.union1d(seen, fresh)
        if seen.size > 1 << MAX_QUOTIENT_LOG2:
            raise OracleLimit("quotient exceeds the enumeration cap")
        frontier = fresh
    table.elements = seen
    return table


def subgroup_closure(table: QuotientTable, generators: np.ndarray) -> np.ndarray:
    """Subgroup of the quotient generated by ``generators`` (canonical keys)."""
    group = np.zeros(1, dtype=np.uint64)
    group = table.canonical(group)
    used: list[int] = []
    for g in np.unique(generators):
        if np.isin(g, group):
            continue
        used.append(int(g))
        frontier = group
        while frontier.size:
            cand = np.concatenate([table.mul(frontier, np.uint64(h)) for h in used])
            fresh = np.setdiff1d(np.unique(cand), group, assume_unique=True)
            group = np.union1d(group, fresh)
            frontier = fresh
    return group


def frattini_subgroup(table: QuotientTable) -> np.ndarray:
    x = table.elements
    w = table.w
    gens = [table.canonical(w.vmul(x, x))]
    inv = w.vmul(w.vmul(x, x), x)
    for i in range(w.n):
        g = w.gen(i)
        g_inv = w.inv(g)
        gens.append(table.canonical(w.vmul(w.vmul(w.vmul(inv, g_inv), x), g)))
    return subgroup_closure(table, np.unique(np.concatenate(gens)))


def frattini_by_enumeration(table: QuotientTable) -> int:
    size = len(frattini_subgroup(table))
    return size.bit_length() - 1


def involution_classes_by_enumeration(table: QuotientTable) -> list[int]:
    """Exponent patterns mod 2 (reduced mod those of N) of classes holding an element of order 2."""
    w = table.w
    x = table.elements
    identity = table.canonical(np.zeros(1, dtype=np.uint64))[0]
    phi = frattini_subgroup(table)
    mask = (table.canonical(w.vmul(x, x)) == identity) & ~np.isin(x, phi)
    # Quotient by Phi is read off exponent patterns mod 2, modulo those of N.
    rows: list[int] = []
    for r in table.relation:
        v = _pattern(w, r)
        for b in rows:
            if v ^ b < v:
                v ^= b
        if v:
            rows.append(v)
            rows.sort(reverse=True)
    out = set()
    for key in x[mask]:
        v = _pattern(w, int(key))
        for b in rows:
            if v ^ b < v:
                v ^= b
        out.add(v)
    out.discard(0)
    return sorted(out)


def _pattern(w: PackedW, x: int) -> int:
    v = 0
    for i in range(w.n):
        v = (v << 1) | (w.exp(x, i) & 1)
    return v


# -- spaces ------------------------------------------------------------------------

def _sign(sigma: int, a: int) -> int:
    return _parity(sigma & a)


def binary_value_sets(space: SpaceOfOrderings) -> list[list[frozenset[int]]]:
    """D<a, b> for all pairs, straight from the definition."""
    g = range(1 << space.dim)
    out = []
    for a in g:
        row = []
        for b in g:
            row.append(frozenset(
                c for c in g
                if all(_sign(s, c) in (_sign(s, a), _sign(s, b)) for s in space.chars)
            ))
        out.append(row)
    return out


def axiom4_exhaustive(space: SpaceOfOrderings, max_len: int) -> AxiomReport:
    """Axioms (2)-(4) by exhaustive scan over ordered forms."""
    n = space.dim
    bad2 = next((s for s in space.chars if not _sign(s, space.minus_one)), None)
    bad3 = next(
        (a for a in range(1, 1 << n) if all(not _sign(s, a) for s in space.chars)), None
    )
    d2 = binary_value_sets(space)

    def value(form: tuple[int, ...]) -> frozenset[int]:
        if len(form) == 1:
            return frozenset(form)
        out: set[int] = set()
        for t in value(form[1:]):
            out |= d2[form[0]][t]
        return frozenset(out)

    witness = None
    elements = range(1 << n)
    for total in range(2, max_len + 1):
        for p in range(1, total):
            for f in product(elements, repeat=p):
                df = value(f)
                for g in product(elements, repeat=total - p):
                    dg = value(g)
                    rhs: set[int] = set()
                    for y in df:
                        for z in dg:
                            rhs |= d2[y][z]
                    extra = value(f + g) - rhs
                    if extra:
                        witness = Axiom4Witness(f, g, min(extra))
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    phantom = phantom_exhaustive(space, d2)
    return AxiomReport(
        bad2 is None, bad3 is None, witness is None, max_len, bad2, bad3, witness,
        saturation_ok=phantom is None, phantom=phantom,
    )


def represented_axiom4_exhaustive(space: SpaceOfOrderings, max_len: int) -> Axiom4Witness | None:
    """Least axiom (4) witness when ``D_f`` is the set of first entries of forms with f's signatures.

    That is the set of elements a form represents over a Pythagorean field.
    It contains the nested value set, and the two agree on spaces of orderings.
    """
    n = space.dim
    elements = range(1 << n)
    vec = [tuple(1 - 2 * _sign(s, a) for s in space.chars) for a in elements]
    sums = [{tuple(0 for _ in space.chars)}]
    for _ in range(max_len - 1):
        sums.append({tuple(u + v for u, v in zip(p, vec[a])) for p in sums[-1] for a in elements})
    memo: dict[tuple, frozenset[int]] = {}

    def value(form: tuple[int, ...]) -> frozenset[int]:
        sig = tuple(sum(col) for col in zip(*(vec[a] for a in form)))
        key = (len(form), sig)
        if key not in memo:
            rest = sums[len(form) - 1]
            memo[key] = frozenset(
                b for b in elements if tuple(x - y for x, y in zip(sig, vec[b])) in rest
            )
        return memo[key]

    d2 = binary_value_sets(space)
    for total in range(2, max_len + 1):
        for p in range(1, total):
            for f in product(elements, repeat=p):
                df = value(f)
                for g in product(elements, repeat=total - p):
                    rhs: set[int] = set()
                    for y in df:
                        for z in value(g):
                            rhs |= d2[y][z]
                    extra = value(f + g) - rhs
                    if extra:
                        return Axiom4Witness(f, g, min(extra))
    return None


def phantom_exhaustive(space: SpaceOfOrderings, d2=None) -> int | None:
    """Least character outside X, negative at -1, that respects every binary value set."""
    d2 = binary_value_sets(space) if d2 is None else d2
    g = range(1 << space.dim)
    for sigma in g:
        if sigma in space or not _sign(sigma, space.minus_one):
            continue
        if all(
            _sign(sigma, c) == _sign(sigma, a)
            for a in g for b in g if _sign(sigma, a) == _sign(sigma, b)
            for c in d2[a][b]
        ):
            return sigma
    return None


def translations_exhaustive(space: SpaceOfOrderings) -> list[int]:
    xs = set(space.chars)
    return [a for a in range(1 << space.dim) if {a ^ s for s in xs} == xs]


def components_exhaustive(space: SpaceOfOrderings) -> list[tuple[int, ...]]:
    chars = list(space.chars)
    pairs = [(s, t) for i, s in enumerate(chars) for t in chars[i + 1:]]
    linked = {s: {s} for s in chars}
    for s, t in pairs:
        if any({u, v} != {s, t} and u ^ v == s ^ t for u, v in pairs):
            linked[s].add(t)
            linked[t].add(s)
    changed = True
    while changed:
        changed = False
        for s in chars:
            grown = set().union(*(linked[t] for t in linked[s]))
            if grown != linked[s]:
                linked[s] = grown
                changed = True
    return sorted({tuple(sorted(v)) for v in linked.values()})


__all__ = [
    "OracleLimit", "PackedW", "QuotientTable", "relation_subgroup", "enumerate_quotient",
    "subgroup_closure", "frattini_subgroup", "frattini_by_enumeration",
    "involution_classes_by_enumeration", "binary_value_sets", "axiom4_exhaustive", "phantom_exhaustive",
    "represented_axiom4_exhaustive",
    "translations_exhaustive", "components_exhaustive",
]
