"""Checking the axioms of a space of orderings up to a form-length bound.

Axioms (2) and (3) are direct linear algebra.  Axiom (4) compares
``D(f + g)`` with ``D_f . D_g`` over all forms of total length at most the
bound.  Value sets are bitsets over G packed into ``uint64`` words, and the
operator ``B_a(S) = union of D<a, t> for t in S`` is applied to many sets at
once through per-byte lookup tables.

The scan enumerates the distinct value sets ``D_g`` of each length (with the
lexicographically least form realising each).  As long as value sets do not
depend on the order of entries, ``D(f + g)`` depends on ``f`` only through
``D_f``, so it is enough to pair value sets.  Past the first length where
order matters the scan switches to an exact enumeration of "types" of
ordered prefixes.  Either way the reported witness is the least one in the
order (total length, len f, f, g, x).

Value sets of longer forms are built from binary ones, so axiom (4) alone
cannot see a character outside X that respects every binary value set.
Such a phantom ordering is a finite certificate that X is not a space of
orderings; detecting it through forms can need length ``2^(rank - 2)``.
The saturation check looks for one directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import f2algebra as f2
from .orderspace import SpaceOfOrderings

SCAN_DIM_LIMIT = 7
TYPE_CELL_LIMIT = 20_000_000


class ScanTooLarge(RuntimeError):
    """Raised when the exact scan would exceed its memory budget."""


@dataclass(frozen=True)
class Axiom4Witness:
    f: tuple[int, ...]
    g: tuple[int, ...]
    x: int

    def describe(self, dim: int) -> str:
        fmt = lambda form: "<" + ", ".join(f2.to_bits(a, dim) for a in form) + ">"
        return f"f={fmt(self.f)} g={fmt(self.g)} x={f2.to_bits(self.x, dim)}"


@dataclass(frozen=True)
class AxiomReport:
    axiom2_ok: bool
    axiom3_ok: bool
    axiom4_ok: bool
    max_len: int
    axiom2_witness: int | None = None
    axiom3_witness: int | None = None
    axiom4_witness: Axiom4Witness | None = None
    order_sensitive_length: int | None = None
    saturation_ok: bool = True
    phantom: int | None = None

    @property
    def ok(self) -> bool:
        return self.axiom2_ok and self.axiom3_ok and self.axiom4_ok and self.saturation_ok

    @property
    def witness(self):
        """The first failing check (2, 3, 4 or "saturation") and its witness, or ``None``."""
        if not self.axiom2_ok:
            return 2, self.axiom2_witness
        if not self.axiom3_ok:
            return 3, self.axiom3_witness
        if not self.axiom4_ok:
            return 4, self.axiom4_witness
        if not self.saturation_ok:
            return "saturation", self.phantom
        return None


def check_axiom2(space: SpaceOfOrderings) -> int | None:
    """First character not sending -1 to -1."""
    for s in space.chars:
        if not f2.dot(s, space.minus_one):
            return s
    return None


def check_axiom3(space: SpaceOfOrderings) -> int | None:
    """Least nonzero element positive at every character."""
    ann = f2.annihilator(f2.span(space.chars, space.dim))
    return None if ann.dim == 0 else min(v for v in ann if v)


def check_saturation(space: SpaceOfOrderings) -> int | None:
    """Least phantom ordering: a character outside X, negative at -1, respecting all binary value sets.

    Respecting ``D<a, b>`` whenever it agrees on ``a`` and ``b`` reduces to: for
    every ``e`` positive at the character, it lies in the span of the members
    of X positive at ``e``.
    """
    n = space.dim
    if n > SCAN_DIM_LIMIT:
        raise ScanTooLarge(f"saturation check supports dim <= {SCAN_DIM_LIMIT}, got {n}")
    spans = [f2.span([s for s in space.chars if not f2.dot(s, e)], n) for e in range(1 << n)]
    for sigma in range(1 << n):
        if sigma in space or not f2.dot(sigma, space.minus_one):
            continue
        if all(sigma in spans[e] for e in range(1 << n) if not f2.dot(sigma, e)):
            return sigma
    return None


def verify_axioms(space: SpaceOfOrderings, max_len: int = 6) -> AxiomReport:
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    w2 = check_axiom2(space)
    w3 = check_axiom3(space)
    w4, sensitive = scan_axiom4(space, max_len)
    phantom = check_saturation(space)
    return AxiomReport(
        axiom2_ok=w2 is None,
        axiom3_ok=w3 is None,
        axiom4_ok=w4 is None,
        max_len=max_len,
        axiom2_witness=w2,
        axiom3_witness=w3,
        axiom4_witness=w4,
        order_sensitive_length=sensitive,
        saturation_ok=phantom is None,
        phantom=phantom,
    )


# -- bitset engine ------------------------------------------------------------------

def _dedupe_first(rows: np.ndarray) -> np.ndarray:
    """Indices of first occurrences of distinct rows, ascending."""
    flat = np.ascontiguousarray(rows.reshape(rows.shape[0], -1))
    if flat.shape[1] == 1:
        _, idx = np.unique(flat[:, 0], return_index=True)
    else:
        keyed = flat.view(np.dtype((np.void, flat.dtype.itemsize * flat.shape[1])))[:, 0]
        _, idx = np.unique(keyed, return_index=True)
    return np.sort(idx)


class _Engine:
    def __init__(self, space: SpaceOfOrderings) -> None:
        n = space.dim
        if n > SCAN_DIM_LIMIT:
            raise ScanTooLarge(f"axiom (4) scan supports dim <= {SCAN_DIM_LIMIT}, got {n}")
        size = 1 << n
        self.size = size
        self.words = max(1, size // 64)
        self.nbytes = max(1, size // 8)
        # The coset a + A_d for d = a ^ t, with A_d = ann(span{s : <s, d> = 0}).
        d2 = np.zeros((size, size, self.words), dtype="<u8")
        everything = np.arange(size)
        for d in range(size):
            agree = [s for s in space.chars if not f2.dot(s, d)]
            free = np.array(list(f2.annihilator(f2.span(agree, n))), dtype=np.int64)
            members = everything[:, None] ^ free[None, :]  # rows: a
            rows = np.repeat(everything, free.size)
            cols = everything ^ d
            cols = np.repeat(cols, free.size)
            flat = members.ravel()
            np.bitwise_or.at(
                d2, (rows, cols, flat // 64), (np.uint64(1) << (flat % 64).astype(np.uint64))
            )
        self.d2 = d2
        self.tables = np.stack([self._table(d2[a]) for a in range(size)])
        self.byte_index = np.arange(self.nbytes)

    def _table(self, base: np.ndarray) -> np.ndarray:
        """Byte lookup table for the union map ``S -> OR of base[t] over t in S``."""
        padded = np.zeros((self.nbytes * 8, self.words), dtype="<u8")
        padded[: base.shape[0]] = base
        padded = padded.reshape(self.nbytes, 8, self.words)
        table = np.zeros((self.nbytes, 256, self.words), dtype="<u8")
        for b in range(8):
            lo, hi = 1 << b, 1 << (b + 1)
            table[:, lo:hi] = table[:, :lo] | padded[:, b][:, None, :]
        return table

    def _gather(self, table: np.ndarray, sets: np.ndarray) -> np.ndarray:
        flat = np.ascontiguousarray(sets.reshape(-1, self.words))
        octets = flat.view(np.uint8)[:, : self.nbytes]
        picked = table[self.byte_index[None, :], octets]  # (M, nbytes, words)
        out = np.bitwise_or.reduce(picked, axis=1)
        return out.reshape(sets.shape)

    def apply(self, a: int, sets: np.ndarray) -> np.ndarray:
        return self._gather(self.tables[a], sets)

    def product_table(self, v: np.ndarray) -> np.ndarray:
        """Table computing ``W -> V . W`` for the fixed value set ``V``."""
        members = self.members(v)
        rows = np.bitwise_or.reduce(self.d2[:, members, :], axis=1)  # rows[z] = B_z(V)
        return self._table(rows)

    def singletons(self) -> np.ndarray:
        out = np.zeros((self.size, self.words), dtype="<u8")
        idx = np.arange(self.size)
        out[idx, idx // 64] = np.uint64(1) << (idx % 64).astype(np.uint64)
        return out

    def members(self, row: np.ndarray) -> np.ndarray:
        bits = np.unpackbits(np.ascontiguousarray(row).view(np.uint8), bitorder="little")
        return np.flatnonzero(bits[: self.size])


class _Family:
    """Distinct value sets of forms of one length, in order of least realising form."""

    def __init__(self, sets: np.ndarray, parent_a: np.ndarray, parent_j: np.ndarray, prev: "_Family | None"):
        self.sets = sets
        self.parent_a = parent_a
        self.parent_j = parent_j
        self.prev = prev

    def rep(self, i: int) -> tuple[int, ...]:
        out = []
        fam: _Family | None = self
        while fam is not None:
            out.append(int(fam.parent_a[i]))
            i = int(fam.parent_j[i])
            fam = fam.prev
        return tuple(out)

    def __len__(self) -> int:
        return self.sets.shape[0]


def _families(engine: _Engine, top: int) -> list[_Family]:
    first = _Family(engine.singletons(), np.arange(engine.size), np.zeros(engine.size, dtype=np.int64), None)
    fams = [first]
    for _ in range(2, top + 1):
        prev = fams[-1]
        m = len(prev)
        cand = np.concatenate([engine.apply(a, prev.sets) for a in range(engine.size)])
        idx = _dedupe_first(cand)
        fams.append(_Family(cand[idx], idx // m, idx % m, prev))
    return fams


def _symmetric_through(engine: _Engine, fams: list[_Family], top: int) -> int | None:
    """Least total length <= top at which value sets depend on entry order."""
    for k in range(1, top - 1):
        sets = fams[k - 1].sets
        left_zero = engine.apply(0, sets)
        for b in range(1, engine.size):
            if not np.array_equal(engine.apply(0, engine.apply(b, sets)), engine.apply(b, left_zero)):
                return k + 2
    return None


def _first_failure(engine: _Engine, lhs: np.ndarray, rhs: np.ndarray) -> tuple[int, int] | None:
    bad = lhs & ~rhs
    rows = np.flatnonzero(bad.any(axis=1))
    if rows.size == 0:
        return None
    r = int(rows[0])
    return r, int(engine.members(bad[r])[0])


def _pair_scan(engine: _Engine, fams: list[_Family], p: int, q: int) -> Axiom4Witness | None:
    fam_p, fam_q = fams[p - 1], fams[q - 1]
    prefix = np.flatnonzero(fam_p.parent_a == 0)
    for i in prefix:
        f = fam_p.rep(int(i))
        lhs = fam_q.sets
        for a in reversed(f):
            lhs = engine.apply(a, lhs)
        rhs = engine._gather(engine.product_table(fam_p.sets[i]), fam_q.sets)
        hit = _first_failure(engine, lhs, rhs)
        if hit is not None:
            return Axiom4Witness(f, fam_q.rep(hit[0]), hit[1])
    return None


def _type_scan(engine: _Engine, fams: list[_Family], p: int, q: int) -> Axiom4Witness | None:
    """Exact scan over ordered f: a type is (D_f, D(f + g) for every class of g)."""
    fam_q = fams[q - 1]
    width = 1 + len(fam_q)
    # Level 1: f = <a>, so D_f = {a} and D(f + g) = B_a(D_g).
    types = np.empty((engine.size, width, engine.words), dtype="<u8")
    types[:, 0] = engine.singletons()
    for a in range(engine.size):
        types[a, 1:] = engine.apply(a, fam_q.sets)
    pa = np.arange(engine.size)
    pj = np.zeros(engine.size, dtype=np.int64)
    level = _Family(types, pa, pj, None)
    for step in range(2, p + 1):
        count = len(level)
        if count * width * engine.words * (engine.size if step < p else 1) > TYPE_CELL_LIMIT:
            raise ScanTooLarge(f"ordered scan at len f = {p} exceeds the cell budget")
        outer = range(engine.size) if step < p else (0,)
        cand = np.concatenate([engine.apply(a, level.sets) for a in outer])
        idx = _dedupe_first(cand)
        level = _Family(cand[idx], np.array(list(outer))[idx // count], idx % count, level)
    for i in range(len(level)):
        row = level.sets[i]
        rhs = engine._gather(engine.product_table(row[0]), fam_q.sets)
        hit = _first_failure(engine, row[1:], rhs)
        if hit is not None:
            return Axiom4Witness(level.rep(i), fam_q.rep(hit[0]), hit[1])
    return None


def scan_axiom4(
    space: SpaceOfOrderings, max_len: int, ordered: bool = False
) -> tuple[Axiom4Witness | None, int | None]:
    """Least axiom (4) failure of total length <= max_len, and the first order-sensitive length.

    ``ordered=True`` forces the ordered-type scan at every length (for testing).
    """
    if max_len < 3:
        return None, None
    engine = _Engine(space)
    fams = _families(engine, max_len - 1)
    sensitive = _symmetric_through(engine, fams, max_len)
    for total in range(3, max_len + 1):
        for p in range(2, total):
            q = total - p
            if not ordered and (sensitive is None or total < sensitive):
                w = _pair_scan(engine, fams, p, q)
            else:
                w = _type_scan(engine, fams, p, q)
            if w is not None:
                return w, sensitive
    return None, sensitive
