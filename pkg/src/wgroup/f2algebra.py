"""Bit-packed linear algebra over GF(2).

Vectors are plain ``int`` bitmasks of a declared length ``n``.  Coordinate 0
is the most significant bit (``1 << (n - 1)``), so integer order is the same
as lexicographic order on the bit string and "leftmost pivot" means "highest
bit".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

DIM_LIMIT = 24


class DimensionError(ValueError):
    """Raised when vectors of different ambient dimensions are mixed."""


def check_dim(n: int, limit: int | None = None) -> None:
    limit = DIM_LIMIT if limit is None else limit
    if not 0 <= n <= limit:
        raise DimensionError(f"ambient dimension {n} outside 0..{limit}")


def check_vector(v: int, n: int) -> None:
    if v < 0 or v >> n:
        raise DimensionError(f"vector {v:#x} does not fit in dimension {n}")


def dot(a: int, b: int) -> int:
    """Standard inner product mod 2."""
    return (a & b).bit_count() & 1


def unit(i: int, n: int) -> int:
    """The i-th standard basis vector (0-based, leftmost first)."""
    return 1 << (n - 1 - i)


def to_bits(v: int, n: int) -> str:
    return format(v, f"0{n}b") if n else ""


def from_bits(s: str) -> int:
    return int(s, 2) if s else 0


def coords(v: int, n: int) -> tuple[int, ...]:
    return tuple((v >> (n - 1 - i)) & 1 for i in range(n))


def from_coords(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | (b & 1)
    return v


def _echelon(vectors: Iterable[int]) -> list[int]:
    """Reduced row echelon basis, rows sorted by pivot (highest bit first)."""
    rows: list[int] = []
    for v in vectors:
        for r in rows:
            if v ^ r < v:  # r's pivot bit is set in v
                v ^= r
        if v:
            top = 1 << (v.bit_length() - 1)
            rows = [r ^ v if r & top else r for r in rows]
            rows.append(v)
    rows.sort(reverse=True)
    return rows


@dataclass(frozen=True)
class F2Subspace:
    """A subspace of GF(2)^n stored by its canonical (RREF) basis."""

    n: int
    basis: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(r.bit_length() - 1 for r in self.basis)

    def reduce(self, v: int) -> int:
        """Reduce ``v`` against the basis; the result is the canonical coset representative."""
        for r in self.basis:
            if v ^ r < v:
                v ^= r
        return v

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def __iter__(self) -> Iterator[int]:
        return self.elements()

    def __len__(self) -> int:
        return 1 << self.dim

    def elements(self) -> Iterator[int]:
        """All elements, in increasing integer order."""
        # Doubling walk over the basis, then sort; subspaces here are small.
        out = [0]
        for r in self.basis:
            out += [x ^ r for x in out]
        yield from sorted(out)

    def add(self, *vectors: int) -> "F2Subspace":
        for v in vectors:
            check_vector(v, self.n)
        return F2Subspace(self.n, tuple(_echelon((*self.basis, *vectors))))

    def __str__(self) -> str:
        body = ", ".join(to_bits(r, self.n) for r in self.basis)
        return f"<{body}> (dim {self.dim} in F2^{self.n})"


def zero_subspace(n: int) -> F2Subspace:
    return F2Subspace(n, ())


def full_space(n: int) -> F2Subspace:
    return F2Subspace(n, tuple(unit(i, n) for i in range(n)))


def span(vectors: Iterable[int], n: int) -> F2Subspace:
    """Canonical span of ``vectors`` inside GF(2)^n."""
    vectors = list(vectors)
    for v in vectors:
        check_vector(v, n)
    return F2Subspace(n, tuple(_echelon(vectors)))


def rank(vectors: Iterable[int]) -> int:
    return len(_echelon(vectors))


def contains(space: F2Subspace, v: int) -> bool:
    check_vector(v, space.n)
    return v in space


def annihilator(space: F2Subspace) -> F2Subspace:
    """{v : <v, s> = 0 for all s in space}."""
    n = space.n
    pivot_bits = [1 << p for p in space.pivots]
    pivot_mask = sum(pivot_bits)
    out = []
    for bit in range(n):
        f = 1 << bit
        if f & pivot_mask:
            continue
        v = f
        for r, p in zip(space.basis, pivot_bits):
            if r & f:
                v |= p
        out.append(v)
    return F2Subspace(n, tuple(_echelon(out)))


def intersection(a: F2Subspace, b: F2Subspace) -> F2Subspace:
    if a.n != b.n:
        raise DimensionError("intersection of subspaces of different ambient spaces")
    both = span((*annihilator(a).basis, *annihilator(b).basis), a.n)
    return annihilator(both)


def solve(rows: Sequence[int], rhs: Sequence[int], n: int) -> tuple[int, F2Subspace] | None:
    """Solve ``<rows[k], x> = rhs[k]`` for all k.

    Returns a particular solution together with the solution space of the
    homogeneous system, or ``None`` if the system is inconsistent.
    """
    if len(rows) != len(rhs):
        raise ValueError("rows and right-hand sides differ in length")
    # Augment each row with its right-hand side as an extra low bit.
    aug = _echelon(((r << 1) | (b & 1)) for r, b in zip(rows, rhs))
    if 1 in aug:
        return None
    x = 0
    for r in aug:
        if r & 1:
            x |= 1 << (r.bit_length() - 2)
    kernel = annihilator(F2Subspace(n, tuple(r >> 1 for r in aug)))
    return x, kernel


def kernel_combinations(images: Sequence[int]) -> list[int]:
    """Basis of {mask : XOR of images[i] over bits i of mask = 0}.

    Bit ``i`` of a mask selects ``images[i]``; the result spans all relations.
    """
    rows: list[tuple[int, int]] = []  # (reduced image, combination mask)
    relations = []
    for i, v in enumerate(images):
        mask = 1 << i
        for r, m in rows:
            if v ^ r < v:
                v, mask = v ^ r, mask ^ m
        if v:
            rows.append((v, mask))
            rows.sort(reverse=True)
        else:
            relations.append(mask)
    return relations
