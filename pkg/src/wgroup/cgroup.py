"""Exact arithmetic in W(n), the free group of exponent 4 with central squares.

An element is stored in the normal form
``g1^e1 ... gn^en * prod_{i<j} [gi, gj]^c_ij`` with ``e_i`` mod 4 and ``c_ij``
mod 2.  Squares and commutators are central, so the Frattini subgroup
``Phi(W)`` (all ``e_i`` even) is an F2 vector space; its coordinates are the
``n`` square bits ``e_i / 2`` followed by the ``n(n-1)/2`` commutator bits.

A presented group ``W(n)/N`` keeps ``N`` as a structured basis: lifts whose
exponent patterns mod 2 are in echelon form, plus the F2 subspace
``K = N & Phi(W)``.  Then ``|N| = 2^(#lifts + dim K)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from . import f2algebra as f2
from .f2algebra import F2Subspace
from .formats import Presentation, Word
from .orderspace import SpaceOfOrderings, normalize

MAX_GENS = 16


@lru_cache(maxsize=None)
def pair_count(n: int) -> int:
    return n * (n - 1) // 2


@lru_cache(maxsize=None)
def pair_bit(n: int, i: int, j: int) -> int:
    """Bit of the commutator coordinate for gens i < j (lexicographic, leftmost first)."""
    k = i * n - i * (i + 1) // 2 + (j - i - 1)
    return 1 << (pair_count(n) - 1 - k)


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@dataclass(frozen=True)
class NormalFormElement:
    n: int
    exps: tuple[int, ...]
    comms: int = 0

    def __post_init__(self) -> None:
        if len(self.exps) != self.n or any(not 0 <= e < 4 for e in self.exps):
            raise ValueError("exps must be n residues mod 4")
        if self.comms < 0 or self.comms >> pair_count(self.n):
            raise ValueError("comms does not fit the pair count")

    @property
    def pattern(self) -> int:
        """Exponents mod 2 as an F2 vector (generator 1 is the leftmost bit)."""
        return f2.from_coords([e & 1 for e in self.exps])

    @property
    def comm_bits(self) -> tuple[int, ...]:
        return f2.coords(self.comms, pair_count(self.n))

    def is_identity(self) -> bool:
        return self.comms == 0 and not any(self.exps)

    def in_frattini(self) -> bool:
        return not any(e & 1 for e in self.exps)

    def __mul__(self, other: "NormalFormElement") -> "NormalFormElement":
        return multiply(self, other)

    def __str__(self) -> str:
        parts = [f"g{i + 1}" + ("" if e == 1 else f"^{e}") for i, e in enumerate(self.exps) if e]
        parts += [f"[g{i + 1},g{j + 1}]" for i, j in pairs(self.n) if self.comms & pair_bit(self.n, i, j)]
        return "*".join(parts) or "1"


def identity(n: int) -> NormalFormElement:
    return NormalFormElement(n, (0,) * n, 0)


def generator(n: int, i: int, exponent: int = 1) -> NormalFormElement:
    exps = [0] * n
    exps[i] = exponent % 4
    return NormalFormElement(n, tuple(exps), 0)


def _collect(n: int, right_exps: Sequence[int], left_exps: Sequence[int]) -> int:
    """B(x, y): bit (i, j) is y_i * x_j mod 2 for i < j."""
    out = 0
    for i in range(n):
        if right_exps[i] & 1:
            for j in range(i + 1, n):
                if left_exps[j] & 1:
                    out ^= pair_bit(n, i, j)
    return out


def multiply(x: NormalFormElement, y: NormalFormElement) -> NormalFormElement:
    if x.n != y.n:
        raise ValueError(f"size mismatch: W({x.n}) and W({y.n})")
    n = x.n
    exps = tuple((a + b) & 3 for a, b in zip(x.exps, y.exps))
    return NormalFormElement(n, exps, x.comms ^ y.comms ^ _collect(n, y.exps, x.exps))


def power(x: NormalFormElement, k: int) -> NormalFormElement:
    out = identity(x.n)
    for _ in range(k % 4):
        out = multiply(out, x)
    return out


def inverse(x: NormalFormElement) -> NormalFormElement:
    return power(x, 3)


def commutator(x: NormalFormElement, y: NormalFormElement) -> NormalFormElement:
    """[x, y] = x^-1 y^-1 x y."""
    return multiply(multiply(inverse(x), inverse(y)), multiply(x, y))


def order_of(x: NormalFormElement, group: "PresentedCGroup | None" = None) -> int:
    """Least k in {1, 2, 4} with x^k = 1, in W(n) or in the quotient ``group``."""
    trivial = group.contains if group is not None else NormalFormElement.is_identity
    if trivial(x):
        return 1
    return 2 if trivial(multiply(x, x)) else 4


def evaluate_word(word: Word, n: int) -> NormalFormElement:
    out = identity(n)
    for i, e in word:
        if not 0 <= i < n:
            raise ValueError(f"generator s{i + 1} out of range")
        out = multiply(out, generator(n, i, e))
    return out


def random_element(n: int, rng: random.Random) -> NormalFormElement:
    return NormalFormElement(n, tuple(rng.randrange(4) for _ in range(n)), rng.getrandbits(pair_count(n)) if n > 1 else 0)


# -- Frattini coordinates ------------------------------------------------------------

def phi_dim(n: int) -> int:
    return n + pair_count(n)


def phi_vector(x: NormalFormElement) -> int:
    if not x.in_frattini():
        raise ValueError(f"{x} is not in the Frattini subgroup")
    halves = f2.from_coords([e >> 1 for e in x.exps])
    return (halves << pair_count(x.n)) | x.comms


def commutator_space(n: int) -> F2Subspace:
    """The subspace of Phi-coordinates spanned by the [gi, gj]."""
    return f2.span((1 << k for k in range(pair_count(n))), phi_dim(n))


def square_of_pattern(n: int, eps: int) -> int:
    """Phi-coordinates of x^2 for any x whose exponents are ``eps`` mod 2."""
    bits = f2.coords(eps, n)
    comms = 0
    for i, j in pairs(n):
        if bits[i] and bits[j]:
            comms ^= pair_bit(n, i, j)
    return (eps << pair_count(n)) | comms


def commutator_of_patterns(n: int, eps: int, eta: int) -> int:
    """Phi-coordinates of [x, y] for patterns ``eps``, ``eta``: c_ij = e_i f_j + e_j f_i."""
    a, b = f2.coords(eps, n), f2.coords(eta, n)
    comms = 0
    for i, j in pairs(n):
        if (a[i] & b[j]) ^ (a[j] & b[i]):
            comms ^= pair_bit(n, i, j)
    return comms


def pattern_lift(n: int, eps: int) -> NormalFormElement:
    return NormalFormElement(n, f2.coords(eps, n), 0)


# -- presented groups ---------------------------------------------------------------

@dataclass(frozen=True)
class PresentedCGroup:
    """The quotient W(n)/N, where N is the normal closure of ``relators``."""

    n: int
    relators: tuple[Word, ...] = ()
    lifts: tuple[NormalFormElement, ...] = field(init=False, repr=False)
    central: F2Subspace = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_GENS:
            raise ValueError(f"generator count must be in 1..{MAX_GENS}")
        object.__setattr__(self, "relators", tuple(tuple(w) for w in self.relators))
        lifts, central = normal_closure(self.n, [evaluate_word(w, self.n) for w in self.relators])
        object.__setattr__(self, "lifts", lifts)
        object.__setattr__(self, "central", central)

    @classmethod
    def from_presentation(cls, p: Presentation) -> "PresentedCGroup":
        return cls(p.gens, p.relators)

    def presentation(self) -> Presentation:
        return Presentation(self.n, self.relators)

    @property
    def pattern_space(self) -> F2Subspace:
        """A-bar: exponent patterns mod 2 of elements of N."""
        return f2.span((x.pattern for x in self.lifts), self.n)

    @property
    def log2_relation_subgroup(self) -> int:
        return len(self.lifts) + self.central.dim

    def reduce(self, x: NormalFormElement) -> NormalFormElement:
        """Multiply by lifts until the pattern has no pivot in common with them."""
        by_pivot = {lift.pattern.bit_length(): lift for lift in self.lifts}
        while x.pattern:
            lift = by_pivot.get(x.pattern.bit_length())
            if lift is None:
                break
            x = multiply(x, inverse(lift))
        return x

    def contains(self, x: NormalFormElement) -> bool:
        """Membership in N."""
        if x.n != self.n:
            raise ValueError("size mismatch")
        r = self.reduce(x)
        return r.in_frattini() and phi_vector(r) in self.central


def normal_closure(n: int, elements: Iterable[NormalFormElement]) -> tuple[tuple[NormalFormElement, ...], F2Subspace]:
    """Structured basis (lifts, K) of the normal closure of ``elements``."""
    gens = [generator(n, i) for i in range(n)]
    by_pivot: dict[int, NormalFormElement] = {}
    central = f2.zero_subspace(phi_dim(n))
    queue = list(elements)
    while queue:
        x = queue.pop()
        while x.pattern and x.pattern.bit_length() in by_pivot:
            x = multiply(x, inverse(by_pivot[x.pattern.bit_length()]))
        if not x.pattern:
            v = phi_vector(x)
            if v not in central:
                central = central.add(v)
            continue
        queue.append(multiply(x, x))
        queue += [commutator(x, g) for g in gens]
        queue += [commutator(x, y) for y in by_pivot.values()]
        by_pivot[x.pattern.bit_length()] = x
    lifts = tuple(by_pivot[k] for k in sorted(by_pivot, reverse=True))
    return lifts, central


def free_log2_order(n: int) -> int:
    return 2 * n + pair_count(n)


def quotient_order(p: PresentedCGroup) -> int:
    """log2 |W(n)/N|."""
    return free_log2_order(p.n) - p.log2_relation_subgroup


@dataclass(frozen=True)
class FrattiniInfo:
    log2_order: int
    commutator_log2: int
    equals_commutator: bool | None
    basis: tuple[int, ...]  # Phi coordinates of a complement of K


def generators_are_involutions(p: PresentedCGroup) -> bool:
    return all(p.contains(generator(p.n, i, 2)) for i in range(p.n))


def frattini(p: PresentedCGroup) -> FrattiniInfo:
    n = p.n
    total = phi_dim(n)
    log2_phi = total - p.central.dim
    comm = commutator_space(n)
    comm_log2 = comm.dim - f2.intersection(comm, p.central).dim
    complement = []
    acc = p.central
    for k in range(total):
        u = f2.unit(k, total)
        grown = acc.add(u)
        if grown.dim > acc.dim:
            complement.append(u)
            acc = grown
    equal = (log2_phi == comm_log2) if generators_are_involutions(p) else None
    return FrattiniInfo(log2_phi, comm_log2, equal, tuple(complement))


@dataclass(frozen=True)
class InvolutionClass:
    pattern: int  # least pattern in the class mod A-bar
    witness: int  # a pattern in the class whose lift squares into N


def _class_representatives(abar: F2Subspace) -> list[int]:
    """Least element of each nonzero coset of ``abar`` in F2^n, ascending."""
    n = abar.n
    pivots = set(abar.pivots)
    free = [b for b in range(n) if b not in pivots]
    out = []
    for mask in range(1, 1 << len(free)):
        out.append(sum(1 << b for k, b in enumerate(free) if mask >> k & 1))
    return sorted(out)


def involution_classes(p: PresentedCGroup) -> list[InvolutionClass]:
    """Nontrivial cosets of Phi in the quotient that contain an element of order 2."""
    n = p.n
    abar = p.pattern_space
    out = []
    for eps in _class_representatives(abar):
        for shift in abar:
            t = eps ^ shift
            if square_of_pattern(n, t) in p.central:
                out.append(InvolutionClass(eps, t))
                break
    return out


class ExtractionError(ValueError):
    """The presentation does not yield a candidate space of orderings."""


def pattern_character(p: PresentedCGroup, eps: int) -> int:
    """Sign vector, on the basis of the dual lattice A-bar^perp, of the class ``eps``."""
    basis = f2.annihilator(p.pattern_space).basis
    return f2.from_coords([f2.dot(h, eps) for h in basis])


def candidate_space_raw(p: PresentedCGroup) -> SpaceOfOrderings:
    """Candidate space in the coordinates dual to the generator classes."""
    classes = involution_classes(p)
    if not classes:
        raise ExtractionError("no involution classes")
    dim = p.n - p.pattern_space.dim
    chars = [pattern_character(p, c.pattern) for c in classes]
    solved = f2.solve(chars, [1] * len(chars), dim)
    if solved is None:
        raise ExtractionError("no consistent -1: no element is negative at every candidate character")
    particular, kernel = solved
    minus_one = min(particular ^ v for v in kernel)
    if minus_one == 0:  # pragma: no cover - rhs is all ones
        raise ExtractionError("no consistent -1")
    return SpaceOfOrderings(dim, minus_one, tuple(chars))


def extract_candidate_space(p: PresentedCGroup) -> SpaceOfOrderings:
    return normalize(candidate_space_raw(p))


@dataclass(frozen=True)
class CenterInfo:
    log2_order: int
    central_classes: tuple[int, ...]  # nonzero classes mod A-bar of Z(H), least representatives
    order4_classes: tuple[int, ...]  # those containing an element of order 4
    order4_rank: int


def center_of_even_subgroup(p: PresentedCGroup) -> CenterInfo:
    """Z(H) for H generated by the products gi gj in the quotient."""
    if not generators_are_involutions(p):
        raise ValueError("center_of_even_subgroup needs every generator square among the relations")
    n = p.n
    abar = p.pattern_space
    even = f2.span([f2.unit(0, n) ^ f2.unit(i, n) for i in range(1, n)] + list(abar.basis), n)
    # Z-bar is the kernel of eps -> ([eps, h] mod K) over a basis of H's patterns.
    width = phi_dim(n)
    images = []
    for u in even.basis:
        img = 0
        for h in even.basis:
            img = (img << width) | p.central.reduce(commutator_of_patterns(n, u, h))
        images.append(img)
    zbar = f2.span(
        (sum_basis(even.basis, mask) for mask in f2.kernel_combinations(images)), n
    )
    log2 = zbar.dim - abar.dim + frattini(p).log2_order
    classes = sorted({abar.reduce(v) for v in zbar if abar.reduce(v)})
    order4 = tuple(
        c for c in classes if any(square_of_pattern(n, c ^ s) not in p.central for s in abar)
    )
    return CenterInfo(log2, tuple(classes), order4, f2.span(order4, n).dim)


def sum_basis(basis: Sequence[int], mask: int) -> int:
    v = 0
    for i, b in enumerate(basis):
        if mask >> i & 1:
            v ^= b
    return v


__all__ = [
    "NormalFormElement", "PresentedCGroup", "FrattiniInfo", "InvolutionClass", "CenterInfo",
    "ExtractionError", "identity", "generator", "multiply", "power", "inverse", "commutator",
    "order_of", "evaluate_word", "random_element", "phi_vector", "phi_dim", "square_of_pattern",
    "commutator_of_patterns", "normal_closure", "quotient_order", "free_log2_order", "frattini",
    "involution_classes", "candidate_space_raw", "extract_candidate_space", "pattern_character",
    "center_of_even_subgroup", "generators_are_involutions", "pair_bit", "pair_count",
]
