"""Finite spaces of orderings.

A space is a pair ``(X, G)`` where ``G = F2^dim`` is the square-class group and
``X`` is a finite set of characters of ``G``.  A character is stored as its
sign vector: bit ``i`` is set iff the character sends basis element ``b_i`` to
-1, so evaluation is a dot product mod 2 and the product of two characters is
the XOR of their sign vectors.  In canonical form the distinguished element
-1 is the first basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

from . import f2algebra as f2
from .f2algebra import F2Subspace, dot, unit


class SpaceError(ValueError):
    """Invalid input for a space-of-orderings operation."""


class NotASubspace(SpaceError):
    """The requested character set does not satisfy the duality condition."""


@dataclass(frozen=True)
class SpaceOfOrderings:
    """Characters ``chars`` of ``F2^dim`` with distinguished element ``minus_one``.

    Construction only checks structure (sizes, distinctness); the axioms are
    checked by :func:`wgroup.axioms.verify_axioms`.
    """

    dim: int
    minus_one: int
    chars: tuple[int, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        f2.check_dim(self.dim)
        if self.dim < 1:
            raise SpaceError("a space of orderings needs dim >= 1")
        f2.check_vector(self.minus_one, self.dim)
        if self.minus_one == 0:
            raise SpaceError("minus_one must be a nonzero element of G")
        chars = tuple(self.chars)
        if not chars:
            raise SpaceError("a space of orderings needs at least one character")
        for s in chars:
            f2.check_vector(s, self.dim)
        if len(set(chars)) != len(chars):
            raise SpaceError("characters must be distinct")
        object.__setattr__(self, "chars", tuple(sorted(chars)))

    @classmethod
    def canonical(cls, dim: int, chars: Iterable[int], name: str | None = None) -> "SpaceOfOrderings":
        return cls(dim, unit(0, dim), tuple(chars), name)

    @property
    def size(self) -> int:
        return len(self.chars)

    @property
    def is_canonical(self) -> bool:
        return self.minus_one == unit(0, self.dim)

    def __contains__(self, sigma: int) -> bool:
        return sigma in self._charset

    @property
    def _charset(self) -> frozenset[int]:
        cached = self.__dict__.get("_cs")
        if cached is None:
            cached = frozenset(self.chars)
            object.__setattr__(self, "_cs", cached)
        return cached

    def elements(self) -> range:
        """All elements of G."""
        return range(1 << self.dim)

    def __str__(self) -> str:
        body = ", ".join(f2.to_bits(s, self.dim) for s in self.chars)
        return f"SpaceOfOrderings(dim={self.dim}, -1={f2.to_bits(self.minus_one, self.dim)}, X={{{body}}})"


# -- evaluation, forms, signatures -------------------------------------------------

def evaluate(sigma: int, a: int, dim: int | None = None) -> int:
    """Value (+1 or -1) of the character with sign vector ``sigma`` at ``a``."""
    if dim is not None:
        f2.check_vector(sigma, dim)
        f2.check_vector(a, dim)
    return -1 if dot(sigma, a) else 1


def _check_form(space: SpaceOfOrderings, form: Sequence[int]) -> tuple[int, ...]:
    form = tuple(form)
    if not form:
        raise SpaceError("forms must have at least one entry")
    for a in form:
        f2.check_vector(a, space.dim)
    return form


def signature(sigma: int, form: Sequence[int]) -> int:
    """Sum of the signs of the entries of ``form`` at ``sigma``."""
    if not form:
        raise SpaceError("forms must have at least one entry")
    return sum(-1 if dot(sigma, a) else 1 for a in form)


def isometric(space: SpaceOfOrderings, f: Sequence[int], g: Sequence[int]) -> bool:
    if len(f) != len(g):
        return False
    return all(signature(s, f) == signature(s, g) for s in space.chars)


def binary_value_set(space: SpaceOfOrderings, a: int, b: int) -> frozenset[int]:
    """D<a, b>: elements c with sigma(c) in {sigma(a), sigma(b)} for every sigma in X.

    The set is the coset ``a + ann(span{sigma : sigma(a) = sigma(b)})``.
    """
    agree = [s for s in space.chars if not dot(s, a ^ b)]
    free = f2.annihilator(f2.span(agree, space.dim))
    return frozenset(a ^ v for v in free)


def value_set(space: SpaceOfOrderings, form: Sequence[int]) -> frozenset[int]:
    """D_f for a diagonal form, by left-nested induction on the entries."""
    form = _check_form(space, form)
    current = frozenset([form[-1]])
    for a in reversed(form[:-1]):
        out: set[int] = set()
        for t in current:
            out |= binary_value_set(space, a, t)
        current = frozenset(out)
    return current


def scale(c: int, form: Sequence[int]) -> tuple[int, ...]:
    return tuple(c ^ a for a in form)


# -- rank, subspaces, X_alpha ---------------------------------------------------------

def char_span(space: SpaceOfOrderings) -> F2Subspace:
    return f2.span(space.chars, space.dim)


def rank(space: SpaceOfOrderings) -> int:
    return char_span(space).dim


def change_basis(chars: Iterable[int], basis: Sequence[int]) -> list[int]:
    """Sign vectors of ``chars`` with respect to a new basis of G."""
    return [f2.from_coords([dot(s, b) for b in basis]) for s in chars]


def _basis_through(first: int, candidates: Iterable[int], modulo: F2Subspace, size: int) -> list[int]:
    """Extend ``[first]`` by ``candidates`` to ``size`` vectors independent mod ``modulo``."""
    acc = modulo.add(first)
    if acc.dim == modulo.dim:
        raise SpaceError("minus_one lies in the subgroup being factored out")
    basis = [first]
    for v in candidates:
        if len(basis) == size:
            break
        bigger = acc.add(v)
        if bigger.dim > acc.dim:
            basis.append(v)
            acc = bigger
    if len(basis) != size:
        raise SpaceError("could not complete a basis")
    return basis


def normalize(space: SpaceOfOrderings) -> SpaceOfOrderings:
    """Re-base G so that minus_one becomes the first basis vector."""
    if space.is_canonical:
        return space
    n = space.dim
    lead = space.minus_one.bit_length() - 1
    basis = [space.minus_one] + [1 << (n - 1 - i) for i in range(n) if n - 1 - i != lead]
    return SpaceOfOrderings.canonical(n, change_basis(space.chars, basis), space.name)


def _odd_products(gens: Sequence[int], n: int) -> tuple[int, F2Subspace]:
    """Products of an odd number of ``gens``, as the coset ``offset + even``."""
    first = gens[0]
    even = f2.span((g ^ first for g in gens[1:]), n)
    return first, even


def _in_odd(v: int, offset: int, even: F2Subspace) -> bool:
    if offset in even:  # odd and even products coincide
        return v in even
    return (v ^ offset) in even


def subspace_members(space: SpaceOfOrderings, generators: Iterable[int]) -> tuple[int, ...]:
    """Y = elements of X that are products of an odd number of generators."""
    gens = list(generators)
    if not gens:
        raise SpaceError("subspace needs at least one generator")
    for g in gens:
        if g not in space:
            raise SpaceError(f"generator {f2.to_bits(g, space.dim)} is not in X")
    offset, even = _odd_products(gens, space.dim)
    return tuple(s for s in space.chars if _in_odd(s, offset, even))


def subspace(space: SpaceOfOrderings, generators: Iterable[int]) -> SpaceOfOrderings:
    """The subspace (Y, G/Delta) generated by ``generators``, re-based canonically."""
    members = subspace_members(space, generators)
    return _restrict(space, members)


def _restrict(space: SpaceOfOrderings, members: Sequence[int]) -> SpaceOfOrderings:
    n = space.dim
    y_span = f2.span(members, n)
    delta = f2.annihilator(y_span)
    # Duality: Y = Delta^perp & X.
    closed = tuple(s for s in space.chars if s in y_span)
    if set(closed) != set(members):
        raise NotASubspace(
            f"not a subspace: {len(closed)} characters of X lie in the span of the {len(members)} given"
        )
    size = n - delta.dim
    basis = _basis_through(space.minus_one, (unit(i, n) for i in range(n)), delta, size)
    return SpaceOfOrderings.canonical(size, change_basis(members, basis))


def x_alpha_members(space: SpaceOfOrderings, alpha: int) -> frozenset[int]:
    f2.check_vector(alpha, space.dim)
    return frozenset(s for s in space.chars if (s ^ alpha) in space)


def x_alpha(space: SpaceOfOrderings, alpha: int) -> SpaceOfOrderings | None:
    """The subspace X_alpha = {sigma : sigma*alpha in X}; ``None`` when empty."""
    members = x_alpha_members(space, alpha)
    if not members:
        return None
    return _restrict(space, sorted(members))


# -- connectivity -------------------------------------------------------------------

def simply_connected(space: SpaceOfOrderings, sigma: int, tau: int) -> bool:
    for s in (sigma, tau):
        if s not in space:
            raise SpaceError(f"character {f2.to_bits(s, space.dim)} is not in X")
    if sigma == tau:
        return False
    prod = sigma ^ tau
    return any(t not in (sigma, tau) and (t ^ prod) in space for t in space.chars)


class _DisjointSet:
    def __init__(self, items: Iterable[int]) -> None:
        self.parent = {x: x for x in items}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def component_members(space: SpaceOfOrderings) -> list[tuple[int, ...]]:
    """Connected components as sorted member tuples, ordered by smallest member."""
    pairs_by_product: dict[int, list[tuple[int, int]]] = {}
    chars = space.chars
    for i, s in enumerate(chars):
        for t in chars[i + 1:]:
            pairs_by_product.setdefault(s ^ t, []).append((s, t))
    dsu = _DisjointSet(chars)
    for pairs in pairs_by_product.values():
        if len(pairs) > 1:
            for s, t in pairs:
                dsu.union(s, t)
    groups: dict[int, list[int]] = {}
    for s in chars:
        groups.setdefault(dsu.find(s), []).append(s)
    return sorted(tuple(sorted(g)) for g in groups.values())


def components(space: SpaceOfOrderings) -> list[SpaceOfOrderings]:
    out = []
    for members in component_members(space):
        try:
            out.append(_restrict(space, members))
        except NotASubspace as exc:
            raise SpaceError(f"component is not a subspace; input is not a space of orderings ({exc})") from exc
    return out


def is_connected(space: SpaceOfOrderings) -> bool:
    return len(component_members(space)) == 1


# -- translations -------------------------------------------------------------------

def translation_group(space: SpaceOfOrderings) -> F2Subspace:
    """T = {alpha : alpha X = X}."""
    chars = space.chars
    candidates = reduce(
        lambda acc, s: acc & {s ^ t for t in chars},
        chars[1:],
        {chars[0] ^ t for t in chars},
    )
    xs = space._charset
    members = [a for a in candidates if all((a ^ s) in xs for s in chars)]
    group = f2.span(members, space.dim)
    if len(group) != len(members):  # pragma: no cover - closure is automatic
        raise SpaceError("translation set is not closed under products")
    return group


def quotient_by_translations(space: SpaceOfOrderings) -> SpaceOfOrderings:
    """(X', G') with G' = T^perp and X' the restrictions of X to G'."""
    if not is_connected(space):
        raise SpaceError("quotient_by_translations needs a connected space")
    if rank(space) <= 1:
        raise SpaceError("quotient_by_translations needs rank > 1")
    trans = translation_group(space)
    g_prime = f2.annihilator(trans)
    if space.minus_one not in g_prime:
        raise SpaceError("minus_one is not fixed by the translation group")
    basis = _basis_through(space.minus_one, g_prime.basis, f2.zero_subspace(space.dim), g_prime.dim)
    restricted = set(change_basis(space.chars, basis))
    return SpaceOfOrderings.canonical(g_prime.dim, restricted)


# -- equivalence --------------------------------------------------------------------

LinearMap = tuple[int, ...]


def apply_map(phi: LinearMap, a: int, dim: int) -> int:
    """Image of ``a`` under the linear map with unit-vector images ``phi``."""
    out = 0
    for i in range(dim):
        if (a >> (dim - 1 - i)) & 1:
            out ^= phi[i]
    return out


def pullback(phi: LinearMap, sigma: int) -> int:
    """Sign vector of ``sigma o phi``."""
    return f2.from_coords([dot(sigma, img) for img in phi])


def _transpose(cols: Sequence[int], n: int) -> LinearMap:
    """Columns (images of unit vectors) of the transpose matrix."""
    return tuple(
        f2.from_coords([(cols[j] >> (n - 1 - i)) & 1 for j in range(n)]) for i in range(n)
    )


def equivalent(a: SpaceOfOrderings, b: SpaceOfOrderings) -> LinearMap | None:
    """A linear iso ``phi: G_a -> G_b`` fixing -1 whose dual maps X_b onto X_a.

    ``phi`` is returned as the images of the unit vectors of G_a.  The search
    assigns images to a basis of span(X_b) drawn from X_b, pruning on every
    character of X_b already determined by the partial assignment.
    """
    n = a.dim
    if n != b.dim or a.size != b.size or rank(a) != rank(b):
        return None
    xa = a._charset
    # Basis of span(X_b) chosen from X_b, and each character's coefficients.
    basis: list[int] = []
    acc = f2.zero_subspace(n)
    for s in b.chars:
        bigger = acc.add(s)
        if bigger.dim > acc.dim:
            basis.append(s)
            acc = bigger
    k = len(basis)
    coeff: dict[int, int] = {}
    for mask in range(1, 1 << k):
        v = 0
        for j in range(k):
            if mask >> j & 1:
                v ^= basis[j]
        coeff[v] = mask
    # Characters of X_b grouped by the highest basis index they use.
    by_level: list[list[int]] = [[] for _ in range(k)]
    for s in b.chars:
        by_level[coeff[s].bit_length() - 1].append(coeff[s])

    images: list[int] = []

    def image_of(mask: int) -> int:
        v = 0
        for j in range(mask.bit_length()):
            if mask >> j & 1:
                v ^= images[j]
        return v

    def search(level: int, span_so_far: F2Subspace) -> list[int] | None:
        if level == k:
            return list(images)
        for cand in a.chars:
            grown = span_so_far.add(cand)
            if grown.dim == span_so_far.dim:
                continue
            images.append(cand)
            if all(image_of(m) in xa for m in by_level[level]):
                found = search(level + 1, grown)
                if found is not None:
                    return found
            images.pop()
        return None

    found = search(0, f2.zero_subspace(n))
    if found is None:
        return None
    # psi: chars of b -> chars of a.  Complete on a complement of span(X_b),
    # keeping <psi(c), -1_a> = <c, -1_b> so that phi = psi^T fixes -1.
    src = list(basis)
    dst = list(found)
    src_span, dst_span = acc, f2.span(dst, n)
    for i in range(n):
        c = unit(i, n)
        if len(src) == n:
            break
        if src_span.add(c).dim == src_span.dim:
            continue
        want = dot(c, b.minus_one)
        for d in range(1, 1 << n):
            if dot(d, a.minus_one) == want and dst_span.add(d).dim > dst_span.dim:
                break
        else:
            return None
        src.append(c)
        dst.append(d)
        src_span, dst_span = src_span.add(c), dst_span.add(d)
    # Express psi on unit vectors: solve for each unit as a combination of src.
    cols = []
    for j in range(n):
        u = unit(j, n)
        combo = _combination(src, u, n)
        v = 0
        for idx in combo:
            v ^= dst[idx]
        cols.append(v)
    phi = _transpose(cols, n)
    if apply_map(phi, a.minus_one, n) != b.minus_one:
        return None
    if {pullback(phi, s) for s in b.chars} != set(a.chars):  # pragma: no cover - guarded above
        return None
    return phi


def _combination(vectors: Sequence[int], target: int, n: int) -> list[int]:
    """Indices of ``vectors`` summing to ``target`` (vectors must be a basis)."""
    rows = []  # (reduced vector, index mask)
    for i, v in enumerate(vectors):
        mask = 1 << i
        for r, m in rows:
            if v ^ r < v:
                v, mask = v ^ r, mask ^ m
        rows.append((v, mask))
        rows.sort(reverse=True)
    mask = 0
    for r, m in rows:
        if target ^ r < target:
            target, mask = target ^ r, mask ^ m
    if target:
        raise SpaceError("target not in span")
    return [i for i in range(len(vectors)) if mask >> i & 1]


def random_basis_change(space: SpaceOfOrderings, rng) -> tuple[SpaceOfOrderings, LinearMap]:
    """Apply a random automorphism of G fixing -1; returns the image space and the map."""
    n = space.dim
    while True:
        images = [space.minus_one] + [rng.randrange(1 << n) for _ in range(n - 1)]
        if f2.rank(images) == n:
            break
    # phi maps the basis (-1, rest...) to images; build on unit vectors.
    lead = space.minus_one.bit_length() - 1
    src = [space.minus_one] + [1 << (n - 1 - i) for i in range(n) if n - 1 - i != lead]
    phi = []
    for j in range(n):
        combo = _combination(src, unit(j, n), n)
        v = 0
        for idx in combo:
            v ^= images[idx]
        phi.append(v)
    phi_t = tuple(phi)
    # New space B with G_B = G; X_B = chars s with s o phi in X_A, i.e. s = psi^{-1}.
    inv = _inverse(phi_t, n)
    new_chars = [pullback(inv, s) for s in space.chars]
    return SpaceOfOrderings(n, apply_map(phi_t, space.minus_one, n), tuple(new_chars), space.name), phi_t


def _inverse(phi: LinearMap, n: int) -> LinearMap:
    out = []
    for j in range(n):
        combo = _combination(list(phi), unit(j, n), n)
        v = 0
        for idx in combo:
            v ^= unit(idx, n)
        out.append(v)
    return tuple(out)


__all__ = [
    "SpaceError", "NotASubspace", "SpaceOfOrderings", "evaluate", "signature", "isometric",
    "binary_value_set", "value_set", "scale", "rank", "char_span", "normalize", "change_basis",
    "subspace", "subspace_members", "x_alpha", "x_alpha_members", "simply_connected",
    "component_members", "components", "is_connected", "translation_group",
    "quotient_by_translations", "equivalent", "apply_map", "pullback", "random_basis_change",
]
