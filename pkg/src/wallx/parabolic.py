"""Standard parabolics of GL_n, closed positive-root subsets relative to a
parabolic, the subgroup of Weyl elements compatible with such a subset, and
refinement enumeration.

A closed set is stored as its parabolic plus the extra roots outside
R(P)^+.  "Closed relative to P" means three things: the set contains
R(P)^+, it is transitively closed (e_i-e_j and e_j-e_k in the set force
e_i-e_k), and its extra part is stable under the Weyl group of the Levi.

>>> b = StandardParabolic((1, 1, 1))
>>> sorted(perm_to_oneline(w) for w in refinements(ClosedRootSet(b, frozenset({(0, 1)}))))
[[1, 2, 3], [1, 3, 2], [2, 3, 1]]
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations as _all_perms
from itertools import product as _product

from .rootdata import (
    Perm,
    Root,
    act_root,
    identity_perm,
    is_positive_root,
    perm_to_oneline,
    positive_roots,
    simple_roots,
    weyl_enumerate,
)


@dataclass(frozen=True)
class StandardParabolic:
    """Determined by an ordered composition of n (the Levi block sizes)."""

    composition: tuple[int, ...]

    def __post_init__(self):
        if not self.composition or any(c <= 0 for c in self.composition):
            raise ValueError(f"composition must be positive integers, got {self.composition}")

    @property
    def n(self) -> int:
        return sum(self.composition)

    @property
    def k(self) -> int:
        return len(self.composition)

    def block_of(self, i: int) -> int:
        """The Levi block (0-based) containing position i."""
        acc = 0
        for r, size in enumerate(self.composition):
            acc += size
            if i < acc:
                return r
        raise IndexError(i)

    def beta(self) -> tuple[int, ...]:
        return tuple(self.block_of(i) for i in range(self.n))

    def block_starts(self) -> tuple[int, ...]:
        starts = [0]
        for size in self.composition[:-1]:
            starts.append(starts[-1] + size)
        return tuple(starts)

    def levi_simple_roots(self) -> frozenset[Root]:
        b = self.beta()
        return frozenset((i, i + 1) for i in range(self.n - 1) if b[i] == b[i + 1])

    def levi_positive_roots(self) -> frozenset[Root]:
        b = self.beta()
        return frozenset((i, j) for (i, j) in positive_roots(self.n) if b[i] == b[j])

    def levi_weyl(self) -> list[Perm]:
        """Block-internal permutations, |result| = prod(n_r!)."""
        blocks = []
        start = 0
        for size in self.composition:
            blocks.append([tuple(start + p for p in perm)
                           for perm in _all_perms(range(size))])
            start += size
        out = []
        for choice in _product(*blocks):
            img = [0] * self.n
            start = 0
            for size, blockperm in zip(self.composition, choice):
                for offset in range(size):
                    img[start + offset] = blockperm[offset]
                start += size
            out.append(tuple(img))
        return out


def borel(n: int) -> StandardParabolic:
    return StandardParabolic((1,) * n)


@dataclass(frozen=True)
class ClosedRootSet:
    """A closed subset of R^+ relative to a parabolic, stored as the extra
    part outside R(P)^+."""

    parabolic: StandardParabolic
    extra: frozenset[Root]

    def __post_init__(self):
        n = self.parabolic.n
        levi = self.parabolic.levi_positive_roots()
        for r in self.extra:
            if not is_positive_root(r) or r[1] >= n or r[0] < 0:
                raise ValueError(f"{r} is not a positive root for n={n}")
            if r in levi:
                raise ValueError(f"{r} lies in R(P)^+; store only the extra part")

    @property
    def n(self) -> int:
        return self.parabolic.n

    def full_roots(self) -> frozenset[Root]:
        return self.parabolic.levi_positive_roots() | self.extra

    @staticmethod
    def from_roots(parabolic: StandardParabolic, roots) -> "ClosedRootSet":
        levi = parabolic.levi_positive_roots()
        return ClosedRootSet(parabolic, frozenset(roots) - levi)


def is_closed_relative(roots, parabolic: StandardParabolic) -> bool:
    """The three closure conditions for a set of positive roots: contains
    R(P)^+, transitively closed, extra part stable under the Levi Weyl group.
    """
    c = frozenset(roots)
    n = parabolic.n
    if any(not is_positive_root(r) for r in c):
        raise ValueError("input must be a subset of the positive roots")
    levi = parabolic.levi_positive_roots()
    if not levi <= c:
        return False
    for (i, j) in c:
        for (j2, k) in c:
            if j2 == j and (i, k) not in c and i != k:
                return False
    extra = c - levi
    for w in parabolic.levi_weyl():
        if any(act_root(w, r) not in extra for r in extra):
            return False
    return True


def block_permutation(w: Perm, parabolic: StandardParabolic) -> Perm:
    """The induced permutation of Levi blocks, for w with w(S(P)) ⊆ S.

    Such a w shifts each block rigidly; the result records which block slot
    (of the transported parabolic, whose blocks are read off in position
    order) each original block lands in.
    """
    n = parabolic.n
    simple = set(simple_roots(n))
    for root in parabolic.levi_simple_roots():
        if act_root(w, root) not in simple:
            raise ValueError("w does not map the Levi simple roots to simple roots")
    starts = parabolic.block_starts()
    image_starts = sorted((w[s], r) for r, s in enumerate(starts))
    out = [0] * parabolic.k
    for slot, (_, r) in enumerate(image_starts):
        out[r] = slot
    return tuple(out)


def transported_parabolic(w: Perm, parabolic: StandardParabolic) -> StandardParabolic:
    """The standard parabolic with simple roots w(S(P))."""
    nat = block_permutation(w, parabolic)
    comp = [0] * parabolic.k
    for r, size in enumerate(parabolic.composition):
        comp[nat[r]] = size
    return StandardParabolic(tuple(comp))


def wtilde_weyl(c: ClosedRootSet) -> list[Perm]:
    """{w : w(S(P)) ⊆ S and w(extra) ⊆ R^+}, the Weyl elements that reorder
    a filtration with extension support c."""
    n = c.n
    simple = set(simple_roots(n))
    levi_simple = c.parabolic.levi_simple_roots()
    out = []
    for w in weyl_enumerate(n):
        if any(act_root(w, r) not in simple for r in levi_simple):
            continue
        if any(not is_positive_root(act_root(w, r)) for r in c.extra):
            continue
        out.append(w)
    return out


def refinements(c: ClosedRootSet) -> list[Perm]:
    """{w : w(C) ⊆ R^+}; only defined over the Borel."""
    if c.parabolic.composition != (1,) * c.n:
        raise ValueError("refinements are only defined for P = B")
    out = []
    for w in weyl_enumerate(c.n):
        if all(is_positive_root(act_root(w, r)) for r in c.extra):
            out.append(w)
    return out


def reorder_filtration(c: ClosedRootSet, w: Perm) -> ClosedRootSet:
    """Transport (P, C) along w ∈ wtilde_weyl(C): new simple roots w(S(P)),
    new closed set w(C)."""
    if tuple(w) not in set(wtilde_weyl(c)):
        raise ValueError("w is not compatible with the closed set")
    new_p = transported_parabolic(w, c.parabolic)
    new_roots = {act_root(w, r) for r in c.full_roots()}
    return ClosedRootSet.from_roots(new_p, new_roots)


if __name__ == "__main__":
    import doctest

    doctest.testmod()
