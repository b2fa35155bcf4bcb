"""Brute-force character combinatorics for the tensor product of all
fundamental representations of GL_n, over d embeddings.

Everything here is exact multiset bookkeeping: the per-embedding character
is the product of the exterior-power characters (the weights of the i-th
fundamental representation are the 0/1 vectors with i ones, each once), the
multi-embedding character is the d-fold product, and the diagonal
restriction sums the rows.  The interesting outputs are which restricted
weights appear with multiplicity one (exactly the n! "ordinary" ones, the
orbit of d·(n-1, n-2, ..., 0)), the isotypic decomposition under the center
of a Levi, and the dimension of the ordinary part attached to a closed root
set over the Borel.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .limits import BoundExceeded, check_bound
from .parabolic import ClosedRootSet, refinements
from .rootdata import act_root, apply, roots_orthogonal, simple_roots, weyl_enumerate

Row = tuple[int, ...]
WeightKey = tuple[Row, ...]


@dataclass(frozen=True)
class WeightMultiset:
    entries: dict
    total_dim: int

    @staticmethod
    def from_entries(entries: dict) -> "WeightMultiset":
        return WeightMultiset(dict(entries), sum(entries.values()))


@dataclass(frozen=True)
class IsotypicComponent:
    levi_character: tuple[int, ...]
    weights: WeightMultiset


@lru_cache(maxsize=None)
def _embedding_character(n: int) -> tuple[tuple[Row, int], ...]:
    """Weights of the product of fundamental representations, one embedding.

    Total dimension is prod_{i=1}^{n-1} C(n, i).
    """
    cur: dict[Row, int] = {(0,) * n: 1}
    for i in range(1, n):
        nxt: dict[Row, int] = {}
        for subset in combinations(range(n), i):
            e_s = tuple(1 if j in subset else 0 for j in range(n))
            for w, m in cur.items():
                key = tuple(a + b for a, b in zip(w, e_s))
                nxt[key] = nxt.get(key, 0) + m
        cur = nxt
    return tuple(sorted(cur.items()))


_FULL_CHARACTER_KEY_LIMIT = 2_000_000


def ltensor_character(n: int, d: int) -> WeightMultiset:
    """The full multiset of d×n torus weights of the d-embedding tensor."""
    check_bound("n", n, "ltensor size n")
    check_bound("d", d, "embedding count d")
    per = _embedding_character(n)
    if len(per) ** d > _FULL_CHARACTER_KEY_LIMIT:
        raise BoundExceeded(
            f"full character at (n={n}, d={d}) would have {len(per) ** d} distinct "
            "weights; use the diagonal restriction or lower d")
    cur: dict[WeightKey, int] = {(): 1}
    for _ in range(d):
        nxt: dict[WeightKey, int] = {}
        for rows, m in cur.items():
            for row, rm in per:
                key = rows + (row,)
                nxt[key] = nxt.get(key, 0) + m * rm
        cur = nxt
    return WeightMultiset.from_entries(cur)


def diagonal_character(n: int, d: int) -> dict[Row, int]:
    """Multiplicities after restricting to the diagonal torus (sum of rows);
    computed by convolution, so it stays small even when the full character
    would not."""
    check_bound("n", n, "ltensor size n")
    check_bound("d", d, "embedding count d")
    per = dict(_embedding_character(n))
    cur: dict[Row, int] = {(0,) * n: 1}
    for _ in range(d):
        nxt: dict[Row, int] = {}
        for w, m in cur.items():
            for row, rm in per.items():
                key = tuple(a + b for a, b in zip(w, row))
                nxt[key] = nxt.get(key, 0) + m * rm
        cur = nxt
    return cur


def lambda_zero(n: int, d: int) -> Row:
    """d · (n-1, n-2, ..., 1, 0): the restricted weight whose orbit is the
    ordinary set."""
    return tuple(d * (n - 1 - i) for i in range(n))


def ordinary_weights(n: int, d: int) -> list[Row]:
    """The n! restricted weights in the symmetric-group orbit of lambda_zero."""
    check_bound("n", n, "ltensor size n")
    lam = lambda_zero(n, d)
    out = {apply(w, lam) for w in weyl_enumerate(n)}
    return sorted(out)


def verify_ordweight(n: int, d: int) -> bool:
    """True iff the multiplicity-one restricted weights are exactly the
    ordinary ones (and every other weight has multiplicity >= 2)."""
    diag = diagonal_character(n, d)
    ones = {w for w, m in diag.items() if m == 1}
    return ones == set(ordinary_weights(n, d))


def isotypic_components(n: int, d: int, parabolic) -> list[IsotypicComponent]:
    """Partition of the full character by the central character of the Levi:
    per block, sum the block's coordinates over all embeddings."""
    full = ltensor_character(n, d)
    beta = parabolic.beta()
    k = parabolic.k
    groups: dict[tuple[int, ...], dict] = {}
    for rows, m in full.entries.items():
        ch = [0] * k
        for row in rows:
            for i, x in enumerate(row):
                ch[beta[i]] += x
        key = tuple(ch)
        groups.setdefault(key, {})[rows] = m
    return [IsotypicComponent(key, WeightMultiset.from_entries(g))
            for key, g in sorted(groups.items())]


def ordinary_part_dim(c: ClosedRootSet, n: int, d: int) -> int:
    """Dimension of the ordinary part attached to a closed root set over B.

    For one embedding: sum over the refinements w of the number of pairwise
    orthogonal subsets J of {roots in C that w sends to a simple root} —
    each such J contributes one weight line.  For d >= 2 embeddings each
    refinement contributes a d-dimensional piece instead.
    """
    if c.n != n:
        raise ValueError(f"closed set lives on n={c.n}, not n={n}")
    refs = refinements(c)
    if d >= 2:
        return d * len(refs)
    simple = set(simple_roots(n))
    total = 0
    for w in refs:
        candidates = [r for r in c.full_roots() if act_root(w, r) in simple]
        count = 0
        for size in range(len(candidates) + 1):
            for sub in combinations(candidates, size):
                if all(roots_orthogonal(a, b) for a, b in combinations(sub, 2)):
                    count += 1
        total += count
    return total
