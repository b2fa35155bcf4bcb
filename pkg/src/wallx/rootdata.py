"""Integer weights, roots, and Weyl-group actions for GL_n over d embeddings.

Conventions (fixed here once, used by every downstream module):

* permutations are 0-based one-line tuples, ``w[i]`` = image of ``i``;
  composition is ``(compose(w1, w2))(i) = w1(w2(i))``;
* the linear action on weights is ``apply(w, lam)[w[i]] = lam[i]``, i.e.
  ``apply(w, lam)[i] = lam[w^-1(i)]``; on roots ``e_i - e_j`` it sends
  ``(i, j)`` to ``(w[i], w[j])``;
* the dot action is ``w · lam = w(lam + theta) - theta`` with
  ``theta = (n-1, n-2, ..., 1, 0)``; it fixes ``-theta``;
* a multi-embedding weight is a tuple of d rows (one n-tuple per embedding);
  a multi-embedding Weyl element is a tuple of d permutations.  Flat inputs
  (a single n-tuple / a single permutation) mean d = 1, and a single
  permutation paired with a multi-row weight acts on every row.

>>> dot_action((1, 0), (5, 3))
(2, 6)
>>> dot_action((1, 0), (-1, 0))
(-1, 0)
"""

from __future__ import annotations

from itertools import permutations as _all_perms

from .limits import check_bound

Perm = tuple[int, ...]
Root = tuple[int, int]


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def inverse(w: Perm) -> Perm:
    inv = [0] * len(w)
    for i, wi in enumerate(w):
        inv[wi] = i
    return tuple(inv)


def compose(w1: Perm, w2: Perm) -> Perm:
    """(w1 ∘ w2)(i) = w1(w2(i))."""
    return tuple(w1[w2[i]] for i in range(len(w2)))


def transposition(n: int, i: int, j: int) -> Perm:
    img = list(range(n))
    img[i], img[j] = j, i
    return tuple(img)


def simple_reflection(n: int, k: int) -> Perm:
    """The reflection at the simple root e_k - e_{k+1} (0-based k)."""
    return transposition(n, k, k + 1)


def reflection(n: int, root: Root) -> Perm:
    return transposition(n, root[0], root[1])


def longest_element(n: int) -> Perm:
    return tuple(range(n - 1, -1, -1))


def positive_roots(n: int) -> list[Root]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def simple_roots(n: int) -> list[Root]:
    return [(i, i + 1) for i in range(n - 1)]


def act_root(w: Perm, root: Root) -> Root:
    return (w[root[0]], w[root[1]])


def is_positive_root(root: Root) -> bool:
    return root[0] < root[1]


def roots_orthogonal(a: Root, b: Root) -> bool:
    """Type-A orthogonality: disjoint index pairs."""
    return not (set(a) & set(b))


def theta_vector(n: int) -> tuple[int, ...]:
    """Half-sum-of-positive-roots normalization used by the dot action:
    (n-1, n-2, ..., 1, 0)."""
    return tuple(range(n - 1, -1, -1))


# ---------------------------------------------------------------------------
# weights: flat n-tuples (d = 1) or tuples of rows


def _is_flat(lam) -> bool:
    return len(lam) == 0 or isinstance(lam[0], int)


def weight_rows(lam) -> tuple[tuple[int, ...], ...]:
    """Normalize a weight to its tuple-of-rows form."""
    if _is_flat(lam):
        return (tuple(lam),)
    return tuple(tuple(row) for row in lam)


def _perm_rows(w, d: int):
    if w and isinstance(w[0], int):
        return tuple([tuple(w)] * d)
    if len(w) != d:
        raise ValueError(f"Weyl element has {len(w)} components but the weight has {d} rows")
    return tuple(tuple(p) for p in w)


def _apply_row(w: Perm, row: tuple[int, ...]) -> tuple[int, ...]:
    inv = inverse(w)
    return tuple(row[inv[i]] for i in range(len(row)))


def apply(w, lam):
    """Linear action, per embedding; output shape matches the input shape."""
    rows = weight_rows(lam)
    perms = _perm_rows(w, len(rows))
    out = tuple(_apply_row(p, row) for p, row in zip(perms, rows))
    return out[0] if _is_flat(lam) else out


def dot_action(w, lam):
    """w · lam = w(lam + theta) - theta, per embedding."""
    rows = weight_rows(lam)
    perms = _perm_rows(w, len(rows))
    out = []
    for p, row in zip(perms, rows):
        th = theta_vector(len(row))
        shifted = tuple(x + t for x, t in zip(row, th))
        acted = _apply_row(p, shifted)
        out.append(tuple(x - t for x, t in zip(acted, th)))
    return out[0] if _is_flat(lam) else tuple(out)


def is_dominant(lam) -> bool:
    """Weakly decreasing in every row."""
    return all(row[i] >= row[i + 1] for row in weight_rows(lam)
               for i in range(len(row) - 1))


def is_strictly_dominant(lam) -> bool:
    return all(row[i] > row[i + 1] for row in weight_rows(lam)
               for i in range(len(row) - 1))


def weyl_enumerate(n: int) -> list[Perm]:
    """All n! permutations, lexicographic.  Bounded; see :mod:`wallx.limits`."""
    check_bound("enum", n, "Weyl enumeration size n")
    return [tuple(p) for p in _all_perms(range(n))]


def orbit(w_set, lam, dot: bool = False):
    """Closure of {lam} under repeated application of the given elements.

    With ``dot=True`` the dot action is used instead of the linear one.
    Passing a whole group gives its orbit; passing generators gives the
    orbit under the subgroup they generate.
    """
    act = dot_action if dot else apply
    seen = {lam if _is_flat(lam) else weight_rows(lam)}
    frontier = list(seen)
    while frontier:
        new = []
        for mu in frontier:
            for w in w_set:
                nu = act(w, mu)
                if nu not in seen:
                    seen.add(nu)
                    new.append(nu)
        frontier = new
    return sorted(seen)


# ---------------------------------------------------------------------------
# serialization helpers (1-based on the wire, 0-based in memory)


def perm_to_oneline(w: Perm) -> list[int]:
    return [i + 1 for i in w]


def perm_from_oneline(images) -> Perm:
    w = tuple(i - 1 for i in images)
    if sorted(w) != list(range(len(w))):
        raise ValueError(f"not a permutation in one-line notation: {list(images)}")
    return w


def root_to_pair(root: Root) -> list[int]:
    return [root[0] + 1, root[1] + 1]


def root_from_pair(pair) -> Root:
    i, j = int(pair[0]) - 1, int(pair[1]) - 1
    if i == j or i < 0 or j < 0:
        raise ValueError(f"not a root: {list(pair)}")
    return (i, j)


if __name__ == "__main__":
    import doctest

    doctest.testmod()
