"""Exact linear algebra over the rationals.

Everything in this package reduces to rank/kernel/image computations that
must be exact: a single rounded pivot would silently change a composition
multiplicity.  So matrices here are plain ``list[list[Fraction]]`` and the
eliminations are textbook Gauss-Jordan over ``fractions.Fraction``.

Conventions used throughout:

* a matrix ``A`` with ``m`` rows and ``n`` columns represents a linear map
  ``Q^n -> Q^m`` acting on column vectors (stored as flat lists);
* a subspace of ``Q^n`` is represented by a list of spanning vectors; the
  canonical form of a subspace is the list of nonzero rows of the reduced
  row echelon form, so two subspaces are equal iff their canonical bases
  are equal as nested lists.

>>> rank([[1, 2], [2, 4]])
1
>>> nullspace([[1, 2], [2, 4]])
[[Fraction(-2, 1), Fraction(1, 1)]]
"""

from __future__ import annotations

from fractions import Fraction

Vector = list[Fraction]
Matrix = list[list[Fraction]]

__all__ = [
    "frac",
    "vec",
    "mat",
    "zeros",
    "identity",
    "shape",
    "mat_mul",
    "mat_add",
    "mat_sub",
    "mat_scale",
    "mat_vec",
    "transpose",
    "hstack",
    "vstack",
    "kron",
    "mat_pow",
    "rref",
    "rank",
    "nullspace",
    "row_basis",
    "column_basis",
    "solve",
    "solve_matrix",
    "invert",
    "in_span",
    "span_sum",
    "span_intersect",
    "spans_equal",
    "span_contains",
    "preimage",
    "coordinates",
]


def frac(x) -> Fraction:
    """Coerce ints, strings like ``"3/4"``, and Fractions to Fraction."""
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(entries) -> Vector:
    return [frac(x) for x in entries]


def mat(rows) -> Matrix:
    return [vec(r) for r in rows]


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def shape(a: Matrix) -> tuple[int, int]:
    return (len(a), len(a[0]) if a else 0)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    m, k = shape(a)
    k2, n = shape(b)
    if a and b and k != k2:
        raise ValueError(f"shape mismatch: {m}x{k} times {k2}x{n}")
    if not a or not b:
        # Degenerate dimensions: the result is a 0 x n or m x 0 matrix.
        return zeros(m, n if b else 0)
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def mat_scale(c, a: Matrix) -> Matrix:
    c = frac(c)
    return [[c * x for x in row] for row in a]


def mat_vec(a: Matrix, v: Vector) -> Vector:
    if a and v and len(a[0]) != len(v):
        raise ValueError("shape mismatch in mat_vec")
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def hstack(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return [row[:] for row in b]
    if not b:
        return [row[:] for row in a]
    return [ra + rb for ra, rb in zip(a, b)]


def vstack(a: Matrix, b: Matrix) -> Matrix:
    return [row[:] for row in a] + [row[:] for row in b]


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; basis ordering is (a-index major, b-index minor)."""
    ma, na = shape(a)
    mb, nb = shape(b)
    out = zeros(ma * mb, na * nb)
    for i in range(ma):
        for j in range(na):
            c = a[i][j]
            if c == 0:
                continue
            for k in range(mb):
                for l in range(nb):
                    out[i * mb + k][j * nb + l] = c * b[k][l]
    return out


def mat_pow(a: Matrix, k: int) -> Matrix:
    n = len(a)
    out = identity(n)
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    r = [[frac(x) for x in row] for row in a]
    m, n = shape(r)
    pivots: list[int] = []
    row = 0
    for col in range(n):
        pivot = next((i for i in range(row, m) if r[i][col] != 0), None)
        if pivot is None:
            continue
        r[row], r[pivot] = r[pivot], r[row]
        inv = 1 / r[row][col]
        r[row] = [x * inv for x in r[row]]
        for i in range(m):
            if i != row and r[i][col] != 0:
                c = r[i][col]
                r[i] = [x - c * y for x, y in zip(r[i], r[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    return r, pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def nullspace(a: Matrix) -> list[Vector]:
    """Canonical kernel basis of the column-vector map ``x -> a x``.

    Each basis vector has a 1 in one free column and 0 in the other free
    columns, so the result is deterministic.
    """
    m, n = shape(a)
    if n == 0:
        return []
    if m == 0:
        return [[Fraction(1 if i == j else 0) for i in range(n)] for j in range(n)]
    r, pivots = rref(a)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


def row_basis(vectors: list[Vector]) -> list[Vector]:
    """Canonical basis (rref rows) of the span of the given vectors."""
    if not vectors:
        return []
    r, pivots = rref(vectors)
    return [r[i] for i in range(len(pivots))]


def column_basis(a: Matrix) -> list[Vector]:
    """Canonical basis of the column space (the image of ``x -> a x``)."""
    return row_basis(transpose(a))


def solve(a: Matrix, b: Vector) -> Vector | None:
    """One solution of ``a x = b``, or None if inconsistent."""
    m, n = shape(a)
    if m != len(b):
        raise ValueError("shape mismatch in solve")
    aug = [row[:] + [bv] for row, bv in zip(a, b)]
    r, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = r[i][n]
    return x


def solve_matrix(a: Matrix, b: Matrix) -> Matrix | None:
    """Solve ``a X = b`` column by column; None if any column fails."""
    m, n = shape(a)
    mb, k = shape(b)
    if b and m != mb:
        raise ValueError("shape mismatch in solve_matrix")
    cols = []
    for j in range(k):
        x = solve(a, [b[i][j] for i in range(m)])
        if x is None:
            return None
        cols.append(x)
    return [[cols[j][i] for j in range(k)] for i in range(n)]


def invert(a: Matrix) -> Matrix | None:
    m, n = shape(a)
    if m != n:
        return None
    x = solve_matrix(a, identity(n))
    if x is None or rank(a) != n:
        return None
    return x


def in_span(v: Vector, basis: list[Vector]) -> bool:
    if all(x == 0 for x in v):
        return True
    if not basis:
        return False
    return rank(basis + [v]) == rank(basis)


def span_sum(u: list[Vector], v: list[Vector]) -> list[Vector]:
    return row_basis(u + v)


def span_intersect(u: list[Vector], v: list[Vector]) -> list[Vector]:
    """Canonical basis of span(u) ∩ span(v)."""
    if not u or not v:
        return []
    n = len(u[0])
    # x = a·u = b·v  <=>  (a, b) in the kernel of [u^T | -v^T].
    system = hstack(transpose(u), mat_scale(-1, transpose(v)))
    inter = []
    for sol in nullspace(system):
        a = sol[: len(u)]
        inter.append([sum(ai * ui[j] for ai, ui in zip(a, u)) for j in range(n)])
    return row_basis(inter)


def spans_equal(u: list[Vector], v: list[Vector]) -> bool:
    return row_basis(u) == row_basis(v)


def span_contains(u: list[Vector], v: list[Vector]) -> bool:
    """True iff span(u) ⊇ span(v)."""
    return all(in_span(x, u) for x in v)


def preimage(a: Matrix, target: list[Vector]) -> list[Vector]:
    """Canonical basis of {x : a x ∈ span(target)}."""
    m, n = shape(a)
    if not target:
        return nullspace(a)
    # a x - target^T c = 0; keep the x-part of the kernel.
    system = hstack(a, mat_scale(-1, transpose(target)))
    sols = nullspace(system)
    return row_basis([s[:n] for s in sols])


def coordinates(v: Vector, basis: list[Vector]) -> Vector | None:
    """Coefficients of v in the given (independent) basis, or None."""
    if not basis:
        return [] if all(x == 0 for x in v) else None
    return solve(transpose(basis), v)


if __name__ == "__main__":
    import doctest

    doctest.testmod()
