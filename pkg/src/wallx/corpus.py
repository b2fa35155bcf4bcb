"""Seeded generators of test modules.

The laws in the test suite quantify over module corpora: strict
single-factor modules (central nilpotent acting as zero), mixed two-factor
modules, and short exact sequences.  Everything here is deterministic in
the seed, and every generated module is validated and disguised by a
random basis change per slice so the laws are never exercised on
block-diagonal representatives only.

A strict single-factor module is a direct sum of copies of L, Ls, M and
M-dual (the four strict indecomposables), hidden behind a unimodular
change of basis.  General modules mix in the big projective and diamond
shapes and random arrow-closed subquotients.
"""

import random

from .block import (
    BlockModule,
    ModuleMap,
    _atom_L,
    _atom_Ls,
    _atom_M,
    _atom_Mdual,
    _atom_P,
    _mmul,
    big_projective,
    close_under_arrows,
    diamond,
    direct_sum,
    quotient_by_spans,
    simple,
    submodule_from_spans,
    tensor_product,
    verma,
    dual_verma,
)
from .linalg import frac, identity, zeros


def _unimodular(n, rng):
    """A random integer matrix with determinant +-1 (product of shears)."""
    m = identity(n)
    if n == 0:
        return m
    for _ in range(2 * n + 2):
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == j:
            continue
        c = frac(rng.randint(-2, 2))
        for k in range(n):
            m[i][k] += c * m[j][k]
    if n and rng.random() < 0.5:
        i = rng.randrange(n)
        for k in range(n):
            m[i][k] = -m[i][k]
    return m


def _inverse_of_unimodular(m, n):
    from .linalg import invert

    if n == 0:
        return []
    inv = invert(m)
    if inv is None:
        raise RuntimeError("unimodular matrix was not invertible")
    return inv


def scramble(M, rng):
    """Conjugate every slice by a random unimodular basis change.

    The result is isomorphic to M but no longer block-shaped.
    """
    g = {v: _unimodular(M.dims[v], rng) for v in M.vertices()}
    ginv = {v: _inverse_of_unimodular(g[v], M.dims[v]) for v in M.vertices()}
    a = {s: {} for s in range(M.d)}
    b = {s: {} for s in range(M.d)}
    for s in range(M.d):
        for v in M.vertices():
            w = flip_local(v, s)
            blk = _mmul(
                g[w],
                _mmul(M.arrow(s, v), ginv[v], M.dims[w], M.dims[v], M.dims[v]),
                M.dims[w], M.dims[w], M.dims[v],
            )
            (a if v[s] == 0 else b)[s][v] = blk
    out = BlockModule(M.d, dict(M.dims), a, b, M.central_charge)
    out.validate()
    return out


def flip_local(v, s):
    return v[:s] + (1 - v[s],) + v[s + 1 :]


_STRICT_ATOMS = (_atom_L, _atom_Ls, _atom_M, _atom_Mdual)


def random_strict_module(seed, max_dim=12):
    """A strict single-factor module of total dimension <= max_dim, in a
    scrambled basis.  Every strict module is a sum of the four strict
    indecomposables, so this generator covers the whole class.
    """
    rng = random.Random("strict:%d" % seed)
    budget = rng.randint(2, max_dim)
    out = None
    used = 0
    while True:
        k = rng.randrange(len(_STRICT_ATOMS))
        atom = _STRICT_ATOMS[k]()
        if used + atom.total_dim > budget:
            break
        out = atom if out is None else direct_sum(out, atom)
        used += atom.total_dim
        if used >= budget - 1 and out is not None and rng.random() < 0.5:
            break
    if out is None:
        out = _STRICT_ATOMS[rng.randrange(len(_STRICT_ATOMS))]()
    return scramble(out, rng)


def _random_summand_pool(d, rng):
    """Small indecomposable-ish building blocks with d factors."""
    pool = []
    atoms = [_atom_L, _atom_Ls, _atom_M, _atom_Mdual, _atom_P]
    if d == 1:
        pool = [f() for f in atoms]
        pool.append(diamond((rng.randint(0, 1), rng.randint(0, 1)), d=1))
    else:
        for _ in range(4):
            m = atoms[rng.randrange(len(atoms))]()
            for _ in range(d - 1):
                m = tensor_product(m, atoms[rng.randrange(len(atoms))]())
            pool.append(m)
        if d == 2:
            sw = tuple(rng.randint(0, 1) for _ in range(4))
            pool.append(diamond(sw))
    return pool


def random_module(seed, d=2, max_slice_dim=10):
    """A d-factor module with every slice dimension <= max_slice_dim.

    Mixes sums of tensor atoms (including the big projective and the
    diamond) with a random arrow-closed subquotient step, then scrambles
    the basis.
    """
    rng = random.Random("module:%d:%d" % (seed, d))
    pool = _random_summand_pool(d, rng)
    out = pool[rng.randrange(len(pool))]
    for _ in range(rng.randint(0, 2)):
        cand = pool[rng.randrange(len(pool))]
        trial = direct_sum(out, cand)
        if max(trial.dims.values()) <= max_slice_dim:
            out = trial
    if rng.random() < 0.4:
        out = _random_subquotient(out, rng)
    if max(out.dims.values()) > max_slice_dim:
        out = _random_subquotient(out, rng)
    return scramble(out, rng)


def _random_subquotient(M, rng):
    """A subquotient along randomly generated arrow-closed spans."""
    if M.total_dim == 0:
        return M
    picks = {}
    for v in M.vertices():
        n = M.dims[v]
        rows = []
        for _ in range(rng.randint(0, max(1, n // 2))):
            if n:
                rows.append([frac(rng.randint(-1, 1)) for _ in range(n)])
        picks[v] = rows
    spans = close_under_arrows(M, picks)
    if rng.random() < 0.5:
        S, _ = submodule_from_spans(M, spans)
        return S if S.total_dim else M
    Q, _ = quotient_by_spans(M, spans)
    return Q if Q.total_dim else M


def random_ses(seed, d=1, max_dim=8):
    """A short exact sequence 0 -> S -> E -> Q -> 0 with d factors.

    Returns (S, E, Q, incl, proj); E is a random module, S a random
    arrow-closed submodule, Q the quotient.
    """
    rng = random.Random("ses:%d:%d" % (seed, d))
    if d == 1:
        E = random_strict_module(seed * 3 + 1, max_dim) if rng.random() < 0.3 else None
        if E is None:
            pool = _random_summand_pool(1, rng)
            E = pool[rng.randrange(len(pool))]
            for _ in range(rng.randint(0, 2)):
                cand = pool[rng.randrange(len(pool))]
                if E.total_dim + cand.total_dim <= max_dim:
                    E = direct_sum(E, cand)
            E = scramble(E, rng)
    else:
        E = random_module(seed * 3 + 1, d, max_dim)
    picks = {}
    for v in E.vertices():
        n = E.dims[v]
        rows = []
        for _ in range(rng.randint(0, max(1, n // 2))):
            if n:
                rows.append([frac(rng.randint(-1, 1)) for _ in range(n)])
        picks[v] = rows
    spans = close_under_arrows(E, picks)
    S, incl = submodule_from_spans(E, spans)
    Q, proj = quotient_by_spans(E, spans)
    return S, E, Q, incl, proj


def strict_corpus(count=100, max_dim=12, base_seed=0):
    """Deterministic list of strict single-factor modules."""
    return [random_strict_module(base_seed + k, max_dim) for k in range(count)]


def two_factor_corpus(count=50, max_slice_dim=10, base_seed=0):
    """Deterministic list of two-factor modules."""
    return [random_module(base_seed + k, 2, max_slice_dim) for k in range(count)]
