import time

t0 = time.monotonic()
from wallx.block import (
    BlockError,
    ExprError,
    big_projective,
    build,
    canonical_inclusion,
    diamond,
    dual_verma,
    finite_part,
    finite_quotient,
    from_json,
    hom_basis,
    iota,
    is_isomorphic,
    kappa,
    mhash_flat,
    mhash_sharp,
    minus_cell,
    nabla_minus,
    nabla_plus,
    plus_cell,
    sharp_flat_sequence,
    simple,
    structure,
    theta,
    theta_tower,
    to_json,
    vartheta_minus,
    vartheta_plus,
    verma,
)

L = simple((0,))
Ls = simple((1,))
M = verma((0,))
Md = dual_verma((0,))
P = big_projective()

# --- theta on the d=1 zoo
assert theta(0, L).total_dim == 0
assert is_isomorphic(theta(0, M), P)
assert is_isomorphic(theta(0, Ls), P)
assert is_isomorphic(theta(0, Md), P)
TP = theta(0, P)
assert is_isomorphic(TP, build("P + P"))
print("theta zoo ok")

# --- unit/counit sanity
T = theta(0, M)
assert T.unit.source is M and T.unit.target is T
# image of the counit is vartheta_minus, not all of M
from wallx.linalg import spans_equal as _speq
vm = vartheta_minus({0}, M)
im = T.counit.image_spans()
vmsp = vm.incl.image_spans()
for v in M.vertices():
    assert _speq(im[v], vmsp[v]), v
# kappa . iota = 2z (here z = 0 on M, so composite = 0? no wait M strict so 2z=0)
ki = T.counit.compose(T.unit)
assert ki.rank() == 0  # M is strict
TPm = theta(0, Md)
ki2 = TPm.counit.compose(TPm.unit)
# Md has z = BA? z on v1 slice of Md: a=[[0]], b=[[1]] => z = a.b = 0. strict too.
assert Md.is_strict()
# Non-strict: P. z on P: nonzero.
assert not P.is_strict()
kiP = TP.counit.compose(TP.unit)
# kappa iota = 2 z; z on P has rank 1
assert kiP.rank() == 1
zP = {v: P.z_mat(0, v) for v in P.vertices()}
for v in P.vertices():
    got = kiP.components[v]
    want = [[2 * x for x in row] for row in zP[v]]
    assert got == want, (v, got, want)
print("unit/counit ok (kappa.iota = 2z)")

# --- functor table vs frozen values
def pair(X):
    return (X.dims[(0,)], X.dims[(1,)])

table = {}
for name, mod in [("L", L), ("Ls", Ls), ("M", M), ("Mdual", Md), ("P", P)]:
    table[name] = {
        "theta": pair(theta(0, mod)),
        "vartheta_plus": pair(vartheta_plus({0}, mod)),
        "vartheta_minus": pair(vartheta_minus({0}, mod)),
        "nabla_plus": pair(nabla_plus({0}, mod)),
        "nabla_minus": pair(nabla_minus({0}, mod)),
    }

frozen = {
    "L": {"theta": (0, 0), "vartheta_plus": (0, 0), "vartheta_minus": (0, 0),
          "nabla_plus": (0, 0), "nabla_minus": (1, 0)},
    "Ls": {"theta": (1, 2), "vartheta_plus": (1, 1), "vartheta_minus": (0, 1),
           "nabla_plus": (1, 0), "nabla_minus": (0, 0)},
    "M": {"theta": (1, 2), "vartheta_plus": (1, 1), "vartheta_minus": (0, 1),
          "nabla_plus": (0, 0), "nabla_minus": (1, 0)},
    "Mdual": {"theta": (1, 2), "vartheta_plus": (1, 1), "vartheta_minus": (1, 1),
              "nabla_plus": (1, 0), "nabla_minus": (0, 0)},
    "P": {"theta": (2, 4), "vartheta_plus": (2, 2), "vartheta_minus": (1, 2),
          "nabla_plus": (1, 1), "nabla_minus": (0, 0)},
}
for name in frozen:
    assert table[name] == frozen[name], (name, table[name], frozen[name])
print("d=1 functor table ok")

# --- weightmodel cross-check
from wallx.weightmodel import wm_compare, PATTERNS, FUNCTORS

for pat in PATTERNS:
    wm = wm_compare(pat)
    bl = {
        "L": L, "Ls": Ls, "M": M, "Ms": Ls, "Mdual": Md, "P": P,
    }[pat]
    got = {
        "theta": pair(theta(0, bl)),
        "vartheta_plus": pair(vartheta_plus({0}, bl)),
        "vartheta_minus": pair(vartheta_minus({0}, bl)),
        "nabla_plus": pair(nabla_plus({0}, bl)),
        "nabla_minus": pair(nabla_minus({0}, bl)),
    }
    assert got == wm, (pat, got, wm)
print("weightmodel cross-check ok")

# --- finite parts
assert finite_part({0}, M).total_dim == 0
assert finite_part({0}, L).total_dim == 1
assert finite_part({0}, Md).total_dim == 1
assert finite_part({0}, P).total_dim == 0
# kernel of iota = finite part
for mod in (L, Ls, M, Md, P):
    i0 = iota(0, mod)
    fp = finite_part({0}, mod)
    kers = i0.kernel_spans()
    fpspans = fp.incl.image_spans() if fp.total_dim else {v: [] for v in mod.vertices()}
    from wallx.linalg import spans_equal
    for v in mod.vertices():
        assert spans_equal(kers[v], fpspans[v]), (mod, v)
print("ker(iota) = finite part ok")

# --- sharp/flat
r = sharp_flat_sequence(M)
assert r["ok"] and r["dims"] == (2, 3, 1)
r = sharp_flat_sequence(Ls)
assert r["ok"] and r["dims"] == (2, 3, 1)
assert is_isomorphic(mhash_sharp(Ls), M)
r = sharp_flat_sequence(L)
assert not r["ok"] and "finite part" in r["reason"]
r = sharp_flat_sequence(Md)
assert not r["ok"] and "finite part" in r["reason"]
r = sharp_flat_sequence(P)
assert not r["ok"] and "nilpotent" in r["reason"]
print("sharp/flat ok")

# --- towers: idempotence / commutation on d=2
M2 = build("M * M")
P2 = build("P * P")
D = diamond()
assert D.total_dim == 8

for mod in (M2, P2, D):
    vp01 = vartheta_plus({0, 1}, mod)
    vp0 = vartheta_plus({0}, mod)
    # compositional: vartheta_plus of {1} applied to ambient-embedded vp0 —
    # compositional equality checked only through dims of joint construction here;
    # full law checks happen in the test suite. Quick consistency:
    vm01 = vartheta_minus({0, 1}, mod)
    vm10 = vartheta_minus({1}, vartheta_minus({0}, mod))
    assert is_isomorphic(vm01, vm10)
    nm = nabla_minus({0, 1}, mod)
    nm2 = nabla_minus({1}, nabla_minus({0}, mod))
    assert is_isomorphic(nm, nm2)
print("d=2 tower laws ok")

# --- hypercube corner values on d=2 Verma
MM = build("M * M")
c = {}
from itertools import product
cells = {}
cache = {}
for I in [frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})]:
    for J in [frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})]:
        if I & J:
            continue
        cells[(tuple(sorted(I)), tuple(sorted(J)))] = plus_cell(MM, I, J, cache)
# plus hypercube of Verma: corner I=empty gives M tensor M itself; others 0
for (It, Jt), cell in cells.items():
    if It == ():
        pass
    else:
        assert cell.module.total_dim == 0, (It, Jt, cell.module.dims)
assert is_isomorphic(cells[((), ())].module, MM)
assert is_isomorphic(cells[((), (0, 1))].module, vartheta_plus({0, 1}, MM))
print("plus cells of Verma ok")

mcache = {}
mcells = {}
for I in [frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})]:
    for J in [frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})]:
        if I & J:
            continue
        mcells[(tuple(sorted(I)), tuple(sorted(J)))] = minus_cell(MM, I, J, mcache)
# minus hypercube of M⊗M: cell(I,J) ≅ Ls^{⊗J} ⊗ L^{⊗I} ⊗ M^{rest}
def expect_minus(I, J):
    dims = 1
    # multiplicity pair product: compute expected total dim = 1*1*2^{d-|I|-|J|}
    return 2 ** (2 - len(I) - len(J))

for (It, Jt), cell in mcells.items():
    want = expect_minus(It, Jt)
    assert cell.module.total_dim == want, (It, Jt, cell.module.total_dim, want)
print("minus cells of Verma ok")

# dual Verma plus-cube: all 9 cells nonzero; M(s_sigma lambda) for full anti
w = build("Mdual * Mdual")
pcache = {}
total = 0
for I in [frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})]:
    for J in [frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})]:
        if I & J:
            continue
        cellm = plus_cell(w, I, J, pcache).module
        assert cellm.total_dim > 0, (I, J)
print("plus cells of dual Verma all nonzero ok")

# --- structure
rep = structure(P)
assert rep["radical_series"] == [{"0": 0, "1": 1}, {"0": 1, "1": 0}, {"0": 0, "1": 1}]
assert rep["socle_series"] == [{"0": 0, "1": 1}, {"0": 1, "1": 0}, {"0": 0, "1": 1}]
assert rep["indecomposable"] is True
rep = structure(build("M + L"))
assert len(rep["summands"]) == 2, rep["summand_dims"]
rep = structure(build("P + P"))
assert len(rep["summands"]) == 2, rep["summand_dims"]
rep = structure(D)
assert rep["factor_count"] == 8
assert len(rep["summands"]) == 3, rep["summand_dims"]
assert sorted(sum(s.values()) for s in rep["summand_dims"]) == [1, 3, 4]
rep = structure(diamond((0, 0, 0, 0)))
assert len(rep["summands"]) == 8
rep = structure(diamond((1, 0, 0, 0)))
assert rep["factor_count"] == 8
print("structure ok")

# --- json round trip
for mod in (L, M, P, D, MM):
    s = to_json(mod)
    back = from_json(s)
    assert to_json(back) == s
    assert is_isomorphic(mod, back)
print("json ok")

# --- parser errors
try:
    build("Q")
except ExprError as e:
    assert e.pos == 0
try:
    build("M + (L")
except ExprError:
    pass
try:
    build("M * Mdual ⊕ L")  # d mismatch? no — M*Mdual is d=2, L is d=1 -> error
except ExprError as e:
    pass
else:
    raise AssertionError("expected d mismatch error")
print("parser ok")

print("ALL SMOKE OK in %.2fs" % (time.monotonic() - t0))
