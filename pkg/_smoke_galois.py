import json
from math import factorial

from wallx.galois import (
    FssDiagram, GaloisError, TriangulineSkeleton, constituent_count_pair,
    d_lattice, expected_tables, export_fss, fss_diagram, make_skeleton,
    skeleton_from_json, skeleton_to_json, surplus_bound,
)
from wallx.parabolic import refinements
from wallx.rootdata import perm_to_oneline

# --- skeleton construction + round trip ---
sk = make_skeleton(3, 1, extra=[[1, 2]])
assert sk.params == ("phi1", "phi2", "phi3")
assert sk.flags == {"generic": True, "crystabelline": False}
t = skeleton_to_json(sk)
sk2 = skeleton_from_json(t)
assert skeleton_to_json(sk2) == t, "round trip not bit-exact"
assert sk2.c == sk.c and sk2.sen_weights == sk.sen_weights

# validation errors
for bad in (
    lambda: make_skeleton(3, 1, params=("a", "a", "b")),
    lambda: make_skeleton(3, 1, extra=[[1, 2], [2, 3]]),      # not closed
    lambda: make_skeleton(2, 1, sen_weights=((0, 1),)),        # not dominant
    lambda: make_skeleton(2, 1, split_subsets=[[5]]),
):
    try:
        bad()
    except GaloisError:
        pass
    else:
        raise AssertionError("expected GaloisError")
try:
    TriangulineSkeleton(3, 1, ("a", "b", "c"), sk.c, ((2, 1, 0),),
                        {"generic": True, "crystabelline": True})
except GaloisError as e:
    assert "crystabelline" in str(e)
else:
    raise AssertionError("crystabelline mismatch accepted")

# --- fss: n=3, C={e1-e2} -> 5 nodes, 2 edges, 3 components, known labels ---
diag = fss_diagram(sk)
assert len(diag.labels) == 5 and len(diag.edges) == 2
assert diag.component_count() == 3
expect = {
    ("phi1", "phi2", "phi3"), ("phi2", "phi1", "phi3"), ("phi1", "phi3", "phi2"),
    ("phi3", "phi1", "phi2"), ("phi3", "phi2", "phi1"),
}
assert set(diag.labels) == expect, diag.labels
# edge endpoints: phi -> s1 phi and s2s1 phi -> s2s1s2 phi
lab = {l: i for i, l in enumerate(diag.labels)}
assert (lab[("phi1", "phi2", "phi3")], lab[("phi2", "phi1", "phi3")]) in diag.edges
assert (lab[("phi3", "phi1", "phi2")], lab[("phi3", "phi2", "phi1")]) in diag.edges

# sources == refinements
src_perms = {diag.perms[i] for i in diag.sources()}
assert src_perms == set(refinements(sk.c))
assert sorted(perm_to_oneline(w) for w in refinements(sk.c)) == [
    [1, 2, 3], [1, 3, 2], [2, 3, 1]]

# --- fss: n=4, C=R+ -> 5 node / 5 edge diamond ---
full = [[i, j] for i in range(1, 5) for j in range(i + 1, 5)]
sk4 = make_skeleton(4, 1, extra=full)
d4 = fss_diagram(sk4)
assert len(d4.labels) == 5 and len(d4.edges) == 5, (len(d4.labels), len(d4.edges))
assert len(d4.sources()) == 1
sinks = {j for (_, j) in d4.edges} - {i for (i, _) in d4.edges}
assert len(sinks) == 2  # the middle node s_2(phi) is a dead end, plus the top
assert d4.component_count() == 1

# --- fss: C=empty, d=1 -> n! flat nodes ---
for n in (2, 3, 4):
    dn = fss_diagram(make_skeleton(n, 1))
    assert len(dn.labels) == factorial(n) and not dn.edges

# --- fss: d >= 2 -> flat refinement list ---
d2 = fss_diagram(make_skeleton(2, 2))
assert len(d2.labels) == 2 and not d2.edges

# determinism + export
assert fss_diagram(sk).to_json() == diag.to_json()
j = json.loads(export_fss(diag, "json"))
assert json.dumps(j, sort_keys=True) == export_fss(diag, "json")
dot = export_fss(d4, "dot")
assert dot.count("->") == 5 and dot.startswith("digraph refinements {")

# --- d_lattice ---
lat = d_lattice(make_skeleton(2, 1, sen_weights=((3, 1),)))
assert set(lat.nodes) == {(), (0,)}
assert lat.nodes[()] == ((0, 0),) and lat.nodes[(0,)] == ((3, 1),)
assert len(lat.coverings) == 1
c = lat.coverings[0]
assert c["sequences"][0] == "0 -> t_0^-1*D_{0} -> D_{} -> R/t_0^2 -> 0"
assert c["sequences"][1] == "0 -> t_0^3*D_{} -> D_{0} -> t_0^1*R/t_0^3*R -> 0"

lat2 = d_lattice(make_skeleton(2, 2, sen_weights=((2, 0), (5, 1))))
assert len(lat2.nodes) == 4 and len(lat2.coverings) == 4
assert lat2.nodes[(1,)] == ((0, 0), (5, 1))
json.loads(lat2.to_json())
try:
    d_lattice(make_skeleton(3, 1))
except GaloisError:
    pass
else:
    raise AssertionError("rank-3 lattice accepted")

# --- tables ---
skc = make_skeleton(2, 2)  # crystabelline generic, d=2
assert expected_tables(skc, "hom_dim", part=1)["value"] == 2
assert expected_tables(skc, "ext_dim", part=2)["value"] == 4
assert expected_tables(skc, "hom_dim", part=3, split=False)["value"] == 2
assert expected_tables(skc, "hom_dim", part=3, split=True)["value"] == 4
assert expected_tables(skc, "hom_dim", part=1, family="corner")["value"] == 2
assert expected_tables(skc, "ext_dim", part=3, family="corner", critical=True)["value"] == 4
assert expected_tables(skc, "ext_dim", part=3, family="corner", critical=False)["value"] == 2
for bad in (
    lambda: expected_tables(skc, "hom_dim"),
    lambda: expected_tables(skc, "hom_dim", part=3),
    lambda: expected_tables(skc, "hom_dim", part=4),
    lambda: expected_tables(skc, "hom_dim", part=1, family="x"),
    lambda: expected_tables(make_skeleton(2, 1), "hom_dim", part=1),
    lambda: expected_tables(sk, "hom_dim", part=1),  # d=1, non-crystabelline
    lambda: expected_tables(skc, "nope"),
    lambda: expected_tables(skc, "hom_dim", part=1, junk=3),
):
    try:
        bad()
    except GaloisError:
        pass
    else:
        raise AssertionError("bad table query accepted")

# e_mult
sks = make_skeleton(2, 2, split=True)
assert expected_tables(sks, "e_mult", iset=(), jset=())["value"] == 3
assert expected_tables(sks, "e_mult", iset=(0,), jset=())["value"] == 2
assert expected_tables(sks, "e_mult", iset=(0, 1), jset=())["value"] == 1
assert expected_tables(skc, "e_mult", iset=(), jset=())["value"] == 1  # nothing split
skp = make_skeleton(2, 2, split_subsets=[[1]])
assert expected_tables(skp, "e_mult", iset=(0,), jset=())["value"] == 2
assert expected_tables(skp, "e_mult", iset=(1,), jset=())["value"] == 1
assert expected_tables(skp, "e_mult", iset=(0,), jset=(1,))["value"] == 2  # rest empty
noncrys = make_skeleton(2, 2, extra=[[1, 2]], split=True)
assert expected_tables(noncrys, "e_mult", iset=(), jset=())["value"] == 1

# counts + bound
assert constituent_count_pair(1) == (3, 4)
assert constituent_count_pair(2) == (8, 15)
assert expected_tables(skc, "constituent_counts")["value"] == [8, 15]
assert surplus_bound(2, 1) == 1
assert surplus_bound(3, 1) == 2
assert surplus_bound(3, 2) == 3
assert expected_tables(skc, "surplus_bound", n=2, d=1)["value"] == 1

# is_split conventions
assert skc.is_split(()) and not skc.is_split((0,))
assert sks.is_split((0, 1)) and skp.is_split((1,)) and not skp.is_split((0,))

print("galois smoke OK")
