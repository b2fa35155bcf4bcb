"""Hypercube diagrams of corner-functor cells, with verified edge maps.

For a d-factor module M and a sign, the diagram has one cell per disjoint
pair (I, J) of factor subsets: on the plus side the cell is the quotient
nabla^+_I of the joint z-kernel vartheta^+_{I u J}; on the minus side the
quotient nabla^-_I of the generated submodule vartheta^-_J.  The corners
(J empty on the plus side, J = complement of I on the minus side) recover
the corner functors, the center recovers vartheta (plus) or M itself
(minus).

For every cell and every factor sigma not used by it there is a
three-term right-exact edge sequence:

  plus side:   (I, J) --unit-->      (I, J u sigma) --quot--> (I u sigma, J)
  minus side:  (I, J u sigma) --incl--> (I, J)      --quot--> (I u sigma, J)

The first plus-side map is only partially defined (its domain is where the
canonical inclusion keeps the joint z-kernel); the construction records
the domain dimension.  Every sequence is rank-verified during the build;
a failure raises ExactnessError, because these sequences hold for every
module -- a violation can only mean an engine bug.

>>> diag = build_hypercube(verma((0,)), "+")
>>> sorted(cell_key(k) for k in diag.cells)
['0|', '|', '|0']
>>> [m["rank"] for m in diag.maps]
[2, 0]
"""

from dataclasses import dataclass
import itertools
import json

from .block import (
    BlockModule,
    ExactnessError,
    BlockError,
    ModuleMap,
    _cached_cinc,
    _cols_from_rows,
    _mmul,
    _preimage_rows,
    _spans_in_sub_coordinates,
    is_module_map,
    minus_cell,
    nabla_minus,
    nabla_plus,
    plus_cell,
    simple,
    vartheta_minus,
    vartheta_plus,
    verma,
    vkey,
)
from .limits import check_bound
from .linalg import (
    mat_vec,
    rank,
    row_basis,
    solve_matrix,
    span_contains,
    span_intersect,
    spans_equal,
)


@dataclass
class HypercubeDiagram:
    """All cells of one sign with their verified edge maps.

    ``cells`` maps (sorted-I-tuple, sorted-J-tuple) to the cell records of
    the corner machinery; ``maps`` is a list of metadata dicts in a
    deterministic order, each with kind, endpoints, rank, domain_dim and
    totality flag."""

    sign: str
    d: int
    module: BlockModule
    factors: tuple
    cells: dict
    maps: list


def cell_key(pair):
    """Printable key: I and J comma-joined around a bar, e.g. '0,2|1'."""
    I, J = pair
    return "%s|%s" % (",".join(str(s) for s in I), ",".join(str(s) for s in J))


def parse_cell_key(text):
    left, _, right = text.partition("|")
    I = tuple(int(x) for x in left.split(",") if x != "")
    J = tuple(int(x) for x in right.split(",") if x != "")
    return (I, J)


def _disjoint_pairs(factors):
    out = []
    for assignment in itertools.product((0, 1, 2), repeat=len(factors)):
        I = tuple(f for f, a in zip(factors, assignment) if a == 1)
        J = tuple(f for f, a in zip(factors, assignment) if a == 2)
        out.append((I, J))
    return sorted(out)


def build_hypercube(M, sign, factors=None):
    """Build and rank-verify the full diagram of one sign.

    ``factors`` restricts the diagram to a subset of the factor indices
    (default: all of them); cells then range over disjoint pairs of
    subsets of that set only.
    """
    if sign not in ("+", "-"):
        raise BlockError("sign must be '+' or '-'")
    check_bound("d", M.d, "hypercube of a %d-factor module" % M.d)
    if factors is None:
        factors = tuple(range(M.d))
    else:
        factors = tuple(sorted(set(int(s) for s in factors)))
        for s in factors:
            if not 0 <= s < M.d:
                raise BlockError("factor index %d out of range" % s)
    cache = {}
    cells = {}
    for I, J in _disjoint_pairs(factors):
        if sign == "+":
            cells[(I, J)] = plus_cell(M, I, J, cache)
        else:
            cells[(I, J)] = minus_cell(M, I, J, cache)
    maps = []
    for I, J0 in _disjoint_pairs(factors):
        used = set(I) | set(J0)
        for sigma in factors:
            if sigma in used:
                continue
            if sign == "+":
                maps.extend(_plus_edge(M, cells, cache, I, J0, sigma))
            else:
                maps.extend(_minus_edge(M, cells, cache, I, J0, sigma))
    return HypercubeDiagram(sign, M.d, M, factors, cells, maps)


def _with(tup, sigma):
    return tuple(sorted(set(tup) | {sigma}))


def _sub_coords_rows(rows, incl, subdim, ambdim):
    """Coordinates of ambient row vectors in a submodule's basis."""
    if not rows:
        return []
    if subdim == 0:
        raise ExactnessError("span escapes its submodule")
    x = solve_matrix(incl, _cols_from_rows(rows, ambdim))
    if x is None:
        raise ExactnessError("span escapes its submodule")
    return [[x[i][j] for i in range(subdim)] for j in range(len(rows))]


def _plus_edge(M, cells, cache, I, J0, sigma):
    """The plus-side sequence at (I, J0, sigma); returns its two map records."""
    c1 = cells[(I, J0)]
    c2 = cells[(I, _with(J0, sigma))]
    c3 = cells[(_with(I, sigma), J0)]
    Up = frozenset(_with(tuple(set(I) | set(J0)), sigma))
    cmap = _cached_cinc(M, sigma, Up, cache)
    verts = M.vertices()
    # domain of the unit-type map: the part of the numerator that the
    # canonical inclusion keeps inside the higher joint z-kernel
    dom = {}
    for v in verts:
        n_u = c1.tower.dims[v]
        n_up = c2.tower.dims[v]
        pre = _preimage_rows(cmap.components[v], c2.num[v], n_up, n_u)
        dom[v] = span_intersect(c1.num[v], pre)
    # well-definedness on the quotient: the denominator part of the domain
    # must land in the higher denominator
    for v in verts:
        bad = span_intersect(dom[v], c1.den[v])
        if not bad:
            continue
        imgs = [mat_vec(cmap.components[v], r) for r in bad]
        if not span_contains(c2.den[v], imgs):
            raise ExactnessError(
                "unit-type edge map is not well defined at %s" % (v,)
            )
    # induced images in the target cell, and the domain dimension downstairs
    imf = {}
    dom_dim = 0
    for v in verts:
        sub1rows = _sub_coords_rows(
            dom[v], c1.incl.components[v], c1.sub.dims[v], c1.tower.dims[v]
        )
        downstairs = row_basis(
            [
                mat_vec(c1.proj.components[v], r)
                for r in sub1rows
            ]
            if c1.module.dims[v]
            else []
        )
        dom_dim += len(downstairs)
        pushed = [mat_vec(cmap.components[v], r) for r in dom[v]]
        sub2rows = _sub_coords_rows(
            pushed, c2.incl.components[v], c2.sub.dims[v], c2.tower.dims[v]
        )
        imf[v] = row_basis(
            [
                mat_vec(c2.proj.components[v], r)
                for r in sub2rows
            ]
            if c2.module.dims[v]
            else []
        )
    rank_f = sum(len(imf[v]) for v in verts)
    rec1 = {
        "kind": "unit",
        "sigma": sigma,
        "from": cell_key((I, J0)),
        "to": cell_key((I, _with(J0, sigma))),
        "rank": rank_f,
        "domain_dim": dom_dim,
        "total": dom_dim == c1.module.total_dim,
    }
    rec2 = _quotient_edge(c2, c3, sigma, imf)
    return [rec1, rec2]


def _quotient_edge(c2, c3, sigma, imf):
    """Second map of either sequence: both cells share the numerator
    submodule, the target denominator is larger; verifies surjectivity and
    exactness against the supplied first-map images."""
    verts = c2.module.vertices()
    comps = {}
    for v in verts:
        comps[v] = _mmul(
            c3.proj.components[v], c2.sect[v],
            c3.module.dims[v], c3.sub.dims[v], c2.module.dims[v],
        )
    g = ModuleMap(c2.module, c3.module, comps)
    if not is_module_map(g):
        raise ExactnessError("quotient edge map does not intertwine")
    if not g.is_surjective():
        raise ExactnessError("quotient edge map is not surjective")
    kerg = g.kernel_spans()
    for v in verts:
        if not spans_equal(imf[v], kerg[v]):
            raise ExactnessError(
                "edge sequence fails exactness at %s (factor %d)" % (v, sigma)
            )
    return {
        "kind": "quotient",
        "sigma": sigma,
        "from": cell_key((tuple(sorted(c2.iset)), tuple(sorted(c2.jset)))),
        "to": cell_key((tuple(sorted(c3.iset)), tuple(sorted(c3.jset)))),
        "rank": g.rank(),
        "domain_dim": c2.module.total_dim,
        "total": True,
    }


def _minus_edge(M, cells, cache, I, J0, sigma):
    """The minus-side sequence at (I, J0, sigma)."""
    c1 = cells[(I, _with(J0, sigma))]
    c2 = cells[(I, J0)]
    c3 = cells[(_with(I, sigma), J0)]
    verts = M.vertices()
    # first map: the generated submodule for the larger J sits inside the
    # one for the smaller J; push its basis through the bigger quotient
    comps = {}
    for v in verts:
        sub2rows = _sub_coords_rows(
            [
                [c1.incl.components[v][i][j] for i in range(M.dims[v])]
                for j in range(c1.sub.dims[v])
            ]
            if c1.sub.dims[v]
            else [],
            c2.incl.components[v],
            c2.sub.dims[v],
            M.dims[v],
        )
        pushed = [mat_vec(c2.proj.components[v], r) for r in sub2rows]
        comps[v] = _cols_from_rows(pushed, c2.module.dims[v])
    fsub = ModuleMap(c1.sub, c2.module, comps)
    # well-definedness on cell1: the denominator must die
    den1_sub = _spans_in_sub_coordinates(c1.den, c1.incl, c1.sub, M)
    for v in verts:
        for r in den1_sub[v]:
            img = mat_vec(comps[v], r)
            if any(x != 0 for x in img):
                raise ExactnessError(
                    "inclusion edge map is not well defined at %s" % (v,)
                )
    fcomps = {
        v: _mmul(
            comps[v], c1.sect[v],
            c2.module.dims[v], c1.sub.dims[v], c1.module.dims[v],
        )
        for v in verts
    }
    f = ModuleMap(c1.module, c2.module, fcomps)
    if not is_module_map(f):
        raise ExactnessError("inclusion edge map does not intertwine")
    imf = f.image_spans()
    rec1 = {
        "kind": "inclusion",
        "sigma": sigma,
        "from": cell_key((I, _with(J0, sigma))),
        "to": cell_key((I, J0)),
        "rank": f.rank(),
        "domain_dim": c1.module.total_dim,
        "total": True,
    }
    rec2 = _quotient_edge(c2, c3, sigma, imf)
    return [rec1, rec2]


# ---------------------------------------------------------------------------
# predictions for the standard modules


_PLUS_PAIRS = {
    # per-factor (v=0, v=1) multiplicities under (identity, vartheta_plus,
    # nabla_plus) for the two single-factor standard modules
    0: {"id": (1, 1), "vartheta": (1, 1), "nabla": (0, 0)},  # M(lambda)
    1: {"id": (0, 1), "vartheta": (1, 1), "nabla": (1, 0)},  # M(s.lambda)
}
_MINUS_PAIRS = {
    0: {"id": (1, 1), "vartheta": (0, 1), "nabla": (1, 0)},
    1: {"id": (0, 1), "vartheta": (0, 1), "nabla": (0, 0)},
}


def verma_cell_dims(pattern, sign, I, J):
    """Predicted slice dimensions of one hypercube cell of a standard
    module: the diagram of a pure tensor factorizes, so each factor
    contributes its single-factor pair.

    >>> verma_cell_dims((0, 0), "-", (0,), (1,))
    {(0, 0): 0, (0, 1): 1, (1, 0): 0, (1, 1): 0}
    """
    d = len(pattern)
    table = _PLUS_PAIRS if sign == "+" else _MINUS_PAIRS
    pairs = []
    for s, bit in enumerate(pattern):
        role = "nabla" if s in I else ("vartheta" if s in J else "id")
        pairs.append(table[bit][role])
    out = {}
    for v in itertools.product((0, 1), repeat=d):
        n = 1
        for s in range(d):
            n *= pairs[s][v[s]]
        out[v] = n
    return out


def verify_verma_hypercube(pattern, sign):
    """Build the diagram for a standard module and compare every cell to
    the factorized prediction; returns the diagram (raises on mismatch)."""
    M = verma(pattern)
    diag = build_hypercube(M, sign)
    for (I, J), cell in diag.cells.items():
        want = verma_cell_dims(pattern, sign, I, J)
        got = dict(cell.module.dims)
        if got != want:
            raise ExactnessError(
                "standard-module cell %s has dims %r, predicted %r"
                % (cell_key((I, J)), got, want)
            )
    return diag


# ---------------------------------------------------------------------------
# commutation reports


def check_commutation(M, sigma, tau):
    """Report (never assert) how the mixed one-factor compositions compare.

    For both signs, computes nabla after vartheta and vartheta after nabla
    for the (sigma, tau) pair, reports their slice dimensions and whether
    they are isomorphic, and builds the full two-factor cell diagram
    restricted to {sigma, tau} so its edge sequences get rank-verified.
    Whether the mixed compositions agree in general is left open by the
    calculus; this report is data, not a theorem.
    """
    if M.d < 2:
        raise BlockError("commutation reports need at least two factors")
    if sigma == tau:
        raise BlockError("commutation reports need two distinct factors")
    report = {"factors": (sigma, tau), "verdicts": {}, "cells": {}, "edges_exact": {}}
    for sign in ("+", "-"):
        if sign == "+":
            a = vartheta_plus({tau}, nabla_plus({sigma}, M))
            b = nabla_plus({sigma}, vartheta_plus({tau}, M))
        else:
            a = vartheta_minus({tau}, nabla_minus({sigma}, M))
            b = nabla_minus({sigma}, vartheta_minus({tau}, M))
        from .block import is_isomorphic

        report["verdicts"][sign] = {
            "vartheta_after_nabla": {vkey(v): a.dims[v] for v in a.vertices()},
            "nabla_after_vartheta": {vkey(v): b.dims[v] for v in b.vertices()},
            "isomorphic": is_isomorphic(a, b),
        }
        diag = build_hypercube(M, sign, factors=(sigma, tau))
        report["cells"][sign] = {
            cell_key(k): cell.module.total_dim for k, cell in sorted(diag.cells.items())
        }
        report["edges_exact"][sign] = True
    return report


# ---------------------------------------------------------------------------
# export


def export(diagram, fmt="json"):
    """Serialize a diagram deterministically.

    JSON carries the sign, factor count, per-cell composition
    multiplicities and the edge-map metadata; DOT draws cells as boxes
    labelled with multiplicities and edges labelled with ranks (dashed
    when only partially defined).
    """
    if fmt == "json":
        obj = {
            "sign": diagram.sign,
            "d": diagram.d,
            "factors": list(diagram.factors),
            "cells": {
                cell_key(k): {
                    vkey(v): cell.module.dims[v]
                    for v in cell.module.vertices()
                }
                for k, cell in diagram.cells.items()
            },
            "maps": diagram.maps,
        }
        return json.dumps(obj, sort_keys=True)
    if fmt == "dot":
        return _export_dot(diagram)
    raise BlockError("unknown export format %r" % (fmt,))


def _export_dot(diagram):
    lines = []
    name = "cells_plus" if diagram.sign == "+" else "cells_minus"
    lines.append("digraph %s {" % name)
    lines.append("  rankdir=LR;")
    lines.append('  node [shape=box, fontname="monospace"];')
    for k in sorted(diagram.cells):
        cell = diagram.cells[k]
        mult = " ".join(
            "%s:%d" % (vkey(v), cell.module.dims[v])
            for v in cell.module.vertices()
            if cell.module.dims[v]
        )
        label = "%s\\n%s" % (cell_key(k), mult if mult else "0")
        lines.append('  "%s" [label="%s"];' % (cell_key(k), label))
    for m in diagram.maps:
        style = "" if m["total"] else ", style=dashed"
        lines.append(
            '  "%s" -> "%s" [label="%d"%s];'
            % (m["from"], m["to"], m["rank"], style)
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
