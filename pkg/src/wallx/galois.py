"""Skeleta of trianguline parameters and the numerical data recorded for them.

A :class:`TriangulineSkeleton` is the purely combinatorial shadow of a rank-n
trianguline parameter over a field with d embeddings: the parameter labels,
the closed root set carrying the extension support, the Sen weights, and a few
boolean flags (generic / crystabelline / which partial telescopes split).
Everything downstream is exact bookkeeping:

* ``d_lattice``      -- the 2^d lattice of partially de Rham rank-2 modules
                        D_I together with the twist exact sequences that
                        connect a node to its covers;
* ``fss_diagram``    -- the diagram of refinement characters: nodes are the
                        simple constituents of the locally analytic socle
                        layer attached to the closed root set, edges are the
                        one-step degenerations;
* ``expected_tables``-- a lookup of recorded Hom/Ext dimensions, hypercube
                        cell multiplicities, constituent counts, and the
                        surplus lower bound.  These are stored numbers, never
                        recomputed; the ``statement`` field says what each
                        number counts.

>>> sk = make_skeleton(3, 1, extra=[[1, 2]])
>>> [perm_to_oneline(w) for w in fss_diagram(sk).perms[:2]]
[[1, 2, 3], [1, 3, 2]]
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .limits import check_bound
from .parabolic import ClosedRootSet, borel, is_closed_relative, refinements
from .rootdata import (
    Perm,
    Root,
    act_root,
    compose,
    inverse,
    is_dominant,
    perm_to_oneline,
    reflection,
    root_from_pair,
    root_to_pair,
    roots_orthogonal,
    simple_roots,
    weight_rows,
)


class GaloisError(ValueError):
    """Malformed skeleton data, or a query outside the recorded tables."""


# ---------------------------------------------------------------------------
# the skeleton


@dataclass
class TriangulineSkeleton:
    """Combinatorial data of a trianguline parameter.

    n            rank (number of parameter characters)
    d            number of embeddings
    params       n pairwise distinct character labels
    c            closed root set over the Borel (the extension support)
    sen_weights  d rows of n integers, dominant in every row
    flags        {"generic": bool, "crystabelline": bool} plus optionally
                 "split": bool (every partial telescope splits) or
                 "split_subsets": list of embedding subsets X such that the
                 partially de Rham module supported on X is split.

    The crystabelline flag is redundant data and must agree with the closed
    root set being minimal (no extension support).
    """

    n: int
    d: int
    params: tuple
    c: ClosedRootSet
    sen_weights: tuple
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        check_bound("n", self.n, "skeleton rank")
        check_bound("d", self.d, "number of embeddings")
        self.params = tuple(str(p) for p in self.params)
        if len(self.params) != self.n:
            raise GaloisError("need exactly n parameter labels")
        if len(set(self.params)) != self.n:
            raise GaloisError("parameter labels must be pairwise distinct")
        if self.c.n != self.n:
            raise GaloisError("closed root set has the wrong rank")
        if self.c.parabolic.composition != (1,) * self.n:
            raise GaloisError("the extension support must live over the Borel")
        if not is_closed_relative(self.c.full_roots(), borel(self.n)):
            raise GaloisError("extension support is not a closed root set")
        rows = weight_rows(self.sen_weights)
        if len(rows) != self.d:
            raise GaloisError("need one Sen weight row per embedding")
        if any(len(r) != self.n for r in rows):
            raise GaloisError("each Sen weight row must have n entries")
        if not is_dominant(rows):
            raise GaloisError("Sen weights must be dominant in every row")
        self.sen_weights = rows
        if not isinstance(self.flags, dict):
            raise GaloisError("flags must be a mapping")
        for key in ("generic", "crystabelline"):
            if key not in self.flags:
                raise GaloisError("flags must record %r" % key)
            if not isinstance(self.flags[key], bool):
                raise GaloisError("flag %r must be a boolean" % key)
        minimal = not self.c.extra
        if self.flags["crystabelline"] != minimal:
            raise GaloisError(
                "crystabelline flag must match a minimal extension support"
            )
        if "split_subsets" in self.flags:
            norm = sorted(
                {tuple(sorted(int(x) for x in xs)) for xs in self.flags["split_subsets"]}
            )
            for xs in norm:
                if any(x < 0 or x >= self.d for x in xs):
                    raise GaloisError("split subset mentions an unknown embedding")
            self.flags = dict(self.flags)
            self.flags["split_subsets"] = [list(xs) for xs in norm]

    # -- splitness of the partial telescopes --------------------------------

    def is_split(self, emb_subset) -> bool:
        """Whether the partially de Rham module supported on ``emb_subset``
        is flagged split.  The empty support is split by convention; the
        blanket flag ``split`` covers every subset."""
        xs = tuple(sorted(int(x) for x in emb_subset))
        if any(x < 0 or x >= self.d for x in xs):
            raise GaloisError("unknown embedding in subset")
        if not xs:
            return True
        if self.flags.get("split", False):
            return True
        table = self.flags.get("split_subsets", [])
        return list(xs) in [list(t) for t in table]

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "d": self.d,
            "params": list(self.params),
            "c": sorted(root_to_pair(r) for r in self.c.extra),
            "sen_weights": [list(r) for r in self.sen_weights],
            "flags": self.flags,
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TriangulineSkeleton":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GaloisError("invalid skeleton JSON: %s" % exc) from exc
        if not isinstance(payload, dict):
            raise GaloisError("skeleton JSON must be an object")
        missing = {"n", "d", "params", "c", "sen_weights", "flags"} - set(payload)
        if missing:
            raise GaloisError("skeleton JSON lacks %s" % ", ".join(sorted(missing)))
        n = payload["n"]
        try:
            extra = frozenset(root_from_pair(p) for p in payload["c"])
        except (TypeError, ValueError) as exc:
            raise GaloisError("bad root pair in extension support") from exc
        c = ClosedRootSet(borel(n), extra)
        return cls(
            n=n,
            d=payload["d"],
            params=tuple(payload["params"]),
            c=c,
            sen_weights=tuple(tuple(r) for r in payload["sen_weights"]),
            flags=dict(payload["flags"]),
        )


def make_skeleton(
    n: int,
    d: int,
    params=None,
    extra=None,
    sen_weights=None,
    generic: bool = True,
    **more_flags,
) -> TriangulineSkeleton:
    """Convenience constructor.

    ``extra`` is a list of 1-based pairs [i, j] naming the roots e_i - e_j in
    the extension support; ``params`` defaults to phi1..phin and
    ``sen_weights`` to d copies of the weight (n-1, ..., 1, 0).  The
    crystabelline flag is derived from ``extra``.

    >>> sk = make_skeleton(2, 2)
    >>> sk.flags["crystabelline"], sk.sen_weights
    (True, ((1, 0), (1, 0)))
    """
    if params is None:
        params = tuple("phi%d" % (i + 1) for i in range(n))
    pairs = [] if extra is None else list(extra)
    roots = frozenset(root_from_pair(p) for p in pairs)
    c = ClosedRootSet(borel(n), roots)
    if sen_weights is None:
        sen_weights = tuple(tuple(range(n - 1, -1, -1)) for _ in range(d))
    flags = {"generic": generic, "crystabelline": not roots}
    flags.update(more_flags)
    return TriangulineSkeleton(
        n=n, d=d, params=tuple(params), c=c, sen_weights=sen_weights, flags=flags
    )


def skeleton_to_json(sk: TriangulineSkeleton) -> str:
    return sk.to_json()


def skeleton_from_json(text: str) -> TriangulineSkeleton:
    return TriangulineSkeleton.from_json(text)


# ---------------------------------------------------------------------------
# the 2^d weight lattice (rank two only)


def _node_name(iset) -> str:
    return "D_{%s}" % ",".join(str(s) for s in iset)


@dataclass
class WeightLattice:
    """The lattice of partially de Rham rank-2 modules D_I, I a set of
    embeddings.  ``nodes`` maps the sorted tuple I to the d rows of Sen
    weights of D_I; ``coverings`` records, for every I and every embedding
    sigma outside I, the two exact sequences connecting D_I and D_{I + sigma}
    as display strings with the weights substituted in."""

    d: int
    sen_weights: tuple
    nodes: dict
    coverings: tuple

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "sen_weights": [list(r) for r in self.sen_weights],
            "nodes": {
                ",".join(str(s) for s in iset): [list(r) for r in rows]
                for iset, rows in self.nodes.items()
            },
            "coverings": [dict(c) for c in self.coverings],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def d_lattice(sk: TriangulineSkeleton) -> WeightLattice:
    """Build the weight lattice of a rank-two skeleton.

    Node I carries row sigma equal to the skeleton's Sen weights at sigma when
    sigma is in I, and (0, 0) otherwise.  Each covering I -> I + {sigma} is
    annotated with the two twist sequences

        0 -> t^{-h2} D_{I+s} -> D_I -> R/t^{h1-h2} -> 0
        0 -> t^{h1} D_I -> D_{I+s} -> t^{h2} R / t^{h1} R -> 0

    written with the actual exponents.

    >>> lat = d_lattice(make_skeleton(2, 1, sen_weights=((3, 1),)))
    >>> lat.coverings[0]["sequences"][0]
    '0 -> t_0^-1*D_{0} -> D_{} -> R/t_0^2 -> 0'
    """
    if sk.n != 2:
        raise GaloisError("the weight lattice is only recorded for rank two")
    nodes = {}
    subsets = []
    for size in range(sk.d + 1):
        for iset in itertools.combinations(range(sk.d), size):
            subsets.append(iset)
            nodes[iset] = tuple(
                tuple(sk.sen_weights[s]) if s in iset else (0, 0)
                for s in range(sk.d)
            )
    coverings = []
    for iset in subsets:
        for s in range(sk.d):
            if s in iset:
                continue
            jset = tuple(sorted(iset + (s,)))
            h1, h2 = sk.sen_weights[s]
            lower = "0 -> t_%d^%d*%s -> %s -> R/t_%d^%d -> 0" % (
                s, -h2, _node_name(jset), _node_name(iset), s, h1 - h2,
            )
            upper = "0 -> t_%d^%d*%s -> %s -> t_%d^%d*R/t_%d^%d*R -> 0" % (
                s, h1, _node_name(iset), _node_name(jset), s, h2, s, h1,
            )
            coverings.append(
                {
                    "from": ",".join(str(x) for x in iset),
                    "to": ",".join(str(x) for x in jset),
                    "sigma": s,
                    "h": [h1, h2],
                    "sequences": [lower, upper],
                }
            )
    coverings.sort(key=lambda c: (len(c["from"]), c["from"], c["sigma"]))
    return WeightLattice(
        d=sk.d,
        sen_weights=sk.sen_weights,
        nodes=nodes,
        coverings=tuple(coverings),
    )


# ---------------------------------------------------------------------------
# refinement diagrams


@dataclass
class FssDiagram:
    """Diagram of refinement characters.

    ``labels[i]`` is the i-th node: the parameter labels permuted by
    ``perms[i]``.  ``edges`` are index pairs (i, j) for the one-step
    degenerations i -> j.  For more than one embedding the layer is
    semisimple and the diagram is a flat list (no edges)."""

    n: int
    d: int
    params: tuple
    labels: tuple
    perms: tuple
    edges: tuple

    def sources(self) -> list:
        """Indices of the nodes with no incoming edge."""
        targets = {j for (_, j) in self.edges}
        return [i for i in range(len(self.labels)) if i not in targets]

    def component_count(self) -> int:
        parent = list(range(len(self.labels)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            parent[find(i)] = find(j)
        return len({find(i) for i in range(len(self.labels))})

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "params": list(self.params),
            "nodes": [
                {"label": list(lab), "perm": perm_to_oneline(w)}
                for lab, w in zip(self.labels, self.perms)
            ],
            "edges": [list(e) for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _apply_label(w: Perm, params) -> tuple:
    winv = inverse(w)
    return tuple(params[winv[i]] for i in range(len(params)))


def fss_diagram(sk: TriangulineSkeleton) -> FssDiagram:
    """Diagram of refinement characters of the skeleton.

    One embedding: nodes are the characters (w . s_J)(params) for w a
    refinement of the extension support and J a pairwise orthogonal set of
    support roots that w takes to simple roots; coinciding characters are one
    node.  Edges add one root to J.  Several embeddings: the layer is
    semisimple, so only the refinement characters survive, with no edges.

    >>> diag = fss_diagram(make_skeleton(3, 1, extra=[[1, 2]]))
    >>> len(diag.labels), len(diag.edges), diag.component_count()
    (5, 2, 3)
    """
    simple = set(simple_roots(sk.n))
    ws = refinements(sk.c)
    pairs = []  # (label, perm) for every (w, J)
    edges_raw = []
    if sk.d == 1:
        for w in ws:
            cands = sorted(r for r in sk.c.extra if act_root(w, r) in simple)
            valid = []
            for size in range(len(cands) + 1):
                for jset in itertools.combinations(cands, size):
                    if all(
                        roots_orthogonal(a, b)
                        for a, b in itertools.combinations(jset, 2)
                    ):
                        valid.append(jset)
            for jset in valid:
                p = w
                for r in jset:
                    p = compose(p, reflection(sk.n, r))
                pairs.append((_apply_label(p, sk.params), p))
                for r in cands:
                    if r in jset:
                        continue
                    bigger = tuple(sorted(jset + (r,)))
                    if bigger not in valid:
                        continue
                    q = p
                    q = compose(q, reflection(sk.n, r))
                    edges_raw.append(
                        (_apply_label(p, sk.params), _apply_label(q, sk.params))
                    )
    else:
        for w in ws:
            pairs.append((_apply_label(w, sk.params), w))
    by_label = {}
    for lab, p in pairs:
        prev = by_label.setdefault(lab, p)
        if prev != p:  # distinct params make the label determine the perm
            raise GaloisError("inconsistent character labels")  # pragma: no cover
    labels = tuple(sorted(by_label))
    index = {lab: i for i, lab in enumerate(labels)}
    edges = tuple(sorted({(index[a], index[b]) for a, b in edges_raw}))
    return FssDiagram(
        n=sk.n,
        d=sk.d,
        params=sk.params,
        labels=labels,
        perms=tuple(by_label[lab] for lab in labels),
        edges=edges,
    )


def export_fss(diag: FssDiagram, fmt: str = "json") -> str:
    """Render a refinement diagram as JSON or DOT."""
    if fmt == "json":
        return diag.to_json()
    if fmt == "dot":
        lines = ["digraph refinements {", "  rankdir=LR;", "  node [shape=box];"]
        for i, lab in enumerate(diag.labels):
            lines.append('  n%d [label="(%s)"];' % (i, ", ".join(lab)))
        for i, j in diag.edges:
            lines.append("  n%d -> n%d;" % (i, j))
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise GaloisError("unknown export format %r" % fmt)


# ---------------------------------------------------------------------------
# recorded tables

_HOM_EXT_STATEMENTS = {
    ("analytic", 1): (
        "pairing of the fully wall-crossed member against its one-step "
        "analytic cover for a generic crystabelline parameter over two "
        "embeddings"
    ),
    ("analytic", 2): (
        "pairing of the one-step member against the full space for a generic "
        "crystabelline parameter over two embeddings"
    ),
    ("analytic", 3): (
        "pairing for the partially de Rham module at one embedding; the "
        "value depends on whether that module splits"
    ),
    ("corner", 1): (
        "dual pairing of the one-step corner against the initial corner of "
        "the hypercube"
    ),
    ("corner", 2): (
        "dual pairing of the terminal corner against the one-step corner of "
        "the hypercube"
    ),
    ("corner", 3): (
        "dual pairing of the terminal corner for the partially de Rham "
        "module at one embedding; the value depends on criticality"
    ),
}


def _hom_ext_value(sk, part, family, split, critical) -> int:
    if sk.d != 2:
        raise GaloisError("pairing tables are recorded for two embeddings only")
    if not sk.flags.get("generic") or not sk.flags.get("crystabelline"):
        raise GaloisError(
            "pairing tables are recorded for generic crystabelline skeleta"
        )
    if family not in ("analytic", "corner"):
        raise GaloisError("family must be 'analytic' or 'corner'")
    if part == 1:
        return 2
    if part == 2:
        return 4
    if part == 3:
        if family == "analytic":
            if split is None:
                raise GaloisError("part 3 needs split=True/False")
            return 4 if split else 2
        if critical is None:
            raise GaloisError("part 3 needs critical=True/False")
        return 4 if critical else 2
    raise GaloisError("part must be 1, 2 or 3")


def constituent_count_pair(d: int) -> tuple:
    """Recorded irreducible-constituent counts over d embeddings: first the
    ambient space, then its full analytic wall-crossing.

    >>> constituent_count_pair(2)
    (8, 15)
    """
    if d < 1:
        raise GaloisError("need at least one embedding")
    return (2 ** d + d * 2 ** (d - 1), 3 ** d + d * 3 ** (d - 1))


def surplus_bound(n: int, d: int) -> int:
    """Recorded lower bound for the multiplicity of the locally algebraic
    constituent when the parameter is non-critical for every refinement.

    >>> surplus_bound(2, 1)
    1
    """
    if n < 1 or d < 1:
        raise GaloisError("rank and embedding count must be positive")
    return 1 + (2 ** n - n * (n + 1) // 2 - 1) * d


def expected_tables(sk: TriangulineSkeleton, query: str, **kw) -> dict:
    """Look up a recorded numerical value for the skeleton.

    query one of:
      hom_dim / ext_dim   part=1|2|3, family='analytic'|'corner',
                          split= / critical= for part 3
      e_mult              iset=, jset= (disjoint embedding subsets)
      constituent_counts  d= (defaults to the skeleton's)
      surplus_bound       n=, d= (default to the skeleton's)

    The returned dict carries the value plus a ``statement`` describing what
    is counted.  Values are stored data, never recomputed.
    """
    if query in ("hom_dim", "ext_dim"):
        part = kw.pop("part", None)
        family = kw.pop("family", "analytic")
        split = kw.pop("split", None)
        critical = kw.pop("critical", None)
        _reject_extra(kw)
        if part is None:
            raise GaloisError("queries hom_dim/ext_dim need part=1|2|3")
        value = _hom_ext_value(sk, part, family, split, critical)
        return {
            "query": query,
            "part": part,
            "family": family,
            "value": value,
            "statement": _HOM_EXT_STATEMENTS[(family, part)],
        }
    if query == "e_mult":
        iset = tuple(sorted(int(x) for x in kw.pop("iset", ())))
        jset = tuple(sorted(int(x) for x in kw.pop("jset", ())))
        _reject_extra(kw)
        if set(iset) & set(jset):
            raise GaloisError("the two embedding subsets must be disjoint")
        for x in iset + jset:
            if x < 0 or x >= sk.d:
                raise GaloisError("unknown embedding in subset")
        rest = tuple(s for s in range(sk.d) if s not in set(iset) | set(jset))
        if sk.flags.get("crystabelline") and sk.is_split(rest):
            value = (sk.d - len(iset)) + 1
        else:
            value = 1
        return {
            "query": query,
            "iset": list(iset),
            "jset": list(jset),
            "value": value,
            "statement": (
                "multiplicity of the hypercube cell at (I, J): one, except "
                "#(complement of I) + 1 in the crystabelline case when the "
                "module supported outside I and J splits"
            ),
        }
    if query == "constituent_counts":
        d = kw.pop("d", sk.d)
        _reject_extra(kw)
        value = constituent_count_pair(d)
        return {
            "query": query,
            "d": d,
            "value": list(value),
            "statement": (
                "irreducible-constituent counts over d embeddings: the "
                "ambient space, then its full analytic wall-crossing"
            ),
        }
    if query == "surplus_bound":
        n = kw.pop("n", sk.n)
        d = kw.pop("d", sk.d)
        _reject_extra(kw)
        return {
            "query": query,
            "n": n,
            "d": d,
            "value": surplus_bound(n, d),
            "statement": (
                "lower bound for the multiplicity of the locally algebraic "
                "constituent in the everywhere non-critical case"
            ),
        }
    raise GaloisError("no recorded table for query %r" % query)


def _reject_extra(kw) -> None:
    if kw:
        raise GaloisError("unknown arguments: %s" % ", ".join(sorted(kw)))
