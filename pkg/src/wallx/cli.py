"""Command-line surface.

Subcommands

  hypercube EXPR        build a module from an inline expression and export
                        its plus or minus hypercube (JSON or DOT)
  ltensor N D           weights of the tensor of fundamental representations:
                        full multiset, ordinary weights, isotypic split, or
                        the ordinary-part dimension of a closed root set
  refinements N         the refinements of a closed root set, as 1-based
                        one-line permutations
  fss FILE              the refinement diagram of a skeleton file
  tables QUERY          recorded numerical tables
  verify                seeded invariant suites with a JSON report

Exit codes: 0 success; 1 parse/usage errors (with a position for expression
errors) and failing verify runs; 2 internal exactness violation (an engine
bug, never user error); 3 enumeration bounds exceeded (see WALLX_BOUNDS).

All output is exact integers/strings -- no floating point anywhere.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass

import click

from . import block
from .block import BlockError, ExactnessError, ExprError
from .corpus import random_module, random_ses, random_strict_module
from .galois import (
    GaloisError,
    expected_tables,
    export_fss,
    fss_diagram,
    make_skeleton,
    skeleton_from_json,
)
from .hypercube import build_hypercube, export, verify_verma_hypercube
from .limits import BoundExceeded
from .linalg import spans_equal
from .ltensor import (
    isotypic_components,
    ltensor_character,
    ordinary_part_dim,
    ordinary_weights,
    verify_ordweight,
)
from .parabolic import ClosedRootSet, StandardParabolic, borel, refinements
from .rootdata import perm_to_oneline, root_from_pair
from .weightmodel import DEFAULT_DEPTH, PATTERNS, wm_compare


@dataclass
class RunConfig:
    """Knobs shared by the subcommands."""

    subcommand: str = ""
    source: str = ""  # inline expression or an input path
    fmt: str = "json"  # json | dot | tsv
    depth: int = DEFAULT_DEPTH  # truncation depth of the weight-module oracle
    seed: int = 0
    size: int = 0  # 0 = per-suite default

    def __post_init__(self):
        if self.fmt not in ("json", "dot", "tsv"):
            raise ValueError("format must be json, dot or tsv")
        if self.depth <= 0:
            raise ValueError("depth must be positive")
        if self.seed < 0 or self.size < 0:
            raise ValueError("seed and size must be nonnegative")


# ---------------------------------------------------------------------------
# small parsing helpers


def _parse_pairs(text):
    """'1,2;2,3' -> roots ((0,1), (1,2)).  1-based pairs, ; separated."""
    roots = []
    if not text:
        return frozenset(roots)
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError("root %r is not a pair i,j" % chunk)
        roots.append(root_from_pair([int(parts[0]), int(parts[1])]))
    return frozenset(roots)


def _parse_composition(text):
    return StandardParabolic(tuple(int(x) for x in text.split(",")))


def _weight_str(w):
    """A weight as rows joined by '|': '2,1,0|1,0,0'."""
    if w and isinstance(w[0], tuple):
        return "|".join(",".join(str(x) for x in row) for row in w)
    return ",".join(str(x) for x in w)


def _weight_list(w):
    if w and isinstance(w[0], tuple):
        return [list(row) for row in w]
    return list(w)


# ---------------------------------------------------------------------------
# the plain-function command layer (the click layer wraps these)


def cmd_hypercube(expr, sign="+", fmt="json"):
    """Build the module named by ``expr`` and export its hypercube."""
    M = block.build(expr)
    cube = build_hypercube(M, sign)
    return export(cube, fmt)


def cmd_ltensor(n, d, parabolic=None, mode="mult", fmt="json", c=None):
    """Weight data of the tensor of fundamental representations."""
    if mode == "mult":
        full = ltensor_character(n, d)
        items = sorted(full.entries.items())
        if fmt == "tsv":
            return "\n".join(
                "%s\t%d" % (_weight_str(w), m) for w, m in items
            ) + "\n"
        return json.dumps(
            {
                "total_dim": full.total_dim,
                "weights": [
                    {"weight": _weight_list(w), "mult": m} for w, m in items
                ],
            },
            sort_keys=True,
        )
    if mode == "ordinary":
        ws = sorted(ordinary_weights(n, d))
        if fmt == "tsv":
            return "\n".join(_weight_str(w) for w in ws) + "\n"
        return json.dumps({"ordinary": [_weight_list(w) for w in ws]},
                          sort_keys=True)
    if mode == "isotypic":
        if parabolic is None:
            raise ValueError("mode isotypic needs --parabolic")
        comps = isotypic_components(n, d, parabolic)
        if fmt == "tsv":
            return "\n".join(
                "%s\t%d" % (",".join(str(x) for x in comp.levi_character),
                            comp.weights.total_dim)
                for comp in comps
            ) + "\n"
        return json.dumps(
            {
                "components": [
                    {
                        "levi_character": list(comp.levi_character),
                        "dim": comp.weights.total_dim,
                    }
                    for comp in comps
                ]
            },
            sort_keys=True,
        )
    if mode == "ordpart":
        if parabolic is None:
            parabolic = borel(n)
        cset = ClosedRootSet(parabolic, c or frozenset())
        dim = ordinary_part_dim(cset, n, d)
        if fmt == "tsv":
            return "%d\n" % dim
        return json.dumps({"ordinary_part_dim": dim}, sort_keys=True)
    raise ValueError("unknown mode %r" % mode)


def cmd_refinements(n, c=frozenset(), fmt="json"):
    """Refinements of a closed root set over the Borel, 1-based one-line."""
    cset = ClosedRootSet(borel(n), frozenset(c))
    perms = sorted(perm_to_oneline(w) for w in refinements(cset))
    if fmt == "tsv":
        return "\n".join(",".join(str(x) for x in p) for p in perms) + "\n"
    return json.dumps(perms)


def cmd_fss(path, fmt="json"):
    """Refinement diagram of the skeleton stored at ``path``."""
    with open(path, "r", encoding="utf-8") as fh:
        sk = skeleton_from_json(fh.read())
    return export_fss(fss_diagram(sk), fmt)


def cmd_tables(query, skeleton=None, verbose=False, **kw):
    """Recorded tables; terse space-joined values by default.

    For the pairing and cell-multiplicity queries, --n/--d/--split shape the
    default skeleton; for the count and bound queries they are the query's
    own parameters.
    """
    kw = {k: v for k, v in kw.items() if v is not None}
    n = kw.pop("n", None)
    d = kw.pop("d", None)
    if query in ("constituent_counts", "surplus_bound"):
        if skeleton is None:
            skeleton = make_skeleton(2, 2)
        if query == "surplus_bound" and n is not None:
            kw["n"] = n
        if d is not None:
            kw["d"] = d
    else:
        if skeleton is None:
            blanket = bool(kw.get("split")) if query == "e_mult" else False
            skeleton = make_skeleton(n or 2, d or 2, split=blanket)
        if query == "e_mult":
            kw.pop("split", None)  # consumed by the skeleton flag
    result = expected_tables(skeleton, query, **kw)
    if verbose:
        return json.dumps(result, sort_keys=True)
    value = result["value"]
    if isinstance(value, (list, tuple)):
        return " ".join(str(x) for x in value)
    return str(value)


# ---------------------------------------------------------------------------
# verify suites


def _single_factor_checks(M):
    """The single-factor law battery on a strict module M (d = 1)."""
    sg = (0,)
    checks = {}
    T = block.theta(0, M)
    io = block.iota(0, M, T)
    ka = block.kappa(0, M, T)
    fp = block.finite_part(sg, M)

    # unit kernel = the finite part, exactly
    checks["unit_kernel_is_finite_part"] = all(
        spans_equal(io.kernel_spans()[v],
                                 fp.incl.image_spans()[v])
        for v in M.vertices()
    )
    checks["unit_injective_iff_no_finite_part"] = (
        io.is_injective() == (fp.total_dim == 0)
    )

    # counit cokernel is generated by finite vectors
    cok = block.nabla_minus(sg, M)
    checks["counit_cokernel_finite"] = (
        block.vartheta_minus(sg, cok).total_dim == 0
    )

    # sharp modulo the unit image is generated by finite vectors
    sharp = block.mhash_sharp(M)
    io_sharp = block.corestrict(io, sharp)
    rem, _ = block.quotient_by_spans(sharp, io_sharp.image_spans())
    checks["sharp_mod_unit_finite"] = (
        block.vartheta_minus(sg, rem).total_dim == 0
    )

    # wall-crossing output has no finite part on either side
    checks["theta_no_finite_part"] = (
        block.finite_part(sg, T).total_dim == 0
    )
    checks["theta_no_finite_quotient"] = (
        block.finite_quotient(sg, T).total_dim == 0
    )

    # sharp/flat laws
    flat = block.mhash_flat(M)
    unit_of_sharp = block.corestrict(
        block.iota(0, sharp), block.mhash_sharp(sharp)
    )
    checks["unit_sharp_to_sharp_sharp_iso"] = unit_of_sharp.is_isomorphism()
    flat_of_flat = block.mhash_flat(flat)
    checks["counit_flat_flat_to_flat_iso"] = flat_of_flat.incl.is_isomorphism()
    checks["flat_of_sharp"] = (
        fp.total_dim != 0
        or block.is_isomorphic(block.mhash_flat(sharp), flat)
    )
    checks["sharp_of_flat"] = block.is_isomorphic(
        block.mhash_sharp(flat), sharp
    )

    # connecting sequence, when the finite part vanishes
    seq = block.sharp_flat_sequence(M)
    checks["sharp_flat_sequence"] = (
        seq["ok"] if fp.total_dim == 0 else not seq["ok"]
    )
    return checks


def _suite_appendixA(seed, size):
    size = size or 40
    cases = []
    for i in range(size):
        M = random_strict_module(seed * 100003 + i)
        checks = _single_factor_checks(M)
        cases.append(
            {
                "case": i,
                "dims": {block.vkey(v): M.dims[v] for v in M.vertices()},
                "checks": checks,
                "pass": all(checks.values()),
            }
        )
    return cases


def _pair_checks(M):
    """Commutation/idempotence/product laws on a two-factor module."""
    checks = {}
    a0 = block.vartheta_plus((0,), M)
    a1 = block.vartheta_plus((1,), M)
    checks["plus_commute"] = block.is_isomorphic(
        block.vartheta_plus((1,), a0), block.vartheta_plus((0,), a1)
    )
    checks["plus_tower"] = block.is_isomorphic(
        block.vartheta_plus((1,), a0), block.vartheta_plus((0, 1), M)
    )
    checks["plus_idempotent"] = block.is_isomorphic(
        block.vartheta_plus((0,), a0), a0
    )
    b0 = block.vartheta_minus((0,), M)
    b1 = block.vartheta_minus((1,), M)
    checks["minus_commute"] = block.is_isomorphic(
        block.vartheta_minus((1,), b0), block.vartheta_minus((0,), b1)
    )
    checks["minus_tower"] = block.is_isomorphic(
        block.vartheta_minus((1,), b0), block.vartheta_minus((0, 1), M)
    )
    checks["minus_idempotent"] = block.is_isomorphic(
        block.vartheta_minus((0,), b0), b0
    )
    n01 = block.nabla_minus((0, 1), M)
    checks["nabla_minus_product"] = block.is_isomorphic(
        n01, block.nabla_minus((1,), block.nabla_minus((0,), M))
    ) and block.is_isomorphic(
        n01, block.nabla_minus((0,), block.nabla_minus((1,), M))
    )
    return checks


def _suite_functor_laws(seed, size):
    size = size or 10
    cases = []
    for i in range(size):
        M = random_module(seed * 60013 + i, d=2, max_slice_dim=5)
        checks = _pair_checks(M)
        cases.append(
            {
                "case": i,
                "total_dim": M.total_dim,
                "checks": checks,
                "pass": all(checks.values()),
            }
        )
    # exactness of theta on short exact sequences
    for i in range(size):
        S, E, Q, incl, proj = random_ses(seed * 70001 + i, d=1)
        ti, tp = block.theta_map(0, incl), block.theta_map(0, proj)
        ok = (
            ti.is_injective()
            and tp.is_surjective()
            and all(
                spans_equal(
                    ti.image_spans()[v], tp.kernel_spans()[v]
                )
                for v in E.vertices()
            )
        )
        cases.append(
            {"case": "theta-exact-%d" % i, "total_dim": E.total_dim,
             "checks": {"theta_exact": ok}, "pass": ok}
        )
    return cases


def _suite_hypercube_edges(seed, size):
    size = size or 6
    cases = []
    for pattern in ((0,), (1,), (0, 0), (0, 1), (0, 0, 0), (1, 0, 1)):
        for sign in ("+", "-"):
            try:
                verify_verma_hypercube(pattern, sign)
                ok = True
            except ExactnessError:
                ok = False
            cases.append(
                {"case": "verma-%s-%s" % ("".join(map(str, pattern)), sign),
                 "checks": {"cells_match": ok}, "pass": ok}
            )
    for i in range(size):
        M = random_module(seed * 91009 + i, d=2, max_slice_dim=4)
        entry = {"case": "corpus-%d" % i, "total_dim": M.total_dim}
        try:
            build_hypercube(M, "+")
            build_hypercube(M, "-")
            entry["checks"] = {"edges_exact": True}
            entry["pass"] = True
        except ExactnessError as exc:
            entry["checks"] = {"edges_exact": False}
            entry["error"] = str(exc)
            entry["pass"] = False
        cases.append(entry)
    return cases


def _suite_ordweight(seed, size):
    cases = []
    for n in (2, 3, 4):
        for d in (1, 2):
            ok = verify_ordweight(n, d)
            cases.append(
                {"case": "n=%d,d=%d" % (n, d),
                 "checks": {"ordinary_weights": ok}, "pass": ok}
            )
    return cases


def _suite_cross_backend(seed, size, depth=DEFAULT_DEPTH):
    atoms = {
        "L": block.simple((0,)),
        "Ls": block.simple((1,)),
        "M": block.verma((0,)),
        "Ms": block.verma((1,)),
        "Mdual": block.dual_verma((0,)),
        "P": block.big_projective(),
    }
    cases = []
    for pattern in PATTERNS:
        M = atoms[pattern]
        engine = {
            "theta": block.theta(0, M).multiplicity_pair(),
            "vartheta_plus": block.vartheta_plus((0,), M).multiplicity_pair(),
            "vartheta_minus": block.vartheta_minus((0,), M).multiplicity_pair(),
            "nabla_plus": block.nabla_plus((0,), M).multiplicity_pair(),
            "nabla_minus": block.nabla_minus((0,), M).multiplicity_pair(),
        }
        oracle = wm_compare(pattern, depth)
        table = {
            f: {"engine": list(engine[f]), "oracle": list(oracle[f])}
            for f in sorted(engine)
        }
        ok = all(engine[f] == oracle[f] for f in engine)
        cases.append(
            {"case": pattern, "table": table,
             "checks": {"multiplicities_agree": ok}, "pass": ok}
        )
    return cases


_SUITES = {
    "appendixA": _suite_appendixA,
    "functor-laws": _suite_functor_laws,
    "hypercube-edges": _suite_hypercube_edges,
    "ordweight": _suite_ordweight,
    "cross-backend": _suite_cross_backend,
}


def cmd_verify(suite="all", seed=0, size=0):
    """Run one or all invariant suites; returns (report_json, all_passed)."""
    names = list(_SUITES) if suite == "all" else [suite]
    for name in names:
        if name not in _SUITES:
            raise ValueError(
                "unknown suite %r (choose from %s, all)"
                % (name, ", ".join(_SUITES))
            )
    suites = {}
    for name in names:
        cases = _SUITES[name](seed, size)
        suites[name] = {"cases": cases, "pass": all(c["pass"] for c in cases)}
    ok = all(s["pass"] for s in suites.values())
    report = {
        "config": {"suite": suite, "seed": seed, "size": size},
        "suites": suites,
        "pass": ok,
    }
    return json.dumps(report, sort_keys=True, indent=2), ok


# ---------------------------------------------------------------------------
# click wiring


@click.group(name="wallx")
def _group():
    """Exact wall-crossing calculus on blocks of category O."""


@_group.command("hypercube")
@click.argument("expr")
@click.option("--sign", type=click.Choice(["+", "-"]), default="+")
@click.option("--format", "fmt", type=click.Choice(["json", "dot"]),
              default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="write to a file instead of stdout")
def _click_hypercube(expr, sign, fmt, out):
    text = cmd_hypercube(expr, sign, fmt)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


@_group.command("ltensor")
@click.argument("n", type=int)
@click.argument("d", type=int)
@click.option("--parabolic", "parabolic_str", default=None,
              help="Levi composition, e.g. 2,1")
@click.option("--mode", type=click.Choice(
    ["mult", "ordinary", "isotypic", "ordpart"]), default="mult")
@click.option("--format", "fmt", type=click.Choice(["json", "tsv"]),
              default="json")
@click.option("--c", "c_str", default="",
              help="extra roots of the closed set, 1-based: '1,2;1,3'")
def _click_ltensor(n, d, parabolic_str, mode, fmt, c_str):
    parab = _parse_composition(parabolic_str) if parabolic_str else None
    click.echo(cmd_ltensor(n, d, parab, mode, fmt, _parse_pairs(c_str)),
               nl=False)
    if fmt == "json":
        click.echo()


@_group.command("refinements")
@click.argument("n", type=int)
@click.option("--c", "c_str", default="",
              help="extra roots, 1-based pairs: '1,2;2,3'")
@click.option("--format", "fmt", type=click.Choice(["json", "tsv"]),
              default="json")
def _click_refinements(n, c_str, fmt):
    click.echo(cmd_refinements(n, _parse_pairs(c_str), fmt), nl=False)
    if fmt == "json":
        click.echo()


@_group.command("fss")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["json", "dot"]),
              default="json")
def _click_fss(path, fmt):
    text = cmd_fss(path, fmt)
    click.echo(text, nl=not text.endswith("\n"))


@_group.command("tables")
@click.argument("query")
@click.option("--part", type=int, default=None)
@click.option("--family", type=click.Choice(["analytic", "corner"]),
              default=None)
@click.option("--split/--no-split", "split", default=None)
@click.option("--critical/--no-critical", "critical", default=None)
@click.option("--n", type=int, default=None)
@click.option("--d", type=int, default=None)
@click.option("--iset", default=None, help="comma list of embeddings")
@click.option("--jset", default=None, help="comma list of embeddings")
@click.option("--skeleton", "skeleton_path",
              type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--verbose", is_flag=True, default=False,
              help="print the full record, not just the value")
def _click_tables(query, part, family, split, critical, n, d, iset, jset,
                  skeleton_path, verbose):
    sk = None
    if skeleton_path:
        with open(skeleton_path, "r", encoding="utf-8") as fh:
            sk = skeleton_from_json(fh.read())
    kw = {}
    if part is not None:
        kw["part"] = part
    if family is not None:
        kw["family"] = family
    if split is not None:
        kw["split"] = split
    if critical is not None:
        kw["critical"] = critical
    if n is not None:
        kw["n"] = n
    if d is not None:
        kw["d"] = d
    if iset is not None:
        kw["iset"] = tuple(int(x) for x in iset.split(",") if x != "")
    if jset is not None:
        kw["jset"] = tuple(int(x) for x in jset.split(",") if x != "")
    if query == "e_mult":
        kw.setdefault("iset", ())
        kw.setdefault("jset", ())
    click.echo(cmd_tables(query, sk, verbose, **kw))


@_group.command("verify")
@click.argument("suite", default="all")
@click.option("--seed", type=int, default=0)
@click.option("--size", type=int, default=0)
@click.option("--depth", type=int, default=DEFAULT_DEPTH,
              help="truncation depth of the weight-module oracle")
def _click_verify(suite, seed, size, depth):
    cfg = RunConfig(subcommand="verify", seed=seed, size=size, depth=depth)
    report, ok = cmd_verify(suite, cfg.seed, cfg.size)
    click.echo(report)
    return 0 if ok else 1


def main(argv=None):
    """Entry point with the documented exit-code mapping."""
    try:
        rv = _group.main(args=argv, prog_name="wallx", standalone_mode=False)
        return int(rv) if rv else 0
    except ExprError as exc:
        click.echo("parse error at position %d: %s" % (exc.pos, exc),
                   err=True)
        return 1
    except ExactnessError as exc:
        click.echo("exactness violation (engine bug): %s" % exc, err=True)
        return 2
    except BoundExceeded as exc:
        click.echo("bounds: %s" % exc, err=True)
        return 3
    except (BlockError, GaloisError, ValueError, OSError) as exc:
        click.echo("error: %s" % exc, err=True)
        return 1
    except click.exceptions.UsageError as exc:
        click.echo("usage error: %s" % exc.format_message(), err=True)
        return 1
    except click.exceptions.Exit as exc:  # --help and friends
        return exc.exit_code
    except click.exceptions.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
