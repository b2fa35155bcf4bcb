"""Truncated weight modules for a single gl(2): an independent cross-check.

This backend realizes the regular integral block (normalized highest weights
0 and -2) concretely as h-weight-graded vector spaces with raising/lowering
operators, truncated at a finite depth.  Wall-crossing is computed from first
principles here — tensor with the standard representation V1, cut out the
Casimir eigenvalue -1, tensor with the dual V1* — with no reference to the
finite quiver model in :mod:`wallx.block`.  Agreement of composition-factor
multiplicities between the two backends is therefore a genuine consistency
check and is wired into the test suite and ``wallx verify cross-backend``.

Model conventions (all fixed once here, used consistently below):

* ``h`` acts on the layer of weight ``m`` as the scalar ``m``; ``up`` (the
  raising operator) maps layer ``m`` to ``m + 2``; ``down`` maps to ``m - 2``;
  ``[up, down] = h``.
* V1 has basis ``e0`` (weight -1, lowest) and ``e1 = up e0`` (weight +1);
  the dual basis vectors ``e1*`` (weight -1) and ``e0*`` (weight +1) satisfy
  ``up e1* = -e0*`` and ``down e0* = -e1*``.
* The Casimir is ``c = h^2 - 2h + 4 up∘down`` (apply ``down`` first); it is 0
  on the principal block and -1 on the wall.  ``c`` acts on the layer of
  weight ``m`` by the square matrix ``(m^2 - 2m)·I + 4·U·D``.
* Truncation bookkeeping: ``valid_min = None`` means the module is exact
  (finite-dimensional, no layer dropped); otherwise all stored layers have
  weight >= valid_min and are the true layers of the untruncated module, with
  true operators between stored layers.  Tensoring with V1 or V1* costs one
  weight unit of validity; anything built from a layerwise Casimir costs two
  more (the Casimir on layer m looks down to layer m - 2).

Composition-factor multiplicities are read off from characters: in the
normalized block every module has character m1·[weight 0] + m2·[weights
-2, -4, -6, ...], so m1 = dim(layer 0) and m2 = dim(layer -2), with
dim(layer -4) = m2 as a consistency check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import (
    Matrix,
    Vector,
    column_basis,
    coordinates,
    hstack,
    identity,
    invert,
    mat_mul,
    mat_pow,
    mat_scale,
    mat_vec,
    nullspace,
    rank,
    row_basis,
    solve_matrix,
    span_intersect,
    transpose,
    zeros,
)

Subspace = dict[int, list[Vector]]

FUNCTORS = ("theta", "vartheta_plus", "vartheta_minus", "nabla_plus", "nabla_minus")
PATTERNS = ("L", "Ls", "M", "Ms", "Mdual", "P")

DEFAULT_DEPTH = 12


class WmError(Exception):
    """Structural failure in the weight-module backend."""


class WmDepthError(WmError):
    """Truncation too shallow for the requested answer to be trustworthy."""

    def __init__(self, message: str, required_valid_min: int):
        super().__init__(f"{message} (need reliable layers down to weight {required_valid_min})")
        self.required_valid_min = required_valid_min


@dataclass
class WeightModule:
    """A weight-graded module, possibly truncated below ``valid_min``."""

    layers: dict[int, int]
    up: dict[int, Matrix]
    down: dict[int, Matrix]
    valid_min: int | None = None

    def dim(self, mu: int) -> int:
        return self.layers.get(mu, 0)

    @property
    def exact(self) -> bool:
        return self.valid_min is None

    def reliable(self, mu: int) -> bool:
        return self.exact or mu >= self.valid_min

    def weights(self) -> list[int]:
        return sorted(self.layers)

    def total_dim(self) -> int:
        return sum(self.layers.values())


def op_up(m: WeightModule, mu: int) -> Matrix:
    a = m.up.get(mu)
    return a if a is not None else zeros(m.dim(mu + 2), m.dim(mu))


def op_down(m: WeightModule, mu: int) -> Matrix:
    a = m.down.get(mu)
    return a if a is not None else zeros(m.dim(mu - 2), m.dim(mu))


def _cleaned(layers: dict[int, int], up: dict[int, Matrix], down: dict[int, Matrix],
             valid_min: int | None) -> WeightModule:
    layers = {mu: d for mu, d in layers.items() if d > 0}
    up = {mu: a for mu, a in up.items() if mu in layers and layers.get(mu + 2, 0) > 0}
    down = {mu: a for mu, a in down.items() if mu in layers and layers.get(mu - 2, 0) > 0}
    return WeightModule(layers, up, down, valid_min)


def wm_check(m: WeightModule) -> None:
    """Validate shapes and the commutation relation [up, down] = h.

    The commutator on layer mu composes through layers mu-2 and mu+2, so it
    is only asserted where layer mu-2 is reliable (or the module is exact).
    """
    for mu, d in m.layers.items():
        u = op_up(m, mu)
        dn = op_down(m, mu)
        if (len(u), len(u[0]) if u else 0) != (m.dim(mu + 2), d) and d > 0 and m.dim(mu + 2) > 0:
            raise WmError(f"up matrix at weight {mu} has wrong shape")
        if (len(dn), len(dn[0]) if dn else 0) != (m.dim(mu - 2), d) and d > 0 and m.dim(mu - 2) > 0:
            raise WmError(f"down matrix at weight {mu} has wrong shape")
    for mu, d in m.layers.items():
        if d == 0:
            continue
        if not (m.exact or mu - 2 >= m.valid_min):
            continue
        lhs = (mat_mul(op_up(m, mu - 2), op_down(m, mu))
               if m.dim(mu - 2) else zeros(d, d))
        rhs = (mat_mul(op_down(m, mu + 2), op_up(m, mu))
               if m.dim(mu + 2) else zeros(d, d))
        comm = [[lhs[i][j] - rhs[i][j] for j in range(d)] for i in range(d)]
        expect = mat_scale(mu, identity(d))
        if comm != expect:
            raise WmError(f"[up, down] != h on layer {mu}")


def wm_trim(m: WeightModule, new_valid: int | None) -> WeightModule:
    """Drop layers below ``new_valid`` and mark them unreliable."""
    if new_valid is None:
        return m
    layers = {mu: d for mu, d in m.layers.items() if mu >= new_valid}
    up = {mu: a for mu, a in m.up.items() if mu in layers and mu + 2 in layers}
    down = {mu: a for mu, a in m.down.items() if mu in layers and mu - 2 in layers}
    return _cleaned(layers, up, down, new_valid)


# ---------------------------------------------------------------------------
# standard single-factor patterns


def wm_verma(hw: int, depth: int = DEFAULT_DEPTH) -> WeightModule:
    """Truncated Verma module with integer h-highest weight ``hw``.

    Basis at layer ``hw - 2k`` is ``down^k v``; ``up·down^k v =
    k(hw - k + 1)·down^(k-1) v``.
    """
    layers = {hw - 2 * k: 1 for k in range(depth + 1)}
    up = {hw - 2 * k: [[Fraction(k * (hw - k + 1))]] for k in range(1, depth + 1)}
    down = {hw - 2 * k: [[Fraction(1)]] for k in range(depth)}
    return WeightModule(layers, up, down, valid_min=hw - 2 * depth)


def wm_simple_finite(hw: int) -> WeightModule:
    """The (hw+1)-dimensional simple module, hw >= 0.  Exact, no truncation."""
    if hw < 0:
        raise WmError("finite simple needs a dominant (nonnegative) highest weight")
    layers = {hw - 2 * k: 1 for k in range(hw + 1)}
    up = {hw - 2 * k: [[Fraction(k * (hw - k + 1))]] for k in range(1, hw + 1)}
    down = {hw - 2 * k: [[Fraction(1)]] for k in range(hw)}
    return WeightModule(layers, up, down, valid_min=None)


def wm_dual_verma(hw: int, depth: int = DEFAULT_DEPTH) -> WeightModule:
    """Contragredient dual of the Verma (transpose ops, swap up/down)."""
    v = wm_verma(hw, depth)
    up = {mu: transpose(v.down[mu + 2]) for mu in v.layers if mu + 2 in v.layers}
    down = {mu: transpose(v.up[mu - 2]) for mu in v.layers if mu - 2 in v.layers}
    return WeightModule(dict(v.layers), up, down, valid_min=v.valid_min)


# ---------------------------------------------------------------------------
# tensoring with V1 and its dual


def _assemble(rdims: list[int], cdims: list[int],
              blocks: dict[tuple[int, int], Matrix]) -> Matrix:
    out = zeros(sum(rdims), sum(cdims))
    roff = [0]
    for d in rdims:
        roff.append(roff[-1] + d)
    coff = [0]
    for d in cdims:
        coff.append(coff[-1] + d)
    for (i, j), b in blocks.items():
        if rdims[i] == 0 or cdims[j] == 0:
            continue
        for r in range(rdims[i]):
            for c in range(cdims[j]):
                out[roff[i] + r][coff[j] + c] = b[r][c]
    return out


def _tensor_candidates(m: WeightModule) -> list[int]:
    cand = set()
    for w in m.layers:
        cand.add(w + 1)
        cand.add(w - 1)
    return sorted(cand)


def wm_tensor_V1(m: WeightModule) -> WeightModule:
    """Tensor with V1.  Layer mu is [M_{mu+1}⊗e0, M_{mu-1}⊗e1]."""
    layers: dict[int, int] = {}
    up: dict[int, Matrix] = {}
    down: dict[int, Matrix] = {}
    for mu in _tensor_candidates(m):
        n0, n1 = m.dim(mu + 1), m.dim(mu - 1)
        if n0 + n1 > 0:
            layers[mu] = n0 + n1
    for mu in layers:
        n0, n1 = m.dim(mu + 1), m.dim(mu - 1)
        if mu + 2 in layers:
            # target [M_{mu+3}⊗e0, M_{mu+1}⊗e1]
            up[mu] = _assemble(
                [m.dim(mu + 3), m.dim(mu + 1)], [n0, n1],
                {(0, 0): op_up(m, mu + 1), (1, 0): identity(n0),
                 (1, 1): op_up(m, mu - 1)})
        if mu - 2 in layers:
            # target [M_{mu-1}⊗e0, M_{mu-3}⊗e1]
            down[mu] = _assemble(
                [m.dim(mu - 1), m.dim(mu - 3)], [n0, n1],
                {(0, 0): op_down(m, mu + 1), (0, 1): identity(n1),
                 (1, 1): op_down(m, mu - 1)})
    out = _cleaned(layers, up, down, None if m.exact else m.valid_min + 1)
    return wm_trim(out, out.valid_min)


def wm_tensor_V1dual(m: WeightModule) -> WeightModule:
    """Tensor with V1*.  Layer mu is [M_{mu+1}⊗e1*, M_{mu-1}⊗e0*]."""
    layers: dict[int, int] = {}
    up: dict[int, Matrix] = {}
    down: dict[int, Matrix] = {}
    for mu in _tensor_candidates(m):
        n0, n1 = m.dim(mu + 1), m.dim(mu - 1)
        if n0 + n1 > 0:
            layers[mu] = n0 + n1
    for mu in layers:
        n0, n1 = m.dim(mu + 1), m.dim(mu - 1)
        if mu + 2 in layers:
            # target [M_{mu+3}⊗e1*, M_{mu+1}⊗e0*]; up e1* = -e0*
            up[mu] = _assemble(
                [m.dim(mu + 3), m.dim(mu + 1)], [n0, n1],
                {(0, 0): op_up(m, mu + 1), (1, 0): mat_scale(-1, identity(n0)),
                 (1, 1): op_up(m, mu - 1)})
        if mu - 2 in layers:
            # target [M_{mu-1}⊗e1*, M_{mu-3}⊗e0*]; down e0* = -e1*
            down[mu] = _assemble(
                [m.dim(mu - 1), m.dim(mu - 3)], [n0, n1],
                {(0, 0): op_down(m, mu + 1), (0, 1): mat_scale(-1, identity(n1)),
                 (1, 1): op_down(m, mu - 1)})
    out = _cleaned(layers, up, down, None if m.exact else m.valid_min + 1)
    return wm_trim(out, out.valid_min)


# ---------------------------------------------------------------------------
# Casimir and the wall-crossing composite


def casimir_layer(m: WeightModule, mu: int) -> Matrix:
    """Matrix of c = h^2 - 2h + 4 up∘down on the layer of weight mu.

    Trustworthy only when layer mu - 2 is reliable (or the module is exact).
    """
    d = m.dim(mu)
    base = mat_scale(mu * mu - 2 * mu, identity(d))
    if m.dim(mu - 2):
        corr = mat_scale(4, mat_mul(op_up(m, mu - 2), op_down(m, mu)))
    else:
        corr = zeros(d, d)
    return [[base[i][j] + corr[i][j] for j in range(d)] for i in range(d)]


def wm_is_strict(m: WeightModule) -> bool:
    """True iff the Casimir acts as zero on all reliable layers."""
    zero = True
    for mu, d in m.layers.items():
        if not (m.exact or mu - 2 >= m.valid_min):
            continue
        c = casimir_layer(m, mu)
        if any(c[i][j] != 0 for i in range(d) for j in range(d)):
            zero = False
    return zero


@dataclass
class ThetaData:
    """Wall-crossing of a single module, with the plumbing needed for the
    canonical maps in and out of it.

    ``tilde`` is the wall part (Casimir eigenvalue -1) of ``source ⊗ V1``;
    ``theta = tilde ⊗ V1*``.  ``tilde_incl[mu]`` has the tilde basis as
    columns inside the ambient layer of ``mv1``; ``tilde_proj[mu]`` is the
    projection onto tilde along the complementary Casimir generalized
    eigenspaces, so ``tilde_proj · tilde_incl = I``.
    """

    source: WeightModule
    mv1: WeightModule
    tilde: WeightModule
    tilde_incl: dict[int, Matrix]
    tilde_proj: dict[int, Matrix]
    theta: WeightModule


def wm_theta(m: WeightModule) -> ThetaData:
    mv1 = wm_tensor_V1(m)
    t_valid = None if mv1.exact else mv1.valid_min + 2
    tdims: dict[int, int] = {}
    incl: dict[int, Matrix] = {}
    proj: dict[int, Matrix] = {}
    for mu in mv1.weights():
        if not (mv1.exact or mu >= t_valid):
            continue
        d = mv1.dim(mu)
        c = casimir_layer(mv1, mu)
        a = [[c[i][j] + (1 if i == j else 0) for j in range(d)] for i in range(d)]
        ker = nullspace(a)
        a_pow = mat_pow(a, d)
        ker_gen = nullspace(a_pow)
        if len(ker_gen) != len(ker):
            # The wall block is semisimple, so the strict and generalized
            # eigenvalue-(-1) spaces must agree; a mismatch is a bug.
            raise WmError(f"wall eigenspace not semisimple on layer {mu}")
        if not ker:
            continue
        img = column_basis(a_pow)
        basis = hstack(transpose(ker), transpose(img)) if img else transpose(ker)
        if len(basis[0]) != d or rank(basis) != d:
            raise WmError(f"Fitting decomposition failed on layer {mu}")
        binv = invert(basis)
        if binv is None:
            raise WmError(f"Fitting decomposition failed on layer {mu}")
        tdims[mu] = len(ker)
        incl[mu] = transpose(ker)
        proj[mu] = binv[: len(ker)]
    t_up: dict[int, Matrix] = {}
    t_down: dict[int, Matrix] = {}
    for mu in tdims:
        if mu + 2 in tdims:
            x = solve_matrix(incl[mu + 2], mat_mul(op_up(mv1, mu), incl[mu]))
            if x is None:
                raise WmError(f"wall part not raised into itself at layer {mu}")
            t_up[mu] = x
        elif tdims.get(mu, 0) and mv1.dim(mu + 2):
            prod = mat_mul(op_up(mv1, mu), incl[mu])
            if any(any(v != 0 for v in row) for row in prod):
                raise WmError(f"wall part leaks upward at layer {mu}")
        if mu - 2 in tdims:
            x = solve_matrix(incl[mu - 2], mat_mul(op_down(mv1, mu), incl[mu]))
            if x is None:
                raise WmError(f"wall part not lowered into itself at layer {mu}")
            t_down[mu] = x
    tilde = _cleaned(tdims, t_up, t_down, t_valid)
    theta = wm_tensor_V1dual(tilde)
    return ThetaData(m, mv1, tilde, incl, proj, theta)


def _e1_rows(td: ThetaData, mu: int) -> Matrix:
    """Rows of tilde_incl[mu] giving the M_{mu-1}⊗e1 component."""
    j = td.tilde_incl[mu]
    n0 = td.source.dim(mu + 1)
    return j[n0:]


def _e0_rows(td: ThetaData, mu: int) -> Matrix:
    j = td.tilde_incl[mu]
    n0 = td.source.dim(mu + 1)
    return j[:n0]


def wm_kappa(td: ThetaData) -> dict[int, Matrix]:
    """The evaluation map theta(M) -> M, layer by layer.

    On the layer of weight mu of ``theta`` (= [tilde_{mu+1}⊗e1*,
    tilde_{mu-1}⊗e0*]) it reads off the M_mu-components: the e1-part of the
    first block and the e0-part of the second.
    """
    out: dict[int, Matrix] = {}
    m = td.source
    for mu in td.theta.weights():
        blocks = []
        if td.tilde.dim(mu + 1):
            blocks.append(_e1_rows(td, mu + 1))
        else:
            blocks.append(zeros(m.dim(mu), 0))
        if td.tilde.dim(mu - 1):
            blocks.append(_e0_rows(td, mu - 1))
        else:
            blocks.append(zeros(m.dim(mu), 0))
        out[mu] = hstack(blocks[0], blocks[1])
    return out


def wm_iota(m_or_td: WeightModule | ThetaData) -> dict[int, Matrix]:
    """The canonical map M -> theta(M), layer by layer.

    For strict modules (Casimir acting as zero) this is the closed form
    v ↦ -(2·up v ⊗ e0 + h v ⊗ e1) ⊗ e1* + (h v ⊗ e0 - 2·down v ⊗ e1) ⊗ e0*.
    For non-strict modules that expression need not land on the wall, and the
    map is computed instead as v ↦ pr(v⊗e1)⊗e1* + pr(v⊗e0)⊗e0* with pr the
    block projection of M⊗V1 onto the wall part (half the closed form when
    both apply).  Everything downstream of iota is invariant under this
    normalization difference, and the test suite checks that.
    """
    td = m_or_td if isinstance(m_or_td, ThetaData) else wm_theta(m_or_td)
    m = td.source
    strict = wm_is_strict(m)
    out: dict[int, Matrix] = {}
    for mu in td.theta.weights():
        dm = m.dim(mu)
        t_hi = td.tilde.dim(mu + 1)
        t_lo = td.tilde.dim(mu - 1)
        mat = zeros(t_hi + t_lo, dm)
        for i in range(dm):
            e_i = [Fraction(1 if k == i else 0) for k in range(dm)]
            if strict:
                upv = mat_vec(op_up(m, mu), e_i)
                dnv = mat_vec(op_down(m, mu), e_i)
                amb_hi = [-2 * x for x in upv] + [-Fraction(mu) * x for x in e_i]
                amb_lo = [Fraction(mu) * x for x in e_i] + [-2 * x for x in dnv]
            else:
                amb_hi = [Fraction(0)] * m.dim(mu + 2) + e_i
                amb_lo = e_i + [Fraction(0)] * m.dim(mu - 2)
            c_hi = mat_vec(td.tilde_proj[mu + 1], amb_hi) if t_hi else []
            c_lo = mat_vec(td.tilde_proj[mu - 1], amb_lo) if t_lo else []
            if strict and t_hi:
                back = mat_vec(td.tilde_incl[mu + 1], c_hi)
                if back != amb_hi:
                    raise WmError("closed-form image missed the wall part")
            if strict and t_lo:
                back = mat_vec(td.tilde_incl[mu - 1], c_lo)
                if back != amb_lo:
                    raise WmError("closed-form image missed the wall part")
            for r, v in enumerate(c_hi):
                mat[r][i] = v
            for r, v in enumerate(c_lo):
                mat[t_hi + r][i] = v
        out[mu] = mat
    return out


# ---------------------------------------------------------------------------
# subspaces, restriction, quotient


def wm_close_subspace(m: WeightModule, spans: Subspace) -> Subspace:
    """Close layerwise spans under up and down; canonicalize each layer."""
    cur: dict[int, list[Vector]] = {mu: list(vs) for mu, vs in spans.items() if vs}
    changed = True
    while changed:
        changed = False
        for mu in list(cur):
            for target, opmat in ((mu + 2, op_up(m, mu)), (mu - 2, op_down(m, mu))):
                if m.dim(target) == 0:
                    continue
                imgs = [mat_vec(opmat, v) for v in cur[mu]]
                imgs = [v for v in imgs if any(x != 0 for x in v)]
                if not imgs:
                    continue
                old = cur.get(target, [])
                new = row_basis(old + imgs)
                if len(new) != len(row_basis(old)):
                    cur[target] = new
                    changed = True
    return {mu: row_basis(vs) for mu, vs in cur.items() if vs}


def wm_restrict(m: WeightModule, sub: Subspace,
                valid_min: int | None) -> tuple[WeightModule, dict[int, Matrix]]:
    """The subspace as a module of its own, with inclusion matrices."""
    basis = {mu: row_basis(vs) for mu, vs in sub.items() if vs}
    layers = {mu: len(vs) for mu, vs in basis.items()}
    incl = {mu: transpose(vs) for mu, vs in basis.items()}
    up: dict[int, Matrix] = {}
    down: dict[int, Matrix] = {}
    for mu in layers:
        for target, opmat, store in ((mu + 2, op_up(m, mu), up),
                                     (mu - 2, op_down(m, mu), down)):
            prod = mat_mul(opmat, incl[mu])
            if target in layers:
                x = solve_matrix(incl[target], prod)
                if x is None:
                    raise WmError(f"subspace not closed under the action at layer {mu}")
                store[mu] = x
            elif m.dim(target) and any(any(v != 0 for v in row) for row in prod):
                if target > mu or valid_min is None or target >= valid_min:
                    raise WmError(f"subspace not closed under the action at layer {mu}")
                # otherwise: flow into the unreliable zone, dropped by truncation
    return _cleaned(layers, up, down, valid_min), incl


def wm_quotient(m: WeightModule, sub: Subspace,
                valid_min: int | None) -> tuple[WeightModule, dict[int, Matrix]]:
    """Quotient by a closed layerwise subspace, with projection matrices.

    Quotient coordinates on each layer are the standard coordinates away
    from the pivot columns of the subspace basis.
    """
    mm = wm_trim(m, valid_min) if valid_min is not None else m
    proj: dict[int, Matrix] = {}
    lift: dict[int, Matrix] = {}
    layers: dict[int, int] = {}
    for mu in mm.weights():
        d = mm.dim(mu)
        vs = row_basis(sub.get(mu, []))
        pivots = []
        if vs:
            pivots = [next(j for j in range(d) if v[j] != 0) for v in vs]
        free = [j for j in range(d) if j not in pivots]
        layers[mu] = len(free)
        p = zeros(len(free), d)
        for r, j in enumerate(free):
            p[r][j] = Fraction(1)
            for i, piv in enumerate(pivots):
                p[r][piv] = -vs[i][j]
        proj[mu] = p
        l = zeros(d, len(free))
        for r, j in enumerate(free):
            l[j][r] = Fraction(1)
        lift[mu] = l
    up: dict[int, Matrix] = {}
    down: dict[int, Matrix] = {}
    for mu in layers:
        if mu + 2 in layers:
            up[mu] = mat_mul(proj[mu + 2], mat_mul(op_up(mm, mu), lift[mu]))
        if mu - 2 in layers:
            down[mu] = mat_mul(proj[mu - 2], mat_mul(op_down(mm, mu), lift[mu]))
    return _cleaned(layers, up, down, valid_min if not m.exact else None), proj


# ---------------------------------------------------------------------------
# the five derived operations, and multiplicity extraction


def wm_vartheta_plus(td: ThetaData) -> WeightModule:
    """Kernel of the Casimir inside theta(M)."""
    th = td.theta
    valid = None if th.exact else th.valid_min + 2
    sub: Subspace = {}
    for mu in th.weights():
        if not (th.exact or mu - 2 >= th.valid_min):
            continue
        c = casimir_layer(th, mu)
        sub[mu] = nullspace(c)
    mod, _ = wm_restrict(th, sub, valid)
    return mod


def wm_vartheta_minus(td: ThetaData) -> WeightModule:
    """Image of the evaluation map theta(M) -> M."""
    kap = wm_kappa(td)
    spans: Subspace = {mu: [list(col) for col in zip(*mat)] if mat and mat[0] else []
                      for mu, mat in kap.items()}
    valid = None if td.theta.exact else td.theta.valid_min
    mod, _ = wm_restrict(td.source, {mu: row_basis(vs) for mu, vs in spans.items()}, valid)
    return mod


def wm_nabla_minus(td: ThetaData) -> WeightModule:
    """Cokernel of the evaluation map theta(M) -> M."""
    kap = wm_kappa(td)
    spans: Subspace = {mu: row_basis([list(col) for col in zip(*mat)])
                      for mu, mat in kap.items() if mat and mat[0]}
    valid = None if td.theta.exact else td.theta.valid_min
    mod, _ = wm_quotient(td.source, spans, valid)
    return mod


def wm_nabla_plus(td: ThetaData) -> WeightModule:
    """vartheta_plus modulo its intersection with the image of iota.

    This normalization-independent form agrees with the straight cokernel
    of iota into vartheta_plus whenever iota lands there (strict sources).
    """
    th = td.theta
    valid = None if th.exact else th.valid_min + 2
    ksub: Subspace = {}
    for mu in th.weights():
        if not (th.exact or mu - 2 >= th.valid_min):
            continue
        ksub[mu] = nullspace(casimir_layer(th, mu))
    kmod, incl = wm_restrict(th, ksub, valid)
    iot = wm_iota(td)
    inner: Subspace = {}
    for mu in kmod.weights():
        if mu not in iot:
            continue
        cols = [list(c) for c in zip(*iot[mu])] if iot[mu] and iot[mu][0] else []
        cols = [v for v in cols if any(x != 0 for x in v)]
        if not cols or mu not in ksub or not ksub[mu]:
            continue
        meet = span_intersect(ksub[mu], row_basis(cols))
        coords = []
        for v in meet:
            c = coordinates(v, [list(r) for r in zip(*incl[mu])])
            if c is None:
                raise WmError("intersection left the Casimir kernel")
            coords.append(c)
        if coords:
            inner[mu] = row_basis(coords)
    mod, _ = wm_quotient(kmod, inner, valid)
    return mod


def wm_multiplicities(m: WeightModule) -> tuple[int, int]:
    """Composition multiplicities (of the finite simple, of the infinite one)
    for a module in the normalized block, read off from layer dimensions."""
    for mu, d in m.layers.items():
        if d and mu % 2:
            raise WmError(f"odd weight {mu} present: not a block pattern")
    if not m.exact and m.valid_min > -4:
        raise WmDepthError("truncation too shallow for multiplicities", -4)
    m2 = m.dim(-2)
    if m.dim(-4) != m2:
        raise WmError("layer dimensions are not block-shaped")
    if any(mu > 0 and d for mu, d in m.layers.items()):
        raise WmError("positive weights present: not a normalized block pattern")
    return (m.dim(0), m2)


# ---------------------------------------------------------------------------
# named patterns and the comparison table


def wm_pattern(name: str, depth: int = DEFAULT_DEPTH) -> WeightModule:
    """Standard block patterns: L, Ls (= Ms), M, Mdual, P."""
    if name == "L":
        return wm_simple_finite(0)
    if name in ("Ls", "Ms"):
        return wm_verma(-2, depth)
    if name == "M":
        return wm_verma(0, depth)
    if name == "Mdual":
        return wm_dual_verma(0, depth)
    if name == "P":
        return wm_theta(wm_verma(-2, depth)).theta
    raise WmError(f"unknown pattern {name!r}; choose from {PATTERNS}")


def wm_compare(pattern: str, depth: int = DEFAULT_DEPTH) -> dict[str, tuple[int, int]]:
    """Multiplicities of the five derived operations applied to a pattern.

    Returns {operation: (m1, m2)}; this is the oracle side of the
    cross-backend check.
    """
    m = wm_pattern(pattern, depth)
    td = wm_theta(m)
    out: dict[str, tuple[int, int]] = {}
    out["theta"] = wm_multiplicities(td.theta)
    out["vartheta_plus"] = wm_multiplicities(wm_vartheta_plus(td))
    out["vartheta_minus"] = wm_multiplicities(wm_vartheta_minus(td))
    out["nabla_plus"] = wm_multiplicities(wm_nabla_plus(td))
    out["nabla_minus"] = wm_multiplicities(wm_nabla_minus(td))
    return out
