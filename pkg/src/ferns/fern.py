"""Ferns: stable marked trees whose mark set is a vector space plus a point
at infinity, carrying a compatible action of G = V x| F_q^*.

The action itself is never stored.  Morphisms of stable marked trees are
unique, so the automorphism attached to a group element (v, xi) is exactly
the isomorphism from the tree to itself with the marking composed with
w -> xi*w + v; validation searches for it and caches the results.  The
chain of components joining the 0-mark to the infinity-mark yields the
associated flag: step i is the stabilizer of the i-th chain component
under translations.

Derived data:

* ``line_data``        the translation values read off the contraction to
                       the infinity component (linear, kernel the second
                       to last flag step),
* ``reciprocal_data``  the values read off the contraction to the zero
                       component (reciprocal axioms, supported on the
                       first flag step),
* ``drinfeld_psi``     the additive polynomial with kernel the image of an
                       injective line datum and formal linear coefficient.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import curve
from .curve import MarkedTree, Mobius, ProjPoint, Correspondence
from .gf import (INF, FieldElement, Flag, GroupElement, LinSpace, Subspace,
                 group_act, group_elements)

Vec = tuple


class InvalidFern(ValueError):
    """Raised when a marked tree fails the fern axioms."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def vhat(space: LinSpace) -> list:
    """The mark set of a fern on ``space``: all vectors plus infinity."""
    return list(space.vectors()) + [INF]


def remarked(tree: MarkedTree, space: LinSpace, g: GroupElement) -> MarkedTree:
    """The same tree with marking w -> position of (g.w); infinity is fixed."""
    marking = {w: tree.marking[group_act(g, w)] for w in tree.marking}
    return tree.with_marking(marking, extra={})


@dataclass(frozen=True)
class Fern:
    """A validated fern: the tree, its space, and cached derived data."""

    tree: MarkedTree
    space: LinSpace
    chain: Tuple  # component ids from the 0-component to the inf-component
    flag: Flag
    translations: dict  # (v, xi) -> Correspondence realizing the remarking

    def automorphism(self, g: GroupElement) -> Correspondence:
        return self.translations[(g.v, g.xi)]

    def chain_marks(self) -> Tuple[List[ProjPoint], List[ProjPoint]]:
        """Distinguished points (x_i, y_i) on each chain component."""
        t = self.tree
        xs, ys = [], []
        for i, cid in enumerate(self.chain):
            if i == 0:
                xs.append(t.marking[self.space.zero][1])
            else:
                xs.append(t.neighbors(cid)[self.chain[i - 1]])
            if i == len(self.chain) - 1:
                ys.append(t.marking[INF][1])
            else:
                ys.append(t.neighbors(cid)[self.chain[i + 1]])
        return xs, ys

    def is_smooth(self) -> bool:
        return len(self.chain) == 1

    def __repr__(self):
        return (f"Fern(dim={self.space.dim}, q={self.space.q}, "
                f"components={len(self.tree.components)})")


def _chain_of(tree: MarkedTree, space: LinSpace) -> Tuple:
    start = tree.marking[space.zero][0]
    goal = tree.marking[INF][0]
    return tuple(tree.path(start, goal))


def fern_violations(tree: MarkedTree, space: LinSpace,
                    _out: Optional[dict] = None) -> List[str]:
    """All fern-axiom violations of a marked tree; empty means valid.

    Checks, in order: the mark set, stability, the existence of a marked
    isomorphism for every group element (the witnessing element is
    reported on failure), and the scalar action on each chain component.
    """
    violations: List[str] = []
    expected = set(space.vectors()) | {INF}
    if set(tree.marking) != expected:
        violations.append("marking is not indexed by the vector space plus infinity")
        return violations
    report = tree.validate()
    if not report.ok:
        violations.extend(report.violations)
        return violations

    # the remarked tree shares components and nodes, so its entry maps are
    # the base tree's with the mark keys permuted
    entry = curve._entry_maps(tree)
    corrs: Dict[Tuple[Vec, int], Correspondence] = {}
    for g in group_elements(space):
        target = remarked(tree, space, g)
        entry2 = {c: {w: pts[group_act(g, w)] for w in pts}
                  for c, pts in entry.items()}
        corr = curve.are_isomorphic(tree, target, entry1=entry, entry2=entry2)
        if corr is None:
            violations.append(f"no marked isomorphism for (v={g.v}, xi={g.xi})")
        else:
            corrs[(g.v, g.xi)] = corr
    if violations:
        return violations

    chain = _chain_of(tree, space)
    fld = space.field
    for xi in range(2, space.q):
        corr = corrs[(space.zero, xi)]
        scale = fld.scalar(xi)
        for i, cid in enumerate(chain):
            if corr.components[cid] != cid:
                violations.append(
                    f"scalar xi={xi} does not stabilize chain component {cid!r}")
                continue
            x_i, y_i = _distinguished(tree, space, chain, i)
            third = _third_point(tree, cid, x_i, y_i)
            to_std = Mobius.to_standard(x_i, third, y_i)
            induced = to_std.compose(corr.maps[cid]).compose(to_std.inverse())
            if not induced.is_scaling_by(scale):
                violations.append(
                    f"xi={xi} does not act by scaling on chain component {cid!r}")
    if violations:
        return violations
    if _out is not None:
        _out["corrs"] = corrs
        _out["chain"] = chain
    return violations


def _distinguished(tree, space, chain, i):
    if i == 0:
        x_i = tree.marking[space.zero][1]
    else:
        x_i = tree.neighbors(chain[i])[chain[i - 1]]
    if i == len(chain) - 1:
        y_i = tree.marking[INF][1]
    else:
        y_i = tree.neighbors(chain[i])[chain[i + 1]]
    return x_i, y_i


def _third_point(tree, cid, x_i, y_i):
    specials = sorted(
        set(tree.marks_on(cid).values()) | set(tree.neighbors(cid).values()),
        key=lambda p: (p.y.coeffs, p.x.coeffs))
    for p in specials:
        if p != x_i and p != y_i:
            return p
    raise AssertionError("stable component must carry a third special point")


def validate_fern(tree: MarkedTree, space: LinSpace) -> Fern:
    """Check the fern axioms and return the fern with its cached flag.

    Raises :class:`InvalidFern` with the full violation list on failure.
    """
    out: dict = {}
    violations = fern_violations(tree, space, _out=out)
    if violations:
        raise InvalidFern(violations)
    corrs, chain = out["corrs"], out["chain"]
    steps = [space.bottom_flag_step()]
    for cid in chain:
        stab = [v for v in space.vectors()
                if corrs[(v, 1)].components[cid] == cid]
        step = Subspace.from_vectors(
            space.vs, list(space.mod.rows) + stab)
        steps.append(step)
    flag = Flag(tuple(steps))
    if steps[-1] != space.top_flag_step():  # pragma: no cover - theory guarantee
        raise InvalidFern(["chain stabilizers do not exhaust the space"])
    return Fern(tree, space, chain, flag, corrs)


def associated_flag(f: Fern) -> Flag:
    return f.flag


# ---------------------------------------------------------------------------
# Contraction and grafting
# ---------------------------------------------------------------------------

def contract_fern(f: Fern, w: Subspace, validate: bool = True):
    """Contract with respect to the marks in w (plus infinity).

    ``w`` must sit strictly between the modulus and the subspace of the
    fern's space.  Returns the fern on the smaller space, still carrying
    the forgotten marks as extra points; with ``validate=False`` only the
    contracted tree and space are returned.
    """
    space = f.space
    if not (w.contains_subspace(space.mod) and space.sub.contains_subspace(w)):
        raise ValueError("subspace is not a step of the fern's space")
    if w.dim == space.mod.dim:
        raise ValueError("contraction needs a nonzero subspace")
    keep = [v for v in space.vectors() if w.contains(v)] + [INF]
    result = curve.contract(f.tree, keep)
    sub_space = space.subquotient(w)
    if not validate:
        return result.tree, sub_space
    return validate_fern(result.tree, sub_space)


def graft(sub_fern: Fern, quot_fern: Fern, complement: Subspace,
          validate: bool = True):
    """Glue a copy of ``sub_fern`` onto every vector mark of ``quot_fern``.

    ``sub_fern`` lives on W/U and ``quot_fern`` on S/W; the result lives on
    S/U.  The copies are indexed by the representatives of the complement,
    which must satisfy complement n W = U and complement + W = S.  The
    infinity mark of each copy is glued to the corresponding quotient
    mark, and the copy indexed by u re-marks u + v' at the v' mark.
    """
    sp_sub, sp_quot = sub_fern.space, quot_fern.space
    if sp_sub.vs != sp_quot.vs:
        raise ValueError("ferns live over different coordinate spaces")
    if sp_quot.mod != sp_sub.sub:
        raise ValueError("quotient fern must be modulo the sub fern's space")
    w, u_mod, s_top = sp_sub.sub, sp_sub.mod, sp_quot.sub
    ok = (complement.contains_subspace(u_mod)
          and s_top.contains_subspace(complement)
          and complement.intersect(w) == u_mod
          and complement.add_subspace(w) == s_top)
    if not ok:
        raise ValueError("not a complement of the sub space")
    target = LinSpace(sp_sub.vs, s_top, u_mod)
    reps = LinSpace(sp_sub.vs, complement, u_mod).vectors()

    fld = sp_sub.field
    components = [("quot", c) for c in quot_fern.tree.components]
    nodes = [curve.node(("quot", c1), p1, ("quot", c2), p2)
             for (c1, p1), (c2, p2) in map(tuple, quot_fern.tree.nodes)]
    marking = {INF: (("quot", quot_fern.tree.marking[INF][0]),
                     quot_fern.tree.marking[INF][1])}
    for u in reps:
        tag = ("sub", u)
        components.extend([(tag, c) for c in sub_fern.tree.components])
        nodes.extend(curve.node((tag, c1), p1, (tag, c2), p2)
                     for (c1, p1), (c2, p2) in map(tuple, sub_fern.tree.nodes))
        for v in sp_sub.vectors():
            cid, pt = sub_fern.tree.marking[v]
            marking[target.add(u, v)] = ((tag, cid), pt)
        # glue the copy's infinity point to the quotient mark of u
        inf_cid, inf_pt = sub_fern.tree.marking[INF]
        qmark = sp_quot.reduce(u)
        q_cid, q_pt = quot_fern.tree.marking[qmark]
        nodes.append(curve.node((tag, inf_cid), inf_pt, ("quot", q_cid), q_pt))
    tree = MarkedTree(fld, components, nodes, marking)
    if not validate:
        return tree, target
    return validate_fern(tree, target)


# ---------------------------------------------------------------------------
# Line data, reciprocal data, and the additive polynomial
# ---------------------------------------------------------------------------

def _first_off(tree: MarkedTree, space: LinSpace, avoid) -> Vec:
    for v in space.vectors():
        if tree.marking[v][1] not in avoid:
            return v
    raise AssertionError("no anchor mark available")


def _canonical_scale(space: LinSpace, values: Dict[Vec, FieldElement]):
    """Divide through by the value at the canonical anchor vector.

    The anchor is the basis vector of largest index with nonzero value;
    if every basis vector lands on zero (possible for reciprocal data),
    the first nonzero vector in enumeration order is used instead.
    """
    anchor = None
    for b in reversed(space.basis()):
        if values.get(b):
            anchor = b
            break
    if anchor is None:
        anchor = next(v for v in space.vectors() if values.get(v))
    scale = values[anchor].inverse()
    return {v: x * scale for v, x in values.items()}


@dataclass(frozen=True)
class LineData:
    """Translation values on V up to a common scalar; F_q-linear, nonzero."""

    space: LinSpace
    values: dict  # vector rep -> FieldElement

    def kernel(self) -> Subspace:
        vecs = [v for v, x in self.values.items() if not x]
        return Subspace.from_vectors(self.space.vs,
                                     list(self.space.mod.rows) + vecs)

    def is_injective(self) -> bool:
        return self.kernel().dim == self.space.mod.dim

    def functional(self, basis: Sequence[Vec]) -> tuple:
        return tuple(self.values[self.space.reduce(b)] for b in basis)


@dataclass(frozen=True)
class RecipData:
    """Reciprocal values on the nonzero vectors, up to a common scalar."""

    space: LinSpace
    values: dict  # nonzero vector rep -> FieldElement

    def support(self) -> list:
        return [v for v, x in self.values.items() if x]


def line_data(f: Fern) -> LineData:
    """Values of the marks on the contraction to the infinity component.

    The coordinate puts the 0-mark at zero and the infinity mark at
    infinity; the scale is then canonicalized.  The kernel is exactly the
    second to last step of the associated flag.
    """
    space = f.space
    squashed = curve.contract_to_component(f.tree, INF).tree
    pos = {v: squashed.marking[v][1] for v in space.vectors()}
    pos_inf = squashed.marking[INF][1]
    anchor = _first_off(squashed, space, {pos[space.zero], pos_inf})
    coord = Mobius.to_standard(pos[space.zero], pos[anchor], pos_inf)
    values = {v: coord.apply(p).affine_value() for v, p in pos.items()}
    return LineData(space, _canonical_scale(space, values))


def reciprocal_data(f: Fern) -> RecipData:
    """Values of the nonzero marks on the contraction to the zero component.

    The coordinate puts the infinity mark at zero and the 0-mark at
    infinity, so the values vanish exactly on the marks that collapse onto
    the infinity direction (everything off the first flag step).
    """
    space = f.space
    squashed = curve.contract_to_component(f.tree, space.zero).tree
    pos = {v: squashed.marking[v][1] for v in space.vectors()}
    pos_inf = squashed.marking[INF][1]
    anchor = _first_off(squashed, space, {pos[space.zero], pos_inf})
    coord = Mobius.to_standard(pos_inf, pos[anchor], pos[space.zero])
    values = {v: coord.apply(p).affine_value()
              for v, p in pos.items() if v != space.zero}
    return RecipData(space, _canonical_scale(space, values))


@dataclass(frozen=True)
class AdditivePoly:
    """t * sum_i coeffs[q^i] * x^(q^i): the coefficient table of psi_t.

    The factor t stays formal; the stored coefficients are the scalars
    multiplying it, so the x-coefficient entry is one by construction.
    """

    field: object
    q: int
    coeffs: dict  # exponent (a power of q) -> FieldElement

    @property
    def degree(self) -> int:
        return max(self.coeffs)

    def x_coefficient(self) -> FieldElement:
        return self.coeffs[1]

    def evaluate_scalar_part(self, x: FieldElement) -> FieldElement:
        acc = self.field.zero
        for exp, c in self.coeffs.items():
            acc = acc + c * x ** exp
        return acc


def expand_root_product(fld, roots) -> list:
    """Dense coefficients of prod (x - r) over the given roots."""
    coeffs = [fld.one]
    for r in roots:
        coeffs = ([fld.zero] + coeffs[:])  # multiply by x
        for i in range(len(coeffs) - 1):
            coeffs[i] = coeffs[i] - r * coeffs[i + 1]
    return coeffs


def drinfeld_psi(ld: LineData, scale: Optional[FieldElement] = None) -> AdditivePoly:
    """The additive polynomial determined by an injective line datum.

    psi_t(x) = t * x * prod over nonzero v of (1 - x / lambda_v), with
    lambda = scale * (canonical values).  Only exponents q^i survive, the
    x-coefficient is exactly t, the degree is q^dim, and every lambda_v is
    a root of the scalar part.
    """
    if not ld.is_injective():
        raise ValueError("line datum has a nonzero kernel")
    space = ld.space
    fld = space.field
    scale = fld.one if scale is None else scale
    lam = {v: scale * x for v, x in ld.values.items()}
    coeffs = [fld.zero, fld.one]  # the x factor
    for v in space.vectors():
        if v == space.zero:
            continue
        inv = lam[v].inverse()
        # multiply by (1 - x / lambda_v)
        coeffs = [c - (coeffs[i - 1] * inv if i else fld.zero)
                  for i, c in enumerate(coeffs)] + [-coeffs[-1] * inv]
    table = {}
    q, expo = space.q, 1
    qpowers = set()
    while expo <= len(coeffs):
        qpowers.add(expo)
        expo *= q
    for i, c in enumerate(coeffs):
        if not c:
            continue
        if i not in qpowers:
            raise AssertionError(f"non-q-power exponent {i} in additive polynomial")
        table[i] = c
    poly = AdditivePoly(fld, q, table)
    assert poly.x_coefficient() == fld.one
    assert poly.degree == q ** space.dim
    for v in space.vectors():
        if poly.evaluate_scalar_part(lam[v] if v != space.zero else fld.zero):
            raise AssertionError("marked value is not a root of psi")
    return poly
