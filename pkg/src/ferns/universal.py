"""The explicit universal family over flag charts, and the classification map.

A chart is a complete flag together with an adapted ordered basis; its
points are coordinate tuples t in K^(n-1) subject to the membership
conditions below, and each point carries a stratum flag read off the zero
pattern of t.  The fiber over a chart point is synthesized directly from
its component, node, and section data:

* one projective line per reduced index (v, k) with v truncation-zero up
  to the k-th stratum step,
* nodes between consecutive levels, computed by intersecting the two
  components' defining equations and insisting on a unique solution,
* marked sections by translating the zero section through the coordinate
  action of the group and locating the unique component whose equations
  the translated point satisfies.

``check_equations`` keeps the full defining equations around as an
independent verifier.  ``classify`` goes the other way: it reads one
functional class per nonzero subspace off a fern's contractions, giving a
point of the compactified period domain whose chart coordinates recover
the fiber parameters exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import curve, fern as fern_mod
from .curve import Mobius, ProjPoint
from .fern import Fern, validate_fern
from .gf import (INF, FieldElement, Flag, GroupElement, LinSpace, Subspace,
                 VSpace, linspace_between)

Vec = tuple
BVec = tuple  # coordinates with respect to a chart basis
SigmaIndex = Tuple[Vec, int]  # (vector, chain level)


# ---------------------------------------------------------------------------
# Polynomials Q^k_v in the chart coordinates T_1 .. T_{n-1}
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QPoly:
    """A polynomial in T_1..T_{n-1} with scalar coefficients (index form)."""

    field: object  # the value field, for scalar tables and evaluation
    nvars: int
    terms: tuple  # sorted tuple of (exponent tuple, scalar index)

    @classmethod
    def build(cls, field, nvars: int, term_map: Dict[tuple, int]) -> "QPoly":
        terms = tuple(sorted((e, c) for e, c in term_map.items() if c))
        return cls(field, nvars, terms)

    def add(self, other: "QPoly") -> "QPoly":
        acc = dict(self.terms)
        s_add = self.field.s_add
        for e, c in other.terms:
            acc[e] = s_add[acc.get(e, 0)][c]
        return QPoly.build(self.field, self.nvars, acc)

    def scale(self, c: int) -> "QPoly":
        s_mul = self.field.s_mul
        return QPoly.build(self.field, self.nvars,
                           {e: s_mul[c][x] for e, x in self.terms})

    def mul(self, other: "QPoly") -> "QPoly":
        acc: Dict[tuple, int] = {}
        s_add, s_mul = self.field.s_add, self.field.s_mul
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = s_add[acc.get(e, 0)][s_mul[c1][c2]]
        return QPoly.build(self.field, self.nvars, acc)

    def evaluate(self, t: Sequence[FieldElement]) -> FieldElement:
        fld = self.field
        total = fld.zero
        for exps, c in self.terms:
            term = fld.scalar(c)
            for e, value in zip(exps, t):
                for _ in range(e):
                    term = term * value
            total = total + term
        return total

    def __repr__(self):
        return f"QPoly({self.terms})"


def _suffix_monomial(nvars: int, lo: int, hi: int) -> tuple:
    """Exponents of prod T_j for j in [lo, hi), 1-based variable indexing."""
    return tuple(1 if lo <= j + 1 < hi else 0 for j in range(nvars))


def q_poly(chart: "Chart", v: Vec, k: int) -> QPoly:
    """Q^k_v as a polynomial: sum over i <= k of c_i * T_i .. T_{k-1}."""
    c = chart.to_coords(v)
    n = chart.n
    if any(c[i] for i in range(k, n)):
        raise ValueError("vector lies outside the k-th flag step")
    terms: Dict[tuple, int] = {}
    s_add = chart.field.s_add
    for i in range(1, k + 1):
        if c[i - 1]:
            e = _suffix_monomial(n - 1, i, k)
            terms[e] = s_add[terms.get(e, 0)][c[i - 1]]
    return QPoly.build(chart.field, n - 1, terms)


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------

class Chart:
    """A complete flag chart: an adapted ordered basis of a linear space.

    ``basis`` is an ordered basis (b_1..b_n) of ``space``; the chart's
    complete flag has steps spanned by basis prefixes.  Coordinates of
    vectors are taken in this basis.
    """

    def __init__(self, space: LinSpace, basis: Optional[Sequence[Vec]] = None):
        self.space = space
        self.field = space.field
        self.n = space.dim
        self.q = space.q
        self.basis = tuple(space.reduce(b) for b in (basis or space.basis()))
        if len(self.basis) != self.n:
            raise ValueError("basis size must match the space dimension")
        steps = []
        for j in range(self.n + 1):
            steps.append(Subspace.from_vectors(
                space.vs, list(space.mod.rows) + list(self.basis[:j])))
        if steps[-1] != space.top_flag_step():
            raise ValueError("basis does not span the space")
        self.flag = Flag(tuple(steps))
        self._coord_cache: Dict[Vec, BVec] = {}

    @classmethod
    def for_flag(cls, space: LinSpace, flag: Flag) -> "Chart":
        """The chart of a complete flag, with its canonical adapted basis."""
        if flag.steps[0] != space.mod or flag.steps[-1] != space.sub:
            raise ValueError("flag does not run from the modulus to the space")
        if len(flag.steps) != space.dim + 1:
            raise ValueError("chart flags must be complete")
        basis = []
        for prev, step in zip(flag.steps, flag.steps[1:]):
            row = next(r for r in step.rows if not prev.contains(r))
            basis.append(space.reduce(row))
        return cls(space, basis)

    def to_coords(self, v: Vec) -> BVec:
        out = self._coord_cache.get(v)
        if out is None:
            out = self.space.coords(self.space.reduce(v), self.basis)
            self._coord_cache[v] = out
        return out

    def from_coords(self, c: BVec) -> Vec:
        v = self.space.vs.zero
        for ci, b in zip(c, self.basis):
            v = self.space.vs.add(v, self.space.vs.scale(ci, b))
        return self.space.reduce(v)

    def flag_from_zero_indices(self, zeros: Iterable[int]) -> Flag:
        idx = sorted(set(zeros))
        steps = [self.flag.steps[0]] + [self.flag.steps[i] for i in idx] \
            + [self.flag.steps[-1]]
        return Flag(tuple(steps))

    def adapted_to(self, flag: Flag) -> bool:
        return all(step in self.flag.steps for step in flag.steps)

    def __repr__(self):
        return f"Chart(n={self.n}, q={self.q}, basis={self.basis})"


def standard_chart(space: LinSpace) -> Chart:
    return Chart(space)


# ---------------------------------------------------------------------------
# Chart membership and chart points
# ---------------------------------------------------------------------------

def _coords_scale(field, c: int, x: FieldElement) -> FieldElement:
    return field.scalar(c) * x


def chart_contains(chart: Chart, t: Sequence[FieldElement],
                   flag: Optional[Flag] = None):
    """Membership of t in the chart of ``flag`` (default: the complete flag).

    Returns (True, stratum flag) or (False, None).  The conditions are:
    the zero entries of t sit at interior indices of ``flag``, and within
    each block of the resulting zero-pattern stratum every non-trivial
    F_q-linear combination of the suffix products of t is nonzero.
    """
    n, fld = chart.n, chart.field
    if len(t) != n - 1:
        raise ValueError("coordinate tuple has the wrong length")
    flag = chart.flag if flag is None else flag
    if not chart.adapted_to(flag):
        raise ValueError("chart basis is not adapted to the flag")
    interior = {chart.flag.steps.index(s) for s in flag.steps[1:-1]}
    zeros = {i + 1 for i, x in enumerate(t) if not x}
    if not zeros <= interior:
        return False, None
    iseq = [0] + sorted(zeros) + [n]
    for k in range(1, len(iseq)):
        lo, hi = iseq[k - 1] + 1, iseq[k]
        # suffix products prod_{i=j}^{hi-1} t_i for j = lo .. hi (last = 1)
        prods = [fld.one]
        for i in range(hi - 1, lo - 1, -1):
            prods.append(prods[-1] * t[i - 1])
        prods.reverse()
        for combo in itertools.product(range(chart.q), repeat=len(prods)):
            if not any(combo):
                continue
            total = fld.zero
            for c, val in zip(combo, prods):
                if c:
                    total = total + _coords_scale(fld, c, val)
            if not total:
                return False, None
    return True, chart.flag_from_zero_indices(zeros)


@dataclass(frozen=True)
class ChartPoint:
    """A chart membership witness: coordinates plus the detected stratum."""

    chart: Chart
    t: tuple  # (n-1) field elements
    stratum: Flag

    @property
    def stratum_indices(self) -> tuple:
        """(i_0 = 0, i_1, ..., i_m = n): positions of the stratum steps."""
        return tuple(self.chart.flag.steps.index(s) for s in self.stratum.steps)

    def __repr__(self):
        return f"ChartPoint(t={[list(x.coeffs) for x in self.t]})"


def chart_point(chart: Chart, t: Sequence[FieldElement]) -> ChartPoint:
    ok, stratum = chart_contains(chart, t)
    if not ok:
        raise ValueError("coordinates violate the chart membership conditions")
    return ChartPoint(chart, tuple(t), stratum)


def chart_points(chart: Chart) -> List[ChartPoint]:
    """All points of the chart over the value field, in lexicographic order."""
    fld = chart.field
    out = []
    for packed in itertools.product(range(fld.order), repeat=chart.n - 1):
        t = tuple(fld.from_int(k) for k in packed)
        ok, stratum = chart_contains(chart, t)
        if ok:
            out.append(ChartPoint(chart, t, stratum))
    return out


# ---------------------------------------------------------------------------
# The reduced index set and the defining equations
# ---------------------------------------------------------------------------

def _lev(c: BVec) -> int:
    """Smallest j with v inside the j-th complete-flag step (0 for zero)."""
    return max((i + 1 for i, x in enumerate(c) if x), default=0)


def _badd(field, u: BVec, v: BVec) -> BVec:
    s = field.s_add
    return tuple(s[a][b] for a, b in zip(u, v))


def _bneg(field, v: BVec) -> BVec:
    return tuple(field.s_neg[a] for a in v)


def _bscale(field, c: int, v: BVec) -> BVec:
    return tuple(field.s_mul[c][a] for a in v)


def sigma_indices(cp: ChartPoint) -> List[Tuple[BVec, int]]:
    """The reduced indices (v, k): level k and v zero up to the k-th step."""
    iseq = cp.stratum_indices
    n, q = cp.chart.n, cp.chart.q
    out = []
    for k in range(1, len(iseq)):
        ik = iseq[k]
        for tail in itertools.product(range(q), repeat=n - ik):
            out.append(((0,) * ik + tail, k))
    return out


def q_value(cp: ChartPoint, c: BVec, k: int) -> FieldElement:
    """Q^k evaluated at the chart point, for a vector in the k-th step."""
    fld, t = cp.chart.field, cp.t
    if any(c[k:]):
        raise ValueError("vector lies outside the k-th flag step")
    total = fld.zero
    prod = fld.one  # running product t_i .. t_{k-1}
    for i in range(k, 0, -1):
        if c[i - 1]:
            total = total + fld.scalar(c[i - 1]) * prod
        if i > 1:
            prod = prod * t[i - 2]
    return total


def _unit(n: int, pos: int) -> BVec:
    return tuple(1 if j == pos - 1 else 0 for j in range(n))


def component_constraint(cp: ChartPoint, free: Tuple[BVec, int],
                         idx: Tuple[BVec, int]) -> Optional[ProjPoint]:
    """What the (w, l)-component forces at the index (v, k); None if free.

    On the component with free index (w, l), every other coordinate is
    pinned: to (Q at the truncation of w : 1) for higher levels congruent
    to w, and to (1 : 0) otherwise.
    """
    w, l = free
    v, k = idx
    if idx == free:
        return None
    fld = cp.chart.field
    ik = cp.stratum_indices[k]
    diff = _badd(fld, v, _bneg(fld, w))
    if k > l and _lev(diff) <= ik:
        w_trunc = w[:ik] + (0,) * (cp.chart.n - ik)
        return ProjPoint(q_value(cp, w_trunc, ik), fld.one)
    return ProjPoint.infinity(fld)


def node_point(cp: ChartPoint, upper: Tuple[BVec, int],
               lower: Tuple[BVec, int]) -> Dict[Tuple[BVec, int], ProjPoint]:
    """The full coordinate tuple of the node between two adjacent components.

    Intersects the two components' constraint systems; each pins the
    other's free coordinate and they must agree everywhere else.
    """
    point = {}
    for idx in sigma_indices(cp):
        a = component_constraint(cp, upper, idx)
        b = component_constraint(cp, lower, idx)
        if a is not None and b is not None and a != b:
            raise AssertionError("adjacent component equations disagree")
        value = a if a is not None else b
        if value is None:
            raise AssertionError("node equations leave a coordinate free")
        point[idx] = value
    return point


def locate_component(cp: ChartPoint, point: Dict[Tuple[BVec, int], ProjPoint]):
    """The unique component whose equations the point satisfies, plus the
    position in that component's own coordinate."""
    hits = []
    for free in sigma_indices(cp):
        if all(point[idx] == expected
               for idx in sigma_indices(cp)
               if (expected := component_constraint(cp, free, idx)) is not None):
            hits.append(free)
    if len(hits) != 1:
        raise ValueError(f"point satisfied {len(hits)} component systems")
    return hits[0], point[hits[0]]


def section_value(cp: ChartPoint, v: BVec, w: BVec) -> ProjPoint:
    """The (v, w)-coordinate of the zero section: (-Q^l_v : Q^l_w) with l
    minimal such that both vectors lie in the l-th complete-flag step."""
    l = max(_lev(v), _lev(w), 1)
    return ProjPoint(-q_value(cp, v, l), q_value(cp, w, l))


def section_assignment(cp: ChartPoint, u, g: Optional[GroupElement] = None
                       ) -> Dict[Tuple[BVec, int], ProjPoint]:
    """The reduced coordinates of the u-marked section (u in chart
    coordinates, or the infinity label), optionally composed with the
    coordinate action of a group element on the full index set."""
    fld = cp.chart.field
    n = cp.chart.n
    out = {}
    for (v, k) in sigma_indices(cp):
        tv, tw = v, _unit(n, cp.stratum_indices[k])
        if g is not None:
            xi_inv = fld.s_inv[g.xi]
            gv = cp.chart.to_coords(g.v)
            tv = _bscale(fld, xi_inv, _badd(fld, tv, _bneg(fld, gv)))
            tw = _bscale(fld, xi_inv, tw)
        if u == INF:
            out[(v, k)] = ProjPoint.infinity(fld)
        else:
            out[(v, k)] = section_value(cp, _badd(fld, tv, _bneg(fld, u)), tw)
    return out


def g_translate_index(space: LinSpace, idx, g: GroupElement):
    """The coordinate action on full indices: (v, w) -> (xi^-1(v-u), xi^-1 w)."""
    v, w = idx
    xi_inv = space.field.s_inv[g.xi]
    return (space.scale(xi_inv, space.sub_vec(v, g.v)),
            space.scale(xi_inv, w))


def check_equations(cp: ChartPoint,
                    assignment: Dict[Tuple[BVec, int], ProjPoint]) -> bool:
    """Verify the full defining equations at the chart point.

    For all levels l, reduced indices (v,k), (v',k') with k, k' <= l and
    v - v' inside the l-th stratum step:
    Q^{i_l}_{b_{i_k}} X_{vk} Y_{v'k'} + Q^{i_l}_{v-v'} Y_{vk} Y_{v'k'}
      = Q^{i_l}_{b_{i_k'}} X_{v'k'} Y_{vk}.
    """
    fld = cp.chart.field
    iseq = cp.stratum_indices
    idxs = sigma_indices(cp)
    m = len(iseq) - 1
    for l in range(1, m + 1):
        il = iseq[l]
        for (v, k) in idxs:
            if k > l:
                continue
            for (v2, k2) in idxs:
                if k2 > l:
                    continue
                diff = _badd(fld, v, _bneg(fld, v2))
                if _lev(diff) > il:
                    continue
                p1, p2 = assignment[(v, k)], assignment[(v2, k2)]
                qa = q_value(cp, _unit(cp.chart.n, iseq[k]), il)
                qb = q_value(cp, diff, il)
                qc = q_value(cp, _unit(cp.chart.n, iseq[k2]), il)
                lhs = qa * p1.x * p2.y + qb * p1.y * p2.y
                rhs = qc * p2.x * p1.y
                if lhs != rhs:
                    return False
    return True


# ---------------------------------------------------------------------------
# Fiber synthesis
# ---------------------------------------------------------------------------

def fiber(cp: ChartPoint) -> Fern:
    """Synthesize the fern over a chart point.

    Components are indexed by the reduced indices; nodes join consecutive
    levels within the same residue class, at positions solved from the
    component equations; marks are found by translate-then-locate.  The
    result is validated and its associated flag equals the stratum.
    """
    chart = cp.chart
    fld = chart.field
    iseq = cp.stratum_indices
    m = len(iseq) - 1
    idxs = sigma_indices(cp)

    def cid(idx):
        v, k = idx
        return ("E", chart.from_coords(v), k)

    nodes = []
    for (v, k) in idxs:
        if k == 1:
            continue
        lo, hi = iseq[k - 1], iseq[k]
        for window in itertools.product(range(chart.q), repeat=hi - lo):
            u = (0,) * lo + window + (0,) * (chart.n - hi)
            v2 = _badd(fld, v, u)
            point = node_point(cp, (v, k), (v2, k - 1))
            nodes.append(curve.node(cid((v, k)), point[(v, k)],
                                    cid((v2, k - 1)), point[(v2, k - 1)]))

    marking = {}
    for u_vec in chart.space.vectors():
        u_b = chart.to_coords(u_vec)
        point = section_assignment(cp, u_b)
        home, pos = locate_component(cp, point)
        if not check_equations(cp, point):
            raise AssertionError("section fails the defining equations")
        marking[u_vec] = (cid(home), pos)
    marking[INF] = (cid(((0,) * chart.n, m)), ProjPoint.infinity(fld))

    tree = curve.MarkedTree(fld, [cid(i) for i in idxs], nodes, marking)
    result = validate_fern(tree, chart.space)
    if result.flag.steps != cp.stratum.steps:
        raise AssertionError("fiber flag does not match the stratum")
    return result


# ---------------------------------------------------------------------------
# Classification: from ferns to functional tuples and back to coordinates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassPoint:
    """One nonzero functional class per nonzero subspace, canonically scaled.

    ``functionals[W]`` lists the values at the canonical basis of W (as a
    subquotient over the ambient modulus), scaled so that the last nonzero
    entry is one.
    """

    space: LinSpace
    functionals: dict  # Subspace -> tuple of FieldElements

    def basis_of(self, w: Subspace) -> tuple:
        return linspace_between(self.space.vs, w, self.space.mod).basis()

    def value(self, w: Subspace, v: Vec) -> FieldElement:
        sub = linspace_between(self.space.vs, w, self.space.mod)
        coords = sub.coords_cached(v)
        fld = self.space.field
        total = fld.zero
        for c, val in zip(coords, self.functionals[w]):
            if c:
                total = total + fld.scalar(c) * val
        return total


def canonical_functional(values: Sequence[FieldElement]) -> tuple:
    """Scale a nonzero tuple so its last nonzero coordinate is one."""
    last = max(i for i, x in enumerate(values) if x)
    inv = values[last].inverse()
    return tuple(x * inv for x in values)


def subspace_line_values(f: Fern, w: Subspace) -> Dict[Vec, FieldElement]:
    """Line values of the contraction to w, without re-validating the fern."""
    space = f.space
    if w == space.sub:
        tree = f.tree
        sub = space
    else:
        keep = [v for v in space.vectors() if w.contains(v)] + [INF]
        tree = curve.contract(f.tree, keep).tree
        sub = space.subquotient(w)
    squashed = curve.contract_to_component(tree, INF).tree
    pos = {v: squashed.marking[v][1] for v in sub.vectors()}
    pos_inf = squashed.marking[INF][1]
    anchor = next(v for v in sub.vectors()
                  if squashed.marking[v][1] not in (pos[sub.zero], pos_inf))
    coord = Mobius.to_standard(pos[sub.zero], pos[anchor], pos_inf)
    return {v: coord.apply(p).affine_value() for v, p in pos.items()}


def classify(f: Fern) -> ClassPoint:
    """The functional tuple of a fern: for each nonzero subspace, the line
    values of the contraction to it, canonically scaled on its basis."""
    space = f.space
    functionals = {}
    for d in range(1, space.dim + 1):
        for w in space.subspace_steps(d):
            values = subspace_line_values(f, w)
            sub = LinSpace(space.vs, w, space.mod)
            functionals[w] = canonical_functional(
                [values[b] for b in sub.basis()])
    return ClassPoint(space, functionals)


def chart_coords(point: ClassPoint, chart: Chart) -> tuple:
    """Affine coordinates of a classified point in a chart:
    t_i = value of the (i+1)-st step functional at b_i over its value at
    b_{i+1}."""
    out = []
    for i in range(1, chart.n):
        step = chart.flag.steps[i + 1]
        num = point.value(step, chart.basis[i - 1])
        den = point.value(step, chart.basis[i])
        if not den:
            raise ValueError("point lies outside this chart")
        out.append(num / den)
    return tuple(out)


class CompatibilityChecker:
    """Precomputed nested-pair structure for fast membership tests.

    For every nested pair of nonzero subspaces the coordinates of the
    small basis inside the big one are tabulated once; checking a
    functional tuple is then pure scalar arithmetic.
    """

    def __init__(self, space: LinSpace):
        self.space = space
        self.subs = [w for d in range(1, space.dim + 1)
                     for w in space.subspace_steps(d)]
        self.pairs = []  # (small, big, small-basis coords in big's basis)
        for w_small in self.subs:
            small = linspace_between(space.vs, w_small, space.mod)
            for w_big in self.subs:
                if w_big.dim <= w_small.dim or not w_big.contains_subspace(w_small):
                    continue
                big = linspace_between(space.vs, w_big, space.mod)
                coords = tuple(big.coords_cached(b) for b in small.basis())
                self.pairs.append((w_small, w_big, coords))

    def _restrict(self, functionals, w_big, coords):
        fld = self.space.field
        big_vals = functionals[w_big]
        out = []
        for c in coords:
            total = fld.zero
            for ci, val in zip(c, big_vals):
                if ci:
                    total = total + fld.scalar(ci) * val
            out.append(total)
        return out

    def bv_ok(self, functionals: dict) -> bool:
        for w_small, w_big, coords in self.pairs:
            small_vals = functionals[w_small]
            big_vals = self._restrict(functionals, w_big, coords)
            d = len(small_vals)
            for i in range(d):
                for j in range(i + 1, d):
                    if big_vals[i] * small_vals[j] != big_vals[j] * small_vals[i]:
                        return False
        return True

    def uf_ok(self, functionals: dict, flag: Flag) -> bool:
        if not self.bv_ok(functionals):
            return False
        for w_small, w_big, coords in self.pairs:
            separated = any(
                step.contains_subspace(w_small)
                and not step.contains_subspace(w_big)
                for step in flag.steps)
            if separated:
                continue
            if not any(self._restrict(functionals, w_big, coords)):
                return False
        return True


_CHECKER_CACHE: Dict[LinSpace, CompatibilityChecker] = {}


def compatibility_checker(space: LinSpace) -> CompatibilityChecker:
    out = _CHECKER_CACHE.get(space)
    if out is None:
        out = CompatibilityChecker(space)
        _CHECKER_CACHE[space] = out
    return out


def bv_member(point: ClassPoint) -> bool:
    """The compatibility condition: for every pair of nested subspaces the
    larger functional restricts to a (possibly zero) multiple of the
    smaller one."""
    return compatibility_checker(point.space).bv_ok(point.functionals)


def uf_member(point: ClassPoint, flag: Flag) -> bool:
    """Chart membership on top of compatibility: for nested pairs not
    separated by the flag, the larger functional must not vanish
    identically on the smaller subspace."""
    return compatibility_checker(point.space).uf_ok(point.functionals, flag)


def functional_candidates(space: LinSpace, w: Subspace) -> List[tuple]:
    """All canonically scaled nonzero functional classes on a subspace."""
    fld = space.field
    d = linspace_between(space.vs, w, space.mod).dim
    out = []
    for last in range(d):
        for packed in itertools.product(range(fld.order), repeat=last):
            values = [fld.from_int(k) for k in packed] + [fld.one] \
                + [fld.zero] * (d - last - 1)
            out.append(tuple(values))
    return out
