"""Stable marked trees of projective lines over a finite field.

A curve here is a connected tree of copies of P^1: each component carries
its own projective coordinate, and the gluing data lives entirely in node
records that pair a point on one component with a point on another.  Marks
are labels placed at points.  This representation makes the classical tree
surgeries coordinate transports:

* ``contract``        forget marks and collapse unstable components,
* ``stabilize``       insert a new mark, sprouting a component if needed,
* ``contract_to_component``  squash everything onto one component,
* ``are_isomorphic``  find the unique label-preserving isomorphism.

Trees are immutable; every operation returns new values.  Unstable trees
are representable (they occur as stabilization inputs and as contraction
images); only ``MarkedTree.validate`` decides stability.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Dict, Iterable, List, Optional, Tuple

from .gf import ExtField, FieldElement


class DegenerateInput(ValueError):
    """Raised when projective input collapses (coincident anchor points)."""


# ---------------------------------------------------------------------------
# Points on a projective line and Moebius transformations
# ---------------------------------------------------------------------------

class ProjPoint:
    """A point (x : y) on P^1, normalized to (x, 1) or (1, 0)."""

    __slots__ = ("x", "y")

    def __init__(self, x: FieldElement, y: FieldElement):
        if not x and not y:
            raise DegenerateInput("(0 : 0) is not a projective point")
        if y:
            self.x = x / y
            self.y = y.field.one
        else:
            self.x = x.field.one
            self.y = x.field.zero

    @classmethod
    def affine(cls, value: FieldElement) -> "ProjPoint":
        return cls(value, value.field.one)

    @classmethod
    def infinity(cls, fld: ExtField) -> "ProjPoint":
        return cls(fld.one, fld.zero)

    @classmethod
    def zero(cls, fld: ExtField) -> "ProjPoint":
        return cls(fld.zero, fld.one)

    @property
    def is_infinity(self) -> bool:
        return not self.y

    def affine_value(self) -> FieldElement:
        if self.is_infinity:
            raise DegenerateInput("point at infinity has no affine value")
        return self.x

    def __eq__(self, other):
        return (isinstance(other, ProjPoint) and self.x == other.x
                and self.y == other.y)

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return "(1:0)" if self.is_infinity else f"({list(self.x.coeffs)}:1)"


class Mobius:
    """An invertible fractional-linear map of P^1, stored as a 2x2 matrix."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        if not (a * d - b * c):
            raise DegenerateInput("matrix is singular")
        self.a, self.b, self.c, self.d = a, b, c, d

    def apply(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)

    def compose(self, other: "Mobius") -> "Mobius":
        # self after other
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    @classmethod
    def identity(cls, fld: ExtField) -> "Mobius":
        return cls(fld.one, fld.zero, fld.zero, fld.one)

    @classmethod
    def to_standard(cls, p0: ProjPoint, p1: ProjPoint, pinf: ProjPoint) -> "Mobius":
        """The unique map with p0 -> (0:1), p1 -> (1:1), pinf -> (1:0)."""
        if p0 == p1 or p1 == pinf or p0 == pinf:
            raise DegenerateInput("anchor points must be pairwise distinct")
        m0 = cls(p0.y, -p0.x, pinf.y, -pinf.x)
        img = m0.apply(p1)
        return cls(img.y * m0.a, img.y * m0.b, img.x * m0.c, img.x * m0.d)

    @classmethod
    def between_triples(cls, src: Tuple[ProjPoint, ...],
                        dst: Tuple[ProjPoint, ...]) -> "Mobius":
        """The unique map sending the src triple to the dst triple in order."""
        return cls.to_standard(*dst).inverse().compose(cls.to_standard(*src))

    def normalized(self) -> Tuple:
        for pivot in (self.a, self.b, self.c, self.d):
            if pivot:
                inv = pivot.inverse()
                return tuple((t * inv).coeffs for t in (self.a, self.b, self.c, self.d))
        raise AssertionError("unreachable")

    def __eq__(self, other):
        return isinstance(other, Mobius) and self.normalized() == other.normalized()

    def __hash__(self):
        return hash(self.normalized())

    def is_scaling_by(self, factor: FieldElement) -> bool:
        """True iff this map is z -> factor * z (projectively)."""
        return (not self.b) and (not self.c) and self.a == factor * self.d

    def __repr__(self):
        return f"Mobius{self.normalized()}"


def cross_ratio(a: ProjPoint, b: ProjPoint, c: ProjPoint, d: ProjPoint) -> FieldElement:
    """The scalar fixed by cross_ratio((0:1), (1:1), (1:0), (x:1)) = x.

    Requires a, b, c pairwise distinct and d != c (otherwise the value
    escapes to infinity).  Invariant under simultaneous Moebius moves.
    """
    value = Mobius.to_standard(a, b, c).apply(d)
    if value.is_infinity:
        raise DegenerateInput("cross ratio escapes to infinity (d = c)")
    return value.affine_value()


# ---------------------------------------------------------------------------
# Marked trees
# ---------------------------------------------------------------------------

End = Tuple[object, ProjPoint]  # (component id, position)


def node(c1, p1: ProjPoint, c2, p2: ProjPoint) -> frozenset:
    """An unordered gluing record between points of two distinct components."""
    if c1 == c2:
        raise ValueError("a node must join two distinct components")
    return frozenset(((c1, p1), (c2, p2)))


def _cid_key(cid) -> str:
    return repr(cid)


@dataclass(frozen=True)
class Component:
    """A view of one component: its marks and its node points by neighbor."""

    cid: object
    marks: dict
    node_points: dict  # neighbor cid -> position on this component

    def special_points(self) -> list:
        return list(self.marks.values()) + list(self.node_points.values())


@dataclass(frozen=True)
class StabilityReport:
    violations: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


class MarkedTree:
    """An immutable marked tree of projective lines over a field.

    ``marking`` maps structural labels to (component id, point); these are
    the marks that stability and isomorphism talk about.  ``extra`` holds
    transported non-structural points (for instance the forgotten marks
    after a contraction); they may collide freely and are ignored by
    ``validate`` and ``are_isomorphic``.
    """

    __slots__ = ("field", "components", "nodes", "marking", "extra",
                 "_adj", "_marks_on")

    def __init__(self, fld: ExtField, components: Iterable, nodes: Iterable,
                 marking: Dict, extra: Optional[Dict] = None):
        self.field = fld
        self.components = frozenset(components)
        self.nodes = frozenset(nodes)
        self.marking = dict(marking)
        self.extra = dict(extra or {})
        for lbl, (cid, _) in list(self.marking.items()) + list(self.extra.items()):
            if cid not in self.components:
                raise ValueError(f"mark {lbl!r} placed on unknown component {cid!r}")
        adj: Dict[object, Dict[object, ProjPoint]] = {c: {} for c in self.components}
        for nd in self.nodes:
            (c1, p1), (c2, p2) = sorted(nd, key=lambda e: _cid_key(e[0]))
            if c1 not in adj or c2 not in adj:
                raise ValueError("node references an unknown component")
            if c2 in adj[c1]:
                raise ValueError("two components glued more than once")
            adj[c1][c2] = p1
            adj[c2][c1] = p2
        self._adj = adj
        marks_on: Dict[object, Dict] = {c: {} for c in self.components}
        for lbl, (cid, pt) in self.marking.items():
            marks_on[cid][lbl] = pt
        self._marks_on = marks_on

    # -- structure ----------------------------------------------------------

    def neighbors(self, cid) -> dict:
        return self._adj[cid]

    def marks_on(self, cid) -> dict:
        return self._marks_on[cid]

    def component(self, cid) -> Component:
        return Component(cid, dict(self._marks_on[cid]), dict(self._adj[cid]))

    def mark_position(self, label) -> End:
        return self.marking[label]

    def is_connected_tree(self) -> bool:
        if not self.components:
            return False
        if len(self.nodes) != len(self.components) - 1:
            return False
        seen, stack = set(), [next(iter(self.components))]
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.add(c)
            stack.extend(self._adj[c])
        return len(seen) == len(self.components)

    def path(self, start, goal) -> list:
        """The unique component path from start to goal (inclusive)."""
        prev = {start: None}
        queue = [start]
        while queue:
            c = queue.pop(0)
            if c == goal:
                out = []
                while c is not None:
                    out.append(c)
                    c = prev[c]
                return out[::-1]
            for d in self._adj[c]:
                if d not in prev:
                    prev[d] = c
                    queue.append(d)
        raise ValueError("components live in different trees")

    # -- rebuilding ---------------------------------------------------------

    def with_marking(self, marking: Dict, extra: Optional[Dict] = None) -> "MarkedTree":
        return MarkedTree(self.field, self.components, self.nodes, marking,
                          self.extra if extra is None else extra)

    def canonical_key(self):
        return (
            tuple(sorted((_cid_key(c) for c in self.components))),
            tuple(sorted((tuple(sorted(((_cid_key(c), p.x.coeffs, p.y.coeffs)
                                        for c, p in nd))) for nd in self.nodes))),
            tuple(sorted((repr(l), _cid_key(c), p.x.coeffs, p.y.coeffs)
                         for l, (c, p) in self.marking.items())),
            tuple(sorted((repr(l), _cid_key(c), p.x.coeffs, p.y.coeffs)
                         for l, (c, p) in self.extra.items())),
        )

    def __eq__(self, other):
        return (isinstance(other, MarkedTree) and self.field is other.field
                and self.canonical_key() == other.canonical_key())

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        return (f"MarkedTree({len(self.components)} components, "
                f"{len(self.marking)} marks)")

    # -- stability ----------------------------------------------------------

    def validate(self) -> StabilityReport:
        """Check the stability conditions; reports violations, never raises."""
        v: List[str] = []
        if not self.is_connected_tree():
            v.append("incidence graph is not a connected tree")
        node_points = {c: set(self._adj[c].values()) for c in self.components}
        for c in self.components:
            if len(node_points[c]) != len(self._adj[c]):
                v.append(f"component {c!r} has coincident node points")
        seen_positions: Dict[End, object] = {}
        for lbl, (cid, pt) in self.marking.items():
            if pt in node_points[cid]:
                v.append(f"mark {lbl!r} sits on a node of component {cid!r}")
            prior = seen_positions.get((cid, pt))
            if prior is not None:
                v.append(f"marks {prior!r} and {lbl!r} coincide")
            seen_positions[(cid, pt)] = lbl
        for c in self.components:
            count = len(self._marks_on[c]) + len(self._adj[c])
            if count < 3:
                v.append(f"component {c!r} carries {count} special points (< 3)")
        return StabilityReport(tuple(v))

    @property
    def is_stable(self) -> bool:
        return self.validate().ok


def single_component_tree(fld: ExtField, marking: Dict[object, ProjPoint],
                          cid="c0") -> MarkedTree:
    return MarkedTree(fld, [cid], [], {l: (cid, p) for l, p in marking.items()})


# ---------------------------------------------------------------------------
# Dual graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualGraph:
    vertices: frozenset
    edges: frozenset  # frozensets {cid1, cid2}
    half_edges: dict  # mark label -> vertex

    def degree(self, cid) -> int:
        edge_deg = sum(1 for e in self.edges if cid in e)
        mark_deg = sum(1 for v in self.half_edges.values() if v == cid)
        return edge_deg + mark_deg

    def n_ext(self, subset: Iterable) -> int:
        """External edges of the subgraph generated by a component subset:
        marks on the subset plus edges leaving it."""
        sub = set(subset)
        marks = sum(1 for v in self.half_edges.values() if v in sub)
        boundary = sum(1 for e in self.edges if len(e & sub) == 1)
        return marks + boundary

    def is_tree(self) -> bool:
        return len(self.edges) == len(self.vertices) - 1


def dual_graph(t: MarkedTree) -> DualGraph:
    return DualGraph(
        vertices=t.components,
        edges=frozenset(frozenset(c for c, _ in nd) for nd in t.nodes),
        half_edges={lbl: cid for lbl, (cid, _) in t.marking.items()},
    )


# ---------------------------------------------------------------------------
# Contraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContractionResult:
    """A contracted tree plus where every original component went.

    ``component_image[c]`` is ``(c, None)`` when c survives with its
    coordinate untouched, else ``(d, p)`` with d a surviving component and
    p the point of d that c collapsed onto.
    """

    tree: MarkedTree
    component_image: dict

    def image_of(self, cid, pt: ProjPoint) -> End:
        target, collapse_pt = self.component_image[cid]
        return (target, pt if collapse_pt is None else collapse_pt)


def contract(t: MarkedTree, keep: Iterable) -> ContractionResult:
    """Contract a stable tree with respect to the sub-markset ``keep``.

    Components that drop below three special points are collapsed onto a
    neighbor through their remaining node, transporting every mark (the
    forgotten ones become non-structural ``extra`` points).  Coordinates of
    surviving components never change, so the output is canonical and
    independent of the collapse order.
    """
    keep = set(keep)
    if len(keep) < 3:
        raise ValueError("contraction needs at least 3 surviving marks")
    missing = keep - set(t.marking)
    if missing:
        raise ValueError(f"marks not on the tree: {sorted(map(repr, missing))}")

    adj = {c: dict(t.neighbors(c)) for c in t.components}
    structural = {lbl: pos for lbl, pos in t.marking.items() if lbl in keep}
    loose = {lbl: pos for lbl, pos in t.marking.items() if lbl not in keep}
    loose.update(t.extra)
    marks_per = {c: set() for c in t.components}
    for lbl, (cid, _) in structural.items():
        marks_per[cid].add(lbl)
    collapsed_to: Dict[object, End] = {}

    def special_count(c):
        return len(marks_per[c]) + len(adj[c])

    alive = set(t.components)
    changed = True
    while changed and len(alive) > 1:
        changed = False
        for c in sorted(alive, key=_cid_key):
            if len(alive) == 1:
                break
            if special_count(c) >= 3:
                continue
            neighbors = adj[c]
            if len(neighbors) == 1:
                (nb, _), = neighbors.items()
                att = adj[nb].pop(c)
                target: End = (nb, att)
            elif len(neighbors) == 2:
                (n1, _), (n2, _) = sorted(neighbors.items(), key=lambda kv: _cid_key(kv[0]))
                p1 = adj[n1].pop(c)
                p2 = adj[n2].pop(c)
                adj[n1][n2] = p1
                adj[n2][n1] = p2
                target = (n1, p1)
            else:  # pragma: no cover - unreachable from stable inputs
                raise AssertionError("collapsing a component with 3+ nodes")
            for lbl, (cid, pt) in list(structural.items()):
                if cid == c:
                    structural[lbl] = target
            for lbl, (cid, pt) in list(loose.items()):
                if cid == c:
                    loose[lbl] = target
            for lbl in marks_per[c]:
                marks_per[target[0]].add(lbl)
            collapsed_to[c] = target
            alive.remove(c)
            del adj[c], marks_per[c]
            changed = True

    # resolve collapse chains onto surviving components
    def resolve(end: End) -> End:
        cid, pt = end
        while cid not in alive:
            cid, pt = collapsed_to[cid]
        return (cid, pt)

    component_image = {}
    for c in t.components:
        if c in alive:
            component_image[c] = (c, None)
        else:
            component_image[c] = resolve(collapsed_to[c])
    structural = {lbl: resolve(pos) for lbl, pos in structural.items()}
    loose = {lbl: resolve(pos) for lbl, pos in loose.items()}

    nodes = set()
    for c in alive:
        for d, p in adj[c].items():
            nodes.add(node(c, p, d, adj[d][c]))
    result = MarkedTree(t.field, alive, nodes, structural, loose)
    report = result.validate()
    if not report.ok:  # pragma: no cover - guarded by the stability precondition
        raise AssertionError(f"contraction produced an unstable tree: {report}")
    return ContractionResult(result, component_image)


def contract_to_component(t: MarkedTree, i) -> ContractionResult:
    """Collapse every component except the one carrying mark i.

    All marks are re-marked on the surviving projective line; marks from
    collapsed branches land at the branch attachment point, so the result
    may fail injectivity and is not validated.
    """
    if i not in t.marking:
        raise ValueError(f"mark {i!r} is not on the tree")
    home = t.marking[i][0]
    component_image = {}
    for c in t.components:
        if c == home:
            component_image[c] = (c, None)
        else:
            route = t.path(c, home)
            last_before = route[-2]  # neighbor of home on the route
            component_image[c] = (home, t.neighbors(home)[last_before])

    def image(end: End) -> End:
        cid, pt = end
        target, collapse_pt = component_image[cid]
        return (target, pt if collapse_pt is None else collapse_pt)

    marking = {lbl: image(pos) for lbl, pos in t.marking.items()}
    extra = {lbl: image(pos) for lbl, pos in t.extra.items()}
    result = MarkedTree(t.field, [home], [], marking, extra)
    return ContractionResult(result, component_image)


# ---------------------------------------------------------------------------
# Stabilization
# ---------------------------------------------------------------------------

def _fresh_cid(t: MarkedTree, hint="s"):
    k = 0
    while (hint, k) in t.components:
        k += 1
    return (hint, k)


def stabilize(t: MarkedTree, i, position) -> MarkedTree:
    """Insert mark i at ``position``, sprouting a new component as needed.

    ``position`` is one of
      ("smooth", cid, point)  a free smooth point,
      ("mark", label)         on top of an existing mark,
      ("node", cid1, cid2)    at the node joining two components.

    New components place their three special points at (0:1), (1:1), (1:0):
    displaced mark, new mark, node back to the old tree; for a node
    insertion the two reattachment points take (0:1) and (1:0) by id order
    and the new mark takes (1:1).  Contracting the result back to the old
    mark set recovers the input.
    """
    if i in t.marking:
        raise ValueError(f"mark {i!r} already present")
    fld = t.field
    zero, one_pt, inf = (ProjPoint.zero(fld), ProjPoint.affine(fld.one),
                         ProjPoint.infinity(fld))
    kind = position[0]
    if kind == "smooth":
        _, cid, pt = position
        if cid not in t.components:
            raise ValueError("position names an unknown component")
        taken = set(t.marks_on(cid).values()) | set(t.neighbors(cid).values())
        if pt in taken:
            raise ValueError("point already special; use a mark or node position")
        marking = dict(t.marking)
        marking[i] = (cid, pt)
        return MarkedTree(fld, t.components, t.nodes, marking, t.extra)
    if kind == "mark":
        _, label = position
        if label not in t.marking:
            raise ValueError(f"mark {label!r} is not on the tree")
        cid, pt = t.marking[label]
        fresh = _fresh_cid(t)
        marking = dict(t.marking)
        marking[label] = (fresh, zero)
        marking[i] = (fresh, one_pt)
        nodes = set(t.nodes)
        nodes.add(node(fresh, inf, cid, pt))
        return MarkedTree(fld, set(t.components) | {fresh}, nodes, marking, t.extra)
    if kind == "node":
        _, c1, c2 = position
        if c2 not in t.neighbors(c1):
            raise ValueError("components are not glued at a node")
        c1, c2 = sorted((c1, c2), key=_cid_key)
        p1 = t.neighbors(c1)[c2]
        p2 = t.neighbors(c2)[c1]
        fresh = _fresh_cid(t)
        nodes = {nd for nd in t.nodes if nd != node(c1, p1, c2, p2)}
        nodes.add(node(fresh, zero, c1, p1))
        nodes.add(node(fresh, inf, c2, p2))
        marking = dict(t.marking)
        marking[i] = (fresh, one_pt)
        return MarkedTree(fld, set(t.components) | {fresh}, nodes, marking, t.extra)
    raise ValueError(f"unknown position kind {kind!r}")


# ---------------------------------------------------------------------------
# Isomorphism of marked trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Correspondence:
    """A marked isomorphism: component bijection plus per-component maps."""

    components: dict  # cid of t1 -> cid of t2
    maps: dict        # cid of t1 -> Mobius (t1 coordinates to t2 coordinates)

    def apply(self, cid, pt: ProjPoint) -> End:
        return (self.components[cid], self.maps[cid].apply(pt))


def _entry_maps(t: MarkedTree) -> Dict[object, Dict[object, ProjPoint]]:
    """For each component, the point through which every mark is reached."""
    out: Dict[object, Dict[object, ProjPoint]] = {}
    comp_of = {lbl: cid for lbl, (cid, _) in t.marking.items()}
    for c in t.components:
        entry = {lbl: pt for lbl, pt in t.marks_on(c).items()}
        for nb, pt_here in t.neighbors(c).items():
            # every mark whose component sits in the branch through nb
            stack, branch = [nb], set()
            while stack:
                d = stack.pop()
                if d in branch or d == c:
                    continue
                branch.add(d)
                stack.extend(t.neighbors(d))
            for lbl, cid in comp_of.items():
                if cid in branch:
                    entry[lbl] = pt_here
        out[c] = entry
    return out


def _mark_key(label) -> str:
    return repr(label)


def are_isomorphic(t1: MarkedTree, t2: MarkedTree,
                   entry1=None, entry2=None) -> Optional[Correspondence]:
    """The unique isomorphism of stable marked trees, or None.

    The component bijection is forced: each component is the meeting point
    of three marks reached through distinct special points, and the image
    component must play the same role.  Anchoring the three entry points
    then forces the coordinate identification, which the remaining marks
    and nodes either confirm or refute.

    Precomputed entry maps (from :func:`_entry_maps`) may be passed in by
    callers that compare one tree against many remarkings of another.
    """
    if set(t1.marking) != set(t2.marking):
        raise ValueError("mark sets differ")
    if t1.field is not t2.field:
        raise ValueError("trees live over different fields")
    if (len(t1.components) != len(t2.components)
            or len(t1.nodes) != len(t2.nodes)):
        return None
    entry1 = _entry_maps(t1) if entry1 is None else entry1
    entry2 = _entry_maps(t2) if entry2 is None else entry2

    comp_map, mobius = {}, {}
    for c in t1.components:
        by_point: Dict[ProjPoint, list] = {}
        for lbl, pt in entry1[c].items():
            by_point.setdefault(pt, []).append(lbl)
        if len(by_point) < 3:
            raise ValueError("tree is not stable")
        directions = sorted(
            (min(lbls, key=_mark_key) for lbls in by_point.values()), key=_mark_key)
        anchors = directions[:3]
        candidates = [
            d for d in t2.components
            if len({entry2[d][a] for a in anchors}) == 3
        ]
        if not candidates:
            return None
        assert len(candidates) == 1, "median of three marks must be unique"
        d = candidates[0]
        comp_map[c] = d
        src = tuple(entry1[c][a] for a in anchors)
        dst = tuple(entry2[d][a] for a in anchors)
        mobius[c] = Mobius.between_triples(src, dst)

    if len(set(comp_map.values())) != len(comp_map):
        return None
    # verify marks
    for lbl, (cid, pt) in t1.marking.items():
        cid2, pt2 = t2.marking[lbl]
        if comp_map[cid] != cid2 or mobius[cid].apply(pt) != pt2:
            return None
    # verify nodes, from both sides
    nodes2 = set(t2.nodes)
    for nd in t1.nodes:
        (c1, p1), (c2, p2) = tuple(nd)
        image = node(comp_map[c1], mobius[c1].apply(p1),
                     comp_map[c2], mobius[c2].apply(p2))
        if image not in nodes2:
            return None
    return Correspondence(comp_map, mobius)
