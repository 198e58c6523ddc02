"""Seeded random generators for trees and ferns.

Trees are grown mark by mark through ``stabilize`` so every intermediate
stage is a genuine stable tree; ferns are assembled recursively, either as
a single projective line with an injective linear marking (when the value
field has room) or by grafting a fern on a random proper step onto a fern
on the quotient.  A random coordinate change per component is applied at
the end so that consumers never see a preferred presentation.
"""

from __future__ import annotations

import random
from typing import List, Optional, Tuple

from . import curve
from .curve import MarkedTree, Mobius, ProjPoint
from .fern import Fern, validate_fern
from .gf import INF, ExtField, LinSpace, Subspace, VSpace, field_make


def random_field_element(fld: ExtField, rng: random.Random):
    return fld.from_int(rng.randrange(fld.order))


def random_point(fld: ExtField, rng: random.Random, avoid=()) -> ProjPoint:
    options = [ProjPoint.infinity(fld)] + \
        [ProjPoint.affine(x) for x in fld.elements()]
    options = [p for p in options if p not in set(avoid)]
    return rng.choice(options)


def random_mobius(fld: ExtField, rng: random.Random) -> Mobius:
    while True:
        a, b, c, d = (random_field_element(fld, rng) for _ in range(4))
        if a * d != b * c:
            return Mobius(a, b, c, d)


def remap_components(tree: MarkedTree, maps) -> MarkedTree:
    """Apply a coordinate change per component; an isomorphic presentation."""
    def move(cid, pt):
        return (cid, maps[cid].apply(pt))

    nodes = [curve.node(*move(c1, p1), *move(c2, p2))
             for (c1, p1), (c2, p2) in map(tuple, tree.nodes)]
    marking = {lbl: move(c, p) for lbl, (c, p) in tree.marking.items()}
    extra = {lbl: move(c, p) for lbl, (c, p) in tree.extra.items()}
    return MarkedTree(tree.field, tree.components, nodes, marking, extra)


def random_remap(tree: MarkedTree, rng: random.Random) -> MarkedTree:
    maps = {c: random_mobius(tree.field, rng) for c in tree.components}
    return remap_components(tree, maps)


# ---------------------------------------------------------------------------
# Random stable trees
# ---------------------------------------------------------------------------

def random_stable_tree(fld: ExtField, labels, rng: random.Random) -> MarkedTree:
    """A random stable tree marked by ``labels`` (at least three of them)."""
    labels = list(labels)
    if len(labels) < 3:
        raise ValueError("a stable tree needs at least three marks")
    if fld.order < 2:
        raise ValueError("field too small")
    rng.shuffle(labels)
    first = labels[:3]
    pts: List[ProjPoint] = []
    while len(pts) < 3:
        p = random_point(fld, rng, avoid=pts)
        pts.append(p)
    tree = curve.single_component_tree(fld, dict(zip(first, pts)))
    for lbl in labels[3:]:
        tree = stabilize_at_random(tree, lbl, rng)
    return tree


def stabilize_at_random(tree: MarkedTree, label, rng: random.Random) -> MarkedTree:
    kinds = ["mark", "smooth", "smooth"]
    if tree.nodes:
        kinds.append("node")
    kind = rng.choice(kinds)
    if kind == "mark":
        target = rng.choice(sorted(tree.marking, key=repr))
        return curve.stabilize(tree, label, ("mark", target))
    if kind == "node":
        nd = rng.choice(sorted(map(tuple, tree.nodes), key=repr))
        (c1, _), (c2, _) = nd
        return curve.stabilize(tree, label, ("node", c1, c2))
    cid = rng.choice(sorted(tree.components, key=repr))
    taken = list(tree.marks_on(cid).values()) + list(tree.neighbors(cid).values())
    if len(taken) >= tree.field.order + 1:
        target = rng.choice(sorted(tree.marking, key=repr))
        return curve.stabilize(tree, label, ("mark", target))
    pt = random_point(tree.field, rng, avoid=taken)
    return curve.stabilize(tree, label, ("smooth", cid, pt))


# ---------------------------------------------------------------------------
# Random ferns
# ---------------------------------------------------------------------------

def injective_linear_marking(space: LinSpace, rng: random.Random,
                             tries: int = 200):
    """Images of the canonical basis giving an injective linear map, if the
    value field has room (dimension over the subfield at least dim)."""
    fld = space.field
    for _ in range(tries):
        images = [random_field_element(fld, rng) for _ in range(space.dim)]
        values = {}
        clash = False
        for v in space.vectors():
            coords = space.coords_cached(v)
            total = fld.zero
            for c, img in zip(coords, images):
                if c:
                    total = total + fld.scalar(c) * img
            if total.coeffs in values:
                clash = True
                break
            values[total.coeffs] = v
        if not clash:
            return {v: fld.element(c) for c, v in values.items()}
    return None


def smooth_fern(space: LinSpace, rng: random.Random) -> Optional[Fern]:
    lam = injective_linear_marking(space, rng)
    if lam is None:
        return None
    marking = {v: ProjPoint.affine(x) for v, x in
               ((v, lam[v]) for v in space.vectors())}
    marking[INF] = ProjPoint.infinity(space.field)
    tree = curve.single_component_tree(space.field, marking,
                                       cid=("P", space.sub.key()))
    return validate_fern(tree, space)


def random_fern(space: LinSpace, rng: random.Random, remap: bool = True) -> Fern:
    """A random fern on the space: smooth when possible and chosen, else a
    graft along a random proper step with a random complement."""
    can_be_smooth = space.dim <= space.field.m * space.field.e  # room in K
    want_smooth = space.dim == 1 or (can_be_smooth and rng.random() < 0.5)
    if want_smooth:
        result = smooth_fern(space, rng)
        if result is not None:
            return _maybe_remap(result, rng, remap)
    steps = space.proper_steps()
    if not steps:
        result = smooth_fern(space, rng)
        if result is None:
            raise ValueError("dimension-1 space over a field with no room")
        return _maybe_remap(result, rng, remap)
    w = rng.choice(steps)
    sub_fern = random_fern(LinSpace(space.vs, w, space.mod), rng, remap=False)
    quot_fern = random_fern(LinSpace(space.vs, space.sub, w), rng, remap=False)
    complement = random_complement(space, w, rng)
    from .fern import graft
    result = graft(sub_fern, quot_fern, complement)
    return _maybe_remap(result, rng, remap)


def _maybe_remap(f: Fern, rng: random.Random, remap: bool) -> Fern:
    if not remap:
        return f
    return validate_fern(random_remap(f.tree, rng), f.space)


def random_complement(space: LinSpace, w: Subspace,
                      rng: random.Random) -> Subspace:
    """A random complement of w/U inside the space: T with T n w = U and
    T + w covering the whole subspace."""
    vs = space.vs
    t = space.mod
    candidates = list(space.vectors())
    while t.add_subspace(w) != space.sub:
        grown = t.add_subspace(w)
        v = rng.choice([x for x in candidates if not grown.contains(x)])
        t = t.add_subspace(Subspace.from_vectors(vs, [v]))
    return t


def random_pipeline_fern(space: LinSpace, rng: random.Random
                         ) -> Tuple[Fern, List[str]]:
    """A fern produced by a random build, optionally post-contracted; the
    log records the operations applied."""
    log = ["build"]
    f = random_fern(space, rng)
    while f.space.dim > 1 and rng.random() < 0.35:
        steps = f.space.proper_steps()
        if not steps:
            break
        w = rng.choice(steps)
        from .fern import contract_fern
        f = contract_fern(f, w)
        log.append(f"contract:{w.key()}")
    return f, log
