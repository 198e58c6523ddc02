"""Exact-arithmetic toolkit for stable marked trees of projective lines over
finite fields, the fern structures living on them, the explicit universal
family over flag charts, and point counting of the compactified period
domain, all verified against brute-force oracles at desk scale."""

__version__ = "0.1.0"

from .gf import ExtField, FieldElement, Flag, GroupElement, INF, LinSpace, \
    Subspace, VSpace, field_make, flags, gaussian_binomial, subspaces

__all__ = [
    "ExtField", "FieldElement", "Flag", "GroupElement", "INF", "LinSpace",
    "Subspace", "VSpace", "field_make", "flags", "gaussian_binomial",
    "subspaces", "__version__",
]
