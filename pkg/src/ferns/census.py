"""Exact point counts of the period domain, its strata, and the
compactification, each with an independent brute-force oracle.

The stratum-sum count multiplies, over the steps of every flag, the number
of injective-linear classes on the successive subquotients.  The oracle
enumerates raw functional tuples and filters by the compatibility
condition, so the two computations share nothing but the field tables.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .gf import ExtField, Flag, LinSpace, Subspace, VSpace, field_make, flags
from .universal import (ClassPoint, bv_member, compatibility_checker,
                        functional_candidates)


class BudgetExceeded(RuntimeError):
    """The brute-force tuple space is larger than the configured budget."""

    def __init__(self, size: int, budget: int):
        self.size, self.budget = size, budget
        super().__init__(f"enumeration size {size} exceeds budget {budget}")


def omega_count(n: int, q: int, m: int) -> int:
    """Injective F_q-linear maps from an n-space into F_{q^m}, up to scalar.

    prod over i < n of (q^m - q^i), divided by (q^m - 1); zero as soon as
    the field is too small to embed the space.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    total = 1
    for i in range(n):
        count = q ** m - q ** i
        if count <= 0:
            return 0
        total *= count
    assert total % (q ** m - 1) == 0
    return total // (q ** m - 1)


def omega_count_bruteforce(field: ExtField, n: int) -> int:
    """Oracle: enumerate basis images with linear-independence pruning."""
    q = field.q
    elements = field.elements()

    def extend(span: set, depth: int) -> int:
        if depth == n - 1:
            # leaves: any image outside the current span works
            return field.order - len(span)
        total = 0
        for x in elements:
            if x.coeffs in span:
                continue
            new_span = {(field.scalar(c) * x + field.element(s)).coeffs
                        for c in range(q) for s in span}
            total += extend(new_span, depth + 1)
        return total

    injective = extend({()}, 0)
    assert injective % (field.order - 1) == 0
    return injective // (field.order - 1)


@dataclass(frozen=True)
class CountReport:
    """Stratum-by-stratum census of the compactified domain."""

    n: int
    q: int
    m: int
    strata: Tuple[Tuple[str, int], ...]  # (flag key, stratum count)
    total: int
    oracle_total: Optional[int]

    @property
    def agreement(self) -> Optional[bool]:
        return None if self.oracle_total is None else self.total == self.oracle_total

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "q", "m", "flag", "stratum_count"])
        for key, count in self.strata:
            writer.writerow([self.n, self.q, self.m, key, count])
        writer.writerow([self.n, self.q, self.m, "TOTAL", self.total])
        if self.oracle_total is not None:
            writer.writerow([self.n, self.q, self.m, "ORACLE", self.oracle_total])
        return buf.getvalue()


def _field_for(q: int, m: int) -> ExtField:
    p, e = _prime_power(q)
    return field_make(p, e, m)


def _prime_power(q: int) -> Tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            while q % p == 0 and q > 1:
                q //= p
                e += 1
            if q != 1:
                raise ValueError("q is not a prime power")
            return p, e
    raise ValueError("q must be at least 2")


def bv_count_strata(n: int, q: int, m: int) -> CountReport:
    """Stratum sum: over every flag, the product of subquotient counts."""
    fld = _field_for(q, m)
    space = VSpace(fld, n)
    strata = []
    total = 0
    for flag in sorted(flags(space), key=Flag.key):
        count = 1
        for lo, hi in zip(flag.steps, flag.steps[1:]):
            count *= omega_count(hi.dim - lo.dim, q, m)
        strata.append((flag.key(), count))
        total += count
    return CountReport(n, q, m, tuple(strata), total, None)


def bv_count_bruteforce(n: int, q: int, m: int, budget: int = 10 ** 6) -> int:
    """Oracle: enumerate all functional tuples, count the compatible ones."""
    fld = _field_for(q, m)
    space = LinSpace.full(VSpace(fld, n))
    checker = compatibility_checker(space)
    subs = checker.subs
    candidates = [functional_candidates(space, w) for w in subs]
    size = 1
    for c in candidates:
        size *= len(c)
    if size > budget:
        raise BudgetExceeded(size, budget)
    count = 0
    for combo in itertools.product(*candidates):
        if checker.bv_ok(dict(zip(subs, combo))):
            count += 1
    return count


def census(n: int, q: int, m: int, with_oracle: bool = True,
           budget: int = 10 ** 6) -> CountReport:
    report = bv_count_strata(n, q, m)
    if not with_oracle:
        return report
    oracle = bv_count_bruteforce(n, q, m, budget=budget)
    return CountReport(report.n, report.q, report.m, report.strata,
                       report.total, oracle)


def confirm_omega_closed_form(limit: int = 4096) -> List[Tuple[int, int, int]]:
    """Check the closed-form count against the oracle on every (n, q, m)
    with q^(n*m) at most ``limit``; returns the configurations checked."""
    checked = []
    q = 2
    while q <= limit:
        try:
            _prime_power(q)
        except ValueError:
            q += 1
            continue
        m = 1
        while q ** m <= limit:
            fld = _field_for(q, m)
            n = 1
            while q ** (n * m) <= limit:
                assert omega_count(n, q, m) == omega_count_bruteforce(fld, n), \
                    (n, q, m)
                checked.append((n, q, m))
                n += 1
            m += 1
        q += 1
    return checked
