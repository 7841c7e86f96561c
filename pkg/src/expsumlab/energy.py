"""Exact integer energies: additive representation counts of a subgroup and
product-collision counts between an interval and a subgroup.

Everything here is integer-exact; the convolutions run directly in int64
(values are guaranteed to fit whenever the H^{2m} overflow guard passes,
with a big-int fallback for the final squared sums).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceError
from .expsum import Interval, SumTable
from .subgroup import Subgroup

# Budget guards.  ENERGY_CAP mirrors a 128-bit accumulator; the work limit
# bounds the p*H*m cost of the direct convolution passes.
ENERGY_CAP = 1 << 127
DEFAULT_CONVOLUTION_WORK = 4 * 10**9
DEFAULT_TUPLE_BUDGET = 10**8


@dataclass(eq=False)
class EnergyProfile:
    """counts[lam] = number of m-tuples of subgroup elements summing to lam;
    energy = sum of counts^2 = number of 2m-tuples with equal half sums."""

    p: int
    m: int
    counts: np.ndarray
    energy: int


@dataclass(eq=False)
class IntervalProductProfile:
    """counts[lam] = number of (n, h) in interval x subgroup with n*h = lam;
    energy = sum of counts^2 = number of solutions of n1*h1 = n2*h2."""

    p: int
    counts: np.ndarray
    energy: int


def _exact_square_sum(counts: np.ndarray, int64_safe: bool) -> int:
    if int64_safe:
        return int(np.dot(counts, counts))
    return sum(int(c) * int(c) for c in counts[counts > 0])


def representation_counts(
    sub: Subgroup, m: int, work_limit: int = DEFAULT_CONVOLUTION_WORK
) -> EnergyProfile:
    """m-fold additive representation counts via iterated cyclic convolution."""
    if m < 1:
        raise InputError(f"fold count must be >= 1, got {m}")
    p, order = sub.p, sub.order
    if order ** (2 * m) > ENERGY_CAP:
        raise ResourceError(f"energy H^(2m) = {order}^{2 * m} exceeds the accumulator budget")
    if p * order * m > work_limit:
        raise ResourceError(f"convolution work p*H*m = {p * order * m} exceeds {work_limit}")
    if sub.indicator is None:
        raise ResourceError("representation counts need the dense indicator")
    cur = sub.indicator.astype(np.int64)
    elems = [int(h) for h in sub.elements]
    for _ in range(m - 1):
        pad = np.concatenate([cur, cur])
        nxt = np.zeros(p, dtype=np.int64)
        for h in elems:
            nxt += pad[p - h : 2 * p - h]  # view: cur[(lam - h) mod p]
        cur = nxt
    energy = _exact_square_sum(cur, order ** (2 * m) < 2**62)
    return EnergyProfile(p, m, cur, energy)


def difference_counts(sub: Subgroup) -> np.ndarray:
    """counts[d] = number of ordered pairs (h1, h2) with h1 - h2 = d mod p.

    The squared sum of these counts equals the m = 2 additive energy.
    """
    if sub.indicator is None:
        raise ResourceError("difference counts need the dense indicator")
    p = sub.p
    ind = sub.indicator.astype(np.int64)
    pad = np.concatenate([ind, ind])
    out = np.zeros(p, dtype=np.int64)
    for h in sub.elements:
        out += pad[int(h) : int(h) + p]  # view: ind[(d + h) mod p]
    return out


def energy_via_moments(table: SumTable, m: int) -> float:
    """p^{-1} * sum over a of |S_a|^{2m}; rounds to the exact m-fold energy."""
    if m < 1:
        raise InputError(f"fold count must be >= 1, got {m}")
    powers = table.magnitudes.astype(np.float64) ** (2 * m)
    if table.p <= 10**6:
        total = math.fsum(powers)
    else:
        total = float(np.sum(powers))
    return total / table.p


def j_count(
    interval: Interval, sub: Subgroup, work_limit: int = 10**9
) -> IntervalProductProfile:
    """Exact product-collision profile by enumerating all N*H products."""
    p, order = sub.p, sub.order
    res = interval.residues(p)
    n_len = res.shape[0]
    if n_len * order > work_limit:
        raise ResourceError(f"product enumeration N*H = {n_len * order} exceeds {work_limit}")
    counts = np.zeros(p, dtype=np.int64)
    chunk = max(1, 10**7 // max(order, 1))
    for i in range(0, n_len, chunk):
        prods = (res[i : i + chunk, None] * sub.elements[None, :]) % p
        counts += np.bincount(prods.ravel(), minlength=p)
    energy = _exact_square_sum(counts, (n_len * order) ** 2 < 2**62)
    return IntervalProductProfile(p, counts, energy)


def brute_force_T(sub: Subgroup, m: int, budget: int = DEFAULT_TUPLE_BUDGET) -> int:
    """Oracle: test the equal-half-sums congruence on every 2m-tuple.

    Enumerates all H^m half-tuple sums with plain Python arithmetic, then
    counts equal pairs, so every one of the H^{2m} tuples is checked.
    Only meant for tests; guarded by the tuple budget.
    """
    if m < 1:
        raise InputError(f"fold count must be >= 1, got {m}")
    p, order = sub.p, sub.order
    if order ** (2 * m) > budget:
        raise ResourceError(f"H^(2m) = {order}^{2 * m} exceeds the tuple budget {budget}")
    elems = [int(h) for h in sub.elements]
    sums = np.array(
        [sum(t) % p for t in itertools.product(elems, repeat=m)], dtype=np.int64
    )
    total = 0
    step = 4096
    for i in range(0, sums.shape[0], step):
        total += int(np.sum(sums[i : i + step, None] == sums[None, :]))
    return total
