"""Multiplicative subgroups of the nonzero residues modulo a prime."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .field import PrimeModulus, primitive_root

# Above this the dense 0/1 indicator (one byte per residue) is not allocated
# and membership falls back to the hash set.
DENSE_INDICATOR_LIMIT = 10**8


@dataclass(frozen=True, eq=False)
class Subgroup:
    """The unique multiplicative subgroup of order `order` dividing p - 1.

    `elements` is the sorted list of residues; `indicator` is a dense 0/1
    array of length p (None for very large p).  Both views are immutable
    after construction and safe to share across workers.
    """

    p: int
    order: int
    generator: int
    elements: np.ndarray
    indicator: np.ndarray | None
    members: frozenset[int] = field(repr=False, default_factory=frozenset)

    def __contains__(self, x: int) -> bool:
        return int(x) % self.p in self.members

    @property
    def is_full_group(self) -> bool:
        return self.order == self.p - 1


def subgroup_of_order(modulus: PrimeModulus | int, order: int) -> Subgroup:
    """Build the subgroup of the given order, generated by r^((p-1)/order)."""
    pm = modulus if isinstance(modulus, PrimeModulus) else PrimeModulus.from_int(modulus)
    p = pm.p
    if order < 1 or (p - 1) % order != 0:
        raise InputError(f"order {order} does not divide p - 1 = {p - 1}")
    g = pow(primitive_root(pm), (p - 1) // order, p)
    elems = []
    x = 1
    for _ in range(order):
        elems.append(x)
        x = x * g % p
    assert x == 1, "generator does not have the requested order"
    elements = np.sort(np.array(elems, dtype=np.int64))
    indicator = None
    if p <= DENSE_INDICATOR_LIMIT:
        indicator = np.zeros(p, dtype=np.uint8)
        indicator[elements] = 1
    return Subgroup(p, order, g, elements, indicator, frozenset(elems))


def coset_representatives(sub: Subgroup) -> np.ndarray:
    """One representative per multiplicative coset, ascending; (p-1)/order of them."""
    p = sub.p
    reps = []
    if p <= DENSE_INDICATOR_LIMIT:
        covered = np.zeros(p, dtype=bool)
        covered[0] = True
        for a in range(1, p):
            if not covered[a]:
                reps.append(a)
                covered[(a * sub.elements) % p] = True
    else:
        covered: set[int] = set()
        for a in range(1, p):
            if a not in covered:
                reps.append(a)
                covered.update(int(v) for v in (a * sub.elements) % p)
    return np.array(reps, dtype=np.int64)
