"""Independent brute-force oracles shared by the test modules.

Everything here is deliberately naive: plain Python loops, cmath phases,
literal tuple enumeration.  These implementations never share code with the
package paths they check.
"""

from __future__ import annotations

import cmath
import itertools
import math
from collections import Counter, defaultdict


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def naive_dft(x) -> list[complex]:
    n = len(x)
    return [
        sum(x[j] * cmath.exp(-2j * math.pi * j * k / n) for j in range(n))
        for k in range(n)
    ]


def phase(k: int, p: int) -> complex:
    return cmath.exp(2j * math.pi * (k % p) / p)


def subgroup_sum(a: int, elements, p: int) -> complex:
    return sum(phase(a * int(x), p) for x in elements)


def quadruple_loop_j(residues, elements, p: int) -> int:
    count = 0
    for n1 in residues:
        for h1 in elements:
            for n2 in residues:
                for h2 in elements:
                    if (n1 * h1 - n2 * h2) % p == 0:
                        count += 1
    return count


def _pick_bucket(buckets: dict[int, list], scores: dict[int, float], has_nonzero) -> int:
    best = max(scores.values())
    tied = sorted(i for i, s in scores.items() if s >= best * (1.0 - 1e-12))
    for i in tied:
        if any(has_nonzero(member) for member in buckets[i]):
            return i
    return tied[0]


def tuple_level_trace(p: int, elements, a: int) -> dict:
    """Re-derive the three-stage cascade by enumerating raw tuples.

    Mirrors the bucketing rules (floor discard, halving buckets, score
    maximization preferring buckets with a nonzero residue) but runs over
    H^3 triples and H^2 pairs explicitly with cmath arithmetic.
    """
    elements = [int(e) for e in elements]
    H = len(elements)

    def inner_mag(c: int) -> float:
        return abs(subgroup_sum(c, elements, p))

    def bucket_index(scale: float, value: float) -> int:
        return max(0, math.floor(math.log2(scale / value)))

    delta = inner_mag(a) / H
    triples = list(itertools.product(elements, repeat=3))

    # Stage 1: triples keyed by |sum over subgroup of e(a * (x1+x2+x3) * y)|.
    floor1 = 0.5 * H * delta**3
    buckets1: dict[int, list] = defaultdict(list)
    for t in triples:
        v = inner_mag(a * sum(t))
        if v >= floor1:
            buckets1[bucket_index(H, v)].append(t)
    scores1 = {i: H * 2.0**-i * len(b) for i, b in buckets1.items()}
    i1 = _pick_bucket(buckets1, scores1, lambda t: sum(t) % p != 0)
    g1 = buckets1[i1]
    x_set = sorted({sum(t) % p for t in g1} - {0})
    delta1 = 2.0 ** -(i1 + 1)
    delta1_meas = sum(inner_mag(a * x) for x in x_set) / (H * len(x_set))

    # Stage 2: triples keyed by sum over x in X of |S_{a x (y1+y2+y3)}|.
    floor2 = 0.5 * H * delta1_meas**3
    buckets2: dict[int, list] = defaultdict(list)
    for t in triples:
        v = sum(inner_mag(a * x * sum(t)) for x in x_set) / len(x_set)
        if v >= floor2:
            buckets2[bucket_index(H, v)].append(t)
    scores2 = {i: H * 2.0**-i * len(b) for i, b in buckets2.items()}
    i2 = _pick_bucket(buckets2, scores2, lambda t: sum(t) % p != 0)
    g2 = buckets2[i2]
    y_set = sorted({sum(t) % p for t in g2} - {0})
    delta2 = 2.0 ** -(i2 + 1)
    delta2_meas = sum(
        sum(inner_mag(a * x * y) for x in x_set) for y in y_set
    ) / (H * len(x_set) * len(y_set))

    # Stage 3: pairs keyed by |sum over X x Y of e(a x y (z1 - z2))|.
    scale3 = len(x_set) * len(y_set)
    floor3 = 0.5 * scale3 * delta2_meas**2
    pairs = list(itertools.product(elements, repeat=2))
    buckets3: dict[int, list] = defaultdict(list)
    for z1, z2 in pairs:
        v = abs(
            sum(phase(a * x * y * (z1 - z2), p) for x in x_set for y in y_set)
        )
        if v >= floor3:
            buckets3[bucket_index(scale3, v)].append((z1, z2))
    scores3 = {i: scale3 * 2.0**-i * len(b) for i, b in buckets3.items()}
    i3 = _pick_bucket(buckets3, scores3, lambda pr: (pr[0] - pr[1]) % p != 0)
    g3 = buckets3[i3]
    z_set = sorted({(z1 - z2) % p for z1, z2 in g3} - {0})
    delta3 = 2.0 ** -(i3 + 1)

    return {
        "delta": delta,
        "i0": (i1, i2, i3),
        "deltas": (delta1, delta2, delta3),
        "x": x_set,
        "y": y_set,
        "z": z_set,
        "g_sizes": (len(g1), len(g2), len(g3)),
        "delta_meas": (delta1_meas, delta2_meas),
    }


def tuple_count_T(elements, p: int, m: int) -> int:
    """Literal 2m-tuple count via a Counter over m-tuple sums."""
    sums = Counter(sum(t) % p for t in itertools.product(elements, repeat=m))
    return sum(v * v for v in sums.values())
