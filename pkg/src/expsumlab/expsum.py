"""Exponential sums over subgroups: single values, full tables, interval sums.

The table builder offers two interchangeable strategies.  The direct one
evaluates one compensated phase sum per multiplicative coset (the sum is
constant on cosets, so one representative suffices) and is exact-order
deterministic.  The transform one takes a full-length DFT of the subgroup
indicator; since p is prime, the DFT is realized by a Bluestein chirp
reduction to a power-of-two convolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceError
from .subgroup import Subgroup

DEFAULT_DENSE_LIMIT = 10**7
# Above this many phase evaluations the auto strategy switches to the transform.
DIRECT_WORK_LIMIT = 10**9

_phase_cache: dict[int, np.ndarray] = {}


def phase_table(p: int) -> np.ndarray:
    """exp(2*pi*i*k/p) for k = 0..p-1, cached per modulus (16 bytes/entry)."""
    tab = _phase_cache.get(p)
    if tab is None:
        tab = np.exp((2j * np.pi / p) * np.arange(p))
        while len(_phase_cache) >= 4:
            _phase_cache.pop(next(iter(_phase_cache)))
        _phase_cache[p] = tab
    return tab


def dft(x: np.ndarray) -> np.ndarray:
    """DFT of arbitrary length n: sum_j x_j exp(-2*pi*i*jk/n).

    Power-of-two lengths go straight to the FFT; any other length is reduced
    to a power-of-two cyclic convolution with Bluestein's chirp, using the
    identity jk = (j^2 + k^2 - (k-j)^2) / 2.  The quadratic phase indices are
    reduced mod 2n in exact integers so the chirp stays accurate for large n.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    if n == 0:
        raise InputError("empty transform")
    if n & (n - 1) == 0:
        return np.fft.fft(x)
    k = np.arange(n, dtype=np.int64)
    w = np.exp((-1j * np.pi / n) * ((k * k) % (2 * n)))
    m = 1
    while m < 2 * n - 1:
        m *= 2
    a = np.zeros(m, dtype=np.complex128)
    a[:n] = x * w
    b = np.zeros(m, dtype=np.complex128)
    wc = np.conj(w)
    b[:n] = wc
    b[m - n + 1 :] = wc[1:][::-1]
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))[:n]
    return conv * w


@dataclass(frozen=True)
class Interval:
    """N consecutive residues start+1, ..., start+N taken mod p."""

    start: int = 0
    length: int = 1
    avoids_zero: bool = False

    def contains_zero(self, p: int) -> bool:
        return (-(self.start + 1)) % p < self.length

    def starts_at_origin(self, p: int) -> bool:
        return self.start % p == 0

    def residues(self, p: int) -> np.ndarray:
        if not 1 <= self.length <= p:
            raise InputError(f"interval length must be in [1, p], got {self.length}")
        if self.avoids_zero and self.contains_zero(p):
            raise InputError("interval marked zero-free but contains 0 mod p")
        return (self.start + 1 + np.arange(self.length, dtype=np.int64)) % p


@dataclass(eq=False)
class SumTable:
    """|S_a| for every residue a, where S_a = sum over subgroup of e(a*x/p).

    magnitudes[0] is exactly the subgroup order; optionally the complex
    values are kept as well.  Magnitudes are constant on multiplicative
    cosets of the subgroup.
    """

    p: int
    order: int
    magnitudes: np.ndarray
    values: np.ndarray | None = None
    strategy: str = "direct"

    def parseval_defect(self) -> float:
        """Relative gap between sum of squared magnitudes and p * order."""
        total = float(np.sum(self.magnitudes.astype(np.float64) ** 2))
        target = float(self.p) * self.order
        return abs(total - target) / target


def single_sum(a: int, sub: Subgroup) -> complex:
    """S_a as a complex number, Neumaier-compensated in ascending element order."""
    p = sub.p
    a = int(a) % p
    w = 2.0 * math.pi / p
    sr = si = cr = ci = 0.0
    for x in sub.elements:
        k = (a * int(x)) % p
        ang = w * k
        vr, vi = math.cos(ang), math.sin(ang)
        t = sr + vr
        cr += (sr - t) + vr if abs(sr) >= abs(vr) else (vr - t) + sr
        sr = t
        t = si + vi
        ci += (si - t) + vi if abs(si) >= abs(vi) else (vi - t) + si
        si = t
    return complex(sr + cr, si + ci)


def all_sums(
    sub: Subgroup,
    strategy: str = "auto",
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    store_values: bool = False,
) -> SumTable:
    """The full table of |S_a| for a = 0..p-1.

    strategy: "direct" (per-coset compensated sums), "transform" (Bluestein
    DFT of the indicator), or "auto" which picks direct while p*order stays
    below DIRECT_WORK_LIMIT.
    """
    p, order = sub.p, sub.order
    if p > dense_limit:
        raise ResourceError(f"p = {p} exceeds the dense table limit {dense_limit}")
    if strategy == "auto":
        strategy = "direct" if p * order <= DIRECT_WORK_LIMIT else "transform"
    if strategy == "direct":
        phases = phase_table(p)
        mags = np.full(p, -1.0)
        vals = np.empty(p, dtype=np.complex128) if store_values else None
        mags[0] = float(order)
        if vals is not None:
            vals[0] = complex(order)
        for r in range(1, p):
            if mags[r] >= 0.0:
                continue
            coset = (r * sub.elements) % p
            s = complex(np.sum(phases[coset]))
            mags[coset] = abs(s)
            if vals is not None:
                vals[coset] = s
        return SumTable(p, order, mags, vals, "direct")
    if strategy == "transform":
        if sub.indicator is None:
            raise ResourceError("transform strategy needs the dense indicator")
        spectrum = dft(sub.indicator.astype(np.complex128))
        mags = np.abs(spectrum)
        mags[0] = float(order)
        vals = None
        if store_values:
            vals = np.conj(spectrum)
            vals[0] = complex(order)
        return SumTable(p, order, mags, vals, "transform")
    raise InputError(f"unknown strategy {strategy!r}")


def max_sum(sub: Subgroup, table: SumTable | None = None, **table_kwargs) -> tuple[int, float]:
    """(a*, max over a != 0 of |S_a|); a* is the smallest attaining residue."""
    if table is None:
        table = all_sums(sub, **table_kwargs)
    a_star = 1 + int(np.argmax(table.magnitudes[1:]))
    return a_star, float(table.magnitudes[a_star])


def interval_subgroup_sum(
    a: int,
    interval: Interval,
    sub: Subgroup,
    table: SumTable | None = None,
    method: str | None = None,
) -> float:
    """sum over n in the interval of |S_{a*n}|.

    method "table" reuses a SumTable lookup; "direct" re-evaluates each inner
    sum with single_sum (the independent route used by tests).  Default:
    "table" when a table is supplied, else "direct".
    """
    p = sub.p
    a = int(a) % p
    if a == 0:
        raise InputError("a must be nonzero mod p")
    res = interval.residues(p)
    if method is None:
        method = "table" if table is not None else "direct"
    if method == "table":
        if table is None:
            table = all_sums(sub)
        return float(np.sum(table.magnitudes[(a * res) % p]))
    if method == "direct":
        total = comp = 0.0
        for n in res:
            v = abs(single_sum((a * int(n)) % p, sub))
            t = total + v
            comp += (total - t) + v if abs(total) >= abs(v) else (v - t) + total
            total = t
        return total + comp
    raise InputError(f"unknown method {method!r}")
