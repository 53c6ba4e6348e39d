"""Graded monomial bases of monomial complete intersections and their Hilbert functions.

A "box" (d_1, ..., d_m) stands for the quotient k[x_1..x_m]/(x_1^{d_1}, ..., x_m^{d_m});
its degree-j basis is the set of exponent vectors a with 0 <= a_i <= d_i - 1 and
sum(a) = j.  The basis order is fixed globally (descending lexicographic, x_1 major)
so every matrix and witness built on top is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np


def check_box(caps: Sequence[int]) -> tuple[int, ...]:
    """Validate exponent caps (all >= 1) and return them as a tuple."""
    caps = tuple(int(c) for c in caps)
    if not caps:
        raise ValueError("box needs at least one variable")
    if any(c < 1 for c in caps):
        raise ValueError(f"box caps must be positive, got {caps}")
    return caps


def top_degree(caps: Sequence[int]) -> int:
    """Largest degree with a nonzero graded piece, sum(d_i - 1)."""
    return sum(c - 1 for c in check_box(caps))


@lru_cache(maxsize=4096)
def _hilbert_cached(caps: tuple[int, ...]) -> tuple[int, ...]:
    values = np.ones(1, dtype=np.int64)
    for c in caps:
        values = np.convolve(values, np.ones(c, dtype=np.int64))
    return tuple(int(v) for v in values)


def hilbert_function(caps: Sequence[int]) -> list[int]:
    """Coefficients of prod_i (1 + t + ... + t^{d_i - 1}), indexed by degree."""
    return list(_hilbert_cached(check_box(caps)))


def _extend(prefix: list[int], caps: tuple[int, ...], pos: int, left: int,
            tails: tuple[int, ...], out: list[tuple[int, ...]]) -> None:
    if pos == len(caps) - 1:
        if left <= caps[pos] - 1:
            out.append(tuple(prefix + [left]))
        return
    hi = min(caps[pos] - 1, left)
    lo = max(0, left - tails[pos + 1])
    for a in range(hi, lo - 1, -1):
        prefix.append(a)
        _extend(prefix, caps, pos + 1, left - a, tails, out)
        prefix.pop()


@lru_cache(maxsize=4096)
def _slice_cached(caps: tuple[int, ...], degree: int) -> np.ndarray:
    m = len(caps)
    if degree < 0 or degree > sum(c - 1 for c in caps):
        return np.zeros((0, m), dtype=np.int64)
    # tails[i] = top degree available from position i on
    tails = tuple(sum(c - 1 for c in caps[i:]) for i in range(m)) + (0,)
    out: list[tuple[int, ...]] = []
    _extend([], caps, 0, degree, tails, out)
    arr = np.array(out, dtype=np.int64) if out else np.zeros((0, m), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def slice_array(caps: Sequence[int], degree: int) -> np.ndarray:
    """Degree slice as a read-only (count, m) int64 array, rows in descending lex order."""
    return _slice_cached(check_box(caps), int(degree))


@dataclass(frozen=True)
class GradedSlice:
    """Ordered monomial basis of one graded piece of a box quotient."""

    box: tuple[int, ...]
    degree: int
    basis: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.basis)


def graded_slice(caps: Sequence[int], degree: int) -> GradedSlice:
    caps = check_box(caps)
    arr = slice_array(caps, degree)
    return GradedSlice(box=caps, degree=int(degree),
                       basis=tuple(tuple(int(x) for x in row) for row in arr))


def monomial_ideal_member(exponents: Sequence[int], caps: Sequence[int]) -> bool:
    """True iff x^exponents is divisible by some generator x_i^{caps_i}."""
    if len(exponents) != len(caps):
        raise ValueError("exponent vector and caps have different lengths")
    return any(e >= c for e, c in zip(exponents, caps))
