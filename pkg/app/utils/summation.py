"""
Compensated summation.

Rows of the counterexample matrices carry tens of thousands of terms of size
1/m whose signed sums must keep the kappa-scale signal, so all row reductions
go through an error-free transformation instead of plain accumulation.
"""
from typing import Iterable
import math

import numpy as np


def two_sum(u: float, v: float):
    # Error free transformation: u + v == s + t exactly.
    s = u + v
    up = s - v
    vpp = s - up
    up -= u
    vpp -= v
    return s, -(up + vpp)


class CompensatedSum:
    """Running Neumaier sum; maintains a sum and a carry term."""

    def __init__(self, value: float = 0.0):
        self.sum = float(value)
        self.carry = 0.0

    def add(self, value: float) -> None:
        self.sum, error = two_sum(self.sum, float(value))
        self.carry += error

    @property
    def value(self) -> float:
        return self.sum + self.carry


def compensated_sum(values: Iterable[float]) -> float:
    acc = CompensatedSum()
    for value in values:
        acc.add(value)
    return acc.value


def _two_sum_arrays(a: np.ndarray, b: np.ndarray):
    # Branch-free Knuth two-sum on arrays: a + b == s + e exactly.
    s = a + b
    bp = s - a
    ap = s - bp
    return s, (a - ap) + (b - bp)


def _compensated_prefix(values: np.ndarray):
    """
    Inclusive prefix sums as (high, low) pairs whose sum carries the compensation.

    The array is cut into about sqrt(n) chunks of about sqrt(n) terms. Prefix
    sums inside every chunk advance together, one column at a time; the chunk
    offsets come from the same routine applied to the chunk totals.
    """
    n = len(values)
    if n <= 1:
        return values.copy(), np.zeros(n, dtype=np.float64)
    width = math.isqrt(n - 1) + 1
    chunks = -(-n // width)
    grid = np.zeros(chunks * width, dtype=np.float64)
    grid[:n] = values
    grid = grid.reshape(chunks, width)

    local_high = np.empty_like(grid)
    local_low = np.empty_like(grid)
    sums = np.zeros(chunks, dtype=np.float64)
    carry = np.zeros(chunks, dtype=np.float64)
    for j in range(width):
        sums, error = _two_sum_arrays(sums, grid[:, j])
        carry += error
        local_high[:, j] = sums
        local_low[:, j] = carry

    offset_high = np.zeros(chunks, dtype=np.float64)
    offset_low = np.zeros(chunks, dtype=np.float64)
    if chunks > 1:
        high, low = _compensated_prefix(sums)
        low = low + np.cumsum(carry)
        offset_high[1:] = high[:-1]
        offset_low[1:] = low[:-1]

    out_high, error = _two_sum_arrays(offset_high[:, None], local_high)
    out_low = error + offset_low[:, None] + local_low
    return out_high.ravel()[:n], out_low.ravel()[:n]


def compensated_cumsum(values: np.ndarray) -> np.ndarray:
    """Prefix sums of a 1-d array, each one compensated."""
    high, low = _compensated_prefix(np.asarray(values, dtype=np.float64))
    return high + low


def segmented_compensated_sum(data: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    """
    Compensated sum of every CSR segment data[indptr[i]:indptr[i+1]].

    Vectorized over segments: iteration j adds the j-th term of every segment
    that still has one, so the loop runs max(segment length) times.
    """
    rows = len(indptr) - 1
    sums = np.zeros(rows, dtype=np.float64)
    carry = np.zeros(rows, dtype=np.float64)
    if rows == 0 or len(data) == 0:
        return sums
    starts = indptr[:-1]
    lengths = np.diff(indptr)
    longest = int(lengths.max())
    for j in range(longest):
        active = np.nonzero(lengths > j)[0]
        terms = data[starts[active] + j]
        current = sums[active]
        total = current + terms
        big = np.abs(current) >= np.abs(terms)
        error = np.where(big, (current - total) + terms, (terms - total) + current)
        sums[active] = total
        carry[active] += error
    return sums + carry
