"""
The block matrix A whose rows over R_m carry every sign pattern on C_m.

For m >= 1 let λ_m be the least t >= 0 with 2^t >= m!, α_m = λ_1 + ... + λ_m,
R_m = [m!, m! + 2^λ_m - 1] and C_m the members of I of ranks α_{m-1}+1..α_m.
Row n = m! + r of block m has entries of magnitude 1/m on C_m; bit j of r
(least significant first) gives the sign at the j-th column of C_m, 1 for +.
"""
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import List, Optional, Tuple
import logging

import numpy as np
from scipy import sparse

from app.core.errors import ArgumentError, ConstructionError
from app.models.matrices import EMPTY_ROW, Row, RowMatrix, csr_block
from app.models.sets import SetGen

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def lam(m: int) -> int:
    """Smallest t >= 0 with 2^t >= m!."""
    return (factorial(m) - 1).bit_length()


@lru_cache(maxsize=None)
def alpha(m: int) -> int:
    return sum(lam(i) for i in range(1, m + 1))


def block_rows(m: int) -> Tuple[int, int]:
    """R_m as an inclusive range."""
    lo = factorial(m)
    return lo, lo + 2 ** lam(m) - 1


def magnitude(m: int) -> Fraction:
    return Fraction(1, m)


class CounterexampleParams:
    def __init__(self, i_set: SetGen, max_block: int):
        if max_block < 2:
            raise ArgumentError(f"maxBlock must be at least 2, got {max_block}")
        self.i_set = i_set
        self.max_block = int(max_block)
        needed = alpha(self.max_block)
        try:
            self.columns = i_set.first(needed)
        except ConstructionError:
            raise ConstructionError(
                f"set {i_set.label} must supply alpha({self.max_block}) = {needed} members for the construction"
            )

    def __repr__(self) -> str:
        return f"CounterexampleParams({self.i_set.label!r}, {self.max_block})"

    def block_columns(self, m: int) -> np.ndarray:
        """C_m: the members of I with ranks alpha(m-1)+1 .. alpha(m)."""
        return self.columns[alpha(m - 1): alpha(m)]

    def blocks(self) -> range:
        return range(1, self.max_block + 1)

    def block_of_row(self, n: int) -> Optional[int]:
        for m in self.blocks():
            lo, hi = block_rows(m)
            if lo <= n <= hi:
                return m
            if n < lo:
                return None
        return None

    def last_row(self) -> int:
        return block_rows(self.max_block)[1]

    def to_json(self) -> dict:
        return {"iSet": self.i_set.label, "maxBlock": self.max_block}


def block_signs(m: int, offsets: np.ndarray) -> np.ndarray:
    """±1 sign matrix of the given row offsets of block m; one row per offset, one column per C_m member."""
    bits = (offsets[:, None] >> np.arange(lam(m), dtype=np.int64)) & 1
    return np.where(bits == 1, 1.0, -1.0)


class CounterexampleMatrix(RowMatrix):
    """Procedural A: rows outside R_1 ∪ ... ∪ R_maxBlock are zero."""

    def __init__(self, params: CounterexampleParams, label: Optional[str] = None):
        self.params = params
        super().__init__(label or f"counterexample-a:{params.i_set.label}:{params.max_block}")

    def row(self, n: int) -> Row:
        m = self.params.block_of_row(n)
        if m is None or lam(m) == 0:
            return EMPTY_ROW
        offset = np.array([n - block_rows(m)[0]], dtype=np.int64)
        signs = block_signs(m, offset)[0]
        return self.params.block_columns(m).copy(), signs * float(magnitude(m))

    def csr_rows(self, lo: int, hi: int) -> sparse.csr_matrix:
        lengths = np.zeros(hi - lo, dtype=np.int64)
        cols_parts: List[np.ndarray] = []
        vals_parts: List[np.ndarray] = []
        for m in self.params.blocks():
            first, last = block_rows(m)
            a, b = max(lo, first), min(hi - 1, last)
            if a > b or lam(m) == 0:
                continue
            offsets = np.arange(a - first, b - first + 1, dtype=np.int64)
            signs = block_signs(m, offsets) * float(magnitude(m))
            lengths[a - lo: b - lo + 1] = lam(m)
            cols_parts.append(np.tile(self.params.block_columns(m), len(offsets)))
            vals_parts.append(signs.ravel())
        if not cols_parts:
            return csr_block(lengths, EMPTY_ROW[0], EMPTY_ROW[1])
        return csr_block(lengths, np.concatenate(cols_parts), np.concatenate(vals_parts))

    def boundaries(self, upto: int) -> List[int]:
        return [block_rows(m)[1] for m in self.params.blocks() if block_rows(m)[1] <= upto]


class RSet(SetGen):
    """R = R_1 ∪ ... ∪ R_maxBlock, the row support of the construction."""

    declared_infinite = False

    def __init__(self, max_block: int, label: Optional[str] = None):
        self.max_block = int(max_block)
        super().__init__(label or f"R:{max_block}")

    def _build_mask(self, upto: int) -> np.ndarray:
        m = np.zeros(upto + 1, dtype=bool)
        for block in range(1, self.max_block + 1):
            lo, hi = block_rows(block)
            if lo > upto:
                break
            m[lo: min(hi, upto) + 1] = True
        return m

    def contains_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        out = np.zeros(ns.shape, dtype=bool)
        for block in range(1, self.max_block + 1):
            lo, hi = block_rows(block)
            out |= (ns >= lo) & (ns <= hi)
        return out

    def next_after(self, n: int) -> Optional[int]:
        for block in range(1, self.max_block + 1):
            lo, hi = block_rows(block)
            if n < lo:
                return lo
            if n < hi:
                return n + 1
        return None

    def boundaries(self, upto: int) -> List[int]:
        return [block_rows(m)[1] for m in range(1, self.max_block + 1) if block_rows(m)[1] <= upto]
