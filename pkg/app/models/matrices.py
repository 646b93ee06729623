"""
Row-finite infinite matrices.

A matrix is queried row by row (row) or as CSR blocks over row ranges
(csr_rows). All reductions stream over blocks of settings.ROW_CHUNK rows,
so a prefix of millions of rows never has to be held at once.
"""
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Optional, Tuple
import logging

import numpy as np
from scipy import sparse

from app.core.config import settings
from app.core.errors import ConstructionError
from app.models.sequences import LazySequence
from app.models.sets import SetGen
from app.utils.performance import parallel_map
from app.utils.summation import compensated_cumsum, compensated_sum, segmented_compensated_sum

logger = logging.getLogger(__name__)

Row = Tuple[np.ndarray, np.ndarray]

EMPTY_ROW: Row = (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.float64))


def csr_block(lengths: np.ndarray, cols: np.ndarray, vals: np.ndarray, ncols: Optional[int] = None) -> sparse.csr_matrix:
    """CSR block from per-row lengths and row-major (column, value) data with columns sorted inside rows."""
    lengths = np.asarray(lengths, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    indptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    if ncols is None:
        ncols = int(cols.max()) + 1 if len(cols) else 1
    return sparse.csr_matrix((vals, cols, indptr), shape=(len(lengths), ncols))


def widen(block: sparse.csr_matrix, ncols: int) -> sparse.csr_matrix:
    if block.shape[1] >= ncols:
        return block
    return sparse.csr_matrix((block.data, block.indices, block.indptr), shape=(block.shape[0], ncols))


class RowMatrix(ABC):
    """A = (a_{n,k}) with finite, sorted, duplicate-free row supports."""

    def __init__(self, label: str):
        self.label = label

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label!r})"

    @abstractmethod
    def row(self, n: int) -> Row:
        """Columns (increasing) and nonzero values of row n."""

    def csr_rows(self, lo: int, hi: int) -> sparse.csr_matrix:
        """Rows lo..hi-1 as a CSR block; block row i is matrix row lo + i."""
        rows = [self.row(n) for n in range(lo, hi)]
        lengths = np.array([len(cols) for cols, _ in rows], dtype=np.int64)
        if lengths.sum() == 0:
            return csr_block(lengths, EMPTY_ROW[0], EMPTY_ROW[1])
        cols = np.concatenate([cols for cols, _ in rows])
        vals = np.concatenate([vals for _, vals in rows])
        return csr_block(lengths, cols, vals)

    def csr(self, max_n: int) -> sparse.csr_matrix:
        """Rows 0..max_n; row 0 is empty."""
        block = self.csr_rows(1, max_n + 1)
        head = sparse.csr_matrix((1, block.shape[1]))
        return sparse.vstack([head, block], format="csr")

    def boundaries(self, upto: int) -> List[int]:
        """Row indices where block structure ends; used as extra checkpoints."""
        return []

    def row_chunks(self, max_n: int) -> List[Tuple[int, int]]:
        step = max(1, settings.ROW_CHUNK)
        return [(lo, min(lo + step, max_n + 1)) for lo in range(1, max_n + 1, step)]

    def _stream(self, max_n: int, reducer: Callable[[sparse.csr_matrix], np.ndarray], threads: Optional[int]) -> np.ndarray:
        chunks = self.row_chunks(max_n)
        parts = parallel_map(lambda bounds: reducer(self.csr_rows(*bounds)), chunks, threads)
        out = np.zeros(max_n + 1, dtype=np.float64)
        for (lo, hi), part in zip(chunks, parts):
            out[lo:hi] = part
        return out

    def row_abs_sums(self, max_n: int, columns: Optional[SetGen] = None, threads: Optional[int] = None) -> np.ndarray:
        """Σ_{k ∈ columns} |a_{n,k}| for n = 0..max_n (all columns when None)."""
        def reducer(block: sparse.csr_matrix) -> np.ndarray:
            data = np.abs(block.data)
            if columns is not None:
                data = np.where(columns.contains_array(block.indices), data, 0.0)
            return segmented_compensated_sum(data, block.indptr)

        return self._stream(max_n, reducer, threads)

    def row_sums(self, max_n: int, columns: Optional[SetGen] = None, threads: Optional[int] = None) -> np.ndarray:
        def reducer(block: sparse.csr_matrix) -> np.ndarray:
            data = block.data
            if columns is not None:
                data = np.where(columns.contains_array(block.indices), data, 0.0)
            return segmented_compensated_sum(data, block.indptr)

        return self._stream(max_n, reducer, threads)

    def apply(self, x: LazySequence, n: int) -> float:
        """(Ax)_n summed in increasing k with compensated summation."""
        cols, vals = self.row(n)
        if len(cols) == 0:
            return 0.0
        return compensated_sum((vals * x.values_at(cols)).tolist())

    def apply_prefix(self, x: LazySequence, max_n: int, threads: Optional[int] = None) -> np.ndarray:
        """(Ax)_n for n = 0..max_n."""
        def reducer(block: sparse.csr_matrix) -> np.ndarray:
            if block.nnz == 0:
                return np.zeros(block.shape[0], dtype=np.float64)
            return segmented_compensated_sum(block.data * x.values_at(block.indices), block.indptr)

        return self._stream(max_n, reducer, threads)

    def first_negative(self, max_n: int) -> Optional[Tuple[int, int]]:
        for lo, hi in self.row_chunks(max_n):
            block = self.csr_rows(lo, hi)
            negative = np.nonzero(block.data < 0)[0]
            if len(negative):
                position = int(negative[0])
                offset = int(np.searchsorted(block.indptr, position, side="right")) - 1
                return lo + offset, int(block.indices[position])
        return None

    def max_column(self, max_n: int) -> int:
        top = 0
        for lo, hi in self.row_chunks(max_n):
            block = self.csr_rows(lo, hi)
            if block.nnz:
                top = max(top, int(block.indices.max()))
        return top


class ExplicitMatrix(RowMatrix):
    """Rows given explicitly; absent rows are zero rows."""

    def __init__(self, rows: Dict[int, Row], label: str):
        checked: Dict[int, Row] = {}
        for n, (cols, vals) in rows.items():
            cols = np.asarray(cols, dtype=np.int64)
            vals = np.asarray(vals, dtype=np.float64)
            if len(cols) != len(vals):
                raise ConstructionError(f"row {n} of {label} has {len(cols)} columns and {len(vals)} values")
            if len(cols) and (cols[0] < 1 or np.any(np.diff(cols) <= 0)):
                raise ConstructionError(f"row {n} of {label} must have strictly increasing positive columns")
            keep = vals != 0
            checked[int(n)] = (cols[keep], vals[keep])
        self.rows = checked
        super().__init__(label)

    def row(self, n: int) -> Row:
        return self.rows.get(n, EMPTY_ROW)


class CesaroMatrix(RowMatrix):
    """a_{n,k} = 1/n for k <= n; row reductions use closed forms."""

    def __init__(self):
        super().__init__("cesaro")

    def row(self, n: int) -> Row:
        return np.arange(1, n + 1, dtype=np.int64), np.full(n, 1.0 / n)

    def csr_rows(self, lo: int, hi: int) -> sparse.csr_matrix:
        ns = np.arange(lo, hi, dtype=np.int64)
        if int(ns.sum()) > settings.DENSE_ROW_LIMIT:
            raise ConstructionError(
                f"cesaro rows {lo}..{hi - 1} hold {int(ns.sum())} entries, above {settings.DENSE_ROW_LIMIT}"
            )
        cols = np.concatenate([np.arange(1, n + 1) for n in ns.tolist()]) if len(ns) else EMPTY_ROW[0]
        vals = np.repeat(1.0 / ns, ns)
        return csr_block(ns, cols, vals, ncols=hi)

    def row_abs_sums(self, max_n: int, columns: Optional[SetGen] = None, threads: Optional[int] = None) -> np.ndarray:
        return self.row_sums(max_n, columns, threads)

    def row_sums(self, max_n: int, columns: Optional[SetGen] = None, threads: Optional[int] = None) -> np.ndarray:
        n = np.arange(max_n + 1, dtype=np.float64)
        n[0] = 1.0
        if columns is None:
            out = np.ones(max_n + 1, dtype=np.float64)
        else:
            out = columns.counts(max_n).astype(np.float64) / n
        out[0] = 0.0
        return out

    def apply_prefix(self, x: LazySequence, max_n: int, threads: Optional[int] = None) -> np.ndarray:
        n = np.arange(1, max_n + 1, dtype=np.float64)
        out = np.zeros(max_n + 1, dtype=np.float64)
        out[1:] = compensated_cumsum(x.prefix(max_n)[1:]) / n
        return out

    def first_negative(self, max_n: int) -> Optional[Tuple[int, int]]:
        return None

    def max_column(self, max_n: int) -> int:
        return max_n


class IdentityMatrix(RowMatrix):
    def __init__(self):
        super().__init__("identity")

    def row(self, n: int) -> Row:
        return np.array([n], dtype=np.int64), np.array([1.0])

    def csr_rows(self, lo: int, hi: int) -> sparse.csr_matrix:
        ns = np.arange(lo, hi, dtype=np.int64)
        return csr_block(np.ones(len(ns), dtype=np.int64), ns, np.ones(len(ns)))


class DiagonalMatrix(RowMatrix):
    """diag(s): a_{n,n} = s_n."""

    def __init__(self, s: LazySequence):
        self.s = s
        super().__init__(f"diag:{s.label}")

    def row(self, n: int) -> Row:
        value = self.s.value(n)
        if value == 0:
            return EMPTY_ROW
        return np.array([n], dtype=np.int64), np.array([value])

    def csr_rows(self, lo: int, hi: int) -> sparse.csr_matrix:
        ns = np.arange(lo, hi, dtype=np.int64)
        vals = self.s.values_at(ns)
        keep = vals != 0
        return csr_block(keep.astype(np.int64), ns[keep], vals[keep], ncols=hi)

    def boundaries(self, upto: int) -> List[int]:
        return self.s.boundaries(upto)


class PermutationMatrix(RowMatrix):
    """A_σ: a_{n,k} = 1 iff σ^{-1}(n) = k, so (A_σ x)_n = x_{σ^{-1}(n)}."""

    def __init__(self, sigma):
        self.sigma = sigma
        super().__init__(f"perm:{sigma.label}")

    def row(self, n: int) -> Row:
        return np.array([self.sigma.inverse(n)], dtype=np.int64), np.array([1.0])

    def csr_rows(self, lo: int, hi: int) -> sparse.csr_matrix:
        ns = np.arange(lo, hi, dtype=np.int64)
        cols = self.sigma.inverse_array(ns)
        return csr_block(np.ones(len(ns), dtype=np.int64), cols, np.ones(len(ns)))

    def boundaries(self, upto: int) -> List[int]:
        return self.sigma.boundaries(upto)


class PickNthMatrix(RowMatrix):
    """Row n is the unit vector at the n-th member of a set."""

    def __init__(self, members: SetGen):
        self.members = members
        super().__init__(f"pick-nth:{members.label}")

    def row(self, n: int) -> Row:
        return np.array([self.members.nth(n)], dtype=np.int64), np.array([1.0])

    def csr_rows(self, lo: int, hi: int) -> sparse.csr_matrix:
        cols = self.members.first(hi - 1)[lo - 1:]
        return csr_block(np.ones(len(cols), dtype=np.int64), cols, np.ones(len(cols)))


class SplitPairMatrix(RowMatrix):
    """Row n holds +1/2 at the (2n-1)-th and -1/2 at the 2n-th member of a set."""

    def __init__(self, members: SetGen):
        self.members = members
        super().__init__(f"split-pair:{members.label}")

    def row(self, n: int) -> Row:
        pair = self.members.first(2 * n)[2 * n - 2:]
        return pair.astype(np.int64), np.array([0.5, -0.5])

    def csr_rows(self, lo: int, hi: int) -> sparse.csr_matrix:
        cols = self.members.first(2 * (hi - 1))[2 * (lo - 1):]
        count = hi - lo
        vals = np.tile([0.5, -0.5], count)
        return csr_block(np.full(count, 2, dtype=np.int64), cols, vals)


class SumMatrix(RowMatrix):
    """Entrywise sum; supports are merged and cancelled entries dropped."""

    def __init__(self, left: RowMatrix, right: RowMatrix, label: Optional[str] = None):
        self.left = left
        self.right = right
        super().__init__(label or f"sum:{left.label}+{right.label}")

    def row(self, n: int) -> Row:
        merged: Dict[int, float] = {}
        for cols, vals in (self.left.row(n), self.right.row(n)):
            for k, v in zip(cols.tolist(), vals.tolist()):
                merged[k] = merged.get(k, 0.0) + v
        keys = sorted(k for k, v in merged.items() if v != 0)
        return np.array(keys, dtype=np.int64), np.array([merged[k] for k in keys], dtype=np.float64)

    def csr_rows(self, lo: int, hi: int) -> sparse.csr_matrix:
        a = self.left.csr_rows(lo, hi)
        b = self.right.csr_rows(lo, hi)
        ncols = max(a.shape[1], b.shape[1])
        total = (widen(a, ncols) + widen(b, ncols)).tocsr()
        total.eliminate_zeros()
        total.sort_indices()
        return total

    def boundaries(self, upto: int) -> List[int]:
        return sorted(set(self.left.boundaries(upto)) | set(self.right.boundaries(upto)))
