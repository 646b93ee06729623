from abc import ABC, abstractmethod
from typing import List, Optional
import logging

import numpy as np

from app.core.errors import ConsistencyError, InputFileError, RangeError
from app.models.sets import integer_root

logger = logging.getLogger(__name__)

SPOT_CHECKS = 64


def bit_length(ns: np.ndarray) -> np.ndarray:
    """Exact bit length for positive int64 arrays below 2**53."""
    return np.frexp(np.asarray(ns, dtype=np.float64))[1].astype(np.int64)


class Permutation(ABC):
    """
    Bijection σ of the positive integers with vectorized forward and inverse maps.

    limit is None for permutations of all of N and the range size for
    file-backed ones.
    """

    limit: Optional[int] = None

    def __init__(self, label: str):
        self.label = label

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label!r})"

    @abstractmethod
    def _forward(self, ns: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def _inverse(self, ns: np.ndarray) -> np.ndarray:
        pass

    def _checked_range(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size and self.limit is not None and int(ns.max()) > self.limit:
            raise RangeError(f"permutation {self.label} is defined on [1, {self.limit}], asked for {int(ns.max())}")
        return ns

    def forward_array(self, ns) -> np.ndarray:
        return self._forward(self._checked_range(ns))

    def inverse_array(self, ns) -> np.ndarray:
        ns = self._checked_range(ns)
        result = self._inverse(ns)
        self.spot_check(ns, result)
        return result

    def forward(self, n: int) -> int:
        return int(self.forward_array(np.array([n]))[0])

    def inverse(self, n: int) -> int:
        return int(self.inverse_array(np.array([n]))[0])

    def spot_check(self, ns: np.ndarray, inverses: np.ndarray) -> None:
        """σ(σ^{-1}(n)) = n on an evenly spaced sample of the evaluated points."""
        if ns.size == 0:
            return
        step = max(1, ns.size // SPOT_CHECKS)
        sample = ns[::step]
        back = self._forward(inverses[::step])
        if not np.array_equal(back, sample):
            bad = int(sample[np.nonzero(back != sample)[0][0]])
            raise ConsistencyError(f"permutation {self.label}: forward(inverse({bad})) != {bad}")

    def boundaries(self, upto: int) -> List[int]:
        return []


class IdentityPermutation(Permutation):
    def __init__(self):
        super().__init__("identity")

    def _forward(self, ns: np.ndarray) -> np.ndarray:
        return ns.copy()

    def _inverse(self, ns: np.ndarray) -> np.ndarray:
        return ns.copy()


class PairSwap(Permutation):
    """2k-1 <-> 2k."""

    def __init__(self):
        super().__init__("pair-swap")

    def _forward(self, ns: np.ndarray) -> np.ndarray:
        return np.where(ns % 2 == 1, ns + 1, ns - 1)

    _inverse = _forward


class BlockSwap(Permutation):
    """
    For every even j, 2^j + i <-> 2^(j+1) + i for 0 <= i < 2^j; other points are fixed.

    Self-inverse with σ̂ in [1/2, 2], but half of every prefix ending at
    2^(j+1) - 1 (j even) escapes it.
    """

    def __init__(self):
        super().__init__("block-swap")

    def _forward(self, ns: np.ndarray) -> np.ndarray:
        j = bit_length(ns) - 1
        low = np.left_shift(np.int64(1), j)
        i = ns - low
        out = ns.copy()
        up = j % 2 == 0
        out[up] = 2 * low[up] + i[up]
        down = (j % 2 == 1) & (i < low // 2)
        out[down] = low[down] // 2 + i[down]
        return out

    _inverse = _forward

    def boundaries(self, upto: int) -> List[int]:
        points = []
        power = 1
        while power <= upto:
            points.extend([power - 1, power])
            power *= 2
        return [p for p in points if 1 <= p <= upto]


class BlockReverse(Permutation):
    """Reverses every dyadic block: σ(n) = 3·2^j - 1 - n on [2^j, 2^(j+1))."""

    def __init__(self):
        super().__init__("block-reverse")

    def _forward(self, ns: np.ndarray) -> np.ndarray:
        low = np.left_shift(np.int64(1), bit_length(ns) - 1)
        return 3 * low - 1 - ns

    _inverse = _forward


class SquaresEvens(Permutation):
    """
    σ(k²) = 2k and σ(i-th nonsquare) = 2i - 1.

    Maps the squares onto the evens, so a density-zero set is sent to a set
    of density one half, and σ̂ → 0 along the evens.
    """

    def __init__(self):
        super().__init__("squares-evens")

    def _forward(self, ns: np.ndarray) -> np.ndarray:
        roots = integer_root(ns, 2)
        square = roots * roots == ns
        return np.where(square, 2 * roots, 2 * (ns - roots) - 1)

    def _inverse(self, ns: np.ndarray) -> np.ndarray:
        half = ns // 2
        i = (ns + 1) // 2
        k = integer_root(i, 2)
        nonsquare = i + k + (i > k * k + k).astype(np.int64)
        return np.where(ns % 2 == 0, half * half, nonsquare)


class ExplicitPermutation(Permutation):
    """A bijection of [1, N] given by its forward table."""

    def __init__(self, forward: np.ndarray, label: str):
        table = np.asarray(forward, dtype=np.int64)
        size = len(table)
        if size == 0:
            raise InputFileError(f"permutation {label} is empty")
        seen = np.zeros(size + 1, dtype=np.int64)
        out_of_range = np.nonzero((table < 1) | (table > size))[0]
        if len(out_of_range):
            n = int(out_of_range[0]) + 1
            raise InputFileError(f"permutation {label}: value {int(table[n - 1])} at n={n} is outside [1, {size}]")
        np.add.at(seen, table, 1)
        repeated = np.nonzero(seen[1:] > 1)[0]
        if len(repeated):
            raise InputFileError(f"permutation {label}: value {int(repeated[0]) + 1} appears more than once")
        self.table = np.concatenate([[0], table])
        self.inverse_table = np.zeros(size + 1, dtype=np.int64)
        self.inverse_table[table] = np.arange(1, size + 1)
        self.limit = size
        super().__init__(label)

    def _forward(self, ns: np.ndarray) -> np.ndarray:
        return self.table[ns]

    def _inverse(self, ns: np.ndarray) -> np.ndarray:
        return self.inverse_table[ns]
