"""
Subsets of the positive integers, queried through finite prefixes.

Every set answers prefix questions (mask, counts, members) over [1, upto]
with numpy arrays indexed 1..upto; slot 0 is always False. Structured sets
also answer membership for arbitrary integers without materializing a
prefix, which lets permutation images be tested far beyond the mask range.
"""
from abc import ABC, abstractmethod
from math import factorial
from typing import Iterable, List, Optional, Tuple
import logging

import numpy as np

from app.core.errors import ArgumentError, ConstructionError, RangeError
from app.utils.performance import PrefixCache

logger = logging.getLogger(__name__)

# Largest prefix a search for members may materialize.
MAX_SEARCH = 2 ** 26


def integer_root(ns: np.ndarray, exponent: int) -> np.ndarray:
    """Exact floor of the exponent-th root for int64 arrays."""
    ns = np.asarray(ns, dtype=np.int64)
    roots = np.floor(np.power(np.maximum(ns, 0).astype(np.float64), 1.0 / exponent)).astype(np.int64)
    roots -= (roots ** exponent > ns).astype(np.int64)
    roots += ((roots + 1) ** exponent <= ns).astype(np.int64)
    return roots


class SetGen(ABC):
    """
    Increasing enumeration of a subset of the positive integers.

    declared_infinite is True for sets known to be infinite, False for
    finite ones and None when only data is available.
    """

    declared_infinite: Optional[bool] = None

    def __init__(self, label: str):
        self.label = label
        self._cache = PrefixCache()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label!r})"

    @abstractmethod
    def _build_mask(self, upto: int) -> np.ndarray:
        pass

    def mask(self, upto: int) -> np.ndarray:
        upto = max(int(upto), 0)
        return self._cache.get_or_build("mask", upto, self._build_mask, lambda m, b: m[: b + 1])

    def counts(self, upto: int) -> np.ndarray:
        """counts[n] = |S ∩ [1, n]| for 0 <= n <= upto, exact integers."""
        def build(bound: int) -> np.ndarray:
            return np.cumsum(self.mask(bound), dtype=np.int64)

        return self._cache.get_or_build("counts", max(int(upto), 0), build, lambda c, b: c[: b + 1])

    def count_upto(self, n: int) -> int:
        if n < 1:
            return 0
        return int(self.counts(n)[n])

    def rank(self, n: int) -> int:
        return self.count_upto(n)

    def members(self, upto: int) -> np.ndarray:
        return np.nonzero(self.mask(upto))[0].astype(np.int64)

    def contains(self, n: int) -> bool:
        return bool(self.contains_array(np.array([n], dtype=np.int64))[0])

    def contains_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        out = np.zeros(ns.shape, dtype=bool)
        if ns.size == 0:
            return out
        top = int(ns.max())
        if top < 1:
            return out
        if top > MAX_SEARCH:
            raise RangeError(f"membership of {self.label} at {top} needs a prefix beyond {MAX_SEARCH}")
        prefix = self.mask(top)
        valid = ns >= 1
        out[valid] = prefix[ns[valid]]
        return out

    def next_after(self, n: int) -> Optional[int]:
        """First member greater than n, searching by doubling; None when none is found."""
        span = max(64, n)
        while n + span <= MAX_SEARCH:
            window = self.mask(n + span)[n + 1:]
            hits = np.nonzero(window)[0]
            if len(hits):
                return int(n + 1 + hits[0])
            if self.declared_infinite is False:
                return None
            span *= 2
        return None

    def first(self, count: int) -> np.ndarray:
        """The first count members i_1 < ... < i_count."""
        if count <= 0:
            return np.zeros(0, dtype=np.int64)
        upto = max(16, 2 * count)
        while self.count_upto(upto) < count:
            if upto >= MAX_SEARCH or self.declared_infinite is False:
                raise ConstructionError(
                    f"set {self.label} has fewer than {count} members below {upto}; {count} are needed"
                )
            upto = min(upto * 2, MAX_SEARCH)
        return self.members(upto)[:count]

    def nth(self, j: int) -> int:
        return int(self.first(j)[-1])

    def boundaries(self, upto: int) -> List[int]:
        """Indices where the counting ratio of this set peaks (block ends)."""
        return []


class FiniteSet(SetGen):
    declared_infinite = False

    def __init__(self, values: Iterable[int], label: Optional[str] = None):
        array = np.asarray(sorted(set(int(v) for v in values)), dtype=np.int64)
        if len(array) and array[0] < 1:
            raise ArgumentError(f"set members must be positive integers, got {array[0]}")
        self.values = array
        if label is None:
            label = "finite:" + ",".join(str(v) for v in array.tolist())
        super().__init__(label)

    def _build_mask(self, upto: int) -> np.ndarray:
        m = np.zeros(upto + 1, dtype=bool)
        m[self.values[self.values <= upto]] = True
        return m

    def contains_array(self, ns) -> np.ndarray:
        return np.isin(np.asarray(ns, dtype=np.int64), self.values)

    def next_after(self, n: int) -> Optional[int]:
        idx = int(np.searchsorted(self.values, n, side="right"))
        return int(self.values[idx]) if idx < len(self.values) else None

    def first(self, count: int) -> np.ndarray:
        if count > len(self.values):
            raise ConstructionError(f"set {self.label} has {len(self.values)} members; {count} are needed")
        return self.values[:count]


class EmptySet(FiniteSet):
    def __init__(self):
        super().__init__([], label="empty")


class RangeSet(SetGen):
    declared_infinite = False

    def __init__(self, lo: int, hi: int, label: Optional[str] = None):
        if lo < 1 or hi < lo:
            raise ArgumentError(f"range needs 1 <= lo <= hi, got {lo}, {hi}")
        self.lo = int(lo)
        self.hi = int(hi)
        super().__init__(label or f"range:{lo},{hi}")

    def _build_mask(self, upto: int) -> np.ndarray:
        m = np.zeros(upto + 1, dtype=bool)
        m[self.lo: min(self.hi, upto) + 1] = True
        return m

    def contains_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        return (ns >= self.lo) & (ns <= self.hi)

    def next_after(self, n: int) -> Optional[int]:
        if n < self.lo:
            return self.lo
        return n + 1 if n + 1 <= self.hi else None

    def first(self, count: int) -> np.ndarray:
        if count > self.hi - self.lo + 1:
            raise ConstructionError(f"set {self.label} has {self.hi - self.lo + 1} members; {count} are needed")
        return np.arange(self.lo, self.lo + count, dtype=np.int64)


class ArithmeticProgression(SetGen):
    """Positive integers n with n ≡ offset (mod step)."""

    declared_infinite = True

    def __init__(self, step: int, offset: int, label: Optional[str] = None):
        if step < 1:
            raise ArgumentError(f"progression step must be positive, got {step}")
        self.step = int(step)
        self.residue = int(offset) % self.step
        self.start = self.residue if self.residue > 0 else self.step
        super().__init__(label or f"ap:{step},{offset}")

    def _build_mask(self, upto: int) -> np.ndarray:
        m = np.zeros(upto + 1, dtype=bool)
        m[self.start::self.step] = True
        return m

    def contains_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        return (ns >= 1) & (ns % self.step == self.residue)

    def next_after(self, n: int) -> Optional[int]:
        if n < self.start:
            return self.start
        return self.start + ((n - self.start) // self.step + 1) * self.step

    def first(self, count: int) -> np.ndarray:
        return self.start + self.step * np.arange(count, dtype=np.int64)


def evens() -> ArithmeticProgression:
    return ArithmeticProgression(2, 0, label="evens")


def odds() -> ArithmeticProgression:
    return ArithmeticProgression(2, 1, label="odds")


def all_integers() -> ArithmeticProgression:
    return ArithmeticProgression(1, 0, label="all")


class PowerSet(SetGen):
    """Perfect powers k**exponent, k >= 1."""

    declared_infinite = True

    def __init__(self, exponent: int, label: Optional[str] = None):
        self.exponent = int(exponent)
        super().__init__(label or f"powers:{exponent}")

    def _build_mask(self, upto: int) -> np.ndarray:
        m = np.zeros(upto + 1, dtype=bool)
        top = int(integer_root(np.array([upto]), self.exponent)[0])
        m[np.arange(1, top + 1, dtype=np.int64) ** self.exponent] = True
        return m

    def contains_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        roots = integer_root(ns, self.exponent)
        return (ns >= 1) & (roots ** self.exponent == ns)

    def next_after(self, n: int) -> Optional[int]:
        root = int(integer_root(np.array([max(n, 0)]), self.exponent)[0])
        return (root + 1) ** self.exponent

    def first(self, count: int) -> np.ndarray:
        return np.arange(1, count + 1, dtype=np.int64) ** self.exponent


def squares() -> PowerSet:
    return PowerSet(2, label="squares")


def cubes() -> PowerSet:
    return PowerSet(3, label="cubes")


class FactorialBlocks(SetGen):
    """
    Union of the blocks [(4k)!, (4k+1)!) for k >= 1.

    With S_k = [(2k)!, (2k+1)!) this is the union of the even-indexed S_{2k};
    the k = 0 block is empty.
    """

    declared_infinite = True

    def __init__(self, label: str = "factorial-blocks"):
        super().__init__(label)

    @staticmethod
    def blocks_upto(upto: int) -> List[Tuple[int, int]]:
        blocks = []
        k = 1
        while factorial(4 * k) <= upto:
            blocks.append((factorial(4 * k), factorial(4 * k + 1) - 1))
            k += 1
        return blocks

    def _build_mask(self, upto: int) -> np.ndarray:
        m = np.zeros(upto + 1, dtype=bool)
        for lo, hi in self.blocks_upto(upto):
            m[lo: min(hi, upto) + 1] = True
        return m

    def contains_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        out = np.zeros(ns.shape, dtype=bool)
        if ns.size == 0:
            return out
        for lo, hi in self.blocks_upto(int(ns.max())):
            out |= (ns >= lo) & (ns <= hi)
        return out

    def next_after(self, n: int) -> Optional[int]:
        k = 1
        while True:
            lo, hi = factorial(4 * k), factorial(4 * k + 1) - 1
            if n < lo:
                return lo
            if n < hi:
                return n + 1
            k += 1

    def boundaries(self, upto: int) -> List[int]:
        points = []
        for lo, hi in self.blocks_upto(upto):
            points.extend([lo - 1, min(hi, upto)])
        return [p for p in points if p >= 1]


class Complement(SetGen):
    def __init__(self, inner: SetGen, label: Optional[str] = None):
        self.inner = inner
        self.declared_infinite = True if inner.declared_infinite is False else None
        super().__init__(label or f"complement:{inner.label}")

    def _build_mask(self, upto: int) -> np.ndarray:
        m = ~self.inner.mask(upto)
        m[0] = False
        return m

    def contains_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        return (ns >= 1) & ~self.inner.contains_array(ns)

    def boundaries(self, upto: int) -> List[int]:
        return self.inner.boundaries(upto)


class Union(SetGen):
    def __init__(self, left: SetGen, right: SetGen, label: Optional[str] = None):
        self.left = left
        self.right = right
        if left.declared_infinite or right.declared_infinite:
            self.declared_infinite = True
        elif left.declared_infinite is False and right.declared_infinite is False:
            self.declared_infinite = False
        else:
            self.declared_infinite = None
        super().__init__(label or f"union:{left.label}|{right.label}")

    def _build_mask(self, upto: int) -> np.ndarray:
        return self.left.mask(upto) | self.right.mask(upto)

    def contains_array(self, ns) -> np.ndarray:
        return self.left.contains_array(ns) | self.right.contains_array(ns)

    def next_after(self, n: int) -> Optional[int]:
        candidates = [c for c in (self.left.next_after(n), self.right.next_after(n)) if c is not None]
        return min(candidates) if candidates else None

    def boundaries(self, upto: int) -> List[int]:
        return sorted(set(self.left.boundaries(upto)) | set(self.right.boundaries(upto)))


class DataSet(SetGen):
    """A set known only on the prefix it was computed from."""

    declared_infinite = None

    def __init__(self, mask: np.ndarray, label: str, boundaries: Iterable[int] = ()):
        data = np.asarray(mask, dtype=bool).copy()
        if len(data):
            data[0] = False
        self.data = data
        self.limit = len(data) - 1
        self._boundaries = sorted(int(b) for b in boundaries)
        super().__init__(label)

    def _build_mask(self, upto: int) -> np.ndarray:
        if upto > self.limit:
            raise RangeError(f"set {self.label} is only known up to {self.limit}, asked for {upto}")
        return self.data[: upto + 1]

    def contains_array(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size and int(ns.max()) > self.limit:
            raise RangeError(f"set {self.label} is only known up to {self.limit}, asked for {int(ns.max())}")
        return super().contains_array(ns)

    def next_after(self, n: int) -> Optional[int]:
        hits = np.nonzero(self.data[n + 1:])[0] if n + 1 <= self.limit else []
        return int(n + 1 + hits[0]) if len(hits) else None

    def boundaries(self, upto: int) -> List[int]:
        return [b for b in self._boundaries if b <= upto]
