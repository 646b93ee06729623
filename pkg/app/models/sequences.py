"""
Real sequences evaluated on finite prefixes.

prefix(max_n) returns x_0..x_max_n as float64 with x_0 = 0 unused. When a
declared bound is present every materialized prefix is checked against it.
"""
from abc import ABC, abstractmethod
from typing import Iterable, List, Optional
import logging

import numpy as np

from app.core.errors import BoundError, RangeError
from app.models.sets import SetGen
from app.utils.performance import PrefixCache

logger = logging.getLogger(__name__)


class LazySequence(ABC):
    def __init__(self, label: str, declared_bound: Optional[float] = None):
        self.label = label
        self.declared_bound = declared_bound
        self._cache = PrefixCache()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label!r})"

    @abstractmethod
    def _compute(self, max_n: int) -> np.ndarray:
        pass

    def _checked(self, max_n: int) -> np.ndarray:
        values = np.asarray(self._compute(max_n), dtype=np.float64)
        values[0] = 0.0
        self._check_bound(values, 0)
        return values

    def _check_bound(self, values: np.ndarray, offset: int) -> None:
        if self.declared_bound is None:
            return
        bad = np.nonzero(np.abs(values) > self.declared_bound)[0]
        if len(bad):
            index = int(bad[0]) + offset
            value = float(values[bad[0]])
            raise BoundError(
                f"sequence {self.label} breaks its bound {self.declared_bound:g} at n={index} (value {value:g})",
                index=index,
                value=value,
            )

    def prefix(self, max_n: int) -> np.ndarray:
        return self._cache.get_or_build("prefix", int(max_n), self._checked, lambda v, b: v[: b + 1])

    def values_at(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size == 0:
            return np.zeros(0, dtype=np.float64)
        return self.prefix(int(ns.max()))[ns]

    def value(self, n: int) -> float:
        return float(self.values_at(np.array([n]))[0])

    def boundaries(self, upto: int) -> List[int]:
        return []


class ConstantSequence(LazySequence):
    def __init__(self, constant: float):
        self.constant = float(constant)
        super().__init__(f"const:{constant:g}", abs(self.constant))

    def _compute(self, max_n: int) -> np.ndarray:
        return np.full(max_n + 1, self.constant, dtype=np.float64)

    def values_at(self, ns) -> np.ndarray:
        return np.full(np.asarray(ns).shape, self.constant, dtype=np.float64)


class IndicatorSequence(LazySequence):
    """1_E; membership is answered by the set, so no prefix is built for sparse lookups."""

    def __init__(self, members: SetGen):
        self.members = members
        super().__init__(f"indicator:{members.label}", 1.0)

    def _compute(self, max_n: int) -> np.ndarray:
        return self.members.mask(max_n).astype(np.float64)

    def values_at(self, ns) -> np.ndarray:
        return self.members.contains_array(ns).astype(np.float64)

    def boundaries(self, upto: int) -> List[int]:
        return self.members.boundaries(upto)


class AffineSequence(LazySequence):
    """a * x + b."""

    def __init__(self, a: float, b: float, inner: LazySequence, label: Optional[str] = None):
        self.a = float(a)
        self.b = float(b)
        self.inner = inner
        bound = None
        if inner.declared_bound is not None:
            bound = abs(self.a) * inner.declared_bound + abs(self.b)
        super().__init__(label or f"affine:{a:g},{b:g},{inner.label}", bound)

    def _compute(self, max_n: int) -> np.ndarray:
        return self.a * self.inner.prefix(max_n) + self.b

    def values_at(self, ns) -> np.ndarray:
        return self.a * self.inner.values_at(ns) + self.b

    def boundaries(self, upto: int) -> List[int]:
        return self.inner.boundaries(upto)


class AlternatingSequence(LazySequence):
    """(-1)^n"""

    def __init__(self):
        super().__init__("alt", 1.0)

    def _compute(self, max_n: int) -> np.ndarray:
        n = np.arange(max_n + 1)
        return np.where(n % 2 == 0, 1.0, -1.0)


class AlternatingHarmonicSequence(LazySequence):
    """(-1)^n / n"""

    def __init__(self):
        super().__init__("alt-harmonic", 1.0)

    def _compute(self, max_n: int) -> np.ndarray:
        n = np.arange(max_n + 1, dtype=np.float64)
        n[0] = 1.0
        return np.where(np.arange(max_n + 1) % 2 == 0, 1.0, -1.0) / n


class AbsSequence(LazySequence):
    def __init__(self, inner: LazySequence):
        self.inner = inner
        super().__init__(f"abs:{inner.label}", inner.declared_bound)

    def _compute(self, max_n: int) -> np.ndarray:
        return np.abs(self.inner.prefix(max_n))

    def values_at(self, ns) -> np.ndarray:
        return np.abs(self.inner.values_at(ns))


class MaskedSequence(LazySequence):
    """s * 1_E: vanishes off E."""

    def __init__(self, members: SetGen, inner: LazySequence):
        self.members = members
        self.inner = inner
        super().__init__(f"mul:{members.label},{inner.label}", inner.declared_bound)

    def _compute(self, max_n: int) -> np.ndarray:
        return np.where(self.members.mask(max_n), self.inner.prefix(max_n), 0.0)

    def values_at(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        return np.where(self.members.contains_array(ns), self.inner.values_at(ns), 0.0)

    def boundaries(self, upto: int) -> List[int]:
        return self.members.boundaries(upto)


class SquaresDiagonalSequence(LazySequence):
    """n on the squares, 1 elsewhere; unbounded, so no bound is declared."""

    def __init__(self, squares_set: SetGen):
        self.squares_set = squares_set
        super().__init__("sqdiag", None)

    def _compute(self, max_n: int) -> np.ndarray:
        n = np.arange(max_n + 1, dtype=np.float64)
        return np.where(self.squares_set.mask(max_n), n, 1.0)

    def values_at(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        return np.where(self.squares_set.contains_array(ns), ns.astype(np.float64), 1.0)


class ArraySequence(LazySequence):
    """A sequence known on 1..len(values): file contents or computed data such as row sums."""

    def __init__(self, values: np.ndarray, label: str, declared_bound: Optional[float] = None, one_based: bool = True):
        data = np.asarray(values, dtype=np.float64)
        if not one_based:
            data = np.concatenate([[0.0], data])
        self.data = data.copy()
        self.data[0] = 0.0
        self.limit = len(self.data) - 1
        super().__init__(label, declared_bound)

    def _compute(self, max_n: int) -> np.ndarray:
        if max_n > self.limit:
            raise RangeError(f"sequence {self.label} is only known up to {self.limit}, asked for {max_n}")
        return self.data[: max_n + 1].copy()

    def values_at(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size and int(ns.max()) > self.limit:
            raise RangeError(f"sequence {self.label} is only known up to {self.limit}, asked for {int(ns.max())}")
        if self.declared_bound is not None:
            self.prefix(self.limit)
        return self.data[ns]


class SignSequence(LazySequence):
    """
    A ±1 sequence supported on a set: +1 on the given columns, -1 on the rest of the set, 0 off it.
    """

    def __init__(self, support: SetGen, plus_columns: Iterable[int], label: Optional[str] = None):
        self.support = support
        self.plus_columns = np.asarray(sorted(set(int(c) for c in plus_columns)), dtype=np.int64)
        super().__init__(label or f"signs:{support.label}", 1.0)

    def _compute(self, max_n: int) -> np.ndarray:
        values = np.where(self.support.mask(max_n), -1.0, 0.0)
        plus = self.plus_columns[self.plus_columns <= max_n]
        values[plus] = 1.0
        return values

    def values_at(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        values = np.where(self.support.contains_array(ns), -1.0, 0.0)
        return np.where(np.isin(ns, self.plus_columns), 1.0, values)
