from abc import ABC, abstractmethod
from typing import Optional
import logging

import numpy as np

from app.core.errors import DomainError, RangeError
from app.models.sets import FactorialBlocks, SetGen
from app.utils.performance import PrefixCache

logger = logging.getLogger(__name__)


class WeightFn(ABC):
    """Positive weight n -> g(n) used as the denominator of a density."""

    def __init__(self, label: str):
        self.label = label
        self._cache = PrefixCache()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label!r})"

    @abstractmethod
    def _build_values(self, upto: int) -> np.ndarray:
        pass

    def values(self, upto: int) -> np.ndarray:
        """g(0..upto) as float64; slot 0 is set to 1 and never read."""
        return self._cache.get_or_build("values", int(upto), self._build_values, lambda v, b: v[: b + 1])

    def at(self, n: int) -> float:
        return float(self.values(n)[n])

    def validated(self, upto: int) -> np.ndarray:
        """values(upto) after checking g(n) > 0 on [1, upto]."""
        values = self.values(upto)
        bad = np.nonzero(values[1:] <= 0)[0]
        if len(bad):
            n = int(bad[0]) + 1
            raise DomainError(f"weight {self.label} is not positive at n={n}", n=n)
        return values


class LinearWeight(WeightFn):
    def __init__(self):
        super().__init__("n")

    def _build_values(self, upto: int) -> np.ndarray:
        values = np.arange(upto + 1, dtype=np.float64)
        values[0] = 1.0
        return values


class PowerWeight(WeightFn):
    def __init__(self, exponent: int = 2):
        self.exponent = exponent
        super().__init__(f"n{exponent}")

    def _build_values(self, upto: int) -> np.ndarray:
        values = np.arange(upto + 1, dtype=np.float64) ** self.exponent
        values[0] = 1.0
        return values


class NLogWeight(WeightFn):
    """g(n) = n log(n + 1)."""

    def __init__(self):
        super().__init__("nlog")

    def _build_values(self, upto: int) -> np.ndarray:
        n = np.arange(upto + 1, dtype=np.float64)
        values = n * np.log(n + 1.0)
        values[0] = 1.0
        return values


class PiecewiseWeight(WeightFn):
    """g(n) = n**2 on the given set and n elsewhere."""

    def __init__(self, on: Optional[SetGen] = None):
        self.on = on if on is not None else FactorialBlocks()
        super().__init__(f"piecewise:{self.on.label}")

    def _build_values(self, upto: int) -> np.ndarray:
        n = np.arange(upto + 1, dtype=np.float64)
        values = np.where(self.on.mask(upto), n * n, n)
        values[0] = 1.0
        return values


class TableWeight(WeightFn):
    """Tabulated weight, defined on 1..len(table)."""

    def __init__(self, table: np.ndarray, label: str):
        data = np.asarray(table, dtype=np.float64)
        self.table = np.concatenate([[1.0], data])
        self.limit = len(data)
        super().__init__(label)

    def _build_values(self, upto: int) -> np.ndarray:
        if upto > self.limit:
            raise RangeError(f"weight {self.label} is tabulated up to {self.limit}, asked for {upto}")
        return self.table[: upto + 1]
