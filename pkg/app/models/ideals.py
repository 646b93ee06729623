from dataclasses import dataclass
from enum import Enum
from typing import Optional

from app.core.errors import ArgumentError
from app.models.weights import LinearWeight, WeightFn


class IdealKind(str, Enum):
    FIN = "fin"
    ASYMPTOTIC_ZERO = "z"
    SIMPLE_DENSITY = "zg"
    UNIFORM_ZERO = "uniform"


@dataclass(frozen=True)
class IdealSpec:
    """An admissible ideal given by its density functional."""

    kind: IdealKind
    weight: Optional[WeightFn] = None

    def __post_init__(self):
        if self.kind == IdealKind.SIMPLE_DENSITY and self.weight is None:
            raise ArgumentError("a simple density ideal needs a weight")

    @property
    def label(self) -> str:
        if self.kind == IdealKind.SIMPLE_DENSITY:
            return f"zg:{self.weight.label}"
        return self.kind.value

    def density_weight(self) -> WeightFn:
        """The weight whose upper density decides membership; n for Fin, Z and the uniform ideal."""
        if self.kind == IdealKind.SIMPLE_DENSITY:
            return self.weight
        return LinearWeight()

    @classmethod
    def fin(cls) -> "IdealSpec":
        return cls(IdealKind.FIN)

    @classmethod
    def z(cls) -> "IdealSpec":
        return cls(IdealKind.ASYMPTOTIC_ZERO)

    @classmethod
    def zg(cls, weight: WeightFn) -> "IdealSpec":
        return cls(IdealKind.SIMPLE_DENSITY, weight)

    @classmethod
    def uniform(cls) -> "IdealSpec":
        return cls(IdealKind.UNIFORM_ZERO)
