from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field
from pydantic.alias_generators import to_camel


class ReportModel(BaseModel):
    """Base for every serialized report: camelCase on the wire, snake_case in code."""

    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True)


# Verdicts
class VerdictStatus(str, Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


EXIT_CODES = {
    VerdictStatus.SATISFIED: 0,
    VerdictStatus.VIOLATED: 1,
    VerdictStatus.INCONCLUSIVE: 2,
}


class Verdict(ReportModel):
    status: VerdictStatus
    witness: Optional[Union[int, float, str, List[int]]] = None
    bound: Optional[int] = None
    reason: Optional[str] = None

    @classmethod
    def satisfied(cls, reason: Optional[str] = None) -> "Verdict":
        return cls(status=VerdictStatus.SATISFIED, reason=reason)

    @classmethod
    def violated(cls, witness: Any = None, reason: Optional[str] = None) -> "Verdict":
        return cls(status=VerdictStatus.VIOLATED, witness=witness, reason=reason)

    @classmethod
    def inconclusive(cls, reason: Optional[str] = None, bound: Optional[int] = None) -> "Verdict":
        return cls(status=VerdictStatus.INCONCLUSIVE, reason=reason, bound=bound)

    @property
    def is_satisfied(self) -> bool:
        return self.status == VerdictStatus.SATISFIED

    @property
    def is_violated(self) -> bool:
        return self.status == VerdictStatus.VIOLATED

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def combine_verdicts(verdicts: Iterable[Verdict], reason: Optional[str] = None) -> Verdict:
    """Conjunction: Violated if any part is, Satisfied if all are, else Inconclusive."""
    items = list(verdicts)
    for item in items:
        if item.is_violated:
            return Verdict.violated(item.witness, reason or item.reason)
    if all(item.is_satisfied for item in items):
        return Verdict.satisfied(reason)
    bound = next((item.bound for item in items if item.bound is not None), None)
    return Verdict.inconclusive(reason or "some parts undecided at this scale", bound)


# Density estimates
class EstimateMode(str, Enum):
    RUNNING_MAX = "RunningMax"
    TAIL_MAX = "TailMax"
    UNIFORM_WINDOW = "UniformWindow"


class DensityEstimate(ReportModel):
    value: float
    mode: EstimateMode
    max_n: int = Field(alias="maxN")
    checkpoints: List[Tuple[int, float]]
    window_start: int
    early_max: float
    late_max: float
    trend: str
    label: Optional[str] = None

    def ratio_at(self, n: int) -> Optional[float]:
        for point, ratio in self.checkpoints:
            if point == n:
                return ratio
        return None


class EpsilonEstimate(ReportModel):
    eps: float
    estimate: DensityEstimate
    verdict: Verdict


class IdealLimitReport(ReportModel):
    sequence: str
    ideal: str
    candidate: float
    eps_grid: List[float]
    per_eps: List[EpsilonEstimate]
    verdict: Verdict


class ScalarTrace(ReportModel):
    value: float
    checkpoints: List[Tuple[int, float]]
    window_start: int
    start_value: float
    growth: float
    witness_row: Optional[int] = None


# Matrix conditions
class ConditionReport(ReportModel):
    condition: str
    matrix: str
    verdict: Verdict
    limit: Optional[IdealLimitReport] = None
    trace: Optional[ScalarTrace] = None
    parts: List["ConditionReport"] = []
    params: Dict[str, str] = {}
    warnings: List[str] = []


ConditionReport.model_rebuild()


class SamplePairReport(ReportModel):
    sample: str
    eta: float
    input_limit: IdealLimitReport
    output_limit: IdealLimitReport
    c0_limit: IdealLimitReport


class RegularityReport(ReportModel):
    matrix: str
    ideal_i: str
    ideal_j: str
    pairs: List[SamplePairReport]
    t1: ConditionReport
    t2: ConditionReport
    t3: List[ConditionReport] = []
    c0_and_t2: Verdict
    consistent: bool
    verdict: Verdict
    note: str = "direct testing at finite scale is evidence for regularity, not a proof"


# Constructions
class CounterexampleParamsSchema(ReportModel):
    i_set: str
    max_block: int


class BlockInvariantReport(ReportModel):
    block: int
    lam: int
    alpha: int
    rows_lo: int
    rows_hi: int
    row_count: int
    column_count: int
    lambda_bounds: bool
    separated: bool
    distinct_signs: bool
    balanced: bool

    @property
    def holds(self) -> bool:
        return all([
            self.lambda_bounds,
            self.separated,
            self.distinct_signs,
            self.balanced,
            self.row_count == 2 ** self.lam,
            self.column_count == self.lam,
        ])


class BlockInvariantsReport(ReportModel):
    params: CounterexampleParamsSchema
    blocks: List[BlockInvariantReport]
    all_hold: bool


class WllnBlockReport(ReportModel):
    block: int
    lam: int
    rows: int
    exceedance: float
    oracle: Optional[float] = None
    matches: Optional[bool] = None


class WllnReport(ReportModel):
    matrix: str
    sequence: str
    eps: float
    blocks: List[WllnBlockReport]
    matches_oracle: Optional[bool] = None
    non_increasing_from_block_4: bool


class DensityOfRReport(ReportModel):
    max_m: int
    estimate: DensityEstimate
    block_ratios: List[Tuple[int, float]]
    exceeds_threshold: bool
    threshold: float = 0.30


class WitnessStatus(str, Enum):
    COMPLETE = "complete"
    STALLED = "stalled"
    T3_HOLDS_AT_SCALE = "t3_holds_at_scale"


class WitnessStep(ReportModel):
    index: int
    s: int
    m: int
    alpha: float
    beta: float
    gamma: float
    ax: float
    inequalities_hold: bool
    exceeds_three_eighths: bool


class WitnessTrace(ReportModel):
    matrix: str
    i_set: str
    max_n: int = Field(alias="maxN")
    kappa: Optional[float] = None
    status: WitnessStatus
    s_set_size: int = 0
    s_set: List[int] = []
    steps: List[WitnessStep] = []
    plus_columns: List[int] = []
    verdict: Verdict


class CounterexampleReport(ReportModel):
    variant: str
    params: CounterexampleParamsSchema
    invariants: BlockInvariantsReport
    t1: Optional[ConditionReport] = None
    t2: Optional[ConditionReport] = None
    t3: Optional[ConditionReport] = None
    density_of_r: Optional[DensityOfRReport] = None
    wlln: Optional[WllnReport] = None
    regularity: Optional[RegularityReport] = None
    export_path: Optional[str] = None


# Permutations
class PermutationCheckReport(ReportModel):
    condition: str
    permutation: str
    set: str
    estimate: DensityEstimate
    verdict: Verdict


class LevyReport(ReportModel):
    permutation: str
    estimate: DensityEstimate
    verdict: Verdict
    companion: Optional[IdealLimitReport] = None


class ZeroLimitPointReport(ReportModel):
    permutation: str
    weight: str
    per_eps: List[EpsilonEstimate]
    verdict: Verdict


class GrowthTrace(ReportModel):
    alpha: float
    ratio: ScalarTrace
    inverse: ScalarTrace
    verdict: Verdict


class GrowthReport(ReportModel):
    g: str
    h: str
    traces: List[GrowthTrace]
    verdict: Verdict


class PermutationRegularityReport(ReportModel):
    permutation: str
    ideal_i: str
    ideal_j: str
    p3: List[PermutationCheckReport]
    t1: ConditionReport
    t2: ConditionReport
    t3: List[ConditionReport]
    p4: ZeroLimitPointReport
    levy: LevyReport
    consistent: bool
    disagreements: List[str] = []
    verdict: Verdict


# Multipliers
class SetLimitReport(ReportModel):
    set: str
    limit: IdealLimitReport


class MultiplierReport(ReportModel):
    sequence: str
    ideal_j: str
    sup_abs: float
    sup_index: int
    bound_error: Optional[str] = None
    per_set: List[SetLimitReport] = []
    t1: Optional[ConditionReport] = None
    t3: List[ConditionReport] = []
    matrix_verdict: Optional[Verdict] = None
    consistent: bool = True
    verdict: Verdict


class SetVerdict(ReportModel):
    set: str
    verdict: Verdict


class InclusionSuiteReport(ReportModel):
    ideal_j: str
    preconditions: List[SetVerdict]
    samples: List[MultiplierReport]
    verdict: Verdict


class DiagonalProbeReport(ReportModel):
    sequence: str
    set: str
    sup_value: float
    sup_index: int
    unbounded: bool
    image_limit: IdealLimitReport


# Runner
class SuiteCase(ReportModel):
    name: str
    status: VerdictStatus
    expected: List[VerdictStatus]
    passed: bool
    detail: Optional[str] = None


class SuiteReport(ReportModel):
    cases: List[SuiteCase]
    passed: int
    failed: int
    verdict: Verdict


class ExperimentConfig(ReportModel):
    command: str
    params: Dict[str, Any] = {}
    max_n: Optional[int] = Field(default=None, alias="maxN")
    eps_grid: Optional[List[float]] = None
    zero_tol: Optional[float] = None
    output: Optional[str] = None


class ExperimentReport(ReportModel):
    config: ExperimentConfig
    result: Dict[str, Any]
    verdict: Optional[Verdict] = None
