from math import gcd
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.exceptions import (
    GcdViolation,
    NegativeWeight,
    WeightOverflow,
    ZeroSuccessorOrAbstraction,
    ZeroSum,
)

MAX_WEIGHT = 2**31 - 1

PRESETS: Dict[str, Tuple[int, int, int, int]] = {
    "natural": (1, 1, 1, 1),
    "less-natural": (0, 1, 1, 2),
    "binary": (2, 1, 2, 2),
}


def check_weights(a: int, b: int, c: int, d: int) -> None:
    """Raise the error naming the first violated size-model clause"""
    for name, value in zip("abcd", (a, b, c, d)):
        if value < 0:
            raise NegativeWeight(f"weight {name}={value} is negative", weight=name)
        if value > MAX_WEIGHT:
            raise WeightOverflow(f"weight {name}={value} exceeds {MAX_WEIGHT}", weight=name)
    if a + d < 1:
        raise ZeroSum("a + d must be at least 1")
    if b < 1 or c < 1:
        raise ZeroSuccessorOrAbstraction("successor weight b and abstraction weight c must be at least 1")
    if gcd(gcd(b, c), a + d) != 1:
        raise GcdViolation(f"gcd(b, c, a+d) = {gcd(gcd(b, c), a + d)}, expected 1")


# Size model
class SizeSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: int
    b: int
    c: int
    d: int

    @model_validator(mode="after")
    def validate_weights(self) -> "SizeSpec":
        check_weights(self.a, self.b, self.c, self.d)
        return self

    @property
    def weights(self) -> Tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    @property
    def label(self) -> str:
        return ",".join(str(w) for w in self.weights)

    @property
    def preset_name(self) -> Optional[str]:
        return next((name for name, w in PRESETS.items() if w == self.weights), None)

    def stabilization_level(self, n: int) -> int:
        """Least m with a + b*m > n"""
        if n < self.a:
            return 0
        return (n - self.a) // self.b + 1


# Terms
class TermMetrics(BaseModel):
    abstractions: int = 0
    applications: int = 0
    variables: int = 0
    successors: int = 0
    depth: int = 0


# Asymptotics
class SingularData(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: SizeSpec
    rho: float
    a_inf: float
    b_inf: float
    tolerance: float


class SuperclassConstants(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int
    rho: float
    a: List[float]
    b: List[float]
    # D_m for m < N; level N is the unrestricted family and has no radicand
    radicands: List[float]

    @model_validator(mode="after")
    def check_levels(self) -> "SuperclassConstants":
        if len(self.a) != self.N + 1 or len(self.b) != self.N + 1 or len(self.radicands) != self.N:
            raise ValueError(f"expected {self.N + 1} levels and {self.N} radicands")
        if any(value <= 0 for value in self.radicands):
            raise ValueError("every radicand must be positive")
        return self


class NormalFormSingularity(BaseModel):
    model_config = ConfigDict(frozen=True)

    rho_tilde: float
    ratio: float
    derivative: float


class FamilyConstants(BaseModel):
    """Constants of an estimate C * n^(-3/2) * sigma^(-n) on n = offset (mod period)"""

    model_config = ConfigDict(frozen=True)

    constant: float = Field(..., gt=0)
    sigma: float = Field(..., gt=0, lt=1)
    period: int = Field(default=1, ge=1)
    offset: int = 0


class LeafStatistics(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean_per_size: float
    variance_per_size: float
    leaf_probability_per_node: float


# Sampler
class SamplerTables(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: SizeSpec
    N: int
    rho: float
    A: List[float]
    leaf_mass: List[float]
    p_abs: List[float]
    p_app: List[float]


class SampleReport(BaseModel):
    term: Any  # app.models.Term; kept opaque so deep trees are never walked by pydantic
    size: int
    attempts: int
    rejections: Dict[str, int]
    rng_seed: int


class BatchStats(BaseModel):
    count: int
    target_m: int
    n_min: int
    n_max: int
    mean_size: float
    mean_variables: float
    var_variables: float
    residual_var_variables: float
    variables_per_size: float
    variables_per_node: float
    mean_abstractions: float
    var_abstractions: float
    attempts: int
    rejection_rates: Dict[str, float]
    closed_proportion: float
    elapsed_seconds: float


# Output records
class CountRecord(BaseModel):
    family: str
    m: Optional[int] = None
    n: int
    count: str
    params: Dict[str, int] = Field(default_factory=dict)


# CLI
class RunConfig(BaseModel):
    spec: SizeSpec
    command: str
    options: Dict[str, Any] = Field(default_factory=dict)
    output_format: str = Field(default="json", pattern="^(json|csv|text|xlsx)$")
    output_path: Optional[Path] = None
    cache_dir: Optional[Path] = None
    max_n: int = Field(default=2000, gt=0)
    enumerate_max_n: int = Field(default=18, gt=0)
    max_attempts: int = Field(default=1_000_000, gt=0)
    time_budget: float = Field(default=300.0, gt=0)
    no_meta: bool = False

    @model_validator(mode="after")
    def validate_output(self) -> "RunConfig":
        if self.output_format == "xlsx" and self.output_path is None:
            raise ValueError("xlsx output requires --output")
        return self


# Self-check
class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    elapsed_seconds: float = 0.0
