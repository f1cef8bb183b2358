"""Input and output models for curve files and command results."""

import cmath
import math
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

from .errors import NonFiniteError


class ComplexModel(BaseModel):
    re: float
    im: float

    @field_validator("re", "im")
    @classmethod
    def finite(cls, value):
        if not math.isfinite(value):
            raise ValueError("non-finite number")
        return value

    @classmethod
    def of(cls, z) -> "ComplexModel":
        z = complex(z)
        if not cmath.isfinite(z):
            raise NonFiniteError(f"non-finite result {z}")
        return cls(re=z.real, im=z.imag)

    def value(self) -> complex:
        return complex(self.re, self.im)


Scalar = Union[float, str, ComplexModel]


def finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


# ---- input ----

class CurveFile(BaseModel):
    name: Optional[str] = None
    kind: Literal["space", "plane", "hyperelliptic"]
    variables: Optional[List[str]] = None
    f: Optional[str] = None
    g: Optional[str] = None
    coefficients: Optional[List[Scalar]] = None  # hyperelliptic A_0..A_d, ascending
    template: Optional[Dict[str, Scalar]] = None  # "i,k,l" -> a_kl^(i)
    on_curve_tol: float = Field(default=1e-9, gt=0)


class PointsFile(BaseModel):
    points: List[List[Scalar]]


# ---- output ----

class PointOut(BaseModel):
    coords: List[ComplexModel]
    residual: float


class InfinityPointOut(BaseModel):
    coords: List[ComplexModel]
    multiplicity: int


class CurveCheckOut(BaseModel):
    name: Optional[str] = None
    kind: str
    degrees: List[int]
    genus: Optional[int] = None
    fiber_degree: int
    smooth: bool
    min_singular_value: Optional[float] = None
    failures: int
    branch_points: List[ComplexModel]
    branch_count: Optional[int] = None
    infinity_points: List[InfinityPointOut] = []


class FiberOut(BaseModel):
    base: ComplexModel
    chart: str
    degenerate: bool
    points: List[PointOut]


class MonodromyOut(BaseModel):
    center: ComplexModel
    radius: float
    permutation: List[int]
    cycles: List[List[int]]


class ProjectionOut(BaseModel):
    eliminated: str
    polynomial: str
    degrees: List[int]


class CurveSummaryOut(BaseModel):
    name: Optional[str] = None
    smooth: bool
    fallback_seed: Optional[int] = None
    curve: CurveFile


class DifferentialOut(BaseModel):
    coeff: ComplexModel
    weight: int


class ContourOut(BaseModel):
    k: int
    value: ComplexModel
    error: float
    nodes: int
    turns: int


class AsymptoticOut(BaseModel):
    printed: List[ComplexModel]
    series: List[ComplexModel]
    relative_difference: List[float]
    mismatched: List[str]


class DivergenceOut(BaseModel):
    coefficient_set: str
    radii: List[float]
    exponents: List[float]
    bounded: bool


class BasisElementOut(BaseModel):
    numerator: str
    j_power: int


class BasisOut(BaseModel):
    name: str
    weight: int
    elements: List[BasisElementOut]


class PeriodsOut(BaseModel):
    matrix: List[List[ComplexModel]]
    eigenvalues: List[float]
    hermitian_defect: float
    est_error: float
    nodes_used: int
    refinement_depth: int
    converged: bool
    positive_definite: bool


class InvarianceOut(BaseModel):
    shift: List[ComplexModel]
    relative_change: float


class CorrelatorOut(BaseModel):
    lam: int = Field(serialization_alias="lambda")
    value: ComplexModel
    condition: Optional[float] = None  # null when the matrix is singular
    hadamard_ratio: float
    size: int
    b_weight: int
    c_weight: int
    invariance: Optional[InvarianceOut] = None


class GreenOut(BaseModel):
    value: ComplexModel
    normalized: ComplexModel
    gram_det: ComplexModel
    residue_q: Optional[ComplexModel] = None
    residue_qp: Optional[ComplexModel] = None
    residue_ratio: Optional[ComplexModel] = None
    period_residuals: List[float] = []
    gram_norm: float
    est_error: float
    converged: bool


class CheckOut(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class SelftestOut(BaseModel):
    curve: Optional[str] = None
    seed: int
    passed: bool
    checks: List[CheckOut]
