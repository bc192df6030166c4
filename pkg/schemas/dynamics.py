from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional

from pydantic import BaseModel, validator


class FixedPointClass(str, Enum):
    superattracting = "superattracting"
    attracting = "attracting"
    repelling = "repelling"
    rationally_indifferent = "rationally-indifferent"
    irrationally_indifferent = "irrationally-indifferent"


class FixedPointRecord(BaseModel):
    location: Any
    period: int = 1
    multiplier: complex
    fixed_class: FixedPointClass
    rotation: Optional[Fraction] = None
    angle: Optional[float] = None
    multiplicity: int = 1
    local_degree: Optional[int] = None
    ambiguous: bool = False
    cycle: List[Any] = []

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @validator('period', 'multiplicity')
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError('Period and multiplicity must be at least 1')
        return v

    @property
    def is_parabolic(self) -> bool:
        return self.fixed_class == FixedPointClass.rationally_indifferent

    @property
    def rotation_denominator(self) -> int:
        return self.rotation.denominator if self.rotation is not None else 1


class OrbitTrace(BaseModel):
    points: List[Any]
    escaped: bool = False
    escape_index: Optional[int] = None

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @validator('escape_index')
    def validate_escape_index(cls, v, values):
        if v is not None and not values.get('escaped'):
            raise ValueError('Escape index requires escaped=True')
        return v


class CycleReport(BaseModel):
    period: int
    points: List[complex]
    multiplier: complex
    max_modulus: float

    class Config:
        frozen = True


class CycleSearchLevel(BaseModel):
    q: int
    cycles: List[CycleReport] = []
    product: Optional[complex] = None
    expected_product: Optional[complex] = None
    product_error: Optional[float] = None
    bound: Optional[float] = None
    bound_witness: Optional[bool] = None
    smallest_modulus: Optional[float] = None

    class Config:
        frozen = True


class CycleSearchReport(BaseModel):
    delta: float
    levels: List[CycleSearchLevel] = []
    cap_notice: Optional[str] = None
    truncation_bits: Optional[int] = None

    class Config:
        frozen = True

    @property
    def cycles(self) -> List[CycleReport]:
        return [c for level in self.levels for c in level.cycles]
