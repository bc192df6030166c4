from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, validator


class ChartKind(str, Enum):
    koenigs = "koenigs"
    boettcher = "boettcher"
    fatou = "fatou"


class ChartReport(BaseModel):
    kind: ChartKind
    location: complex
    multiplier: complex
    residual: float
    samples: int
    radius: Optional[float] = None
    normalization: Optional[float] = None
    note: Optional[str] = None

    class Config:
        frozen = True


class MaxDiskReport(BaseModel):
    radius: float
    critical_point: complex
    boundary: List[complex] = []
    boundary_deviation: float = 0.0
    image_inside: bool = True

    class Config:
        frozen = True

    @validator('radius')
    def validate_radius(cls, v):
        if v <= 0:
            raise ValueError('Disk radius must be positive')
        return v


class PetalType(str, Enum):
    attracting = "attracting"
    repelling = "repelling"


class PetalReport(BaseModel):
    index: int
    petal_type: PetalType
    direction: complex
    image_index: int
    epsilon: float
    inner_radius: float
    offset: float
    certified_margin: float
    residual: Optional[float] = None

    class Config:
        frozen = True

    @validator('certified_margin')
    def validate_margin(cls, v):
        if v <= 0:
            raise ValueError('Petal certificate margin must be positive')
        return v
