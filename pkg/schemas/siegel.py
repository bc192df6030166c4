from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, validator


class ScanVerdict(str, Enum):
    siegel = "siegel-evidence"
    cremer = "cremer-evidence"
    inconclusive = "inconclusive"


class Confidence(str, Enum):
    high = "high"
    low = "low"


class LinearizationReport(BaseModel):
    multiplier: complex
    order: int
    exact: bool
    coefficients: List[complex]
    divisors: List[float]
    residual: float
    transparency: float

    class Config:
        frozen = True


class RadiusEstimate(BaseModel):
    order: int
    radius: float
    lower: float
    upper: float
    slope_radius: Optional[float] = None
    confidence: Confidence = Confidence.high

    class Config:
        frozen = True

    @validator('radius', 'lower', 'upper')
    def validate_non_negative(cls, v):
        if v < 0:
            raise ValueError('Radius estimates must be non-negative')
        return v


class RadialSample(BaseModel):
    k: int
    r: float
    value: complex
    modulus: float

    class Config:
        frozen = True


class SiegelSizeEstimate(BaseModel):
    label: str
    angle: float
    floor: float
    samples: List[RadialSample] = []
    rho: Optional[float] = None
    verdict: ScanVerdict = ScanVerdict.inconclusive
    cauchy_riemann: Optional[float] = None
    flags: List[str] = []

    class Config:
        frozen = True

    @validator('floor')
    def validate_floor(cls, v):
        if v <= 0:
            raise ValueError('Floor must be positive')
        return v
