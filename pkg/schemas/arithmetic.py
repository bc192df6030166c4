from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, validator


class Verdict(str, Enum):
    holds = "holds-at-depth"
    fails = "fails-at-depth"
    undecidable = "undecidable-at-depth"


class ConditionName(str, Enum):
    cremer = "Cr"
    diophantine = "D"
    roth = "Ro"
    siegel = "Si"
    brjuno = "Br"
    perez_marco = "PM"


class ConditionRecord(BaseModel):
    name: ConditionName
    parameter: Optional[float] = None
    depth: int
    statistic: Optional[float] = None
    verdict: Verdict
    witness: Optional[str] = None

    class Config:
        frozen = True

    @validator('depth')
    def validate_depth(cls, v):
        if v < 0:
            raise ValueError('Depth must be non-negative')
        return v

    @property
    def status(self) -> str:
        return f"{self.verdict.value}-{self.depth}"

    @property
    def key(self) -> str:
        if self.parameter is None:
            return self.name.value
        return f"{self.name.value}_{self.parameter:g}"


class ConditionReport(BaseModel):
    label: str
    requested_depth: int
    depth: int
    terminated: bool = False
    precision_limited: bool = False
    records: List[ConditionRecord] = []

    class Config:
        frozen = True

    def verdict(self, name: ConditionName, parameter: Optional[float] = None) -> Verdict:
        for record in self.records:
            if record.name == name and record.parameter == parameter:
                return record.verdict
        raise KeyError(f"No record for {name.value} ({parameter})")


class ExpansionRecord(BaseModel):
    label: str
    depth: int
    terminated: bool
    certified_bits: int
    quotients: List[int]
    denominators: List[int]

    class Config:
        frozen = True


class MeasureEstimate(BaseModel):
    kappa: float
    epsilon: float
    trials: int
    q_max: int
    estimate: float
    sigma: float
    bound: Optional[float] = None
    bound_finite: bool = True
    tail_bound: Optional[float] = None
    within_bound: Optional[bool] = None

    class Config:
        frozen = True

    @validator('trials')
    def validate_trials(cls, v):
        if v < 1:
            raise ValueError('Trials must be at least 1')
        return v
