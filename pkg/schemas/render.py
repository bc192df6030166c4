from enum import Enum
from typing import Optional

from pydantic import BaseModel, validator

import config


class Overlay(str, Enum):
    none = "none"
    koenigs_levels = "koenigs-levels"
    fatou_levels = "fatou-levels"
    petals = "petals"


class RenderSpec(BaseModel):
    expression: str
    center: complex = 0j
    width: float = 4.0
    pixels: int = 256
    height: Optional[int] = None
    overlay: Overlay = Overlay.none
    max_iter: int = config.RENDER_MAX_ITER
    escape_radius: float = config.ESCAPE_RADIUS
    name: Optional[str] = None

    class Config:
        frozen = True

    @validator('width')
    def validate_width(cls, v):
        if not v > 0:
            raise ValueError('Window width must be positive')
        return v

    @validator('pixels', 'height')
    def validate_resolution(cls, v):
        if v is not None and v < config.MIN_RESOLUTION:
            raise ValueError(f'Resolution must be at least {config.MIN_RESOLUTION} pixels')
        return v

    @validator('max_iter')
    def validate_max_iter(cls, v):
        if v < 1:
            raise ValueError('Iteration cap must be positive')
        return v

    @validator('escape_radius')
    def validate_escape_radius(cls, v):
        if not v > 0:
            raise ValueError('Escape radius must be positive')
        return v

    @property
    def rows(self) -> int:
        return self.height or self.pixels

    @property
    def pixel_size(self) -> float:
        return self.width / self.pixels


class RenderWarning(BaseModel):
    overlay: Overlay
    detail: str

    class Config:
        frozen = True


class RenderSummary(BaseModel):
    name: Optional[str] = None
    expression: str
    path: Optional[str] = None
    width: int
    height: int
    overlay: Overlay
    interior_fraction: float
    overlay_pixels: int
    warnings: int = 0

    class Config:
        frozen = True
