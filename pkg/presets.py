"""Figure presets: named maps with window defaults.

| name   | map                             | center        | width | overlay        |
|--------|---------------------------------|---------------|-------|----------------|
| fig3   | z^2 - .744336 + .121198i        | 0             | 3.2   | none           |
| fig4   | z^2 + .424513 + .207530i        | 0             | 2.6   | none           |
| fig5   | z^2 + 0.7z                      | -0.35         | 3.0   | koenigs-levels |
| fig8   | z^2 + e^(2 pi i 3/7) z          | -lam/2        | 2.6   | petals         |
| fig9   | z^2 + z                         | -0.5          | 2.6   | fatou-levels   |
| fig10a | z^2 + e^(2 pi i cbrt(1/4)) z    | -lam/2        | 3.0   | none           |
| fig10b | z^2 + e^(2 pi i .78705954039469) z | -lam/2     | 3.0   | none           |

Windows are hand-picked; golden images certify determinism only.
"""
import cmath
import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List

from schemas.render import Overlay, RenderSpec

logger = logging.getLogger(__name__)

FIG10B_ANGLE = 0.78705954039469


def complex_literal(value: complex) -> str:
    """Parser-ready literal, parenthesized as (a+bi)."""
    sign = "-" if value.imag < 0 else "+"
    return f"({value.real!r}{sign}{abs(value.imag)!r}i)"


def rotation_multiplier(angle: float) -> complex:
    return cmath.exp(2j * math.pi * angle)


def _rotation_family(name: str, angle: float, width: float, overlay: Overlay = Overlay.none) -> RenderSpec:
    lam = rotation_multiplier(angle)
    return RenderSpec(name=name, expression=f"z^2+{complex_literal(lam)}*z", center=-lam / 2,
                      width=width, overlay=overlay)


def _fig3() -> RenderSpec:
    return RenderSpec(name="fig3", expression="z^2-.744336+.121198i", center=0j, width=3.2)


def _fig4() -> RenderSpec:
    return RenderSpec(name="fig4", expression="z^2+.424513+.207530i", center=0j, width=2.6)


def _fig5() -> RenderSpec:
    return RenderSpec(name="fig5", expression="z^2+0.7*z", center=-0.35 + 0j, width=3.0,
                      overlay=Overlay.koenigs_levels)


def _fig8() -> RenderSpec:
    return _rotation_family("fig8", float(Fraction(3, 7)), 2.6, Overlay.petals)


def _fig9() -> RenderSpec:
    return RenderSpec(name="fig9", expression="z^2+z", center=-0.5 + 0j, width=2.6,
                      overlay=Overlay.fatou_levels)


def _fig10a() -> RenderSpec:
    return _rotation_family("fig10a", 0.25 ** (1 / 3), 3.0)


def _fig10b() -> RenderSpec:
    return _rotation_family("fig10b", FIG10B_ANGLE, 3.0)


PRESETS: Dict[str, Callable[[], RenderSpec]] = {
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig8": _fig8,
    "fig9": _fig9,
    "fig10a": _fig10a,
    "fig10b": _fig10b,
}


def preset_names() -> List[str]:
    return list(PRESETS)


def figure_preset(name: str, pixels: int = 256) -> RenderSpec:
    if name not in PRESETS:
        raise KeyError(f"Unknown preset '{name}'; choose from {', '.join(PRESETS)}")
    spec = PRESETS[name]()
    if pixels != spec.pixels:
        spec = RenderSpec(**{**spec.model_dump(), "pixels": pixels})
    logger.debug(f"Preset {name}: {spec.expression}, center {spec.center}, width {spec.width}")
    return spec
