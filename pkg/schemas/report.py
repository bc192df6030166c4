import json
import math
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List

from pydantic import BaseModel

from models.point import is_inf

DIGITS = 12


def format_value(value: Any) -> Any:
    """Render one field for the structured text/json emitter."""
    if is_inf(value):
        return "inf"
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return float(f"{value:.{DIGITS}g}")
    if isinstance(value, complex):
        re = f"{value.real:.{DIGITS}g}"
        im = f"{value.imag:+.{DIGITS}g}"
        return f"{re}{im}j"
    if isinstance(value, BaseModel):
        return to_record(value)
    if isinstance(value, dict):
        return {str(k): format_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [format_value(v) for v in value]
    try:
        return format_value(complex(value))
    except (TypeError, ValueError):
        return str(value)


def to_record(model: BaseModel) -> Dict[str, Any]:
    return {name: format_value(getattr(model, name)) for name in type(model).model_fields}


def _text_field(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def emit(records: Iterable[Any], fmt: str = "text") -> str:
    """One record per line, keys sorted; text is key=value, json is one object per line."""
    lines: List[str] = []
    for record in records:
        data = to_record(record) if isinstance(record, BaseModel) else {k: format_value(v) for k, v in record.items()}
        if fmt == "json":
            lines.append(json.dumps(data, sort_keys=True, ensure_ascii=False))
        elif fmt == "text":
            lines.append(" ".join(f"{key}={_text_field(data[key])}" for key in sorted(data)))
        else:
            raise ValueError(f"Unknown report format: {fmt}")
    return "\n".join(lines) + ("\n" if lines else "")
