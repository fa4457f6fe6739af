"""Deterministic JSON: fixed key order as built, floats cut to 12 significant digits."""

from __future__ import annotations

import json
import math
from typing import Any

SIG_DIGITS = 12


def round_floats(obj: Any, digits: int = SIG_DIGITS) -> Any:
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {str(k): round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return round_floats(obj.item(), digits)
    return obj


def dumps(obj: Any, indent: int | None = None) -> str:
    return json.dumps(round_floats(obj), indent=indent, ensure_ascii=False, allow_nan=False)
