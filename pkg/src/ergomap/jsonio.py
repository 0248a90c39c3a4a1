"""JSON text helpers with %.17g float formatting for bit-stable reload."""

from __future__ import annotations

import json
import math


def dumps_g17(obj, indent: int = 0) -> str:
    """Serialize nested dict/list/scalar data with floats printed as %.17g."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {dumps_g17(v, indent + 2)}" for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in seq)
        if flat:
            return "[" + ", ".join(dumps_g17(v) for v in seq) + "]"
        items = ",\n".join(f"{inner}{dumps_g17(v, indent + 2)}" for v in seq)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("non-finite float in JSON document")
        return f"{obj:.17g}"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"unsupported JSON value type {type(obj)!r}")


def loads(text: str):
    return json.loads(text)
