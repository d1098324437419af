"""Report emission: JSON, CSV and text renderings of results."""

import csv
import io
import json
import math
from enum import Enum
from fractions import Fraction

from geometry import DistanceSpectrum, Mode


def format_number(value) -> str:
    """Rationals as p/q, floats with 17 significant digits."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict(encode_json=False))
    return value


def to_json(value) -> str:
    return json.dumps(jsonable(value), indent=2)


def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: format_number(v) for k, v in row.items()})
    return buffer.getvalue()


def spectrum_rows(S: DistanceSpectrum) -> list[dict]:
    return [dict(squared_distance=c.key, multiplicity=c.multiplicity) for c in S.classes]


def audit_line(S: DistanceSpectrum) -> str:
    audit = S.audit
    return (
        f"audit: max_intra_spread={audit.max_intra_spread:.3e}"
        f" min_inter_gap={audit.min_inter_gap:.3e}"
        f" ratio={audit.ratio:.3e} reliable={audit.reliable}"
    )


def spectrum_text(S: DistanceSpectrum, label: str = "") -> str:
    lines = [
        f"point set: {label or '-'} (n={S.n}, m={S.m}, mode={S.mode.value})",
        f"a(X) = ({', '.join(map(str, S.multiplicities))})",
    ]
    if S.mode == Mode.APPROX:
        lines.append(audit_line(S))
    lines.extend(
        f"  {format_number(c.key):>24}  x{c.multiplicity}" for c in S.classes
    )
    return "\n".join(lines)


def spectrum_json(S: DistanceSpectrum, label: str = "") -> str:
    payload = dict(
        label=label,
        n=S.n,
        m=S.m,
        mode=S.mode,
        multiplicities=S.multiplicities,
        classes=spectrum_rows(S),
        audit=S.audit,
    )
    return to_json(payload)


def render(value, fmt: str) -> str:
    """Generic rendering for reports without a dedicated layout."""
    if fmt == "json":
        return to_json(value)
    payload = jsonable(value)
    if fmt == "csv":
        rows = payload if isinstance(payload, list) else [payload]
        return to_csv([_flatten(row) for row in rows])
    return _text(payload)


def _flatten(row, prefix: str = "") -> dict:
    if not isinstance(row, dict):
        return {prefix or "value": row}
    flat = {}
    for key, value in row.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        elif isinstance(value, list):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat


def _text(payload, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(payload, dict):
        lines = []
        for key, value in payload.items():
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.append(_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
        return "\n".join(lines)
    if isinstance(payload, list):
        if all(not isinstance(v, (dict, list)) for v in payload):
            return f"{pad}{payload}"
        return "\n".join(_text(v, indent) + ("\n" if isinstance(v, dict) else "") for v in payload)
    return f"{pad}{payload}"
