"""Point-set text format.

    # comment
    mode: exact
    label: grid 4x4
    y-weight: 3
    # param n = 9
    0 0
    1/2 1/2
"""

import json
from enum import Enum
from fractions import Fraction
from pathlib import Path

from loguru import logger

from errors import PointFileError
from geometry import Mode, Point, PointSet, convert_mode


class Symbol:
    COMMENT = "#"
    HEADER = ":"
    PARAM = "param"
    ASSIGN = "="
    RATIONAL = "/"


class LineType(Enum):
    BLANK = 1
    COMMENT = 2
    PARAM = 3
    HEADER = 4
    POINT = 5


HEADERS = ("mode", "label", "y-weight")


def format_number(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


def format_point(point: Point) -> str:
    return f"{format_number(point.x)} {format_number(point.y)}"


def encode(X: PointSet) -> str:
    lines = [f"mode{Symbol.HEADER} {X.mode.value}"]
    if X.label:
        lines.append(f"label{Symbol.HEADER} {X.label}")
    if X.y_weight != 1:
        lines.append(f"y-weight{Symbol.HEADER} {format_number(X.y_weight)}")
    for key, value in X.metadata.items():
        lines.append(f"{Symbol.COMMENT} {Symbol.PARAM} {key} {Symbol.ASSIGN} {json.dumps(value)}")
    lines.extend(format_point(p) for p in X.points)
    return "\n".join(lines) + "\n"


def classify_line(line: str) -> LineType:
    line = line.strip()
    if not line:
        return LineType.BLANK
    if line.startswith(Symbol.COMMENT):
        body = line[1:].split()
        if body and body[0] == Symbol.PARAM and Symbol.ASSIGN in line:
            return LineType.PARAM
        return LineType.COMMENT
    if Symbol.HEADER in line.split(Symbol.COMMENT)[0]:
        return LineType.HEADER
    return LineType.POINT


def parse_number(token: str, mode: Mode):
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise PointFileError(f"Not a coordinate: {token!r}") from exc
    if mode == Mode.EXACT:
        return value
    return float(token) if Symbol.RATIONAL not in token else float(value)


def _parse_param(line: str) -> tuple[str, object]:
    body = line.strip()[1:].strip()[len(Symbol.PARAM):]
    key, _, raw = body.partition(Symbol.ASSIGN)
    raw = raw.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def decode(text: str, *, mode_override: Mode = None) -> PointSet:
    headers = {}
    metadata = {}
    rows = []
    for number, line in enumerate(text.splitlines(), start=1):
        kind = classify_line(line)
        if kind == LineType.PARAM:
            key, value = _parse_param(line)
            metadata[key] = value
        elif kind == LineType.HEADER:
            name, _, value = line.split(Symbol.COMMENT)[0].partition(Symbol.HEADER)
            name = name.strip().lower()
            if name not in HEADERS:
                raise PointFileError(f"Line {number}: unknown header {name!r}")
            headers[name] = value.strip()
        elif kind == LineType.POINT:
            tokens = line.split(Symbol.COMMENT)[0].split()
            if len(tokens) != 2:
                raise PointFileError(f"Line {number}: expected 'x y', got {line.strip()!r}")
            rows.append((number, tokens))
    if "mode" not in headers:
        raise PointFileError("Missing mandatory 'mode:' header")
    try:
        mode = Mode(headers["mode"])
    except ValueError as exc:
        raise PointFileError(f"Unknown mode {headers['mode']!r}") from exc
    mode = mode_override or mode
    points = []
    for number, (x, y) in rows:
        try:
            points.append(Point(parse_number(x, mode), parse_number(y, mode)))
        except PointFileError as exc:
            raise PointFileError(f"Line {number}: {exc}") from exc
    weight = parse_number(headers.get("y-weight", "1"), mode)
    logger.debug(f"Decoded {len(points)} points ({mode.value})")
    return PointSet(
        tuple(points),
        mode=mode,
        label=headers.get("label", ""),
        metadata=metadata,
        y_weight=weight,
    )


def read(path, *, mode_override: Mode = None) -> PointSet:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PointFileError(f"Cannot read {path}: {exc}") from exc
    if path.suffix == ".json":
        X = PointSet.from_json(text)
        return X if mode_override in (None, X.mode) else convert_mode(X, mode_override)
    return decode(text, mode_override=mode_override)


def write(X: PointSet, path) -> Path:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(X.to_json(indent=2))
    else:
        path.write_text(encode(X))
    logger.info(f"Wrote {X.n} points to {path}")
    return path
