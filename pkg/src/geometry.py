"""Point sets, squared distances and distance-multiplicity spectra."""

import bisect
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional, Union

import numpy as np
from dataclasses_json import config as json_config
from dataclasses_json import dataclass_json
from loguru import logger

from config import EPS_DEG, EPS_MACHINE, EPS_ORIENT, EPS_REL, INT64_SAFE, SAFETY
from errors import DegeneratePointSet, ModeMismatch, UnreliableClustering

Number = Union[Fraction, float]


class Mode(Enum):
    EXACT = "exact"
    APPROX = "approx"


class Point(NamedTuple):
    x: Number
    y: Number


def _kind(value) -> Optional[Mode]:
    """Numeric mode of a value; plain integers fit either mode."""
    if isinstance(value, bool):
        raise ModeMismatch(f"Not a coordinate: {value!r}")
    if isinstance(value, (int, np.integer)):
        return None
    if isinstance(value, Fraction):
        return Mode.EXACT
    if isinstance(value, (float, np.floating)):
        return Mode.APPROX
    raise ModeMismatch(f"Not a coordinate: {value!r} ({type(value).__name__})")


def coerce(value, mode: Mode) -> Number:
    kind = _kind(value)
    if kind is not None and kind != mode:
        raise ModeMismatch(f"{mode.value} point set cannot hold {value!r}")
    if kind is None:
        value = int(value)
    if mode == Mode.EXACT:
        return Fraction(value)
    return float(value)


def encode_number(value):
    return str(value) if isinstance(value, Fraction) else value


def decode_number(value) -> Number:
    return Fraction(value) if isinstance(value, str) else float(value)


def _encode_points(points):
    return [[encode_number(p.x), encode_number(p.y)] for p in points]


def _decode_points(raw):
    return tuple(Point(decode_number(x), decode_number(y)) for x, y in raw)


NUMBER_FIELD = json_config(encoder=encode_number, decoder=decode_number)


@dataclass_json
@dataclass(frozen=True)
class PointSet:
    points: tuple[Point, ...] = field(
        metadata=json_config(encoder=_encode_points, decoder=_decode_points)
    )
    mode: Mode = Mode.EXACT
    label: str = ""
    metadata: dict = field(default_factory=dict)
    y_weight: Number = field(default=1, metadata=NUMBER_FIELD)

    def __post_init__(self):
        mode = Mode(self.mode)
        points = tuple(Point(coerce(p[0], mode), coerce(p[1], mode)) for p in self.points)
        weight = coerce(self.y_weight, mode)
        if not points:
            raise DegeneratePointSet("A point set needs at least one point")
        if weight <= 0:
            raise DegeneratePointSet(f"y-weight must be positive, got {weight}")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "y_weight", weight)
        self._check_distinct()

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def exact(self) -> bool:
        return self.mode == Mode.EXACT

    def _check_distinct(self):
        if self.exact:
            seen = {}
            for index, point in enumerate(self.points):
                if point in seen:
                    raise DegeneratePointSet(
                        f"Points {seen[point]} and {index} coincide at {point}"
                    )
                seen[point] = index
            return
        order = sorted(range(self.n), key=lambda i: self.points[i].x)
        for pos, i in enumerate(order):
            p = self.points[i]
            for j in order[pos + 1 :]:
                q = self.points[j]
                if (q.x - p.x) ** 2 >= EPS_DEG:
                    break
                if squared_distance(p, q, self.y_weight) < EPS_DEG:
                    raise DegeneratePointSet(f"Points {i} and {j} are closer than the floor")

    def subset(self, indices) -> "PointSet":
        return PointSet(
            tuple(self.points[i] for i in indices),
            self.mode,
            self.label,
            dict(self.metadata),
            self.y_weight,
        )

    def coordinate_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.fromiter((float(p.x) for p in self.points), dtype=float, count=self.n)
        ys = np.fromiter((float(p.y) for p in self.points), dtype=float, count=self.n)
        return xs, ys


def convert_mode(X: PointSet, mode: Mode) -> PointSet:
    """Explicit mode change; approx to exact keeps the binary64 values exactly."""
    mode = Mode(mode)
    if mode == X.mode:
        return X
    cast = float if mode == Mode.APPROX else Fraction
    return PointSet(
        tuple(Point(cast(p.x), cast(p.y)) for p in X.points),
        mode,
        X.label,
        dict(X.metadata),
        cast(X.y_weight),
    )


def squared_distance(p: Point, q: Point, y_weight: Number = 1) -> Number:
    kinds = {_kind(v) for v in (p[0], p[1], q[0], q[1], y_weight)} - {None}
    if len(kinds) > 1:
        raise ModeMismatch(f"Mixed exact and approximate coordinates: {p}, {q}")
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + y_weight * dy * dy


# Spectrum types
@dataclass_json
@dataclass(frozen=True)
class DistanceClass:
    key: Number = field(metadata=NUMBER_FIELD)
    multiplicity: int
    members: Optional[list[tuple[int, int]]] = None
    spread: float = 0.0

    def __post_init__(self):
        assert self.multiplicity >= 1
        if self.members is not None:
            assert len(self.members) == self.multiplicity


@dataclass_json
@dataclass(frozen=True)
class ClusteringAudit:
    max_intra_spread: float
    min_inter_gap: float
    floor: float

    @property
    def ratio(self) -> float:
        return self.min_inter_gap / max(self.max_intra_spread, self.floor)

    @property
    def reliable(self) -> bool:
        return self.ratio >= SAFETY


@dataclass_json
@dataclass(frozen=True)
class DistanceSpectrum:
    classes: list[DistanceClass]
    n: int
    mode: Mode
    audit: Optional[ClusteringAudit] = None

    def __post_init__(self):
        multiplicities = self.multiplicities
        assert sum(multiplicities) == self.n * (self.n - 1) // 2
        assert all(a >= b for a, b in zip(multiplicities, multiplicities[1:]))

    @property
    def m(self) -> int:
        return len(self.classes)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(c.multiplicity for c in self.classes)

    @property
    def reliable(self) -> bool:
        return self.audit is None or self.audit.reliable

    @cached_property
    def by_key(self) -> list[DistanceClass]:
        return sorted(self.classes, key=lambda c: c.key)

    @cached_property
    def _key_index(self) -> dict:
        return {c.key: c for c in self.classes}

    @cached_property
    def _sorted_keys(self) -> list[float]:
        return [c.key for c in self.by_key]


@dataclass_json
@dataclass(frozen=True)
class ExtremalDistances:
    diameter_key: Number = field(metadata=NUMBER_FIELD)
    smallest_key: Number = field(metadata=NUMBER_FIELD)
    second_largest_key: Optional[Number] = field(default=None, metadata=NUMBER_FIELD)


class ChordClass(NamedTuple):
    step: int
    key: float
    multiplicity: int


# Pair enumeration
def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _row_differences(values: np.ndarray) -> list[np.ndarray]:
    n = len(values)
    return [values[i + 1 :] - values[i] for i in range(n - 1)]


def _exact_pair_keys(X: PointSet) -> tuple[np.ndarray, int]:
    """Integer pair keys and the common denominator of the true squared distances."""
    weight = Fraction(X.y_weight)
    scale = math.lcm(*(v.denominator for p in X.points for v in p))
    xs = [int(p.x * scale) for p in X.points]
    ys = [int(p.y * scale) for p in X.points]
    extent = max(max(map(abs, xs)), max(map(abs, ys)))
    bound = (weight.numerator + weight.denominator) * (2 * extent) ** 2
    dtype = np.int64 if bound < INT64_SAFE else object
    xs = np.array(xs, dtype=dtype)
    ys = np.array(ys, dtype=dtype)
    dx = np.concatenate(_row_differences(xs))
    dy = np.concatenate(_row_differences(ys))
    keys = weight.denominator * dx * dx + weight.numerator * dy * dy
    logger.debug(f"Exact pair keys: {len(keys)} pairs, dtype={keys.dtype}, scale={scale}")
    return keys, weight.denominator * scale * scale


def _approx_pair_keys(X: PointSet) -> np.ndarray:
    xs, ys = X.coordinate_arrays()
    dx = np.concatenate(_row_differences(xs))
    dy = np.concatenate(_row_differences(ys))
    return dx * dx + float(X.y_weight) * dy * dy


def _members(order: np.ndarray, start: int, end: int, rows, cols) -> list[tuple[int, int]]:
    picked = np.sort(order[start:end])
    return [(int(rows[k]), int(cols[k])) for k in picked]


def _exact_classes(X: PointSet, keep_members: bool) -> list[DistanceClass]:
    keys, denominator = _exact_pair_keys(X)
    order = np.argsort(keys, kind="stable")
    ordered = keys[order]
    boundaries = np.nonzero(ordered[1:] != ordered[:-1])[0] + 1
    starts = np.concatenate(([0], boundaries)).astype(int)
    ends = np.concatenate((boundaries, [len(ordered)])).astype(int)
    rows, cols = _pair_indices(X.n) if keep_members else (None, None)
    return [
        DistanceClass(
            key=Fraction(int(ordered[start]), denominator),
            multiplicity=int(end - start),
            members=_members(order, start, end, rows, cols) if keep_members else None,
        )
        for start, end in zip(starts, ends)
    ]


def _approx_classes(
    X: PointSet, keep_members: bool
) -> tuple[list[DistanceClass], ClusteringAudit]:
    keys = _approx_pair_keys(X)
    order = np.argsort(keys, kind="stable")
    ordered = keys[order]
    breaks = np.nonzero(np.diff(ordered) > EPS_REL * ordered[1:])[0] + 1
    starts = np.concatenate(([0], breaks)).astype(int)
    ends = np.concatenate((breaks, [len(ordered)])).astype(int)
    low = ordered[starts]
    high = ordered[ends - 1]
    spreads = high - low
    gaps = low[1:] - high[:-1]
    audit = ClusteringAudit(
        max_intra_spread=float(spreads.max()),
        min_inter_gap=float(gaps.min()) if len(gaps) else math.inf,
        floor=EPS_MACHINE * max(1.0, float(ordered[-1])),
    )
    rows, cols = _pair_indices(X.n) if keep_members else (None, None)
    classes = [
        DistanceClass(
            key=float((low[c] + high[c]) / 2),
            multiplicity=int(ends[c] - starts[c]),
            members=_members(order, starts[c], ends[c], rows, cols) if keep_members else None,
            spread=float(spreads[c]),
        )
        for c in range(len(starts))
    ]
    return classes, audit


def distance_spectrum(
    X: PointSet, *, keep_members: bool = False, strict: bool = True
) -> DistanceSpectrum:
    """a(X): distance classes sorted by descending multiplicity, then descending key."""
    if X.n < 2:
        raise DegeneratePointSet("A spectrum needs at least two points")
    audit = None
    if X.exact:
        classes = _exact_classes(X, keep_members)
    else:
        classes, audit = _approx_classes(X, keep_members)
        if not audit.reliable:
            message = (
                f"Clustering audit failed for {X.label or 'point set'}: "
                f"gap {audit.min_inter_gap:.3e} vs spread {audit.max_intra_spread:.3e}"
            )
            if strict:
                raise UnreliableClustering(message)
            logger.warning(message)
    classes.sort(key=lambda c: (-c.multiplicity, -c.key))
    return DistanceSpectrum(classes=classes, n=X.n, mode=X.mode, audit=audit)


def extremal_distances(S: DistanceSpectrum) -> ExtremalDistances:
    if S.m < 1:
        raise DegeneratePointSet("No distances in an empty spectrum")
    keys = S._sorted_keys
    return ExtremalDistances(
        diameter_key=keys[-1],
        smallest_key=keys[0],
        second_largest_key=keys[-2] if S.m >= 2 else None,
    )


def find_class(S: DistanceSpectrum, key: Number) -> Optional[DistanceClass]:
    if S.mode == Mode.EXACT:
        if _kind(key) == Mode.APPROX:
            raise ModeMismatch(f"Float key {key!r} queried on an exact spectrum")
        return S._key_index.get(Fraction(key))
    if not S.reliable:
        raise UnreliableClustering("Class identity is undefined for an unreliable spectrum")
    key = float(key)
    keys = S._sorted_keys
    pos = bisect.bisect_left(keys, key)
    best = None
    best_distance = math.inf
    for candidate in S.by_key[max(0, pos - 1) : pos + 1]:
        distance = max(0.0, abs(candidate.key - key) - candidate.spread / 2)
        if distance < best_distance:
            best, best_distance = candidate, distance
    if best is None:
        return None
    tolerance = EPS_REL * max(key, best.key)
    if best_distance <= tolerance:
        return best
    if best_distance >= SAFETY * tolerance:
        return None
    raise UnreliableClustering(
        f"Key {key!r} lies {best_distance:.3e} from class {best.key!r}: ambiguous"
    )


def multiplicity_of(S: DistanceSpectrum, key: Number) -> int:
    found = find_class(S, key)
    return 0 if found is None else found.multiplicity


def pairs_at(X: PointSet, S: DistanceSpectrum, key: Number) -> list[tuple[int, int]]:
    """Index pairs (i < j) realizing the class of `key`."""
    found = find_class(S, key)
    if found is None:
        return []
    if found.members is not None:
        return list(found.members)
    if X.exact:
        keys, denominator = _exact_pair_keys(X)
        target = found.key * denominator
        assert target.denominator == 1
        hits = np.nonzero(keys == target.numerator)[0]
    else:
        keys = _approx_pair_keys(X)
        slack = found.spread / 2 + EPS_REL * found.key
        hits = np.nonzero(np.abs(keys - found.key) <= slack)[0]
    rows, cols = _pair_indices(X.n)
    pairs = [(int(rows[k]), int(cols[k])) for k in hits]
    assert len(pairs) == found.multiplicity
    return pairs


def is_full_staircase(S: DistanceSpectrum) -> bool:
    return S.m == S.n - 1 and S.multiplicities == tuple(range(S.n - 1, 0, -1))


def has_distinct_multiplicities(S: DistanceSpectrum) -> bool:
    return len(set(S.multiplicities)) == S.m


def brute_force_spectrum(X: PointSet) -> list[tuple[Fraction, int]]:
    """Independent sort-and-group oracle over all pairs, ascending by key."""
    if not X.exact:
        raise ModeMismatch("The pair oracle groups exact keys only")
    keys = sorted(
        squared_distance(p, q, X.y_weight) for p, q in itertools.combinations(X.points, 2)
    )
    return [(key, len(list(group))) for key, group in itertools.groupby(keys)]


def chord_class_spectrum(n: int) -> list[ChordClass]:
    """Regular n-gon (unit circumradius) chord classes by index difference."""
    return [
        ChordClass(
            step=j,
            key=4 * math.sin(math.pi * j / n) ** 2,
            multiplicity=n // 2 if 2 * j == n else n,
        )
        for j in range(1, n // 2 + 1)
    ]


# Predicates
def cross(o: Point, a: Point, b: Point) -> Number:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def orientation_tolerance(X: PointSet) -> Number:
    """Zero for exact sets; the orientation guard rescaled to the set's extent otherwise."""
    if X.exact:
        return 0
    xs, ys = X.coordinate_arrays()
    extent = max(float(np.ptp(xs)), float(np.ptp(ys)), 1e-300)
    return EPS_ORIENT * extent * extent


def is_collinear(X: PointSet) -> bool:
    if X.n <= 2:
        return True
    tolerance = orientation_tolerance(X)
    origin, anchor = X.points[0], X.points[1]
    return all(abs(cross(origin, anchor, p)) <= tolerance for p in X.points[2:])


def _circumcenter(a: Point, b: Point, c: Point, weight: Number) -> Point:
    def norm(p):
        return p.x * p.x + weight * p.y * p.y

    a1, b1, c1 = 2 * (b.x - a.x), 2 * weight * (b.y - a.y), norm(b) - norm(a)
    a2, b2, c2 = 2 * (c.x - a.x), 2 * weight * (c.y - a.y), norm(c) - norm(a)
    det = a1 * b2 - a2 * b1
    return Point((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)


def is_cocircular(X: PointSet) -> bool:
    """True iff one circle (in the set's metric) passes through every point."""
    if is_collinear(X):
        return False
    tolerance = orientation_tolerance(X)
    a, b = X.points[0], X.points[1]
    c = next(p for p in X.points[2:] if abs(cross(a, b, p)) > tolerance)
    center = _circumcenter(a, b, c, X.y_weight)
    radius = squared_distance(a, center, X.y_weight)
    if X.exact:
        return all(squared_distance(p, center, X.y_weight) == radius for p in X.points)
    slack = SAFETY * EPS_REL * radius
    return all(abs(squared_distance(p, center, X.y_weight) - radius) <= slack for p in X.points)
