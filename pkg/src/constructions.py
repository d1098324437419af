"""Point-set constructions, each paired with facts that the analyzers can re-check."""

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from dataclasses_json import config as json_config
from dataclasses_json import dataclass_json
from loguru import logger

import geometry
import reports
import sum2squares
from config import (
    CASCADE_DISTANCES,
    DEFAULT_ARC_DEGREES,
    DEFAULT_CIRCLE_ARC_DEGREES,
    DEFAULT_RETRY_BUDGET,
    DEFAULT_SEED,
    EPS_REL,
    RANDOM_DENOMINATOR,
    RANDOM_SPAN,
    SAFETY,
)
from errors import (
    AngleOutOfRange,
    InfeasibleGeometry,
    InputError,
    RetryBudgetExhausted,
    UnreliableClustering,
)
from geometry import Mode, Point, PointSet

JSONABLE = json_config(encoder=reports.jsonable)


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    REPORTED = "reported"


@dataclass_json
@dataclass(frozen=True)
class Fact:
    """A named predicate over the spectrum; `report_only` facts never fail."""

    name: str
    params: dict = field(default_factory=dict, metadata=JSONABLE)
    report_only: bool = False


@dataclass_json
@dataclass(frozen=True)
class FactOutcome:
    name: str
    verdict: Verdict
    observed: dict = field(default_factory=dict, metadata=JSONABLE)


@dataclass_json
@dataclass(frozen=True)
class ConstructionResult:
    point_set: PointSet
    expected_facts: list[Fact] = field(default_factory=list)
    details: dict = field(default_factory=dict, metadata=JSONABLE)


def _multiplicities_fact(values) -> Fact:
    return Fact("spectrum", dict(multiplicities=list(values)))


def _multiplicity_fact(key, *, equals=None, at_least=None) -> Fact:
    params = dict(key=key)
    if equals is not None:
        params["equals"] = equals
    if at_least is not None:
        params["at_least"] = at_least
    return Fact("multiplicity", params)


# Fact evaluation
def _same_key(S, key, found) -> bool:
    return found is not None and geometry.find_class(S, key) is found


def _evaluate(fact: Fact, X: PointSet, S) -> tuple[bool, dict]:
    p = fact.params
    name = fact.name
    if name == "spectrum":
        observed = list(S.multiplicities)
        return observed == list(p["multiplicities"]), dict(multiplicities=observed)
    if name == "multiplicity":
        mu = geometry.multiplicity_of(S, p["key"])
        ok = ("equals" not in p or mu == p["equals"]) and ("at_least" not in p or mu >= p["at_least"])
        return ok, dict(multiplicity=mu)
    if name == "full_staircase":
        value = geometry.is_full_staircase(S)
        return value == p["expected"], dict(value=value)
    if name == "distinct_multiplicities":
        value = geometry.has_distinct_multiplicities(S)
        return value == p["expected"], dict(value=value)
    if name == "collinear":
        value = geometry.is_collinear(X)
        return value == p["expected"], dict(value=value)
    if name == "cocircular":
        value = geometry.is_cocircular(X)
        return value == p["expected"], dict(value=value)
    if name in ("second_largest_key", "smallest_key", "diameter_key"):
        extremes = geometry.extremal_distances(S)
        observed = getattr(extremes, name)
        if observed is None:
            return False, dict(key=None)
        return _same_key(S, p["key"], geometry.find_class(S, observed)), dict(key=observed)
    if name == "chord_classes":
        chords = geometry.chord_class_spectrum(p["n"])
        ok = S.m == len(chords) and all(
            cls.multiplicity == chord.multiplicity and _same_key(S, chord.key, cls)
            for chord, cls in zip(chords, S.by_key)
        )
        return ok, dict(classes=S.m)
    if name == "rank":
        rank = p["rank"]
        if rank > S.m:
            return True, dict(value=None)
        value = S.multiplicities[rank - 1]
        ok = ("at_most" not in p or value <= p["at_most"]) and (
            "at_least" not in p or value >= p["at_least"]
        )
        return ok, dict(value=value)
    if name == "top_keys":
        top = {id(c) for c in S.classes[: len(p["keys"])]}
        found = [geometry.find_class(S, key) for key in p["keys"]]
        ok = all(c is not None for c in found) and {id(c) for c in found} == top
        return ok, dict(keys=[c.key for c in S.classes[: len(p["keys"])]])
    raise InputError(f"Unknown fact: {name}")


def check_facts(result: ConstructionResult) -> list[FactOutcome]:
    X = result.point_set
    if X.n < 2:
        return [FactOutcome(f.name, Verdict.FAIL, dict(error="no distances")) for f in result.expected_facts]
    S = geometry.distance_spectrum(X)
    outcomes = []
    for fact in result.expected_facts:
        ok, observed = _evaluate(fact, X, S)
        if fact.report_only:
            verdict = Verdict.REPORTED
        else:
            verdict = Verdict.PASS if ok else Verdict.FAIL
        if verdict == Verdict.FAIL:
            logger.warning(f"{X.label}: fact {fact.name} {fact.params} failed, observed {observed}")
        outcomes.append(FactOutcome(fact.name, verdict, observed))
    return outcomes


# Regular polygons
def _circle_points(angles) -> tuple[Point, ...]:
    return tuple(Point(math.cos(a), math.sin(a)) for a in angles)


def _ngon_multiplicities(n: int) -> list[int]:
    values = [n // 2 if 2 * j == n else n for j in range(1, n // 2 + 1)]
    return sorted(values, reverse=True)


def regular_ngon(n: int) -> ConstructionResult:
    if n < 3:
        raise InputError(f"A regular polygon needs n >= 3, got {n}")
    X = PointSet(
        _circle_points(2 * math.pi * j / n for j in range(n)),
        mode=Mode.APPROX,
        label=f"regular-ngon n={n}",
        metadata=dict(n=n),
    )
    chords = geometry.chord_class_spectrum(n)
    return ConstructionResult(
        point_set=X,
        expected_facts=[
            _multiplicities_fact(_ngon_multiplicities(n)),
            Fact("chord_classes", dict(n=n)),
        ],
        details=dict(chord_classes=[c._asdict() for c in chords]),
    )


def ngon_minus_vertex(n: int) -> ConstructionResult:
    """R_n with its last vertex removed, n - 1 points."""
    if n < 3:
        raise InputError(f"A regular polygon needs n >= 3, got {n}")
    X = PointSet(
        _circle_points(2 * math.pi * j / n for j in range(n - 1)),
        mode=Mode.APPROX,
        label=f"ngon-minus-vertex n={n}",
        metadata=dict(n=n),
    )
    values = []
    for j in range(1, n // 2 + 1):
        # Chord class j loses the pairs through the deleted vertex.
        count = n // 2 - 1 if 2 * j == n else n - 2
        if count:
            values.append(count)
    return ConstructionResult(
        point_set=X,
        expected_facts=[_multiplicities_fact(sorted(values, reverse=True))],
    )


# Staircases
def _staircase_facts(n: int, *, collinear: bool, cocircular: Optional[bool]) -> list[Fact]:
    facts = [
        Fact("full_staircase", dict(expected=True)),
        _multiplicities_fact(range(n - 1, 0, -1)),
        Fact("collinear", dict(expected=collinear)),
    ]
    if cocircular is not None:
        facts.append(Fact("cocircular", dict(expected=cocircular)))
    return facts


def equidistant_line(n: int) -> ConstructionResult:
    if n < 2:
        raise InputError(f"A line staircase needs n >= 2, got {n}")
    X = PointSet(
        tuple(Point(i, 0) for i in range(n)),
        mode=Mode.EXACT,
        label=f"equidistant-line n={n}",
        metadata=dict(n=n),
    )
    return ConstructionResult(point_set=X, expected_facts=_staircase_facts(n, collinear=True, cocircular=None))


def _arc_angles(count: int, arc: float) -> list[float]:
    if count == 1:
        return [0.0]
    return [-arc / 2 + arc * j / (count - 1) for j in range(count)]


def equidistant_circle(n: int, arc_degrees: float = DEFAULT_CIRCLE_ARC_DEGREES) -> ConstructionResult:
    """n equally spaced points on an arc of the unit circle shorter than a half circle."""
    if n < 3:
        raise InputError(f"A circle staircase needs n >= 3, got {n}")
    if not 0 < arc_degrees < 180:
        raise AngleOutOfRange(f"Arc must lie strictly between 0 and 180 degrees, got {arc_degrees}")
    X = PointSet(
        _circle_points(_arc_angles(n, math.radians(arc_degrees))),
        mode=Mode.APPROX,
        label=f"equidistant-circle n={n}",
        metadata=dict(n=n, arc_degrees=arc_degrees),
    )
    return ConstructionResult(point_set=X, expected_facts=_staircase_facts(n, collinear=False, cocircular=True))


def arc_with_center(n: int, angle_degrees: float = DEFAULT_ARC_DEGREES) -> ConstructionResult:
    """The center of the unit circle plus n - 1 equidistant points on an arc below 60 degrees."""
    if n < 3:
        raise InputError(f"An arc with center needs n >= 3, got {n}")
    if not 0 < angle_degrees < 60:
        raise AngleOutOfRange(f"Center angle must lie strictly between 0 and 60 degrees, got {angle_degrees}")
    points = (Point(0.0, 0.0),) + _circle_points(_arc_angles(n - 1, math.radians(angle_degrees)))
    X = PointSet(
        points,
        mode=Mode.APPROX,
        label=f"arc-with-center n={n}",
        metadata=dict(n=n, angle_degrees=angle_degrees),
    )
    # Any three points are cocircular.
    facts = _staircase_facts(n, collinear=False, cocircular=False if n >= 4 else None)
    facts.append(_multiplicity_fact(1.0, equals=n - 1))
    return ConstructionResult(point_set=X, expected_facts=facts)


# Three groups
def _lattice_fill(count: int) -> list[tuple[int, int]]:
    """The `count` triangular-lattice points (a, b) closest to the origin, ties by (a, b)."""
    reach = math.isqrt(2 * count) + 3
    candidates = [
        (a * a + a * b + b * b, a, b)
        for a in range(-reach, reach + 1)
        for b in range(-reach, reach + 1)
    ]
    candidates.sort()
    return [(a, b) for _, a, b in candidates[:count]]


def _lattice_edges(cells: list[tuple[int, int]]) -> int:
    present = set(cells)
    return sum(
        (a + da, b + db) in present for a, b in cells for da, db in ((1, 0), (0, 1), (-1, 1))
    )


def three_group_construction(m: int, n: int) -> ConstructionResult:
    """Regular m-gon, m points u_i at distance Δ₂ from v_i and v_(i+1), and a lattice patch.

    Radius is 1 rather than n; multiplicities are scale invariant.
    """
    if m < 5 or 2 * m > n:
        raise InputError(f"Need m >= 5 and 2m <= n, got m={m}, n={n}")
    step = 2 * math.pi / m
    chord = m // 2 - 1
    second_key = 4 * math.sin(math.pi * chord / m) ** 2
    half_side, apothem = math.sin(math.pi / m), math.cos(math.pi / m)
    reach_sq = second_key - half_side**2
    if reach_sq <= 0:
        raise InfeasibleGeometry(f"Circles of radius Δ₂ around adjacent vertices miss for m={m}")
    radius = apothem - math.sqrt(reach_sq)
    if abs(radius) >= 1:
        raise InfeasibleGeometry(f"Inner intersection leaves the circle for m={m}")
    outer = [(math.cos(step * i), math.sin(step * i)) for i in range(m)]
    inner = [(radius * math.cos(step * i + step / 2), radius * math.sin(step * i + step / 2)) for i in range(m)]
    mesh = 2 * abs(radius) * half_side
    lattice_count = n - 2 * m
    cells = _lattice_fill(lattice_count)
    lattice = [(mesh * (a + b / 2), mesh * b * math.sqrt(3) / 2) for a, b in cells]
    deficit = 3 * lattice_count - _lattice_edges(cells)
    if lattice:
        # Distances touching the patch must stay below Δ₂, or Δ and Δ₂ move off the m-gon.
        patch, everything = np.array(lattice), np.array(outer + inner + lattice)
        farthest = ((patch[:, None, :] - everything[None, :, :]) ** 2).sum(axis=2).max()
        if farthest >= second_key * (1 - SAFETY * EPS_REL):
            raise InfeasibleGeometry(
                f"Lattice of {lattice_count} points at mesh {mesh:.6g} reaches Δ₂ for m={m}: "
                f"farthest squared distance {farthest:.6g} >= {second_key:.6g}"
            )
    X = PointSet(
        tuple(Point(x, y) for x, y in outer + inner + lattice),
        mode=Mode.APPROX,
        label=f"three-group m={m} n={n}",
        metadata=dict(m=m, n=n),
    )
    mesh_key = mesh**2
    logger.info(f"Three-group set m={m} n={n}: mesh {mesh:.6g}, deficit {deficit}")
    return ConstructionResult(
        point_set=X,
        expected_facts=[
            _multiplicity_fact(second_key, at_least=3 * m),
            Fact("second_largest_key", dict(key=second_key)),
            _multiplicity_fact(mesh_key, at_least=3 * n - 5 * m - deficit),
            Fact("smallest_key", dict(key=mesh_key), report_only=True),
        ],
        details=dict(
            second_key=second_key,
            mesh_key=mesh_key,
            inner_radius=abs(radius),
            deficit=deficit,
            deficit_ratio=deficit / n,
            groups=dict(outer=list(range(m)), inner=list(range(m, 2 * m)), lattice=lattice_count),
        ),
    )


# Grids and hexagonal strips
def grid_section(w: int, h: int) -> ConstructionResult:
    if w < 1 or h < 1:
        raise InputError(f"Grid sides must be positive, got {w}x{h}")
    X = PointSet(
        tuple(Point(x, y) for x in range(w) for y in range(h)),
        mode=Mode.EXACT,
        label=f"grid {w}x{h}",
        metadata=dict(w=w, h=h),
    )
    facts = []
    if w == h >= 4:
        k = w
        facts = [
            _multiplicity_fact(Fraction((k - 1) ** 2 + (k - 2) ** 2), equals=8),
            _multiplicity_fact(Fraction(2 * (k - 2) ** 2), equals=8),
        ]
    details = {}
    for divisor in (3, 4, 5):
        if w == h and w % divisor == 0:
            details[f"sections_{divisor}"] = divisor * divisor
    return ConstructionResult(point_set=X, expected_facts=facts, details=details)


def hex_two_row(n: int) -> ConstructionResult:
    """Unit hexagonal strip on two adjacent rows, alternating rows left to right."""
    if n < 2:
        raise InputError(f"A two-row strip needs n >= 2, got {n}")
    X = PointSet(
        tuple(Point(Fraction(i, 2), Fraction(i % 2, 2)) for i in range(n)),
        mode=Mode.EXACT,
        label=f"hex-two-row n={n}",
        metadata=dict(n=n),
        y_weight=3,
    )
    facts = [Fact("distinct_multiplicities", dict(expected=True))]
    if n >= 4:
        facts.append(Fact("full_staircase", dict(expected=False)))
    if n % 2:
        k = n // 2
        facts.append(_multiplicity_fact(Fraction(1), equals=4 * k - 1))
        facts.extend(_multiplicity_fact(Fraction(j * j), equals=2 * (k - j) + 1) for j in range(2, k + 1))
        facts.extend(_multiplicity_fact(Fraction(j * j + j + 1), equals=2 * (k - j)) for j in range(1, k))
    return ConstructionResult(point_set=X, expected_facts=facts)


def rhombus() -> ConstructionResult:
    """Two unit equilateral triangles sharing a side."""
    X = PointSet(
        (Point(0, 0), Point(1, 0), Point(Fraction(1, 2), Fraction(1, 2)), Point(Fraction(3, 2), Fraction(1, 2))),
        mode=Mode.EXACT,
        label="rhombus",
        y_weight=3,
    )
    return ConstructionResult(point_set=X, expected_facts=[_multiplicities_fact([5, 1])])


# Random sets
def random_rational_points(
    n: int,
    seed: int = DEFAULT_SEED,
    denominator: int = RANDOM_DENOMINATOR,
    span: int = RANDOM_SPAN,
) -> ConstructionResult:
    if n < 1:
        raise InputError(f"Need at least one point, got {n}")
    rng = random.Random(seed)
    limit = span * denominator
    seen = {}
    while len(seen) < n:
        point = Point(Fraction(rng.randrange(limit), denominator), Fraction(rng.randrange(limit), denominator))
        seen.setdefault(point, None)
    X = PointSet(
        tuple(seen),
        mode=Mode.EXACT,
        label=f"random n={n} seed={seed}",
        metadata=dict(n=n, seed=seed, denominator=denominator),
    )
    return ConstructionResult(point_set=X)


def rational_circle_points(n: int, seed: int = DEFAULT_SEED) -> ConstructionResult:
    """n random rational points of the unit circle, ((1-t^2)/(1+t^2), 2t/(1+t^2))."""
    if n < 1:
        raise InputError(f"Need at least one point, got {n}")
    rng = random.Random(seed)
    params = set()
    while len(params) < n:
        params.add(Fraction(rng.randrange(-RANDOM_SPAN, RANDOM_SPAN + 1), rng.randrange(1, RANDOM_DENOMINATOR)))
    angles = sorted(params)
    X = PointSet(
        tuple(Point((1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)) for t in angles),
        mode=Mode.EXACT,
        label=f"rational-circle n={n} seed={seed}",
        metadata=dict(n=n, seed=seed),
    )
    return ConstructionResult(point_set=X, expected_facts=[Fact("cocircular", dict(expected=n >= 3))] if n >= 3 else [])


# Translate cascade
@dataclass_json
@dataclass(frozen=True)
class CascadeSpec:
    k: int
    prescribed: list[float]
    rounds: int
    seed: int = DEFAULT_SEED
    retry_budget: int = DEFAULT_RETRY_BUDGET

    def __post_init__(self):
        if self.k < 1 or len(self.prescribed) != self.k:
            raise InputError(f"Need k >= 1 prescribed distances, got k={self.k}, {self.prescribed}")
        if any(d <= 0 for d in self.prescribed) or len(set(self.prescribed)) != self.k:
            raise InputError(f"Prescribed distances must be positive and distinct: {self.prescribed}")
        if self.rounds < 0 or self.retry_budget < 1:
            raise InputError(f"Invalid rounds {self.rounds} or retry budget {self.retry_budget}")

    @property
    def n(self) -> int:
        return 2**self.rounds

    @property
    def keys(self) -> list[float]:
        return [d * d for d in self.prescribed]


def cascade_multiplicities(k: int, rounds: int) -> list[int]:
    """Prescribed multiplicities after `rounds` doublings: mu -> 2 mu, plus n_prev on the current slot."""
    counts = [0] * k
    for step in range(rounds):
        counts = [2 * c for c in counts]
        counts[step % k] += 2**step
    return counts


def _accepts(
    candidate: PointSet,
    spec: CascadeSpec,
    previous: Optional[geometry.DistanceSpectrum],
    expected: list[int],
) -> Optional[geometry.DistanceSpectrum]:
    """The audited union spectrum if the translation adds only to the prescribed class.

    Cross segments may coincide among themselves, but none may join an older class and
    no class other than a prescribed one may exceed the union size.
    """
    S = geometry.distance_spectrum(candidate, strict=False)
    if not S.reliable:
        return None
    try:
        prescribed = set()
        for key, mu in zip(spec.keys, expected):
            if geometry.multiplicity_of(S, key) != mu:
                return None
            if mu:
                prescribed.add(geometry.find_class(S, key).key)
        if previous is not None:
            for old in previous.classes:
                found = geometry.find_class(S, old.key)
                if found is None or (found.key not in prescribed and found.multiplicity != 2 * old.multiplicity):
                    return None
    except UnreliableClustering:
        return None
    n = candidate.n
    if any(c.multiplicity > n for c in S.classes if c.key not in prescribed):
        return None
    return S


def translate_cascade(spec: CascadeSpec) -> ConstructionResult:
    """Double the set `rounds` times, translating by the prescribed lengths in turn.

    A direction is accepted only when every older class exactly doubles and every
    prescribed distance carries its unrolled multiplicity.
    """
    rng = random.Random(spec.seed)
    points = np.zeros((1, 2))
    counts = [0] * spec.k
    previous = None
    attempts = []
    for step in range(1, spec.rounds + 1):
        slot = (step - 1) % spec.k
        length = spec.prescribed[slot]
        n_prev = len(points)
        expected = [2 * c for c in counts]
        expected[slot] += n_prev
        for attempt in range(1, spec.retry_budget + 1):
            theta = rng.uniform(0, 2 * math.pi)
            shift = np.array([length * math.cos(theta), length * math.sin(theta)])
            union = np.vstack([points, points + shift])
            candidate = PointSet(tuple(map(tuple, union.tolist())), mode=Mode.APPROX)
            accepted = _accepts(candidate, spec, previous, expected)
            if accepted is not None:
                break
            logger.debug(f"Cascade step {step}: direction {theta:.6f} rejected")
        else:
            raise RetryBudgetExhausted(f"No valid direction at step {step} after {spec.retry_budget} tries")
        points, counts, previous = union, expected, accepted
        attempts.append(attempt)
        logger.debug(f"Cascade step {step}: n={len(points)}, m={previous.m} after {attempt} tries")
    n = len(points)
    X = PointSet(
        tuple(map(tuple, points.tolist())),
        mode=Mode.APPROX,
        label=f"cascade k={spec.k} rounds={spec.rounds}",
        metadata=dict(k=spec.k, rounds=spec.rounds, seed=spec.seed),
    )
    facts = []
    if n >= 2:
        facts.extend(_multiplicity_fact(key, equals=mu) for key, mu in zip(spec.keys, counts) if mu)
        facts.append(Fact("rank", dict(rank=spec.k + 1, at_most=n)))
    if spec.rounds and spec.rounds % spec.k == 0:
        # log2 n = rounds exactly, so the lower bound is rational.
        bound = Fraction(n * spec.rounds, 2 * spec.k)
        facts.extend(Fact("rank", dict(rank=i, at_least=bound)) for i in range(1, spec.k + 1))
    if spec.rounds >= spec.k:
        facts.append(Fact("top_keys", dict(keys=spec.keys)))
    return ConstructionResult(
        point_set=X,
        expected_facts=facts,
        details=dict(multiplicities=counts, attempts=attempts, classes=previous.m if previous else 0),
    )


# Grid observation
@dataclass_json
@dataclass(frozen=True)
class EightReport:
    k: int
    keys: tuple[int, int]
    counts: tuple[int, int]
    extra_representations: dict[int, list[tuple[int, int]]]

    @property
    def passed(self) -> bool:
        return self.counts == (8, 8)


def exact_eight_check(k: int) -> EightReport:
    """Both (k-1)^2 + (k-2)^2 and 2(k-2)^2 occur exactly 8 times in the k x k grid."""
    if k < 4:
        raise InputError(f"Need k >= 4, got {k}")
    keys = ((k - 1) ** 2 + (k - 2) ** 2, 2 * (k - 2) ** 2)
    legs = ((k - 2, k - 1), (k - 2, k - 2))
    S = geometry.distance_spectrum(grid_section(k, k).point_set)
    counts = tuple(geometry.multiplicity_of(S, Fraction(key)) for key in keys)
    extra = {}
    for key, expected in zip(keys, legs):
        others = [
            rep for rep in sum2squares.brute_force_representations(key).reps
            if rep != expected and rep[1] <= k - 1
        ]
        if others:
            extra[key] = others
    if extra:
        logger.warning(f"k={k}: extra grid representations {extra}")
    return EightReport(k=k, keys=keys, counts=counts, extra_representations=extra)


def cascade(
    k: int,
    rounds: int,
    seed: int = DEFAULT_SEED,
    distances: Optional[list[float]] = None,
) -> ConstructionResult:
    prescribed = list(distances) if distances else list(CASCADE_DISTANCES[:k])
    return translate_cascade(CascadeSpec(k=k, prescribed=prescribed, rounds=rounds, seed=seed))


GENERATORS: dict[str, Callable[..., ConstructionResult]] = {
    "regular-ngon": regular_ngon,
    "ngon-minus-vertex": ngon_minus_vertex,
    "equidistant-line": equidistant_line,
    "equidistant-circle": equidistant_circle,
    "arc-with-center": arc_with_center,
    "three-group": three_group_construction,
    "grid": grid_section,
    "hex-two-row": hex_two_row,
    "cascade": cascade,
    "rhombus": rhombus,
    "random-rational": random_rational_points,
    "rational-circle": rational_circle_points,
}
