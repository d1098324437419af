"""One verifier per claim, each emitting machine-readable reports."""

import inspect
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from dataclasses_json import dataclass_json
from loguru import logger

import constructions
import geometry
import layers
import sum2squares
from config import (
    CASCADE_CASES,
    CASCADE_DISTANCES,
    DEFAULT_SEED,
    DENSE_GRID_MAX,
    DENSE_RANDOM_COUNT,
    DENSE_RANDOM_MAX_N,
    GRID8_RANGE,
    GRID_RATIO_CASES,
    HEX_MAX_N,
    LEMMA_RANGE,
    NGON_RANGE,
    RANDOM_SET_COUNT,
    RANDOM_SET_MAX_N,
    RICH_TREND_SIDES,
    STAIRCASE_MAX_N,
    THREADS,
    THREE_GROUP_CASES,
)
from constructions import JSONABLE, CascadeSpec, ConstructionResult, Verdict
from errors import InputError, NotConvex, RangeExceeded, TooSmall
from geometry import PointSet

# Largest round count the audited float spectrum still certifies.
MAX_CASCADE_ROUNDS = 11


@dataclass_json
@dataclass(frozen=True)
class ClaimReport:
    claim_id: str
    verdict: Verdict
    inputs: dict = field(default_factory=dict, metadata=JSONABLE)
    evidence: dict = field(default_factory=dict, metadata=JSONABLE)

    @property
    def failed(self) -> bool:
        return self.verdict == Verdict.FAIL


def _verdict(ok: bool) -> Verdict:
    return Verdict.PASS if ok else Verdict.FAIL


def _facts_evidence(result: ConstructionResult) -> tuple[bool, dict]:
    outcomes = constructions.check_facts(result)
    failed = [o for o in outcomes if o.verdict == Verdict.FAIL]
    evidence = dict(
        checked=len(outcomes),
        failed=[dict(fact=o.name, observed=o.observed) for o in failed],
        reported={o.name: o.observed for o in outcomes if o.verdict == Verdict.REPORTED},
    )
    return not failed, evidence


def _random_sets(seed: int, count: int, max_n: int) -> list[PointSet]:
    sizes = [2 + (seed + i * 7) % (max_n - 1) for i in range(count)]
    return [
        constructions.random_rational_points(n, seed=seed * 1000 + i).point_set
        for i, n in enumerate(sizes)
    ]


# Direct verifiers
def verify_convex_second_distance(X: PointSet) -> ClaimReport:
    """Some distance other than the diameter occurs at most n times in a convex set."""
    n = X.n
    if n < 5:
        raise TooSmall(f"Needs n >= 5, got {n}; the rhombus of two unit triangles is a counterexample")
    hull = layers.convex_hull(X)
    if len(hull) != n:
        raise NotConvex(f"{n - len(hull)} of {n} points lie inside the hull")
    S = geometry.distance_spectrum(X)
    diameter = geometry.extremal_distances(S).diameter_key
    others = [c.multiplicity for c in S.classes if c.key != diameter]
    sparse = [m for m in others if m <= n]
    counting_bound = (n // 2) * (n + 1) + 1
    return ClaimReport(
        claim_id="thm:second",
        verdict=_verdict(bool(sparse) or not others),
        inputs=dict(label=X.label, n=n),
        evidence=dict(
            m=S.m,
            multiplicities=S.multiplicities,
            min_non_diameter=min(others, default=None),
            counting_applies=S.m > n // 2,
            counting_bound=counting_bound,
            counting_contradiction=counting_bound > math.comb(n, 2),
        ),
    )


def verify_staircase(X: PointSet, *, expect: Optional[dict] = None) -> ClaimReport:
    """Staircase, distinctness, collinearity and cocircularity of X; pass/fail against `expect`."""
    if X.n < 2:
        raise TooSmall(f"Needs n >= 2, got {X.n}")
    S = geometry.distance_spectrum(X)
    evidence = dict(
        staircase=geometry.is_full_staircase(S),
        distinct=geometry.has_distinct_multiplicities(S),
        collinear=geometry.is_collinear(X),
        cocircular=geometry.is_cocircular(X),
        multiplicities=S.multiplicities,
    )
    if expect is None:
        verdict = Verdict.REPORTED
    else:
        verdict = _verdict(all(evidence[k] == v for k, v in expect.items()))
    return ClaimReport(
        claim_id="obs:simple",
        verdict=verdict,
        inputs=dict(label=X.label, n=X.n),
        evidence=evidence,
    )


def verify_cascade(spec: CascadeSpec) -> ClaimReport:
    """Top k multiplicities belong to the prescribed distances and exceed the rest by ~(n/2k) log n."""
    if spec.rounds > MAX_CASCADE_ROUNDS:
        raise RangeExceeded(f"At most {MAX_CASCADE_ROUNDS} rounds, got {spec.rounds}")
    result = constructions.translate_cascade(spec)
    ok, evidence = _facts_evidence(result)
    expected = constructions.cascade_multiplicities(spec.k, spec.rounds)
    evidence.update(
        n=spec.n,
        expected=expected,
        observed=result.details["multiplicities"],
        attempts=result.details["attempts"],
    )
    if spec.n >= 2:
        S = geometry.distance_spectrum(result.point_set)
        evidence["top"] = S.multiplicities[: spec.k + 1]
    ok = ok and result.details["multiplicities"] == expected
    return ClaimReport(
        claim_id="thm:diff",
        verdict=_verdict(ok),
        inputs=dict(k=spec.k, prescribed=spec.prescribed, rounds=spec.rounds, seed=spec.seed),
        evidence=evidence,
    )


# Claim runners
def _facts_claim(claim_id: str, results, **inputs) -> ClaimReport:
    failing = {}
    checked = 0
    for result in results:
        ok, evidence = _facts_evidence(result)
        checked += 1
        if not ok:
            failing[result.point_set.label] = evidence["failed"]
    return ClaimReport(
        claim_id=claim_id,
        verdict=_verdict(not failing),
        inputs=inputs,
        evidence=dict(checked=checked, failing=failing),
    )


def run_second(seed: int, sizes=(9, 12, 20), random_count: int = 5) -> list[ClaimReport]:
    reports = [verify_convex_second_distance(constructions.regular_ngon(n).point_set) for n in sizes]
    for i in range(random_count):
        X = constructions.rational_circle_points(20, seed=seed + i).point_set
        reports.append(verify_convex_second_distance(X))
    return reports


def run_conjecture(seed: int, count: int = RANDOM_SET_COUNT, max_n: int = RANDOM_SET_MAX_N) -> list[ClaimReport]:
    """Empirical: does some non-diameter class have multiplicity at most n."""
    sets = [X for X in _random_sets(seed, count, max_n) if X.n >= 5]
    sets.append(constructions.three_group_construction(7, 21).point_set)
    sets.extend(constructions.grid_section(s, s).point_set for s in (3, 5, 8))
    holding = 0
    for X in sets:
        S = geometry.distance_spectrum(X)
        diameter = geometry.extremal_distances(S).diameter_key
        holding += any(c.multiplicity <= X.n for c in S.classes if c.key != diameter)
    return [
        ClaimReport(
            claim_id="conj:second",
            verdict=Verdict.REPORTED,
            inputs=dict(seed=seed, sets=len(sets)),
            evidence=dict(holding=holding, total=len(sets)),
        )
    ]


def run_ngon(seed: int, low: int = NGON_RANGE[0], high: int = NGON_RANGE[1]) -> list[ClaimReport]:
    return [
        _facts_claim("fact:ngon", (constructions.regular_ngon(n) for n in range(low, high + 1)), family="regular", n=[low, high]),
        _facts_claim("fact:ngon", (constructions.ngon_minus_vertex(n) for n in range(low, high + 1)), family="minus-vertex", n=[low, high]),
    ]


def _invariant_sets(seed: int) -> list[PointSet]:
    sets = _random_sets(seed, RANDOM_SET_COUNT, RANDOM_SET_MAX_N)
    sets.extend(constructions.grid_section(s, s).point_set for s in (2, 4, 7))
    sets.append(constructions.hex_two_row(11).point_set)
    sets.append(constructions.regular_ngon(12).point_set)
    return sets


def _invariant_claim(claim_id: str, seed: int, pick: Callable, limit: Callable) -> list[ClaimReport]:
    violations = []
    sets = _invariant_sets(seed)
    for X in sets:
        S = geometry.distance_spectrum(X)
        extremes = geometry.extremal_distances(S)
        key = pick(extremes)
        if key is None:
            continue
        mu = geometry.multiplicity_of(S, key)
        if mu > limit(X.n):
            violations.append(dict(label=X.label, n=X.n, multiplicity=mu))
    return [
        ClaimReport(
            claim_id=claim_id,
            verdict=_verdict(not violations),
            inputs=dict(seed=seed, sets=len(sets)),
            evidence=dict(violations=violations),
        )
    ]


def run_hopf_pannwitz(seed: int) -> list[ClaimReport]:
    return _invariant_claim("fact:hopf-pannwitz", seed, lambda e: e.diameter_key, lambda n: n)


def run_vesztergombi(seed: int) -> list[ClaimReport]:
    return _invariant_claim("fact:vesztergombi", seed, lambda e: e.second_largest_key, lambda n: 3 * n // 2)


def run_dense(
    seed: int,
    grid_max: int = DENSE_GRID_MAX,
    random_count: int = DENSE_RANDOM_COUNT,
    max_n: int = DENSE_RANDOM_MAX_N,
) -> list[ClaimReport]:
    inputs = [constructions.grid_section(s, s).point_set for s in range(2, grid_max + 1)]
    inputs.extend(X for X in _random_sets(seed, random_count, max_n) if X.n >= 3)
    inputs.append(constructions.three_group_construction(7, 21).point_set)
    failing = []
    for X in inputs:
        if geometry.distance_spectrum(X).m < 2:
            continue
        report = layers.check_dense_theorem(X)
        if not report.holds or report.violations:
            failing.append(dict(label=X.label, report=report))
    return [
        ClaimReport(
            claim_id="thm:dense",
            verdict=_verdict(not failing),
            inputs=dict(seed=seed, grid_max=grid_max, sets=len(inputs)),
            evidence=dict(failing=failing),
        )
    ]


def run_corollary(seed: int, sides=(10, 20, 40)) -> list[ClaimReport]:
    reports = []
    trend = []
    for s in sides:
        X = constructions.grid_section(s, s).point_set
        report = layers.check_diameter_ratio_corollary(X)
        trend.append(dict(side=s, ratio=report.ratio, limit=report.limit, applies=report.applies))
        if report.applies:
            reports.append(
                ClaimReport("cor:dense", _verdict(report.holds), dict(side=s), report.to_dict(encode_json=False))
            )
    ngon = layers.check_diameter_ratio_corollary(constructions.regular_ngon(10).point_set)
    trend.append(dict(label="regular-ngon n=10", ratio=ngon.ratio, limit=ngon.limit, applies=ngon.applies))
    reports.append(ClaimReport("cor:dense", Verdict.REPORTED, dict(sides=list(sides)), dict(trend=trend)))
    return reports


def run_three_group(seed: int, cases=THREE_GROUP_CASES) -> list[ClaimReport]:
    reports = []
    for m, n in cases:
        result = constructions.three_group_construction(m, n)
        ok, evidence = _facts_evidence(result)
        deficit_ratio = result.details["deficit_ratio"]
        evidence.update(deficit=result.details["deficit"], deficit_ratio=deficit_ratio)
        reports.append(
            ClaimReport("thm:cons", _verdict(ok and deficit_ratio <= 0.5), dict(m=m, n=n), evidence)
        )
    return reports


def run_many(seed: int, sides=RICH_TREND_SIDES, factor: int = 2) -> list[ClaimReport]:
    """Rich-distance counts in growing grids, threshold factor * n."""
    table = []
    for s in sides:
        report = sum2squares.grid_rich_distances(s, factor * s * s)
        table.append(dict(side=s, n=report.n, m=report.m, rich=report.rich_count))
    return [ClaimReport("thm:many", Verdict.REPORTED, dict(sides=list(sides), factor=factor), dict(trend=table))]


def run_sections(seed: int, cases=GRID_RATIO_CASES) -> list[ClaimReport]:
    reports = []
    for s, divisor in cases:
        report = sum2squares.grid_section_ratios(s, divisor)
        reports.append(
            ClaimReport(
                "thm:m/9",
                _verdict(report.all_qualifying_meet),
                dict(side=s, divisor=divisor),
                report.to_dict(encode_json=False),
            )
        )
    return reports


def run_lemma(seed: int, low: int = LEMMA_RANGE[0], high: int = LEMMA_RANGE[1]) -> list[ClaimReport]:
    reports = []
    for k in range(low, high + 1):
        construction = sum2squares.lemma_many_construct(k)
        reports.append(
            ClaimReport(
                "lem:many",
                _verdict(construction.certified),
                dict(k=k),
                dict(
                    n=construction.n,
                    primes=construction.primes,
                    subsets=construction.subset_count,
                    expected_subsets=construction.expected_subset_count,
                    flagged=construction.flagged,
                ),
            )
        )
    return reports


def run_cascade(seed: int, cases=CASCADE_CASES) -> list[ClaimReport]:
    return [
        verify_cascade(CascadeSpec(k=k, prescribed=list(CASCADE_DISTANCES[:k]), rounds=rounds, seed=seed))
        for k, rounds in cases
    ]


def run_staircase(seed: int, max_n: int = STAIRCASE_MAX_N) -> list[ClaimReport]:
    return [
        _facts_claim("obs:staircase", (constructions.equidistant_line(n) for n in range(2, max_n + 1)), family="line"),
        _facts_claim("obs:staircase", (constructions.equidistant_circle(n) for n in range(3, max_n + 1)), family="circle"),
    ]


def run_simple(seed: int, max_n: int = STAIRCASE_MAX_N) -> list[ClaimReport]:
    expect = dict(staircase=True, collinear=False, cocircular=False)
    return [verify_staircase(constructions.arc_with_center(n).point_set, expect=expect) for n in range(4, max_n + 1)]


def run_distinct(seed: int, max_n: int = HEX_MAX_N) -> list[ClaimReport]:
    return [_facts_claim("prop:distinct-mu", (constructions.hex_two_row(n) for n in range(2, max_n + 1)), n=[2, max_n])]


def run_grid8(seed: int, low: int = GRID8_RANGE[0], high: int = GRID8_RANGE[1], k: Optional[int] = None) -> list[ClaimReport]:
    ks = [k] if k is not None else range(low, high + 1)
    reports = []
    for k in ks:
        check = constructions.exact_eight_check(k)
        evidence = {str(key): count for key, count in zip(check.keys, check.counts)}
        evidence["extra_representations"] = check.extra_representations
        reports.append(ClaimReport("obs:grid8", _verdict(check.passed), dict(k=k), evidence))
    return reports


class Claim(NamedTuple):
    claim_id: str
    runner: Callable[..., list[ClaimReport]]
    summary: str


REGISTRY: dict[str, Claim] = {
    c.claim_id: c
    for c in (
        Claim("fact:ngon", run_ngon, "regular polygon spectra and their one-vertex deletions"),
        Claim("fact:hopf-pannwitz", run_hopf_pannwitz, "the diameter occurs at most n times"),
        Claim("fact:vesztergombi", run_vesztergombi, "the second largest distance occurs at most 3n/2 times"),
        Claim("thm:second", run_second, "convex sets have a non-diameter distance occurring at most n times"),
        Claim("conj:second", run_conjecture, "empirical check of the same statement for arbitrary sets"),
        Claim("thm:dense", run_dense, "second largest distance bounded by the two outer layers"),
        Claim("cor:dense", run_corollary, "sets with small diameter ratio have mu(second) <= n"),
        Claim("thm:cons", run_three_group, "three-group set with many second largest and smallest distances"),
        Claim("thm:many", run_many, "rich distances in grids (trend)"),
        Claim("thm:m/9", run_sections, "grid section classes reaching c*n"),
        Claim("lem:many", run_lemma, "products of primes 1 mod 4 with many representations"),
        Claim("thm:diff", run_cascade, "translate cascade with prescribed top multiplicities"),
        Claim("obs:staircase", run_staircase, "equidistant points on a line or an arc"),
        Claim("obs:simple", run_simple, "arc with its center is a staircase off every line and circle"),
        Claim("prop:distinct-mu", run_distinct, "hexagonal two-row strips have distinct multiplicities"),
        Claim("obs:grid8", run_grid8, "two grid distances occur exactly 8 times"),
    )
}

# Statements with no runner of their own.
OUT_OF_SCOPE = {
    "conj:second-proof": "the general statement is open for n >= 7; only per-input checks exist",
    "problem:min-second-smallest": "open problem on the limit of min(mu(second), mu(smallest))/n",
    "problem:a1-a2": "open problem on superlinear growth of a1 - a2",
    "problem:staircase-uniqueness": "open problem on uniqueness of staircase configurations",
}
COVERED_BY = {
    "cor:diff": "thm:diff",
}


def resolve(claim_id: str) -> str:
    if claim_id in REGISTRY:
        return claim_id
    matches = [full for full in REGISTRY if full.split(":", 1)[1] == claim_id]
    if len(matches) != 1:
        raise InputError(f"Unknown claim {claim_id!r}; known: {', '.join(REGISTRY)}")
    return matches[0]


def run_claim(claim_id: str, seed: int = DEFAULT_SEED, **params) -> list[ClaimReport]:
    claim = REGISTRY[resolve(claim_id)]
    accepted = set(inspect.signature(claim.runner).parameters) - {"seed"}
    unknown = sorted(set(params) - accepted)
    if unknown:
        raise InputError(f"{claim.claim_id} takes no parameter(s) {unknown}; known: {sorted(accepted)}")
    reports = claim.runner(seed, **params)
    for report in reports:
        logger.info(f"{report.claim_id}: {report.verdict.value} {report.inputs}")
    return reports


def _run_default(claim_id: str, seed: int) -> list[ClaimReport]:
    return run_claim(claim_id, seed)


def verify_all(selection=("all",), seed: int = DEFAULT_SEED, *, threads: int = THREADS) -> list[ClaimReport]:
    """Run the selected claims at default parameters, keeping registry order."""
    selection = list(selection)
    if not selection:
        return []
    if "all" in selection:
        ids = list(REGISTRY)
    else:
        chosen = {resolve(c) for c in selection}
        ids = [c for c in REGISTRY if c in chosen]
    if threads > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(_run_default, ids, [seed] * len(ids)))
    else:
        batches = [_run_default(c, seed) for c in ids]
    reports = [r for batch in batches for r in batch]
    failed = sum(r.failed for r in reports)
    logger.info(f"Verified {len(ids)} claims: {len(reports)} reports, {failed} failed")
    return reports
