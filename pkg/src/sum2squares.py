"""Sums of two squares: factorization, representation counts and grid multiplicities."""

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from dataclasses_json import dataclass_json
from loguru import logger

from config import (
    BRUTE_FORCE_LIMIT,
    FACTOR_LIMIT,
    GRID_EXHAUSTIVE_MAX_SIDE,
    LEMMA_MAX_K,
    SMALL_PRIMES,
)
from errors import DivisibilityError, NotApplicable, RangeExceeded
from geometry import NUMBER_FIELD

SECTION_THRESHOLDS = {
    3: Fraction(16, 9),
    4: Fraction(9, 4),
    5: Fraction(64, 25),
}


class PrimeClass(Enum):
    TWO = "2"
    ONE_MOD_FOUR = "1 mod 4"
    THREE_MOD_FOUR = "3 mod 4"


def prime_class(p: int) -> PrimeClass:
    if p == 2:
        return PrimeClass.TWO
    return PrimeClass.ONE_MOD_FOUR if p % 4 == 1 else PrimeClass.THREE_MOD_FOUR


@dataclass_json
@dataclass(frozen=True)
class Factorization:
    n: int
    factors: dict[int, int]

    def __post_init__(self):
        assert math.prod(p**e for p, e in self.factors.items()) == self.n

    @property
    def classes(self) -> dict[int, PrimeClass]:
        return {p: prime_class(p) for p in self.factors}

    def exponents(self, kind: PrimeClass) -> dict[int, int]:
        return {p: e for p, e in self.factors.items() if prime_class(p) == kind}

    @property
    def is_sum_of_two_squares(self) -> bool:
        return all(e % 2 == 0 for e in self.exponents(PrimeClass.THREE_MOD_FOUR).values())

    @property
    def gaussian_divisor_count(self) -> int:
        """r2(n)/4, the number of Gaussian integers of norm n up to units."""
        if not self.is_sum_of_two_squares:
            return 0
        return math.prod(e + 1 for e in self.exponents(PrimeClass.ONE_MOD_FOUR).values())


# Primality and factoring
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; the fixed bases cover every n below 3.3e24."""
    if n < 2:
        return False
    for p in SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """A nontrivial factor of an odd composite n; c runs 1, 2, ... until one is found."""
    for c in itertools.count(1):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise AssertionError("unreachable")


def _split(n: int, factors: dict[int, int]):
    if n == 1:
        return
    if is_prime(n):
        factors[n] = factors.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split(d, factors)
    _split(n // d, factors)


def factorize(n: int) -> Factorization:
    if n < 1:
        raise NotApplicable(f"Cannot factorize {n}")
    if n > FACTOR_LIMIT:
        raise RangeExceeded(f"{n} exceeds the factoring limit {FACTOR_LIMIT}")
    factors = {}
    rest = n
    for p in SMALL_PRIMES:
        while rest % p == 0:
            factors[p] = factors.get(p, 0) + 1
            rest //= p
    _split(rest, factors)
    return Factorization(n=n, factors=dict(sorted(factors.items())))


def primes_one_mod_four(k: int) -> list[int]:
    """The k smallest primes congruent to 1 mod 4."""
    primes = []
    candidate = 5
    while len(primes) < k:
        if is_prime(candidate):
            primes.append(candidate)
        candidate += 4
    return primes


def prime_two_squares(p: int) -> tuple[int, int]:
    """(a, b) with a < b and a^2 + b^2 = p, by Euclid on a square root of -1."""
    if p % 4 != 1 or not is_prime(p):
        raise NotApplicable(f"{p} is not a prime congruent to 1 mod 4")
    c = next(c for c in itertools.count(2) if pow(c, (p - 1) // 2, p) == p - 1)
    a, b = p, pow(c, (p - 1) // 4, p)
    while b * b > p:
        a, b = b, a % b
    other = math.isqrt(p - b * b)
    assert b * b + other * other == p
    return tuple(sorted((b, other)))


# Representation counts
@dataclass_json
@dataclass(frozen=True)
class Sum2SquaresReport:
    n: int
    count: int
    reps: list[tuple[int, int]]
    ordered: int = 0

    def __post_init__(self):
        assert self.count == len(self.reps) == len(set(self.reps))
        assert all(a * a + b * b == self.n and 0 <= a <= b for a, b in self.reps)

    @property
    def r2(self) -> int:
        """Signed ordered representations, r2(n) = 4 * ordered."""
        return 4 * self.ordered


def _gaussian_mul(z, w):
    return (z[0] * w[0] - z[1] * w[1], z[0] * w[1] + z[1] * w[0])


def _gaussian_pow(z, e: int):
    result = (1, 0)
    for _ in range(e):
        result = _gaussian_mul(result, z)
    return result


def count_representations(n: int) -> Sum2SquaresReport:
    """R(n) from the Gaussian factorization of n, listing every representation."""
    if n == 0:
        return Sum2SquaresReport(n=0, count=1, reps=[(0, 0)], ordered=1)
    factorization = factorize(n)
    ordered = factorization.gaussian_divisor_count
    if not ordered:
        return Sum2SquaresReport(n=n, count=0, reps=[], ordered=0)
    base = (1, 0)
    for p, e in factorization.factors.items():
        kind = prime_class(p)
        if kind == PrimeClass.TWO:
            base = _gaussian_mul(base, _gaussian_pow((1, 1), e))
        elif kind == PrimeClass.THREE_MOD_FOUR:
            base = _gaussian_mul(base, (p ** (e // 2), 0))
    choices = []
    for p, e in factorization.exponents(PrimeClass.ONE_MOD_FOUR).items():
        a, b = prime_two_squares(p)
        choices.append(
            [_gaussian_mul(_gaussian_pow((a, b), j), _gaussian_pow((a, -b), e - j)) for j in range(e + 1)]
        )
    reps = set()
    for combination in itertools.product(*choices):
        z = base
        for factor in combination:
            z = _gaussian_mul(z, factor)
        reps.add(tuple(sorted((abs(z[0]), abs(z[1])))))
    assert len(reps) == (ordered + 1) // 2
    return Sum2SquaresReport(n=n, count=len(reps), reps=sorted(reps), ordered=ordered)


def brute_force_representations(n: int) -> Sum2SquaresReport:
    if n > BRUTE_FORCE_LIMIT:
        raise RangeExceeded(f"{n} exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")
    reps = []
    for a in range(math.isqrt(n // 2) + 1):
        b = math.isqrt(n - a * a)
        if b * b == n - a * a:
            reps.append((a, b))
    ordered = sum(1 for a, b in reps for _ in range(1 if a == 0 or a == b else 2))
    return Sum2SquaresReport(n=n, count=len(reps), reps=reps, ordered=ordered if n else 1)


def formula_counts_upto(limit: int) -> np.ndarray:
    """R(n) for n = 0..limit via r2(n)/4 = d1(n) - d3(n)."""
    ordered = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1, 2):
        ordered[d::d] += 1 if d % 4 == 1 else -1
    counts = (ordered + 1) // 2
    counts[0] = 1
    return counts


def brute_force_counts_upto(limit: int) -> np.ndarray:
    counts = np.zeros(limit + 1, dtype=np.int64)
    for a in range(math.isqrt(limit // 2) + 1):
        b = np.arange(a, math.isqrt(limit - a * a) + 1, dtype=np.int64)
        np.add.at(counts, a * a + b * b, 1)
    return counts


# Lemma construction
@dataclass_json
@dataclass(frozen=True)
class RichSubset:
    indices: tuple[int, ...]
    n: int
    unordered: int
    ordered: int
    unordered_holds: bool
    ordered_holds: bool


@dataclass_json
@dataclass(frozen=True)
class LemmaConstruction:
    k: int
    primes: list[int]
    legs: list[tuple[int, int]]
    n: int
    subsets: list[RichSubset] = field(default_factory=list)

    def __post_init__(self):
        assert all(a * a + b * b == p for p, (a, b) in zip(self.primes, self.legs))

    @property
    def subset_count(self) -> int:
        return len(self.subsets)

    @property
    def expected_subset_count(self) -> int:
        if self.k % 2:
            return 2 ** (self.k - 1)
        return 2 ** (self.k - 1) + math.comb(self.k, self.k // 2) // 2

    @property
    def certified(self) -> bool:
        return (
            self.subset_count == self.expected_subset_count >= 2 ** (self.k - 1)
            and all(s.ordered_holds for s in self.subsets)
        )

    @property
    def flagged(self) -> list[tuple[int, ...]]:
        """Subsets whose unordered count falls below the bound."""
        return [s.indices for s in self.subsets if not s.unordered_holds]


def lemma_many_construct(k: int) -> LemmaConstruction:
    """n = p_1...p_k with every subset of at least k/2 primes and its representation counts.

    The bound 2^(k/2) is compared by squaring, count^2 >= 2^k.
    """
    if not 1 <= k <= LEMMA_MAX_K:
        raise RangeExceeded(f"k must lie in 1..{LEMMA_MAX_K}, got {k}")
    primes = primes_one_mod_four(k)
    subsets = []
    for size in range(math.ceil(k / 2), k + 1):
        for indices in itertools.combinations(range(k), size):
            n_prime = math.prod(primes[i] for i in indices)
            report = count_representations(n_prime)
            subsets.append(
                RichSubset(
                    indices=indices,
                    n=n_prime,
                    unordered=report.count,
                    ordered=report.ordered,
                    unordered_holds=report.count**2 >= 2**k,
                    ordered_holds=report.ordered**2 >= 2**k,
                )
            )
    assert len({s.n for s in subsets}) == len(subsets)
    result = LemmaConstruction(
        k=k,
        primes=primes,
        legs=[prime_two_squares(p) for p in primes],
        n=math.prod(primes),
        subsets=subsets,
    )
    if result.flagged:
        logger.warning(
            f"k={k}: {len(result.flagged)} subsets fall below 2^(k/2) counting unordered pairs"
        )
    return result


# Grid multiplicities
class GridMultiplicities(NamedTuple):
    side: int
    keys: np.ndarray
    counts: np.ndarray

    @property
    def n(self) -> int:
        return self.side**2

    @property
    def m(self) -> int:
        return len(self.keys)

    def of(self, key: int) -> int:
        pos = np.searchsorted(self.keys, key)
        if pos < len(self.keys) and self.keys[pos] == key:
            return int(self.counts[pos])
        return 0


def grid_multiplicities(s: int) -> GridMultiplicities:
    """Spectrum of the s x s grid summed over difference vectors (dx, dy) >= 0."""
    if s > GRID_EXHAUSTIVE_MAX_SIDE:
        raise RangeExceeded(f"Side {s} exceeds {GRID_EXHAUSTIVE_MAX_SIDE}")
    steps = np.arange(s, dtype=np.int64)
    dx, dy = np.meshgrid(steps, steps, indexing="ij")
    signs = np.where(dx > 0, 2, 1) * np.where(dy > 0, 2, 1)
    weights = signs * (s - dx) * (s - dy)
    weights[0, 0] = 0
    keys = (dx * dx + dy * dy).ravel()
    total = np.bincount(keys, weights=weights.ravel().astype(np.float64))
    counts = np.rint(total).astype(np.int64) // 2
    present = np.nonzero(counts)[0]
    return GridMultiplicities(side=s, keys=present, counts=counts[present])


@dataclass_json
@dataclass(frozen=True)
class RichReport:
    side: int
    n: int
    threshold: int
    rich_count: int
    m: int
    examples: list[tuple[int, int]]


def grid_rich_distances(s: int, threshold: int, *, examples: int = 10) -> RichReport:
    grid = grid_multiplicities(s)
    rich = np.nonzero(grid.counts >= threshold)[0]
    top = rich[np.argsort(-grid.counts[rich], kind="stable")][:examples]
    return RichReport(
        side=s,
        n=grid.n,
        threshold=threshold,
        rich_count=len(rich),
        m=grid.m,
        examples=[(int(grid.keys[i]), int(grid.counts[i])) for i in top],
    )


@dataclass_json
@dataclass(frozen=True)
class SectionRatioReport:
    side: int
    divisor: int
    n: int
    threshold: Fraction = field(metadata=NUMBER_FIELD)
    m: int
    m_small: int
    qualifying: int
    meeting: int
    fraction: float
    diagonal_only: list[tuple[int, int, bool]] = field(default_factory=list)

    @property
    def all_qualifying_meet(self) -> bool:
        return self.meeting == self.qualifying


def grid_section_ratios(s: int, divisor: int) -> SectionRatioReport:
    """How many classes of one (s/divisor)-section reach c2*n in the full s x s grid.

    Qualifying classes have a representation a^2 + b^2 with 0 < a < b below the section
    side; classes realized only along diagonals are listed apart.
    """
    if divisor not in SECTION_THRESHOLDS:
        raise NotApplicable(f"Divisor must be one of {sorted(SECTION_THRESHOLDS)}")
    if s % divisor:
        raise DivisibilityError(f"{s} is not divisible by {divisor}")
    grid = grid_multiplicities(s)
    threshold = SECTION_THRESHOLDS[divisor] * grid.n
    sub = s // divisor
    general, diagonal, small = set(), set(), set()
    for a in range(sub):
        for b in range(a, sub):
            if b == 0:
                continue
            key = a * a + b * b
            small.add(key)
            if 0 < a < b:
                general.add(key)
            elif a == b:
                diagonal.add(key)
    meeting = sum(1 for key in general if grid.of(key) >= threshold)
    diagonal_only = [
        (key, grid.of(key), grid.of(key) >= threshold) for key in sorted(diagonal - general)
    ]
    logger.debug(f"Grid {s}x{s} / {divisor}: {meeting} of {len(general)} classes reach {threshold}")
    return SectionRatioReport(
        side=s,
        divisor=divisor,
        n=grid.n,
        threshold=threshold,
        m=grid.m,
        m_small=len(small),
        qualifying=len(general),
        meeting=meeting,
        fraction=meeting / grid.m,
        diagonal_only=diagonal_only,
    )
