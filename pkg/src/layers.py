"""Onion decomposition and the graph of second-largest distances."""

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from dataclasses_json import dataclass_json
from loguru import logger

import geometry
from config import PI_UPPER
from errors import NoSecondDistance
from geometry import NUMBER_FIELD, Number, PointSet, cross, orientation_tolerance


@dataclass_json
@dataclass(frozen=True)
class ConvexLayers:
    layers: list[list[int]]

    @property
    def outer(self) -> list[int]:
        return self.layers[0] if self.layers else []

    @property
    def second(self) -> list[int]:
        return self.layers[1] if len(self.layers) > 1 else []

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.layers)

    def layer_of(self) -> dict[int, int]:
        return {i: depth + 1 for depth, layer in enumerate(self.layers) for i in layer}


def _hull(X: PointSet, indices, tolerance: Number) -> list[int]:
    points = X.points
    order = sorted(indices, key=lambda i: (points[i].x, points[i].y))
    if len(order) <= 2:
        return order
    first, last = points[order[0]], points[order[-1]]
    if all(abs(cross(first, last, points[i])) <= tolerance for i in order):
        return order

    def chain(sequence) -> list[int]:
        hull = []
        for i in sequence:
            # Pop on strict clockwise turns only, so boundary points stay.
            while (
                len(hull) >= 2
                and cross(points[hull[-2]], points[hull[-1]], points[i]) < -tolerance
            ):
                hull.pop()
            hull.append(i)
        return hull

    lower = chain(order)
    upper = chain(reversed(order))
    return lower[:-1] + upper[:-1]


def convex_hull(X: PointSet) -> list[int]:
    """Counterclockwise hull boundary, collinear boundary points included."""
    return _hull(X, range(X.n), orientation_tolerance(X))


def onion_layers(X: PointSet) -> ConvexLayers:
    tolerance = orientation_tolerance(X)
    remaining = list(range(X.n))
    layers = []
    while remaining:
        layer = _hull(X, remaining, tolerance)
        layers.append(layer)
        peeled = set(layer)
        remaining = [i for i in remaining if i not in peeled]
        logger.debug(f"Peeled layer {len(layers)}: {len(layer)} points, {len(remaining)} left")
    return ConvexLayers(layers)


@dataclass_json
@dataclass(frozen=True)
class SecondDistanceGraph:
    key: Number = field(metadata=NUMBER_FIELD)
    vertices: dict[int, int]
    edges: list[tuple[int, int]]
    pruned_vertices: list[int]
    outside_edges: list[tuple[int, int]] = field(default_factory=list)

    @property
    def core_vertices(self) -> set[int]:
        return set(self.vertices) - set(self.pruned_vertices)

    @property
    def core_edges(self) -> list[tuple[int, int]]:
        core = self.core_vertices
        return [(p, q) for p, q in self.edges if p in core and q in core]

    def part(self, layer: int, *, core: bool = False) -> set[int]:
        pool = self.core_vertices if core else set(self.vertices)
        return {v for v in pool if self.vertices[v] == layer}

    def core_neighbors(self) -> dict[int, set[int]]:
        neighbors = defaultdict(set)
        for p, q in self.core_edges:
            neighbors[p].add(q)
            neighbors[q].add(p)
        return neighbors


def _prune(vertices, edges) -> list[int]:
    """Iteratively delete vertices of degree < 2, smallest index first."""
    neighbors = {v: set() for v in vertices}
    for p, q in edges:
        neighbors[p].add(q)
        neighbors[q].add(p)
    queue = [v for v in vertices if len(neighbors[v]) < 2]
    heapq.heapify(queue)
    removed = []
    gone = set()
    while queue:
        v = heapq.heappop(queue)
        if v in gone:
            continue
        gone.add(v)
        removed.append(v)
        for u in neighbors.pop(v):
            neighbors[u].discard(v)
            if u not in gone and len(neighbors[u]) < 2:
                heapq.heappush(queue, u)
    return removed


def second_distance_graph(
    X: PointSet,
    *,
    spectrum: Optional[geometry.DistanceSpectrum] = None,
    layers: Optional[ConvexLayers] = None,
) -> SecondDistanceGraph:
    S = spectrum or geometry.distance_spectrum(X)
    if S.m < 2:
        raise NoSecondDistance(f"Only {S.m} distance class(es); no second largest distance")
    key = geometry.extremal_distances(S).second_largest_key
    layers = layers or onion_layers(X)
    tags = {i: 1 for i in layers.outer}
    tags.update({i: 2 for i in layers.second})
    edges, outside = [], []
    for p, q in geometry.pairs_at(X, S, key):
        (edges if p in tags and q in tags else outside).append((p, q))
    pruned = _prune(sorted(tags), edges)
    logger.debug(f"Second-distance graph: {len(edges)} edges, {len(pruned)} pruned")
    return SecondDistanceGraph(
        key=key,
        vertices=tags,
        edges=edges,
        pruned_vertices=pruned,
        outside_edges=outside,
    )


def structural_violations(G: SecondDistanceGraph) -> list[str]:
    """Every failed structural fact about G and its degree-2 core G'."""
    violations = []
    if G.outside_edges:
        violations.append(f"{len(G.outside_edges)} edges leave L1 ∪ L2")
    for p, q in G.edges:
        if G.vertices[p] != 1 and G.vertices[q] != 1:
            violations.append(f"edge {p}-{q} misses L1")
    neighbors = G.core_neighbors()
    for v in G.core_vertices:
        if len(neighbors[v]) < 2:
            violations.append(f"core vertex {v} has degree {len(neighbors[v])}")
    for q in G.part(2, core=True):
        inner = [u for u in neighbors[q] if G.vertices[u] == 2]
        if inner:
            violations.append(f"L2' vertex {q} adjacent to L2' vertices {inner}")
        if len(neighbors[q]) != 2:
            violations.append(f"L2' vertex {q} has degree {len(neighbors[q])}")
    for p in G.part(1, core=True):
        outer = sum(1 for u in neighbors[p] if G.vertices[u] == 1)
        inner = sum(1 for u in neighbors[p] if G.vertices[u] == 2)
        if inner > 2:
            violations.append(f"L1' vertex {p} has {inner} L2' neighbors")
        if outer == 3 and inner > 1:
            violations.append(f"L1' vertex {p} has 3 L1' and {inner} L2' neighbors")
        if outer == 4 and inner > 0:
            violations.append(f"L1' vertex {p} has 4 L1' and {inner} L2' neighbors")
        if outer > 4:
            violations.append(f"L1' vertex {p} has {outer} L1' neighbors")
    lost = len(G.part(1)) - len(G.part(1, core=True)) + len(G.part(2)) - len(G.part(2, core=True))
    if len(G.edges) > lost + len(G.core_edges):
        violations.append(f"e(G)={len(G.edges)} exceeds {lost} + e(G')={len(G.core_edges)}")
    return violations


def dense_bound(layers: ConvexLayers) -> Fraction:
    l1, l2 = len(layers.outer), len(layers.second)
    return min(
        Fraction(3, 2) * (l1 + l2),
        Fraction(4, 3) * l1 + 2 * l2,
        Fraction(2 * l1 + l2),
    )


@dataclass_json
@dataclass(frozen=True)
class DenseReport:
    n: int
    l1: int
    l2: int
    bound: Fraction = field(metadata=NUMBER_FIELD)
    mu2: int
    graph_edges: int
    core_edges: int
    holds: bool
    violations: list[str] = field(default_factory=list)


def check_dense_theorem(X: PointSet) -> DenseReport:
    S = geometry.distance_spectrum(X)
    layers = onion_layers(X)
    G = second_distance_graph(X, spectrum=S, layers=layers)
    mu2 = geometry.multiplicity_of(S, G.key)
    bound = dense_bound(layers)
    holds = mu2 <= bound and (bound > X.n or mu2 <= X.n)
    violations = structural_violations(G)
    if len(G.edges) + len(G.outside_edges) != mu2:
        violations.append(f"graph count {len(G.edges)} disagrees with spectrum {mu2}")
    return DenseReport(
        n=X.n,
        l1=len(layers.outer),
        l2=len(layers.second),
        bound=bound,
        mu2=mu2,
        graph_edges=len(G.edges),
        core_edges=len(G.core_edges),
        holds=holds,
        violations=violations,
    )


@dataclass_json
@dataclass(frozen=True)
class CorollaryReport:
    n: int
    applies: bool
    holds: Optional[bool] = None
    ratio: Optional[float] = None
    limit: Optional[float] = None
    mu2: Optional[int] = None


def check_diameter_ratio_corollary(X: PointSet) -> CorollaryReport:
    """Applies when Δ <= n/(3π)·δ, tested with π rounded up."""
    S = geometry.distance_spectrum(X)
    if S.m < 2:
        return CorollaryReport(n=X.n, applies=False)
    extremes = geometry.extremal_distances(S)
    diameter = Fraction(extremes.diameter_key)
    smallest = Fraction(extremes.smallest_key)
    applies = diameter * 9 * PI_UPPER**2 <= X.n**2 * smallest
    mu2 = geometry.multiplicity_of(S, extremes.second_largest_key)
    return CorollaryReport(
        n=X.n,
        applies=applies,
        holds=(mu2 <= X.n) if applies else None,
        ratio=float(diameter / smallest) ** 0.5,
        limit=X.n / (3 * float(PI_UPPER)),
        mu2=mu2,
    )
