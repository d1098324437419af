from fractions import Fraction

import pytest

import constructions
import geometry
import layers
from errors import NoSecondDistance
from geometry import Mode, PointSet
from layers import ConvexLayers


def grid(w: int, h: int = None) -> PointSet:
    return constructions.grid_section(w, h or w).point_set


def signed_area(X: PointSet, cycle: list[int]) -> Fraction:
    points = [X.points[i] for i in cycle]
    return sum(
        p.x * q.y - q.x * p.y for p, q in zip(points, points[1:] + points[:1])
    ) / 2


def test_hull_of_grid_keeps_boundary_points():
    X = grid(3)
    hull = layers.convex_hull(X)
    assert sorted(hull) == [0, 1, 2, 3, 5, 6, 7, 8]
    assert signed_area(X, hull) == 4


def test_hull_is_counterclockwise():
    X = PointSet(((0, 0), (1, 0), (1, 1), (0, 1)), mode=Mode.EXACT)
    assert signed_area(X, layers.convex_hull(X)) > 0


def test_hull_of_collinear_points():
    X = constructions.equidistant_line(4).point_set
    assert layers.convex_hull(X) == [0, 1, 2, 3]


def test_hull_of_regular_polygon():
    assert len(layers.convex_hull(constructions.regular_ngon(6).point_set)) == 6


@pytest.mark.parametrize(
    "X, sizes",
    [
        (grid(3), (8, 1)),
        (grid(4), (12, 4)),
        (grid(5), (16, 8, 1)),
        (constructions.regular_ngon(9).point_set, (9,)),
    ],
)
def test_onion_layers(X, sizes):
    decomposition = layers.onion_layers(X)
    assert decomposition.sizes == sizes
    assert sorted(i for layer in decomposition.layers for i in layer) == list(range(X.n))


@pytest.mark.parametrize(
    "X",
    [grid(5), grid(4, 7), constructions.random_rational_points(60, seed=2, denominator=3, span=6).point_set],
)
def test_layers_reproduced_by_hulls_of_what_remains(X):
    remaining = list(range(X.n))
    for layer in layers.onion_layers(X).layers:
        hull = layers.convex_hull(X.subset(remaining))
        assert sorted(remaining[i] for i in hull) == sorted(layer)
        remaining = [i for i in remaining if i not in set(layer)]
    assert remaining == []


def test_layer_of():
    decomposition = layers.onion_layers(grid(3))
    assert decomposition.layer_of()[4] == 2
    assert decomposition.layer_of()[0] == 1


def test_second_distance_graph_of_small_grid():
    G = layers.second_distance_graph(grid(2, 3))
    assert G.key == 4
    assert len(G.edges) == 2
    assert not G.outside_edges
    assert G.core_vertices == set()


def test_second_distance_graph_of_pentagon_is_a_cycle():
    G = layers.second_distance_graph(constructions.regular_ngon(5).point_set)
    assert len(G.edges) == 5
    assert len(G.core_edges) == 5
    assert layers.structural_violations(G) == []


def test_second_distance_graph_needs_two_classes():
    X = PointSet(((0, 0), (1, 0)), mode=Mode.EXACT)
    with pytest.raises(NoSecondDistance):
        layers.second_distance_graph(X)


def test_pruning_removes_pendant_paths():
    # A triangle with a tail: the tail goes, the triangle stays.
    removed = layers._prune([0, 1, 2, 3, 4], [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])
    assert removed == [4, 3]


@pytest.mark.parametrize(
    "outer, second, expected",
    [
        (8, 1, Fraction(38, 3)),
        (4, 4, Fraction(12)),
        (0, 0, Fraction(0)),
        (6, 0, Fraction(8)),
    ],
)
def test_dense_bound(outer, second, expected):
    decomposition = ConvexLayers([list(range(outer)), list(range(outer, outer + second))])
    assert layers.dense_bound(decomposition) == expected


def test_dense_bound_without_layers():
    assert layers.dense_bound(ConvexLayers([])) == 0


@pytest.mark.parametrize("s", [3, 4, 6, 10])
def test_dense_theorem_on_grids(s):
    report = layers.check_dense_theorem(grid(s))
    assert report.holds
    assert report.violations == []
    assert report.n == s * s


def test_dense_theorem_on_three_group_set():
    X = constructions.three_group_construction(7, 21).point_set
    report = layers.check_dense_theorem(X)
    assert (report.l1, report.l2) == (7, 7)
    assert report.mu2 == 21
    assert report.bound == 21
    assert report.holds
    assert report.violations == []


@pytest.mark.parametrize("seed", range(5))
def test_dense_theorem_on_random_sets(seed):
    X = constructions.random_rational_points(30, seed=seed).point_set
    report = layers.check_dense_theorem(X)
    assert report.holds
    assert report.violations == []


def test_corollary_applies_to_large_grid():
    report = layers.check_diameter_ratio_corollary(grid(40))
    assert report.applies
    assert report.holds
    assert report.mu2 == 8
    assert report.ratio == pytest.approx(39 * 2**0.5)


def test_corollary_does_not_apply_to_polygon():
    report = layers.check_diameter_ratio_corollary(constructions.regular_ngon(10).point_set)
    assert not report.applies
    assert report.holds is None


def test_corollary_needs_two_classes():
    X = PointSet(((0, 0), (1, 0)), mode=Mode.EXACT)
    assert not layers.check_diameter_ratio_corollary(X).applies


def test_graph_count_matches_spectrum():
    X = constructions.ngon_minus_vertex(11).point_set
    S = geometry.distance_spectrum(X)
    G = layers.second_distance_graph(X, spectrum=S)
    assert len(G.edges) + len(G.outside_edges) == geometry.multiplicity_of(
        S, geometry.extremal_distances(S).second_largest_key
    )


@pytest.mark.slow
def test_dense_theorem_at_scale():
    for seed in range(1000):
        X = constructions.random_rational_points(3 + seed % 98, seed=seed, denominator=5, span=10).point_set
        report = layers.check_dense_theorem(X)
        assert report.holds, seed
        assert report.violations == [], seed
    for s in range(2, 21):
        assert layers.check_dense_theorem(grid(s)).holds
