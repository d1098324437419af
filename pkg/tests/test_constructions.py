from fractions import Fraction

import pytest

import constructions
import geometry
from constructions import CascadeSpec, ConstructionResult, Fact, Verdict
from errors import AngleOutOfRange, InfeasibleGeometry, InputError, RetryBudgetExhausted
from geometry import Mode, PointSet


def verdicts(result: ConstructionResult) -> list[Verdict]:
    return [outcome.verdict for outcome in constructions.check_facts(result)]


def assert_facts_hold(result: ConstructionResult):
    outcomes = constructions.check_facts(result)
    failed = [o for o in outcomes if o.verdict == Verdict.FAIL]
    assert not failed, failed


def spectrum(result: ConstructionResult) -> tuple[int, ...]:
    return geometry.distance_spectrum(result.point_set).multiplicities


@pytest.mark.parametrize(
    "n, expected",
    [(3, (3,)), (5, (5, 5)), (6, (6, 6, 3)), (8, (8, 8, 8, 4))],
)
def test_regular_ngon(n, expected):
    result = constructions.regular_ngon(n)
    assert spectrum(result) == expected
    assert_facts_hold(result)


@pytest.mark.parametrize("n", range(3, 41))
def test_regular_ngon_chord_classes(n):
    assert_facts_hold(constructions.regular_ngon(n))


@pytest.mark.parametrize(
    "n, expected",
    [(3, (1,)), (4, (2, 1)), (7, (5, 5, 5)), (9, (7, 7, 7, 7)), (10, (8, 8, 8, 8, 4))],
)
def test_ngon_minus_vertex(n, expected):
    result = constructions.ngon_minus_vertex(n)
    assert result.point_set.n == n - 1
    assert spectrum(result) == expected
    assert_facts_hold(result)


def test_polygons_need_three_vertices():
    with pytest.raises(InputError):
        constructions.regular_ngon(2)
    with pytest.raises(InputError):
        constructions.ngon_minus_vertex(2)


@pytest.mark.parametrize("n", [2, 3, 7, 20])
def test_equidistant_line(n):
    result = constructions.equidistant_line(n)
    assert spectrum(result) == tuple(range(n - 1, 0, -1))
    assert_facts_hold(result)


@pytest.mark.parametrize("n", [3, 7, 25])
def test_equidistant_circle(n):
    assert_facts_hold(constructions.equidistant_circle(n))


@pytest.mark.parametrize("n, angle", [(3, 30), (7, 50), (25, 59)])
def test_arc_with_center(n, angle):
    result = constructions.arc_with_center(n, angle)
    assert spectrum(result) == tuple(range(n - 1, 0, -1))
    assert_facts_hold(result)


@pytest.mark.parametrize("angle", [0, 60, 70])
def test_arc_with_center_rejects_wide_angles(angle):
    with pytest.raises(AngleOutOfRange):
        constructions.arc_with_center(5, angle)


@pytest.mark.parametrize("arc", [0, 180, 200])
def test_equidistant_circle_rejects_wide_arcs(arc):
    with pytest.raises(AngleOutOfRange):
        constructions.equidistant_circle(5, arc)


def test_angle_errors_are_input_errors():
    assert issubclass(AngleOutOfRange, InputError)


def test_three_group_second_distance_edges():
    m, n = 7, 21
    result = constructions.three_group_construction(m, n)
    X = result.point_set
    S = geometry.distance_spectrum(X)
    second = geometry.extremal_distances(S).second_largest_key
    expected = {tuple(sorted((i, (i + 2) % m))) for i in range(m)}
    expected |= {(i, m + i) for i in range(m)}
    expected |= {tuple(sorted(((i + 1) % m, m + i))) for i in range(m)}
    assert set(geometry.pairs_at(X, S, second)) == expected
    assert_facts_hold(result)


def test_three_group_details():
    result = constructions.three_group_construction(7, 21)
    assert result.details["deficit"] == 9
    assert result.details["deficit_ratio"] == pytest.approx(9 / 21)
    assert result.details["groups"]["lattice"] == 7
    mesh_key = result.details["mesh_key"]
    assert geometry.multiplicity_of(geometry.distance_spectrum(result.point_set), mesh_key) >= 19


def test_three_group_smallest_key_only_reported():
    result = constructions.three_group_construction(7, 21)
    outcomes = dict(zip([f.name for f in result.expected_facts], verdicts(result)))
    assert outcomes["smallest_key"] == Verdict.REPORTED


@pytest.mark.parametrize("m, n", [(5, 10), (10, 27), (13, 40), (37, 100)])
def test_three_group_cases(m, n):
    result = constructions.three_group_construction(m, n)
    assert result.point_set.n == n
    assert result.details["deficit_ratio"] <= 0.5
    assert_facts_hold(result)


def test_three_group_mesh_bound_at_forty_points():
    result = constructions.three_group_construction(13, 40)
    assert result.details["deficit"] == 15
    assert result.details["groups"]["lattice"] == 14
    S = geometry.distance_spectrum(result.point_set)
    assert geometry.multiplicity_of(S, result.details["mesh_key"]) >= 40
    assert geometry.extremal_distances(S).second_largest_key == pytest.approx(result.details["second_key"])


@pytest.mark.parametrize("m, n", [(10, 28), (10, 40)])
def test_three_group_rejects_lattice_past_second_distance(m, n):
    # At m = 10 only the hexagon of 7 lattice points stays within Δ₂ of the whole set.
    with pytest.raises(InfeasibleGeometry):
        constructions.three_group_construction(m, n)


@pytest.mark.parametrize("m, n", [(4, 20), (7, 13)])
def test_three_group_rejects_bad_sizes(m, n):
    with pytest.raises(InputError):
        constructions.three_group_construction(m, n)


def test_grid_section_facts():
    result = constructions.grid_section(12, 12)
    assert result.details == dict(sections_3=9, sections_4=16)
    assert_facts_hold(result)


def test_grid_section_rejects_empty_sides():
    with pytest.raises(InputError):
        constructions.grid_section(0, 3)


def test_hex_two_row_example():
    result = constructions.hex_two_row(9)
    assert spectrum(result) == (15, 6, 5, 4, 3, 2, 1)
    assert_facts_hold(result)


@pytest.mark.parametrize("n", range(2, 40))
def test_hex_two_row_distinct_multiplicities(n):
    assert_facts_hold(constructions.hex_two_row(n))


def test_rhombus():
    result = constructions.rhombus()
    assert spectrum(result) == (5, 1)
    assert_facts_hold(result)


def test_random_points_are_deterministic():
    first = constructions.random_rational_points(20, seed=4).point_set
    again = constructions.random_rational_points(20, seed=4).point_set
    other = constructions.random_rational_points(20, seed=5).point_set
    assert first == again
    assert first != other
    assert first.n == 20


def test_rational_circle_points():
    result = constructions.rational_circle_points(12, seed=2)
    X = result.point_set
    assert all(p.x**2 + p.y**2 == 1 for p in X.points)
    assert_facts_hold(result)


@pytest.mark.parametrize(
    "k, rounds, expected",
    [(1, 3, [12]), (1, 10, [5120]), (2, 4, [16, 16]), (3, 3, [4, 4, 4]), (2, 0, [0, 0])],
)
def test_cascade_multiplicities(k, rounds, expected):
    assert constructions.cascade_multiplicities(k, rounds) == expected


def test_cascade_single_distance():
    result = constructions.cascade(1, 3)
    assert result.point_set.n == 8
    assert result.details["multiplicities"] == [12]
    assert geometry.multiplicity_of(geometry.distance_spectrum(result.point_set), 1.0) == 12
    assert_facts_hold(result)


def test_cascade_two_distances():
    result = constructions.cascade(2, 4, seed=1)
    S = geometry.distance_spectrum(result.point_set)
    assert geometry.multiplicity_of(S, 1.0) == 16
    assert geometry.multiplicity_of(S, 3.0) == 16
    assert S.multiplicities[:2] == (16, 16)
    assert_facts_hold(result)


def test_cascade_without_rounds():
    result = constructions.cascade(2, 0)
    assert result.point_set.n == 1
    assert result.expected_facts == []


def test_cascade_is_deterministic():
    first = constructions.cascade(2, 5, seed=9).point_set
    assert first == constructions.cascade(2, 5, seed=9).point_set


@pytest.mark.parametrize(
    "k, prescribed, rounds",
    [(0, [], 2), (2, [1.0], 2), (2, [1.0, 1.0], 2), (1, [-1.0], 2), (1, [1.0], -1)],
)
def test_cascade_spec_validation(k, prescribed, rounds):
    with pytest.raises(InputError):
        CascadeSpec(k=k, prescribed=prescribed, rounds=rounds)


def test_cascade_gives_up_after_retry_budget(monkeypatch):
    monkeypatch.setattr(constructions, "_accepts", lambda *args: None)
    with pytest.raises(RetryBudgetExhausted):
        constructions.translate_cascade(CascadeSpec(k=1, prescribed=[1.0], rounds=2, retry_budget=3))


def test_cascade_step_allows_cross_segments_to_coincide():
    spec = CascadeSpec(k=2, prescribed=[1.0, 3**0.5], rounds=2)
    previous = geometry.distance_spectrum(PointSet(((0.0, 0.0), (1.0, 0.0)), mode=Mode.APPROX))
    # Both diagonals of the 1 x sqrt(3) rectangle have length 2.
    rectangle = PointSet(((0.0, 0.0), (1.0, 0.0), (0.0, 3**0.5), (1.0, 3**0.5)), mode=Mode.APPROX)
    S = constructions._accepts(rectangle, spec, previous, [2, 2])
    assert S is not None
    assert S.multiplicities == (2, 2, 2)


def test_cascade_step_rejects_cross_segment_on_older_class():
    spec = CascadeSpec(k=2, prescribed=[1.0, 3**0.5], rounds=2)
    previous = geometry.distance_spectrum(PointSet(((0.0, 0.0), (1.0, 0.0)), mode=Mode.APPROX))
    h = 0.75**0.5
    # The shift (1.5, h) has length sqrt(3) and puts (1, 0) at unit distance from its copy.
    union = PointSet(((0.0, 0.0), (1.0, 0.0), (1.5, h), (2.5, h)), mode=Mode.APPROX)
    assert constructions._accepts(union, spec, previous, [2, 2]) is None


@pytest.mark.slow
@pytest.mark.parametrize("k, rounds", [(1, 10), (2, 10), (3, 9)])
def test_cascade_acceptance(k, rounds):
    result = constructions.cascade(k, rounds)
    assert result.details["multiplicities"] == constructions.cascade_multiplicities(k, rounds)
    assert_facts_hold(result)


@pytest.mark.parametrize("k", [4, 5, 10, 17])
def test_exact_eight_check(k):
    report = constructions.exact_eight_check(k)
    assert report.passed
    assert report.extra_representations == {}


def test_exact_eight_check_keys():
    assert constructions.exact_eight_check(5).keys == (25, 18)


def test_exact_eight_check_needs_four():
    with pytest.raises(InputError):
        constructions.exact_eight_check(3)


def test_failed_fact_is_reported():
    result = ConstructionResult(
        point_set=constructions.rhombus().point_set,
        expected_facts=[Fact("spectrum", dict(multiplicities=[4, 2]))],
    )
    assert verdicts(result) == [Verdict.FAIL]


def test_unknown_fact_is_rejected():
    result = ConstructionResult(point_set=constructions.rhombus().point_set, expected_facts=[Fact("nonsense")])
    with pytest.raises(InputError):
        constructions.check_facts(result)


def test_fact_round_trip_through_json():
    fact = constructions.hex_two_row(9).expected_facts[2]
    assert Fact.from_json(fact.to_json()).name == fact.name
    assert Fraction(Fact.from_json(fact.to_json()).params["key"]) == 1


def test_generators_cover_every_construction():
    assert set(constructions.GENERATORS) == {
        "regular-ngon", "ngon-minus-vertex", "equidistant-line", "equidistant-circle",
        "arc-with-center", "three-group", "grid", "hex-two-row", "cascade", "rhombus",
        "random-rational", "rational-circle",
    }
    assert all(callable(g) for g in constructions.GENERATORS.values())


@pytest.mark.slow
def test_regular_ngon_chord_classes_at_scale():
    for n in range(3, 401):
        assert_facts_hold(constructions.regular_ngon(n))


@pytest.mark.slow
def test_hex_two_row_at_scale():
    for n in range(2, 402):
        assert_facts_hold(constructions.hex_two_row(n))


@pytest.mark.slow
def test_staircases_at_scale():
    for n in range(3, 201):
        assert_facts_hold(constructions.equidistant_line(n))
        assert_facts_hold(constructions.equidistant_circle(n))
        assert_facts_hold(constructions.arc_with_center(n))


@pytest.mark.slow
def test_exact_eight_check_full_range():
    for k in range(4, 31):
        report = constructions.exact_eight_check(k)
        assert report.passed, k
        # Another leg pair would need a^2 = (k - 3)^2 - 2 or legs past k - 1.
        assert report.extra_representations == {}, k
