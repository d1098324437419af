from fractions import Fraction

import pytest

import constructions
import geometry
import pointfile
from errors import PointFileError
from geometry import Mode, Point
from pointfile import LineType

SAMPLE = """\
# unit strip
mode: exact
label: strip
y-weight: 3
# param n = 3
0 0
1/2 1/2   # trailing comment
1 0
"""


@pytest.mark.parametrize(
    "line, kind",
    [
        ("", LineType.BLANK),
        ("   ", LineType.BLANK),
        ("# a note", LineType.COMMENT),
        ("# param n = 9", LineType.PARAM),
        ("# param", LineType.COMMENT),
        ("mode: approx", LineType.HEADER),
        ("0.5 -2", LineType.POINT),
        ("0 0   # origin: start", LineType.POINT),
        ("mode: exact  # rationals", LineType.HEADER),
    ],
)
def test_classify_line(line, kind):
    assert pointfile.classify_line(line) == kind


def test_decode_sample():
    X = pointfile.decode(SAMPLE)
    assert X.mode == Mode.EXACT
    assert X.label == "strip"
    assert X.y_weight == 3
    assert X.metadata == dict(n=3)
    assert X.points == (Point(Fraction(0), Fraction(0)), Point(Fraction(1, 2), Fraction(1, 2)), Point(Fraction(1), Fraction(0)))
    assert geometry.distance_spectrum(X).multiplicities == (3,)


def test_colon_inside_trailing_comment():
    X = pointfile.decode("mode: exact  # rationals\n0 0   # origin: start\n1 0\n")
    assert X.mode == Mode.EXACT
    assert X.points == (Point(Fraction(0), Fraction(0)), Point(Fraction(1), Fraction(0)))


def test_decode_with_mode_override():
    X = pointfile.decode(SAMPLE, mode_override=Mode.APPROX)
    assert X.mode == Mode.APPROX
    assert X.points[1] == Point(0.5, 0.5)


def test_decimal_coordinates_are_exact():
    X = pointfile.decode("mode: exact\n0.1 0\n0 0.2\n")
    assert X.points[0].x == Fraction(1, 10)


@pytest.mark.parametrize(
    "text",
    [
        "0 0\n1 1\n",
        "mode: fuzzy\n0 0\n",
        "mode: exact\ncolor: red\n0 0\n",
        "mode: exact\n0 0 0\n",
        "mode: exact\n0 x\n",
        "mode: exact\n1/0 1\n",
    ],
)
def test_decode_rejects(text):
    with pytest.raises(PointFileError):
        pointfile.decode(text)


def test_decode_reports_line_number():
    with pytest.raises(PointFileError, match="Line 3"):
        pointfile.decode("mode: exact\n0 0\n1 one\n")


def test_encode_keeps_spectrum():
    result = constructions.hex_two_row(9)
    X = pointfile.decode(pointfile.encode(result.point_set))
    assert X == result.point_set
    assert geometry.distance_spectrum(X).multiplicities == (15, 6, 5, 4, 3, 2, 1)


def test_encode_floats_losslessly():
    X = constructions.regular_ngon(7).point_set
    assert pointfile.decode(pointfile.encode(X)).points == X.points


def test_read_and_write(tmp_path):
    X = constructions.grid_section(3, 2).point_set
    path = pointfile.write(X, tmp_path / "grid.pts")
    assert path.read_text().startswith("mode: exact\n")
    assert pointfile.read(path) == X
    assert pointfile.read(path, mode_override=Mode.APPROX).mode == Mode.APPROX


def test_read_and_write_json(tmp_path):
    X = constructions.hex_two_row(5).point_set
    path = pointfile.write(X, tmp_path / "hex.json")
    assert pointfile.read(path) == X
    assert pointfile.read(path, mode_override=Mode.APPROX).points[1] == Point(0.5, 0.5)


def test_read_missing_file(tmp_path):
    with pytest.raises(PointFileError):
        pointfile.read(tmp_path / "absent.pts")
