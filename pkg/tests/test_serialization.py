from fractions import Fraction

import pytest

from string_orientation.errors import MalformedInputError
from string_orientation.lib.rings import INTEGERS, RATIONALS, CoeffRing
from string_orientation.lib.serialization import (
    format_manifold,
    format_multiseries,
    format_qseries,
    parse_curve,
    parse_manifold,
    parse_multiseries,
    parse_qseries,
)
from string_orientation.lib.series import MultiSeries, QSeries


def test_qseries_text_format():
    s = QSeries(RATIONALS, [1, "-1/2", 0])
    text = format_qseries(s)
    assert text == "ring=Q; trunc=3; coeffs=1,-1/2,0"
    assert parse_qseries(text) == s


def test_qseries_comments_and_blank_lines():
    s = parse_qseries("# Delta\n\nring=Z/7; trunc=2; coeffs=0,8\n")
    assert s.ring == CoeffRing.residue(7)
    assert list(s) == [0, 1]


def test_qseries_errors_carry_line_numbers():
    with pytest.raises(MalformedInputError) as info:
        parse_qseries("\n# comment\nring=Q; trunc=2; coeffs=1\n")
    assert info.value.line == 3
    assert str(info.value).startswith("line 3:")


def test_unknown_ring_label():
    with pytest.raises(MalformedInputError):
        parse_qseries("ring=R; trunc=1; coeffs=1")


def test_multiseries_text_format():
    x, y = MultiSeries.gens(INTEGERS, ("x", "y"), 3)
    f = x + y - x * y
    text = format_multiseries(f)
    assert text == "ring=Z; vars=x,y; trunc=3\n1,0 : 1\n0,1 : 1\n1,1 : -1\n"
    assert parse_multiseries(text) == f


def test_multiseries_with_caps():
    text = "ring=Q; vars=z,q; trunc=4; caps=q:2\n1,0 : 1\n1,1 : 1/24\n"
    s = parse_multiseries(text)
    assert s.param_names == ("q",)
    assert RATIONALS.to_fraction(s.coefficient((1, 1))) == Fraction(1, 24)


def test_multiseries_rejects_bad_exponent():
    with pytest.raises(MalformedInputError) as info:
        parse_multiseries("ring=Q; vars=x,y; trunc=3\n1 : 1\n")
    assert info.value.line == 2


def test_manifold_format():
    dim, numbers = parse_manifold("dim = 8\np[1,1] = 4\np[2] = 7\n")
    assert dim == 8
    assert numbers == {(1, 1): 4, (2,): 7}
    assert format_manifold(dim, numbers) == "dim = 8\np[2] = 7\np[1,1] = 4\n"


def test_manifold_partition_must_match_dimension():
    with pytest.raises(MalformedInputError) as info:
        parse_manifold("dim = 8\np[3] = 1\n")
    assert info.value.line == 2


def test_manifold_needs_dimension():
    with pytest.raises(MalformedInputError):
        parse_manifold("p[1] = 1\n")


def test_curve_ring_follows_entries():
    ring, coeffs = parse_curve("0,0,0,0,0")
    assert ring == INTEGERS
    assert coeffs == (0, 0, 0, 0, 0)
    ring, coeffs = parse_curve("1/2,0,0,-1,0")
    assert ring == RATIONALS
    assert coeffs[0] == Fraction(1, 2)


def test_curve_needs_five_entries():
    with pytest.raises(MalformedInputError):
        parse_curve("1,2,3,4")
