from fractions import Fraction

import pytest

from string_orientation.errors import (
    ConstantTermError,
    InsufficientPrecisionError,
    NonUnitError,
    RingMismatchError,
    UndecidableValuationError,
    VariableMismatchError,
)
from string_orientation.lib.rings import INTEGERS, RATIONALS, CoeffRing
from string_orientation.lib.series import (
    Divisor,
    LaurentUnit,
    MultiSeries,
    QSeries,
    exp_log,
    series_arith,
    valuation_along,
)


def test_geometric_series_inverse():
    one_minus_q = QSeries(INTEGERS, [1, -1, 0, 0, 0])
    assert list(one_minus_q.invert()) == [1, 1, 1, 1, 1]


def test_qseries_product_uses_common_precision():
    a = QSeries(INTEGERS, [1, 1, 1, 1])
    b = QSeries(INTEGERS, [1, -1])
    product = a * b
    assert product.trunc == 2
    assert list(product) == [1, 0]


def test_coefficient_outside_window_is_an_error():
    s = QSeries(RATIONALS, [1, 2, 3])
    assert s[2] == 3
    with pytest.raises(IndexError):
        s[3]


def test_truncate_never_extends():
    s = QSeries(RATIONALS, [1, 2, 3])
    assert list(s.truncate(2)) == [1, 2]
    with pytest.raises(InsufficientPrecisionError) as info:
        s.truncate(5)
    assert info.value.required == 5


def test_mixed_rings_are_rejected():
    with pytest.raises(RingMismatchError):
        QSeries(RATIONALS, [1]) + QSeries(INTEGERS, [1])


def test_residue_ring_non_unit_inverse():
    ring = CoeffRing.residue(4)
    with pytest.raises(NonUnitError):
        QSeries(ring, [2, 1]).invert()
    assert list(QSeries(ring, [3, 1]).invert()) == [3, 3]


def test_shift_and_valuation():
    s = QSeries(INTEGERS, [0, 0, 5, 1]).shift(2)
    assert s.trunc == 6
    assert s.valuation() == 4
    assert QSeries.zero(INTEGERS, 3).valuation() is None


def test_rational_coefficients_from_strings():
    s = QSeries(RATIONALS, ["1/2", "-3"])
    assert RATIONALS.to_fraction(s[0]) == Fraction(1, 2)


def test_multiseries_truncation_drops_high_degree():
    x, y = MultiSeries.gens(INTEGERS, ("x", "y"), 3)
    product = (1 + x) * (1 - x)
    assert product == MultiSeries(INTEGERS, ("x", "y"), 3, {(0, 0): 1, (2, 0): -1})
    assert (x * x * y).is_zero()


def test_exp_log_inverse_pair():
    (x,) = MultiSeries.gens(RATIONALS, ("x",), 7)
    assert (1 + x).log().exp() == 1 + x
    assert exp_log(exp_log(x * 3, "exp"), "log") == x * 3


def test_log_needs_rationals():
    (x,) = MultiSeries.gens(INTEGERS, ("x",), 4)
    with pytest.raises(RingMismatchError):
        (1 + x).log()


def test_invert_requires_unit_constant_term():
    (x,) = MultiSeries.gens(RATIONALS, ("x",), 4)
    with pytest.raises(NonUnitError):
        x.invert()
    assert ((1 + x) * (1 + x).invert()) == x.constant(1)


def test_exp_rejects_constant_term():
    (x,) = MultiSeries.gens(RATIONALS, ("x",), 4)
    with pytest.raises(ConstantTermError):
        (1 + x).exp()


def test_substitute_into_one_variable():
    x, y = MultiSeries.gens(RATIONALS, ("x", "y"), 5)
    (z,) = MultiSeries.gens(RATIONALS, ("z",), 5)
    composed = (x + y * y).substitute({"x": z, "y": z * z})
    assert composed == z + z ** 4


def test_substitute_rejects_constant_terms():
    x, y = MultiSeries.gens(RATIONALS, ("x", "y"), 4)
    (z,) = MultiSeries.gens(RATIONALS, ("z",), 4)
    with pytest.raises(ConstantTermError):
        (x + y).substitute({"x": 1 + z, "y": z})


def test_parameter_caps_are_separate_from_total_degree():
    z, q = MultiSeries.gens(RATIONALS, ("z", "q"), 3, {"q": 3})
    assert q.graded_names == ("z",)
    assert (q * q).coefficient((0, 2)) == 1
    assert (q * q * q).is_zero()
    assert (z * z * q * q).coefficient((2, 2)) == 1


def test_mismatched_variables_are_rejected():
    (x,) = MultiSeries.gens(RATIONALS, ("x",), 4)
    (y,) = MultiSeries.gens(RATIONALS, ("y",), 4)
    with pytest.raises(VariableMismatchError):
        x + y


def test_first_difference_is_graded_lex():
    x, y = MultiSeries.gens(RATIONALS, ("x", "y"), 5)
    f = x * x * y
    assert f.first_difference(y * y * x) == (2, 1)


def test_valuation_along_sum_divisor(additive_q):
    x, y = MultiSeries.gens(RATIONALS, ("x", "y"), 6)
    s = (x + y) * (x + y) * (1 + x)
    assert valuation_along(s, Divisor.of("x", "y"), additive_q) == 2
    assert valuation_along(s, "x") == 0


def test_valuation_of_zero_is_undecidable():
    with pytest.raises(UndecidableValuationError):
        valuation_along(MultiSeries.zero(RATIONALS, ("x",), 4), "x")


def test_laurent_units_add_valuations():
    (x,) = MultiSeries.gens(RATIONALS, ("x",), 4)
    a = LaurentUnit((Divisor.of("x"),), (1,), 1 + x)
    b = LaurentUnit((Divisor.of("x"),), (2,), 1 - x)
    product = a * b
    assert product.valuation(Divisor.of("x")) == 3
    assert (product * product.inverse()).divisor_map() == {}


def test_series_arith_refuses_mixed_kinds():
    (x,) = MultiSeries.gens(RATIONALS, ("x",), 4)
    with pytest.raises(TypeError):
        series_arith(x, QSeries(RATIONALS, [1]), "add")
