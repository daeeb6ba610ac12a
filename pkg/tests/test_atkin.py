from fractions import Fraction

import pytest

from string_orientation.atkin import (
    AtkinAnalyzer,
    PadicPrecision,
    hensel_stability,
    kernel_search,
    one_minus_up,
    t_p,
    u_p,
    v_p,
)
from string_orientation.errors import InsufficientPrecisionError, NotPrimeError
from string_orientation.lib.rings import INTEGERS, RATIONALS
from string_orientation.lib.series import QSeries
from string_orientation.modular_forms import ModularForm, ModularFormsRing


def _z(coeffs):
    return QSeries(INTEGERS, coeffs)


def test_up_of_constant_sequence():
    assert u_p(_z([1] * 8), 2) == _z([1] * 4)


def test_up_of_delta():
    delta = ModularFormsRing(6).delta().qexp.map_ring(INTEGERS)
    assert u_p(delta, 2) == _z([0, -24, -1472])


def test_vp_spreads_coefficients():
    assert v_p(_z([1, 1]), 3) == _z([1, 0, 0, 1, 0, 0])


def test_up_inverts_vp(rng):
    f = _z([rng.randint(-9, 9) for _ in range(7)])
    for p in (2, 3, 5):
        assert u_p(v_p(f, p), p) == f


def test_vp_does_not_invert_up():
    q = _z([0, 1, 0, 0])
    assert v_p(u_p(q, 2), 2) != q


def test_projection_formula(rng):
    p = 3
    f = _z([rng.randint(-9, 9) for _ in range(12)])
    g = _z([rng.randint(-9, 9) for _ in range(4)])
    assert u_p(f * v_p(g, p), p) == u_p(f, p) * g


@pytest.mark.parametrize("p,trunc_q,eigenvalue", [(2, 16, -24), (3, 24, 252)])
def test_hecke_eigenvalues_of_delta(p, trunc_q, eigenvalue):
    delta = ModularFormsRing(trunc_q).delta()
    image = t_p(delta, p)
    assert image.weight == 12
    assert image.qexp == delta.qexp.truncate(image.trunc).scale(eigenvalue)


def test_hecke_eigenvalue_of_e4():
    e4 = ModularFormsRing(16).eisenstein(4)
    image = t_p(e4, 2)
    assert image.qexp == e4.qexp.truncate(image.trunc).scale(9)


def test_hecke_of_zero():
    zero = ModularForm(12, QSeries.zero(INTEGERS, 8))
    assert t_p(zero, 2).qexp.is_zero()


@pytest.mark.parametrize("p,value", [(2, Fraction(3, 2)), (3, Fraction(4, 3))])
def test_hecke_in_weight_zero_is_exact(p, value):
    constant = ModularForm(0, QSeries.one(RATIONALS, 4))
    image = t_p(constant, p)
    assert RATIONALS.to_fraction(image.qexp.coeffs[0]) == value
    assert all(not c for c in image.qexp.coeffs[1:])


def test_hecke_needs_precision():
    with pytest.raises(InsufficientPrecisionError) as info:
        t_p(ModularForm(12, _z([0])), 2)
    assert info.value.required == 2


def test_one_minus_up():
    assert one_minus_up(QSeries.one(INTEGERS, 8), 2).is_zero()
    delta = ModularFormsRing(8).delta().qexp
    assert one_minus_up(delta, 2)[1] == 25


@pytest.mark.parametrize("p,k", [(2, 4), (3, 4), (5, 6), (2, 12)])
def test_eisenstein_witness_is_fixed(p, k):
    witness = AtkinAnalyzer(p).eisenstein_witness(k, 12)
    assert one_minus_up(witness, p).is_zero()


def test_kernel_in_weight_four():
    report = kernel_search(4, PadicPrecision(2, 3), 16)
    assert report["space"] == ["c4", "V2(c4)"]
    assert report["modulus"] == 8
    assert report["kernel_order"] == 64
    assert report["verified"]
    assert report["witness_in_kernel"] is True
    for vector in report["kernel"]:
        assert one_minus_up(vector["qexp"], 2).is_zero()


def test_kernel_in_weight_zero():
    report = kernel_search(0, PadicPrecision(3, 2), 9)
    assert report["space"] == ["1"]
    assert report["kernel_order"] == 9
    assert report["witness_in_kernel"] is True


def test_kernel_search_is_independent_of_jobs():
    prec = PadicPrecision(2, 2)
    serial = kernel_search(12, prec, 16, jobs=1)
    parallel = kernel_search(12, prec, 16, jobs=4)
    assert serial["kernel_order"] == parallel["kernel_order"]
    assert [v["coordinates"] for v in serial["kernel"]] == [v["coordinates"] for v in parallel["kernel"]]
    assert serial["verified"]


def test_hensel_stability():
    report = hensel_stability(12, PadicPrecision(2, 2), 16)
    assert report["stable"]
    assert report["failures"] == []
    assert report["kernel_order_high"] >= report["kernel_order_low"]


def test_kernel_search_needs_precision():
    with pytest.raises(InsufficientPrecisionError) as info:
        kernel_search(12, PadicPrecision(2, 3), 6)
    assert info.value.required == 8


def test_prime_validation():
    with pytest.raises(NotPrimeError):
        AtkinAnalyzer(4)
    with pytest.raises(NotPrimeError):
        PadicPrecision(9, 1)
    with pytest.raises(ValueError):
        PadicPrecision(2, 0)
    with pytest.raises(ValueError):
        AtkinAnalyzer(3).kernel_search(4, PadicPrecision(2, 3))
