from fractions import Fraction

import pytest
from sympy import bernoulli

from string_orientation.errors import (
    DecompositionError,
    InsufficientPrecisionError,
    RingMismatchError,
)
from string_orientation.lib.rings import INTEGERS, CoeffRing
from string_orientation.lib.series import QSeries
from string_orientation.modular_forms import (
    ModularForm,
    ModularFormsRing,
    basis_exponents,
    bernoulli_number,
    decompose,
    euler_product,
    mf12_lattice_index,
    mf12_membership,
    relation_check,
)


def test_ramanujan_tau(forms):
    assert forms.delta().coefficients()[:7] == [0, 1, -24, 252, -1472, 4830, -6048]


def test_eisenstein_generators(forms):
    assert forms.c4().coefficients()[:4] == [1, 240, 2160, 6720]
    assert forms.c6().coefficients()[:3] == [1, -504, -16632]
    assert forms.eisenstein(4).qexp == forms.c4().qexp


def test_relation_holds():
    report = relation_check(24)
    assert report["passed"]
    assert report["first_failure"] is None


def test_delta_agrees_with_eta_recurrence(forms):
    assert forms.delta_via_eta_power().qexp == forms.delta().qexp


def test_euler_product_matches_pentagonal_numbers():
    assert euler_product(13) == [1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]


@pytest.mark.parametrize("n", [0, 2, 4, 6, 8, 10, 12, 14, 20, 30])
def test_bernoulli_matches_sympy(n):
    expected = bernoulli(n)
    assert bernoulli_number(n) == Fraction(int(expected.p), int(expected.q))


def test_bernoulli_odd_index():
    assert bernoulli_number(1) == Fraction(-1, 2)
    assert bernoulli_number(7) == 0


@pytest.mark.parametrize("weight,labels", [
    (0, ["1"]),
    (2, []),
    (6, ["c6"]),
    (12, ["c4^3", "Delta"]),
    (24, ["c4^6", "c4^3*Delta", "Delta^2"]),
    (26, ["c4^5*c6", "c4^2*c6*Delta"]),
])
def test_basis_labels(forms, weight, labels):
    assert [f.label for f in forms.basis(weight)] == labels
    assert len(basis_exponents(weight)) == len(labels)


def test_basis_is_unitriangular(forms):
    for i, form in enumerate(forms.basis(36)):
        assert form.qexp.valuation() == i
        assert form.qexp[i] == 1


def test_e12_coordinates(forms):
    report = forms.decompose(forms.eisenstein(12).qexp, 12)
    assert report["success"]
    assert report["coordinates"] == [1, Fraction(-432000, 691)]


def test_decomposition_flags_inconsistent_coefficient(forms):
    coeffs = forms.delta().coefficients()[:8]
    coeffs[5] += 1
    report = decompose(QSeries(INTEGERS, coeffs), 12)
    assert not report["success"]
    assert report["first_inconsistent_degree"] == 5


def test_decomposition_needs_precision():
    with pytest.raises(InsufficientPrecisionError) as info:
        decompose(QSeries(INTEGERS, [0, 1]), 12)
    assert info.value.required == 3


def test_decomposition_rejects_residue_rings():
    with pytest.raises(RingMismatchError):
        decompose(QSeries(CoeffRing.residue(5), [0, 1, 1]), 12)


def test_weight12_membership(forms):
    c4_cubed = forms.c4() ** 3
    delta = forms.delta()
    assert mf12_membership(c4_cubed)["member"]
    assert not mf12_membership(delta)["member"]
    report = mf12_membership(24 * delta)
    assert report["member"]
    assert (report["alpha"], report["beta"]) == (0, 24)
    assert mf12_membership(c4_cubed - 48 * delta)["member"]


def test_membership_of_non_form(forms):
    coeffs = forms.delta().coefficients()[:6]
    coeffs[4] = 0
    with pytest.raises(DecompositionError):
        mf12_membership(ModularForm(12, QSeries(INTEGERS, coeffs)))


def test_lattice_index():
    assert mf12_lattice_index(8) == 24


def test_modular_form_weights():
    with pytest.raises(ValueError):
        ModularForm(3, QSeries(INTEGERS, [1]))
    with pytest.raises(ValueError):
        ModularFormsRing(8).eisenstein(2)
    with pytest.raises(ValueError):
        ModularFormsRing(0)


def test_random_combinations_decompose_back(forms, rng):
    weights = [w for w in range(0, 50, 2) if w != 2]
    for _ in range(100):
        weight = rng.choice(weights)
        basis = forms.basis(weight)
        coordinates = [rng.randint(-50, 50) for _ in basis]
        f = basis[0] * coordinates[0]
        for form, n in zip(basis[1:], coordinates[1:]):
            f = f + form * n
        report = forms.decompose(f.qexp, weight)
        assert report["success"]
        assert report["coordinates"] == coordinates


def test_membership_is_closed_under_sums(forms, rng):
    c4_cubed = forms.c4() ** 3
    delta = forms.delta()

    def member(alpha, beta):
        return c4_cubed * alpha + delta * (24 * beta)

    for _ in range(50):
        a1, b1, a2, b2 = (rng.randint(-30, 30) for _ in range(4))
        first, second = member(a1, b1), member(a2, b2)
        assert mf12_membership(first) == {"member": True, "alpha": a1, "beta": 24 * b1}
        assert mf12_membership(second)["member"]
        assert mf12_membership(first + second)["member"]
        shifted = first + delta * rng.randint(1, 23)
        assert not mf12_membership(shifted)["member"]
