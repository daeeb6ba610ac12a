from fractions import Fraction

import pytest

from string_orientation.errors import MalformedInputError
from string_orientation.lib.rings import RATIONALS
from string_orientation.witten_genus import (
    PontryaginData,
    WittenGenusAnalyzer,
    a_hat,
    classical_a_hat_polynomial,
    div24_check,
    genus_polynomial,
    modularity_check,
    partitions_of,
    witten_genus,
)

K3 = PontryaginData(4, {(1,): -48})
HP2 = PontryaginData(8, {(1, 1): 4, (2,): 7})


def test_partitions_of_four():
    assert partitions_of(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_classical_a_hat_polynomials():
    assert classical_a_hat_polynomial(1) == {(1,): Fraction(-1, 24)}
    assert classical_a_hat_polynomial(2) == {(2,): Fraction(-4, 5760), (1, 1): Fraction(7, 5760)}


def test_genus_polynomial_in_degree_one():
    polynomial = genus_polynomial(1, trunc_q=3)
    assert list(polynomial) == [(1,)]
    assert [RATIONALS.to_fraction(c) for c in polynomial[(1,)].coeffs] == [Fraction(-1, 24), 1, 3]


def test_a_hat_of_known_manifolds():
    assert a_hat(K3) == 2
    assert a_hat(HP2) == 0


def test_a_hat_is_the_constant_term(rng):
    analyzer = WittenGenusAnalyzer(1)
    for _ in range(100):
        k = rng.randint(1, 3)
        numbers = {mu: rng.randint(-500, 500) for mu in partitions_of(k)}
        manifold = PontryaginData(4 * k, numbers)
        polynomial = classical_a_hat_polynomial(k)
        expected = sum(c * numbers[mu] for mu, c in polynomial.items())
        assert analyzer.a_hat(manifold) == expected


def test_genus_of_k3():
    value = witten_genus(K3, trunc_q=3)
    assert value.weight == 2
    assert value.qexp.to_text() == "ring=Q; trunc=3; coeffs=2,-48,-144"


def test_string_like_dimension_eight():
    manifold = PontryaginData(8, {(2,): 1, (1, 1): 0})
    report = modularity_check(manifold, trunc_q=6)
    assert report["passed"]
    assert report["weight"] == 4
    assert report["decomposition"]["coordinates"] == [Fraction(-1, 1440)]
    assert report["g2_invariant"]


@pytest.mark.slow
def test_string_like_dimension_twelve():
    manifold = PontryaginData(12, {(3,): 5, (2, 1): 0, (1, 1, 1): 0})
    report = WittenGenusAnalyzer(6).modularity_check(manifold)
    assert report["passed"]
    assert report["decomposition"]["basis"] == ["c6"]


def test_non_string_like_data():
    assert not HP2.string_like
    analyzer = WittenGenusAnalyzer(4)
    assert not analyzer.g2_invariant(HP2)
    with pytest.raises(ValueError):
        analyzer.modularity_check(HP2)


def test_div24():
    report = WittenGenusAnalyzer().div24_check(1, 0)
    assert report["q1"] == 720
    assert report["residue"] == 0
    assert div24_check(-3, 7)


def test_div24_property_run():
    report = WittenGenusAnalyzer().div24_property_run(200, seed=7)
    assert report["samples"] == 200
    assert report["failures"] == []
    assert report["passed"]


def test_malformed_manifolds():
    with pytest.raises(MalformedInputError):
        PontryaginData(6, {})
    with pytest.raises(MalformedInputError):
        PontryaginData(8, {(3,): 1})
    with pytest.raises(MalformedInputError):
        PontryaginData.from_text("dim = 8\np[3] = 1\n")


def test_manifold_from_text():
    manifold = PontryaginData.from_text("dim = 8\np[2] = 7\np[1,1] = 4\n")
    assert manifold == HP2
    assert manifold.number((1, 1)) == 4
