from math import gcd, prod

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

from string_orientation.lib.linalg import (
    HermiteLattice,
    in_span_mod,
    kernel_mod,
    kernel_size_mod,
    mat_vec_mod,
)


def _oracle_kernel_size(matrix, modulus):
    snf = smith_normal_form(Matrix(matrix), domain=ZZ)
    n = len(matrix)
    return prod(gcd(int(abs(snf[i, i])), modulus) for i in range(n))


def test_kernel_of_two_mod_four():
    generators, size = kernel_mod([[2]], 1, 4)
    assert size == 2
    assert generators == [[2]]


def test_kernel_size_splits_over_primes():
    # x + y = 0 mod 6
    assert kernel_size_mod([[1, 1]], 2, 6) == 6


@pytest.mark.parametrize("modulus", [2, 4, 6, 8, 12, 27])
def test_kernel_size_matches_smith_invariants(rng, modulus):
    for _ in range(5):
        matrix = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(3)]
        assert kernel_size_mod(matrix, 3, modulus) == _oracle_kernel_size(matrix, modulus)


def test_kernel_generators_are_solutions(rng):
    matrix = [[rng.randint(0, 11) for _ in range(4)] for _ in range(3)]
    generators, _ = kernel_mod(matrix, 4, 12)
    assert generators
    for g in generators:
        assert not any(mat_vec_mod(matrix, g, 12))


def test_kernel_with_no_conditions_is_everything():
    generators, size = kernel_mod([], 2, 9)
    assert size == 81
    assert generators == [[1, 0], [0, 1]]


def test_hermite_lattice_coordinates():
    lattice = HermiteLattice(2)
    assert lattice.insert([2, 0])
    assert lattice.insert([0, 3])
    assert not lattice.insert([4, 6])
    basis = lattice.basis()
    coords = lattice.coordinates([4, 9])
    assert [sum(c * row[i] for c, row in zip(coords, basis)) for i in range(2)] == [4, 9]
    with pytest.raises(ValueError):
        lattice.coordinates([1, 0])


def test_span_membership_mod_n():
    assert in_span_mod([4], [[2]], 8)
    assert not in_span_mod([1], [[2]], 8)
    assert in_span_mod([1, 1], [], 1)
