import itertools
from fractions import Fraction

import pytest

from string_orientation.cocycles import (
    AugmentationIdealAnalyzer,
    CocycleCandidate,
    CocycleChecker,
    FiniteGroupSpec,
    aug_ideal_correspondence,
    check_cocycle2,
    check_cocycle3,
    coboundary,
    cube_coboundary,
    virtual_bundle_identity,
)
from string_orientation.errors import (
    BoundsExceededError,
    ConstantTermError,
    NonUnitError,
    RingMismatchError,
    VariableMismatchError,
)
from string_orientation.formal_groups import FormalGroupBuilder
from string_orientation.lib.rings import INTEGERS, RATIONALS
from string_orientation.lib.series import MultiSeries

# The Klein four-group at power 3 has one symmetric trilinear form over Z/2 too many
EXCESS_CASES = {((2, 2), 2, 3), ((2, 2), 4, 3), ((2, 2), 6, 3)}


def _g(ring, trunc, coeffs):
    return MultiSeries(ring, ("z",), trunc, {(n,): c for n, c in enumerate(coeffs)})


@pytest.fixture
def checker():
    return CocycleChecker()


def test_coboundary_of_one_plus_z_squared(additive_q):
    f = coboundary(_g(RATIONALS, 4, [1, 0, 1]), additive_q.map_ring(RATIONALS)).f
    assert f.trunc == 4
    assert f.terms == {(0, 0): 1, (1, 1): 2}


@pytest.mark.parametrize("coeffs", [[1, 1], [1, 0, 3], [1, -2, 5, 7]])
def test_coboundaries_are_cocycles_over_q(additive_q, coeffs):
    candidate = coboundary(_g(RATIONALS, 6, coeffs), additive_q)
    report = check_cocycle2(candidate)
    assert report["passed"]
    assert all(c["first_failure"] is None for c in report["conditions"].values())


def test_coboundaries_are_cocycles_over_z(multiplicative_z):
    candidate = coboundary(_g(INTEGERS, 6, [1, 1, 3]), multiplicative_z)
    assert check_cocycle2(candidate, jobs=3)["passed"]


def test_off_diagonal_mutation_breaks_symmetry(additive_q):
    f = coboundary(_g(RATIONALS, 6, [1, 1, 2]), additive_q).f
    x, y = f.variable("x"), f.variable("y")
    report = check_cocycle2(CocycleCandidate(2, f + x * y * y, additive_q))
    symmetric = report["conditions"]["symmetric"]
    assert not report["passed"]
    assert not symmetric["passed"]
    assert symmetric["first_failure"] == (2, 1)
    assert report["conditions"]["rigid"]["passed"]


def test_constant_term_mutation_breaks_rigidity(additive_q):
    f = coboundary(_g(RATIONALS, 6, [1, 3]), additive_q).f
    report = check_cocycle2(CocycleCandidate(2, f + 1, additive_q))
    assert report["conditions"]["rigid"]["first_failure"] == (0, 0)
    assert report["conditions"]["symmetric"]["passed"]


def test_symmetric_non_cocycle(additive_q):
    x, y = MultiSeries.gens(RATIONALS, ("x", "y"), 6)
    f = 1 + x * x * y * y
    report = check_cocycle2(CocycleCandidate(2, f, additive_q))
    assert report["conditions"]["symmetric"]["passed"]
    assert not report["conditions"]["cocycle"]["passed"]


def test_cube_coboundary_passes_check3(additive_q, checker):
    candidate = cube_coboundary(_g(RATIONALS, 4, [1, 2, -1, 3]), additive_q)
    assert candidate.arity == 3
    assert checker.check3(candidate)["passed"]


def test_cube_coboundary_over_multiplicative_law(multiplicative_z):
    candidate = cube_coboundary(_g(INTEGERS, 4, [1, 1, 1]), multiplicative_z)
    assert check_cocycle3(candidate, jobs=4)["passed"]


def test_check3_reports_broken_symmetry(additive_q):
    x, y, z = MultiSeries.gens(RATIONALS, ("x", "y", "z"), 4)
    report = check_cocycle3(CocycleCandidate(3, 1 + x * y, additive_q))
    assert not report["conditions"]["symmetric"]["passed"]
    assert "permutation" in report["conditions"]["symmetric"]


def test_log_side_agrees(additive_q, checker):
    good = coboundary(_g(RATIONALS, 5, [1, 1, 1]), additive_q)
    assert checker.log_side_agreement(good) == {
        "multiplicative": True, "additive": True, "agree": True}

    x, y = MultiSeries.gens(RATIONALS, ("x", "y"), 5)
    bad = CocycleCandidate(2, 1 + x * x * y * y, additive_q)
    verdict = checker.log_side_agreement(bad)
    assert verdict["agree"]
    assert not verdict["multiplicative"]


def test_log_side_needs_rationals(multiplicative_z, checker):
    candidate = coboundary(_g(INTEGERS, 4, [1, 1]), multiplicative_z)
    with pytest.raises(RingMismatchError):
        checker.log_side_agreement(candidate)


def test_virtual_bundle_identity(checker):
    assert virtual_bundle_identity()
    left, right = checker.virtual_bundle_sides()
    assert left == right


def test_candidate_validation(additive_q):
    x, y, z = MultiSeries.gens(RATIONALS, ("x", "y", "z"), 4)
    with pytest.raises(VariableMismatchError):
        CocycleCandidate(2, 1 + x, additive_q)
    with pytest.raises(ValueError):
        CocycleCandidate(4, 1 + x, additive_q)
    u, v = MultiSeries.gens(INTEGERS, ("x", "y"), 4)
    with pytest.raises(RingMismatchError):
        CocycleCandidate(2, 1 + u, additive_q)
    with pytest.raises(NonUnitError):
        CocycleCandidate(2, 2 + u, additive_q.map_ring(INTEGERS))


def test_coboundary_needs_normalized_g(additive_q):
    with pytest.raises(ConstantTermError):
        coboundary(_g(RATIONALS, 4, [2, 1]), additive_q)
    (x,) = MultiSeries.gens(RATIONALS, ("x",), 4)
    with pytest.raises(VariableMismatchError):
        coboundary(1 + x, additive_q)


@pytest.mark.parametrize("power", [2, 3])
def test_augmentation_ideal_of_z2(power):
    report = aug_ideal_correspondence(FiniteGroupSpec((2,), 2), power)
    assert report["rank"] == 1
    assert report["maps_count"] == 2
    assert report["cocycle_count"] == 2
    assert report["method"] == "enumeration"
    assert report["enumerated_count"] == 2
    assert report["bijection"]


def test_augmentation_ideal_by_linear_algebra():
    report = aug_ideal_correspondence(FiniteGroupSpec((4,), 2), 2)
    assert report["method"] == "linear-algebra"
    assert report["enumerated_count"] is None
    assert report["counts_agree"]
    assert report["bijection"]


def _matrix():
    params = []
    for orders in [(2,), (3,), (4,), (2, 2)]:
        for modulus in [2, 3, 4, 6]:
            for power in [2, 3]:
                heavy = power == 3 and FiniteGroupSpec(orders, modulus).order == 4
                marks = [pytest.mark.slow] if heavy else []
                params.append(pytest.param(orders, modulus, power, marks=marks,
                                           id=f"{'x'.join(map(str, orders))}-mod{modulus}-k{power}"))
    return params


@pytest.mark.parametrize("orders,modulus,power", _matrix())
def test_augmentation_ideal_matrix(orders, modulus, power):
    spec = FiniteGroupSpec(orders, modulus)
    report = AugmentationIdealAnalyzer(spec, power).analyze()
    assert report["rank"] == spec.order - 1
    assert report["maps_count"] == modulus ** (spec.order - 1)
    assert report["injective"]
    assert report["image_in_solutions"]
    if (orders, modulus, power) in EXCESS_CASES:
        assert report["cocycle_count"] == 2 * report["maps_count"]
        assert report["cokernel_order"] == 2
        assert not report["counts_agree"]
        assert not report["bijection"]
    else:
        assert report["cocycle_count"] == report["maps_count"]
        assert report["cokernel_order"] == 1
        assert report["bijection"]


@pytest.mark.slow
def test_klein_four_excess_counts():
    counts = [AugmentationIdealAnalyzer(FiniteGroupSpec((2, 2), modulus), 3).analyze()
              for modulus in (2, 4, 6)]
    assert [r["maps_count"] for r in counts] == [8, 64, 216]
    assert [r["cocycle_count"] for r in counts] == [16, 128, 432]


def test_augmentation_ideal_bounds():
    with pytest.raises(BoundsExceededError):
        AugmentationIdealAnalyzer(FiniteGroupSpec((128,), 2), 2)
    with pytest.raises(BoundsExceededError):
        AugmentationIdealAnalyzer(FiniteGroupSpec((17,), 2), 3)
    with pytest.raises(ValueError):
        AugmentationIdealAnalyzer(FiniteGroupSpec((2,), 2), 4)


def test_finite_group_spec_validation():
    with pytest.raises(ValueError):
        FiniteGroupSpec((0,), 2)
    with pytest.raises(ValueError):
        FiniteGroupSpec((2,), 1)
    assert FiniteGroupSpec((2, 3), 5).order == 6


# Monomials that are first-order cocycles on their own
FIRST_ORDER_COCYCLES = {(1, 1), (1, 1, 1)}

DELTAS = [-3, -2, 2, 3, Fraction(1, 2), Fraction(-5, 3)]


@pytest.fixture(params=["additive", "multiplicative"])
def law_q(request):
    return FormalGroupBuilder(RATIONALS, 6).standard(request.param)


def _random_g(rng, trunc):
    return _g(RATIONALS, trunc, [1] + [Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                                       for _ in range(trunc - 1)])


def _mutated(f, exp, delta):
    terms = dict(f.terms)
    terms[exp] = terms.get(exp, f.ring.zero) + f.ring.coerce(delta)
    return MultiSeries(f.ring, f.variables, f.trunc, terms, f.cap_map)


def _exponents(arity, trunc):
    return [e for e in itertools.product(range(trunc), repeat=arity)
            if sum(e) < trunc and e not in FIRST_ORDER_COCYCLES]


def test_random_coboundaries_and_their_mutations(rng, law_q, checker):
    exponents = _exponents(2, 6)
    for _ in range(50):
        candidate = checker.coboundary(_random_g(rng, 6), law_q)
        assert checker.check2(candidate)["passed"]
        f = _mutated(candidate.f, rng.choice(exponents), rng.choice(DELTAS))
        assert not checker.check2(CocycleCandidate(2, f, law_q))["passed"]


def test_random_cube_coboundaries_and_their_mutations(rng, law_q, checker):
    exponents = _exponents(3, 4)
    for _ in range(50):
        candidate = checker.cube_coboundary(_random_g(rng, 4), law_q)
        assert checker.check3(candidate)["passed"]
        f = _mutated(candidate.f, rng.choice(exponents), rng.choice(DELTAS))
        assert not checker.check3(CocycleCandidate(3, f, law_q))["passed"]


def test_diagonal_mutation_breaks_only_the_cocycle(law_q, checker):
    f = checker.coboundary(_g(RATIONALS, 6, [1, 1, 1]), law_q).f
    report = checker.check2(CocycleCandidate(2, _mutated(f, (2, 2), 1), law_q))
    assert report["conditions"]["rigid"]["passed"]
    assert report["conditions"]["symmetric"]["passed"]
    assert not report["conditions"]["cocycle"]["passed"]
