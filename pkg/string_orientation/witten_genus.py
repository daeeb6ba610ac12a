"""
The Witten genus on Pontryagin-number data.
Multiplicative sequences of z/sigma(z) are reduced to polynomials in p1..pk with sympy's
symmetric-function reduction; the q^0 layer is the A-hat genus.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from sympy import Mul, Poly, symbols
from sympy.polys.polyfuncs import symmetrize
from sympy.utilities.iterables import multiset_permutations, partitions

from string_orientation.errors import MalformedInputError
from string_orientation.lib.rings import RATIONALS
from string_orientation.lib.serialization import parse_manifold
from string_orientation.lib.series import DEFAULT_Q_ORDER, QSeries
from string_orientation.modular_forms import ModularFormsRing
from string_orientation.theta_cube import sigma_series

logger = logging.getLogger(__name__)

Partition = Tuple[int, ...]


def partitions_of(k: int) -> List[Partition]:
    """Partitions of k as non-increasing tuples, largest first."""
    out = []
    for p in partitions(k):
        out.append(tuple(sorted((part for part, mult in p.items() for _ in range(mult)),
                                reverse=True)))
    return sorted(out, reverse=True)


@lru_cache(maxsize=None)
def _monomial_in_elementary(parts: Partition, k: int) -> Tuple[Tuple[Partition, int], ...]:
    """m_parts(t_1..t_k) = sum_mu n_mu e_mu, as pairs (mu, n_mu)."""
    roots = symbols(f"t1:{k + 1}")
    padded = list(parts) + [0] * (k - len(parts))
    monomial = sum(Mul(*(t ** e for t, e in zip(roots, perm)))
                   for perm in multiset_permutations(padded))
    reduced, remainder, definitions = symmetrize(monomial, *roots, formal=True)
    if remainder != 0:
        raise ValueError(f"monomial symmetric function {parts} did not reduce")
    elementary = [s for s, _ in definitions]
    terms = []
    for exps, coeff in Poly(reduced, *elementary).terms():
        mu = tuple(sorted((j + 1 for j, e in enumerate(exps) for _ in range(e)), reverse=True))
        terms.append((mu, int(coeff)))
    return tuple(sorted(terms))


def multiplicative_sequence(coeffs: Sequence[Any], k: int, one: Any) -> Dict[Partition, Any]:
    """
    Degree-k part of prod_i Q(z_i) in the elementary symmetric functions of z_i^2.

    Args:
        coeffs: coeffs[m] is the coefficient of z^(2m) in Q, for m <= k
        k: degree (k roots suffice)
        one: the unit of the coefficient type

    Returns:
        Partition mu -> coefficient of p_mu
    """
    result: Dict[Partition, Any] = {}
    for lam in partitions_of(k):
        weight = one
        for part in lam:
            weight = weight * coeffs[part]
        for mu, n in _monomial_in_elementary(lam, k):
            term = weight * n
            result[mu] = result[mu] + term if mu in result else term
    return result


def classical_a_hat_polynomial(k: int) -> Dict[Partition, Fraction]:
    """A-hat polynomial of degree k from z / (2 sinh(z/2)), without any q."""
    # sinh(z/2)/(z/2) = sum_m t^m / (4^m (2m+1)!), with t = z^2
    series = [Fraction(1, 4 ** m * factorial(2 * m + 1)) for m in range(k + 1)]
    inverse = [Fraction(1)]
    for m in range(1, k + 1):
        inverse.append(-sum(series[i] * inverse[m - i] for i in range(1, m + 1)))
    return multiplicative_sequence(inverse, k, Fraction(1))


@dataclass(frozen=True)
class PontryaginData:
    """Pontryagin numbers p_lambda[M] of a closed manifold of dimension dim."""

    dim: int
    numbers: Mapping[Partition, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim <= 0 or self.dim % 4:
            raise MalformedInputError(f"dim must be a positive multiple of 4, got {self.dim}")
        clean = {}
        for key, value in self.numbers.items():
            parts = tuple(sorted(key, reverse=True))
            if not parts or any(p <= 0 for p in parts) or sum(parts) != self.degree:
                raise MalformedInputError(f"partition {list(key)} does not partition {self.degree}")
            clean[parts] = int(value)
        object.__setattr__(self, "numbers", clean)

    @classmethod
    def from_text(cls, text: str) -> "PontryaginData":
        dim, numbers = parse_manifold(text)
        return cls(dim, numbers)

    @property
    def degree(self) -> int:
        return self.dim // 4

    @property
    def string_like(self) -> bool:
        """Every Pontryagin number divisible by p1 vanishes."""
        return all(value == 0 for parts, value in self.numbers.items() if 1 in parts)

    def number(self, parts: Partition) -> int:
        return self.numbers.get(tuple(sorted(parts, reverse=True)), 0)


@dataclass(frozen=True)
class GenusValue:
    weight: int
    qexp: QSeries


@lru_cache(maxsize=64)
def _genus_polynomial(k: int, trunc_q: int, g2_shift: Fraction) -> Tuple[Tuple[Partition, QSeries], ...]:
    # Q(z) = z/sigma(z), optionally times exp(g2_shift z^2)
    Q = sigma_series(2 * k + 2, trunc_q).unit().invert()
    if g2_shift:
        z = Q.variable("z")
        Q = Q * (z * z).scale(g2_shift).exp()
    coeffs = [QSeries(RATIONALS, [Q.coefficient((2 * m, n)) for n in range(trunc_q)])
              for m in range(k + 1)]
    polynomial = multiplicative_sequence(coeffs, k, QSeries.one(RATIONALS, trunc_q))
    logger.debug("genus polynomial of degree %d has %d monomials", k, len(polynomial))
    return tuple(sorted(polynomial.items()))


class WittenGenusAnalyzer:
    """Evaluates the Witten genus and its checks at one q-precision."""

    # Coefficient c in Q(z) -> Q(z) exp(c z^2) used to test independence of G2
    G2_PERTURBATION = Fraction(1, 7)

    DIV24_MODULUS = 24

    def __init__(self, trunc_q: int = DEFAULT_Q_ORDER, g2_shift: Any = 0):
        """
        Initialize analyzer.

        Args:
            trunc_q: q-precision of every genus value
            g2_shift: rational c multiplying the characteristic series by exp(c z^2)
        """
        if trunc_q < 1:
            raise ValueError(f"trunc_q must be at least 1, got {trunc_q}")
        self.trunc_q = trunc_q
        self.g2_shift = Fraction(g2_shift)

    def genus_polynomial(self, k: int) -> Dict[Partition, QSeries]:
        """
        The degree-k multiplicative-sequence polynomial of z/sigma(z).

        Args:
            k: positive degree

        Returns:
            Partition mu -> q-expansion multiplying p_mu
        """
        if k < 1:
            raise ValueError(f"degree must be positive, got {k}")
        return dict(_genus_polynomial(k, self.trunc_q, self.g2_shift))

    def witten_genus(self, manifold: PontryaginData) -> GenusValue:
        polynomial = self.genus_polynomial(manifold.degree)
        total = QSeries.zero(RATIONALS, self.trunc_q)
        for mu, series in polynomial.items():
            value = manifold.number(mu)
            if value:
                total = total + series.scale(value)
        return GenusValue(manifold.dim // 2, total)

    def a_hat(self, manifold: PontryaginData) -> Fraction:
        return RATIONALS.to_fraction(self.witten_genus(manifold).qexp[0])

    def g2_invariant(self, manifold: PontryaginData) -> bool:
        """Whether multiplying z/sigma(z) by exp(c z^2) leaves the genus unchanged."""
        shifted = WittenGenusAnalyzer(self.trunc_q, self.g2_shift + self.G2_PERTURBATION)
        return shifted.witten_genus(manifold).qexp == self.witten_genus(manifold).qexp

    def modularity_check(self, manifold: PontryaginData) -> Dict[str, Any]:
        """
        Decompose the genus of string-like data in the modular forms of weight dim/2.

        Returns:
            Dictionary with the decomposition report, the G2-invariance verdict and
            an overall verdict
        """
        if not manifold.string_like:
            raise ValueError("modularity is only asserted when every p1-divisible number vanishes")
        genus = self.witten_genus(manifold)
        decomposition = ModularFormsRing(self.trunc_q).decompose(genus.qexp, genus.weight)
        invariant = self.g2_invariant(manifold)
        passed = decomposition["success"] and invariant
        logger.info("modularity in weight %d: %s", genus.weight, "pass" if passed else "FAIL")
        return {"weight": genus.weight, "decomposition": decomposition,
                "g2_invariant": invariant, "passed": passed}

    def div24_check(self, alpha: int, beta: int) -> Dict[str, Any]:
        """q^1 coefficient of alpha c4^3 + beta (24 Delta), and its residue mod 24."""
        forms = ModularFormsRing(2)
        f = alpha * forms.c4() ** 3 + (24 * beta) * forms.delta()
        q1 = int(RATIONALS.to_fraction(f.qexp[1]))
        return {"alpha": alpha, "beta": beta, "q1": q1,
                "residue": q1 % self.DIV24_MODULUS, "passed": q1 % self.DIV24_MODULUS == 0}

    def div24_property_run(self, samples: int, seed: int, bound: int = 10 ** 6) -> Dict[str, Any]:
        rng = random.Random(seed)
        failures = []
        for _ in range(samples):
            alpha, beta = rng.randint(-bound, bound), rng.randint(-bound, bound)
            if not self.div24_check(alpha, beta)["passed"]:
                failures.append((alpha, beta))
        return {"samples": samples, "seed": seed, "failures": failures, "passed": not failures}


def genus_polynomial(k: int, trunc_q: int = DEFAULT_Q_ORDER) -> Dict[Partition, QSeries]:
    return WittenGenusAnalyzer(trunc_q).genus_polynomial(k)


def witten_genus(manifold: PontryaginData, trunc_q: int = DEFAULT_Q_ORDER) -> GenusValue:
    return WittenGenusAnalyzer(trunc_q).witten_genus(manifold)


def a_hat(manifold: PontryaginData) -> Fraction:
    return WittenGenusAnalyzer(1).a_hat(manifold)


def modularity_check(manifold: PontryaginData, trunc_q: int = DEFAULT_Q_ORDER) -> Dict[str, Any]:
    return WittenGenusAnalyzer(trunc_q).modularity_check(manifold)


def div24_check(alpha: int, beta: int) -> bool:
    return WittenGenusAnalyzer(2).div24_check(alpha, beta)["passed"]
