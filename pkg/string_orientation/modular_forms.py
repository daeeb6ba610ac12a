"""
Level-1 modular forms as exact q-expansions.
Eisenstein series, the discriminant, the Z-basis c4^a c6^b Delta^c (b <= 1) of each
weight, basis decomposition and membership in the lattice <c4^3, 24 Delta> of weight 12.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Any, Dict, List, Tuple

from sympy import Matrix, divisor_sigma

from string_orientation.errors import (
    DecompositionError,
    InsufficientPrecisionError,
    RingMismatchError,
)
from string_orientation.lib.rings import RATIONALS
from string_orientation.lib.series import DEFAULT_Q_ORDER, QSeries

logger = logging.getLogger(__name__)


@lru_cache(maxsize=8)
def _bernoulli_table(n: int) -> Tuple[Fraction, ...]:
    # sum_{j=0}^{m} C(m+1, j) B_j = 0 for m >= 1, with B_1 = -1/2
    table = [Fraction(1)]
    for m in range(1, n + 1):
        acc = sum(comb(m + 1, j) * table[j] for j in range(m))
        table.append(-acc / (m + 1))
    return tuple(table)


def bernoulli_number(n: int) -> Fraction:
    if n < 0:
        raise ValueError(f"Bernoulli index must be non-negative, got {n}")
    return _bernoulli_table(max(n, 32))[n]


def divisor_sum(n: int, power: int) -> int:
    return int(divisor_sigma(n, power))


@dataclass(frozen=True)
class ModularForm:
    """A q-expansion together with its weight; label names the basis monomial, if any."""

    weight: int
    qexp: QSeries
    label: str = ""

    def __post_init__(self):
        if self.weight < 0 or self.weight % 2:
            raise ValueError(f"Weight must be a non-negative even integer, got {self.weight}")

    @property
    def trunc(self) -> int:
        return self.qexp.trunc

    def _same_weight(self, other: "ModularForm") -> None:
        if self.weight != other.weight:
            raise ValueError(f"cannot add forms of weight {self.weight} and {other.weight}")

    def __add__(self, other: "ModularForm") -> "ModularForm":
        self._same_weight(other)
        return ModularForm(self.weight, self.qexp + other.qexp)

    def __sub__(self, other: "ModularForm") -> "ModularForm":
        self._same_weight(other)
        return ModularForm(self.weight, self.qexp - other.qexp)

    def __neg__(self) -> "ModularForm":
        return ModularForm(self.weight, -self.qexp)

    def __mul__(self, other: Any) -> "ModularForm":
        if isinstance(other, ModularForm):
            return ModularForm(self.weight + other.weight, self.qexp * other.qexp)
        return ModularForm(self.weight, self.qexp.scale(other))

    def __rmul__(self, other: Any) -> "ModularForm":
        return ModularForm(self.weight, self.qexp.scale(other))

    def __pow__(self, exponent: int) -> "ModularForm":
        if exponent < 0:
            raise ValueError("negative powers of modular forms are not modular forms")
        return ModularForm(self.weight * exponent, self.qexp ** exponent)

    def is_integral(self) -> bool:
        ring = self.qexp.ring
        return all(ring.to_fraction(c).denominator == 1 for c in self.qexp)

    def coefficients(self) -> List[Fraction]:
        ring = self.qexp.ring
        return [ring.to_fraction(c) for c in self.qexp]


def euler_product(trunc: int) -> List[int]:
    """prod_{n >= 1} (1 - q^n) up to q^trunc, multiplied out in place."""
    coeffs = [1] + [0] * max(trunc - 1, 0)
    for n in range(1, trunc):
        for i in range(trunc - 1, n - 1, -1):
            coeffs[i] -= coeffs[i - n]
    return coeffs


def _pentagonal_series(trunc: int) -> List[int]:
    """The same product read off Euler's pentagonal number theorem."""
    coeffs = [0] * trunc
    if trunc:
        coeffs[0] = 1
    m = 1
    while m * (3 * m - 1) // 2 < trunc:
        sign = -1 if m % 2 else 1
        for k in (m * (3 * m - 1) // 2, m * (3 * m + 1) // 2):
            if k < trunc:
                coeffs[k] = sign
        m += 1
    return coeffs


def _basis_label(a: int, b: int, c: int) -> str:
    parts = []
    for name, power in (("c4", a), ("c6", b), ("Delta", c)):
        if power == 1:
            parts.append(name)
        elif power > 1:
            parts.append(f"{name}^{power}")
    return "*".join(parts) or "1"


def basis_exponents(weight: int) -> List[Tuple[int, int, int]]:
    """(a, b, c) with 4a + 6b + 12c = weight and b in {0, 1}, ordered by c."""
    if weight < 0 or weight % 2:
        raise ValueError(f"Weight must be a non-negative even integer, got {weight}")
    exponents = []
    for c in range(weight // 12 + 1):
        rest = weight - 12 * c
        if rest % 4 == 0:
            exponents.append((rest // 4, 0, c))
        elif rest >= 6 and (rest - 6) % 4 == 0:
            exponents.append(((rest - 6) // 4, 1, c))
    return exponents


class ModularFormsRing:
    """Exact q-expansions of level-1 forms, all truncated at one q-order."""

    MIN_EISENSTEIN_WEIGHT = 4

    RELATION = "c4^3 - c6^2 = 1728*Delta"

    # Generators of the weight-12 image lattice, as multiples of (c4^3, Delta)
    IMAGE24_GENERATORS = ((1, 0), (0, 24))

    def __init__(self, trunc_q: int = DEFAULT_Q_ORDER):
        """
        Initialize ring.

        Args:
            trunc_q: q-expansions are exact for q^n with n < trunc_q
        """
        if trunc_q < 1:
            raise ValueError(f"trunc_q must be at least 1, got {trunc_q}")
        self.trunc_q = trunc_q
        self.ring = RATIONALS

    def eisenstein(self, k: int) -> ModularForm:
        """
        E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n.

        Args:
            k: even weight >= 4

        Returns:
            The normalized Eisenstein series of weight k
        """
        if k < self.MIN_EISENSTEIN_WEIGHT or k % 2:
            raise ValueError(f"Eisenstein weight must be even and at least 4, got {k}")
        return ModularForm(k, _eisenstein_qexp(k, self.trunc_q), f"E{k}")

    def c4(self) -> ModularForm:
        return ModularForm(4, _generators(self.trunc_q)[0], "c4")

    def c6(self) -> ModularForm:
        return ModularForm(6, _generators(self.trunc_q)[1], "c6")

    def delta(self) -> ModularForm:
        return ModularForm(12, _generators(self.trunc_q)[2], "Delta")

    def delta_via_eta_power(self) -> ModularForm:
        """
        Delta from the pentagonal series raised to the 24th power by the recurrence
        n f_n = sum_{k=1}^{n} (25k - n) g_k f_{n-k}, independent of the product expansion.
        """
        g = _pentagonal_series(self.trunc_q)
        f = [1] + [0] * max(self.trunc_q - 2, 0)
        for n in range(1, len(f)):
            acc = sum((25 * k - n) * g[k] * f[n - k] for k in range(1, n + 1))
            f[n] = acc // n
        coeffs = ([0] + f)[:self.trunc_q]
        return ModularForm(12, QSeries(self.ring, coeffs), "Delta")

    def basis(self, weight: int) -> List[ModularForm]:
        """
        The Z-basis c4^a c6^b Delta^c of integral forms of a weight.

        Args:
            weight: even weight >= 0

        Returns:
            Forms ordered by the power of Delta; form i starts at q^i with coefficient 1
        """
        return list(_basis(weight, self.trunc_q))

    def decompose(self, f: QSeries, weight: int) -> Dict[str, Any]:
        """
        Coordinates of f in basis(weight), with a consistency check on every coefficient.

        Args:
            f: q-expansion over Q or Z
            weight: even weight >= 0

        Returns:
            Dictionary with the basis labels, rational coordinates, a success flag and
            the first inconsistent q-degree on failure
        """
        if f.ring.is_residue:
            raise RingMismatchError(f"decomposition needs an exact ring, not {f.ring}")
        if f.ring != self.ring:
            f = f.map_ring(self.ring)
        basis = _basis(weight, f.trunc)
        if f.trunc <= len(basis):
            raise InsufficientPrecisionError(
                f"weight {weight} has {len(basis)} basis forms; need trunc_q > {len(basis)}",
                required=len(basis) + 1)

        residual = f
        coordinates = []
        for i, form in enumerate(basis):
            c = residual[i]
            coordinates.append(self.ring.to_fraction(c))
            if c:
                residual = residual - form.qexp.scale(c)
        failure = residual.valuation()
        report = {
            "weight": weight,
            "basis": [form.label for form in basis],
            "coordinates": coordinates,
            "success": failure is None,
            "first_inconsistent_degree": failure,
        }
        logger.debug("decomposed in weight %d: %s", weight,
                     "ok" if failure is None else f"inconsistent at q^{failure}")
        return report

    def mf12_membership(self, f: ModularForm) -> Dict[str, Any]:
        """
        Decide whether f lies in the subgroup generated by c4^3 and 24 Delta.

        Returns:
            Dictionary with the verdict and the certificate (alpha, beta) of
            f = alpha c4^3 + beta Delta

        Raises:
            DecompositionError: if f is not a weight-12 form at this precision
        """
        if f.weight != 12:
            raise ValueError(f"membership is defined in weight 12, got weight {f.weight}")
        if not f.is_integral():
            raise ValueError("membership needs an integral q-expansion")
        report = self.decompose(f.qexp, 12)
        if not report["success"]:
            raise DecompositionError(
                f"not a weight-12 form: inconsistent at q^{report['first_inconsistent_degree']}")
        alpha, beta = report["coordinates"]
        member = alpha.denominator == 1 and beta.denominator == 1 and beta.numerator % 24 == 0
        return {"member": member, "alpha": alpha, "beta": beta}

    def lattice_index(self) -> int:
        """Index of <c4^3, 24 Delta> in Z c4^3 + Z Delta, from coordinates of its generators."""
        c4_cubed = self.c4() ** 3
        delta = self.delta()
        rows = []
        for a, b in self.IMAGE24_GENERATORS:
            generator = a * c4_cubed + b * delta
            rows.append(self.decompose(generator.qexp, 12)["coordinates"])
        return abs(int(Matrix(rows).det()))

    def relation_check(self) -> Dict[str, Any]:
        left = (self.c4() ** 3 - self.c6() ** 2).qexp
        right = self.delta().qexp.scale(1728)
        failure = left.first_difference(right)
        return {"relation": self.RELATION, "trunc": self.trunc_q,
                "passed": failure is None, "first_failure": failure}


def _eisenstein_qexp(k: int, trunc_q: int) -> QSeries:
    factor = -Fraction(2 * k) / bernoulli_number(k)
    coeffs = [Fraction(1)] + [factor * divisor_sum(n, k - 1) for n in range(1, trunc_q)]
    return QSeries(RATIONALS, coeffs[:trunc_q])


@lru_cache(maxsize=32)
def _generators(trunc_q: int) -> Tuple[QSeries, QSeries, QSeries]:
    c4 = _eisenstein_qexp(4, trunc_q)
    c6 = _eisenstein_qexp(6, trunc_q)
    euler = QSeries(RATIONALS, euler_product(trunc_q))
    delta = (euler ** 24).shift(1).truncate(trunc_q)
    logger.debug("built c4, c6, Delta to q^%d", trunc_q)
    return c4, c6, delta


@lru_cache(maxsize=128)
def _basis(weight: int, trunc_q: int) -> Tuple[ModularForm, ...]:
    c4, c6, delta = _generators(trunc_q)
    forms = []
    for a, b, c in basis_exponents(weight):
        qexp = QSeries.one(RATIONALS, trunc_q)
        for series, power in ((c4, a), (c6, b), (delta, c)):
            if power:
                qexp = qexp * series ** power
        forms.append(ModularForm(weight, qexp, _basis_label(a, b, c)))
    return tuple(forms)


def eisenstein(k: int, trunc_q: int = DEFAULT_Q_ORDER) -> ModularForm:
    return ModularFormsRing(trunc_q).eisenstein(k)


def delta(trunc_q: int = DEFAULT_Q_ORDER) -> ModularForm:
    return ModularFormsRing(trunc_q).delta()


def c4(trunc_q: int = DEFAULT_Q_ORDER) -> ModularForm:
    return ModularFormsRing(trunc_q).c4()


def c6(trunc_q: int = DEFAULT_Q_ORDER) -> ModularForm:
    return ModularFormsRing(trunc_q).c6()


def mf_basis(weight: int, trunc_q: int = DEFAULT_Q_ORDER) -> List[ModularForm]:
    return ModularFormsRing(trunc_q).basis(weight)


def decompose(f: QSeries, weight: int) -> Dict[str, Any]:
    return ModularFormsRing(max(f.trunc, 1)).decompose(f, weight)


def mf12_membership(f: ModularForm) -> Dict[str, Any]:
    return ModularFormsRing(f.trunc).mf12_membership(f)


def mf12_lattice_index(trunc_q: int = DEFAULT_Q_ORDER) -> int:
    return ModularFormsRing(trunc_q).lattice_index()


def delta_via_eta_power(trunc_q: int = DEFAULT_Q_ORDER) -> ModularForm:
    return ModularFormsRing(trunc_q).delta_via_eta_power()


def relation_check(trunc_q: int = DEFAULT_Q_ORDER) -> Dict[str, Any]:
    return ModularFormsRing(trunc_q).relation_check()
