"""
Theta function of the Tate curve and the canonical cubical structure.
Quasi-periodicity and cube invariance are checked as exact Laurent identities in u; the
sigma-based sections are checked in the additive formal coordinate with divisor bookkeeping.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple

from string_orientation.cocycles import VARIABLES, CocycleCandidate, CocycleChecker
from string_orientation.errors import ConstantTermError, DivisorMismatchError, VariableMismatchError
from string_orientation.formal_groups import FormalGroupBuilder, FormalGroupLaw
from string_orientation.lib.rings import RATIONALS
from string_orientation.lib.series import (
    DEFAULT_Q_ORDER,
    Divisor,
    LaurentUnit,
    MultiSeries,
    QSeries,
    local_equation,
    valuation_along,
)
from string_orientation.modular_forms import bernoulli_number, divisor_sum, euler_product

logger = logging.getLogger(__name__)

# Key (q exponent, u1 exponent, ...) -> integer coefficient
Laurent = Dict[Tuple[int, ...], int]

SIGMA_VARIABLES = ("z", "q")


@dataclass(frozen=True)
class ThetaFunction:
    """layers[n] maps u-exponents to the coefficient of q^n, for n < trunc_q."""

    trunc_q: int
    layers: Tuple[Dict[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(dict(layer) for layer in self.layers))
        if len(self.layers) != self.trunc_q:
            raise ValueError(f"expected {self.trunc_q} q-layers, got {len(self.layers)}")

    def coefficient(self, n: int, k: int) -> int:
        return self.layers[n].get(k, 0)

    def support_ok(self) -> bool:
        return all(-n - 1 <= k <= n for n, layer in enumerate(self.layers) for k in layer)

    def as_laurent(self, direction: Sequence[int] = (1,)) -> Laurent:
        """Theta(u^direction) as a Laurent series in as many u-variables as direction has."""
        return {(n,) + tuple(k * d for d in direction): c
                for n, layer in enumerate(self.layers) for k, c in layer.items() if c}

    def to_text(self) -> str:
        lines = [f"trunc_q={self.trunc_q}"]
        for n, layer in enumerate(self.layers):
            terms = ", ".join(f"u^{k}:{layer[k]}" for k in sorted(layer, reverse=True) if layer[k])
            lines.append(f"q^{n} : {terms or '0'}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SigmaSeries:
    """sigma(z) as a series in (z, q): z graded below trunc_z, q capped at trunc_q."""

    series: MultiSeries

    def __post_init__(self):
        if self.series.variables != SIGMA_VARIABLES or self.series.param_names != ("q",):
            raise VariableMismatchError(
                f"sigma lives in graded z with parameter q, got {self.series.variables}")

    @property
    def trunc_z(self) -> int:
        return self.series.trunc

    @property
    def trunc_q(self) -> int:
        return self.series.cap_map["q"]

    def coefficient(self, k: int) -> QSeries:
        """The q-expansion multiplying z^k."""
        s = self.series
        return QSeries(s.ring, [s.coefficient((k, n)) for n in range(self.trunc_q)])

    @property
    def coeffs(self) -> List[QSeries]:
        return [self.coefficient(k) for k in range(self.trunc_z)]

    def unit(self) -> MultiSeries:
        """sigma(z)/z, known below z-degree trunc_z - 1."""
        terms = {}
        for (k, n), c in self.series.terms.items():
            if k == 0:
                raise ConstantTermError("sigma has a z^0 term, so sigma/z is not a series")
            terms[(k - 1, n)] = c
        return MultiSeries(self.series.ring, SIGMA_VARIABLES, self.trunc_z - 1, terms,
                           self.series.cap_map)


@dataclass(frozen=True)
class DivisorVector:
    """Multiplicities on the eight divisors of the cube fiber, in LABELS order."""

    values: Tuple[int, ...]

    LABELS: ClassVar[Tuple[str, ...]] = ("x+y+z", "x", "y", "z", "x+y", "x+z", "y+z", "e")

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) != len(self.LABELS):
            raise ValueError(f"a divisor vector has {len(self.LABELS)} entries, got {len(self.values)}")

    def __getitem__(self, label: str) -> int:
        return self.values[self.LABELS.index(label)]

    def as_dict(self) -> Dict[str, int]:
        return dict(zip(self.LABELS, self.values))

    def __str__(self) -> str:
        return "(" + ",".join(f"{v:+d}" if v else "0" for v in self.values) + ")"


def _laurent_mul(a: Laurent, b: Laurent, trunc_q: int) -> Laurent:
    layers: Dict[int, List[Tuple[Tuple[int, ...], int]]] = {}
    for key, c in b.items():
        layers.setdefault(key[0], []).append((key[1:], c))
    out: Laurent = {}
    for key, ca in a.items():
        qa, ua = key[0], key[1:]
        for qb in range(trunc_q - qa):
            for ub, cb in layers.get(qb, ()):
                k = (qa + qb,) + tuple(x + y for x, y in zip(ua, ub))
                out[k] = out.get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def _multiplier_failure(data: Laurent, trunc_q: int, var: int, count: int,
                        shift: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
    """
    Check q^count S(.., q u_var, ..) = (-1)^count u^(-shift) S(u) monomial by monomial.

    Only monomials whose source coefficients on both sides lie below trunc_q are compared.
    Returns the first failing key (q exponent first) or None.
    """
    sign = -1 if count % 2 else 1
    candidates = set()
    for key in data:
        b, k = key[0], key[1:]
        candidates.add((b + k[var] + count,) + k)
        candidates.add((b,) + tuple(e - s for e, s in zip(k, shift)))
    for key in sorted(candidates):
        a, k = key[0], key[1:]
        source = a - k[var] - count
        if a >= trunc_q or source >= trunc_q:
            continue
        left = data.get((source,) + k, 0) if source >= 0 else 0
        right = sign * data.get((a,) + tuple(e + s for e, s in zip(k, shift)), 0) if a >= 0 else 0
        if left != right:
            return key
    return None


def _slots(pair: Tuple[int, int], a: Tuple[str, ...], b: Tuple[str, ...]) -> List[Tuple[str, ...]]:
    # Arguments of one factor, the slot outside the pair held at v
    slots: List[Tuple[str, ...]] = [("v",), ("v",), ("v",)]
    slots[pair[0]], slots[pair[1]] = a, b
    return slots


def _permuted(data: Laurent, i: int, j: int) -> Laurent:
    out = {}
    for key, c in data.items():
        k = list(key)
        k[1 + i], k[1 + j] = k[1 + j], k[1 + i]
        out[tuple(k)] = c
    return out


class CubeAnalyzer:
    """Builds theta, sigma and the canonical sections, and checks their identities."""

    # Theta(u^eps) factors of F(u1, u2, u3) = Theta(u1u2u3)Theta(u1)Theta(u2)Theta(u3)/(...)
    NUMERATOR = ((1, 1, 1), (1, 0, 0), (0, 1, 0), (0, 0, 1))
    DENOMINATOR = ((1, 1, 0), (1, 0, 1), (0, 1, 1))

    SECTION_DIVISORS = (Divisor.of("x", "y", "z"), Divisor.of("x"), Divisor.of("y"), Divisor.of("z"),
                        Divisor.of("x", "y"), Divisor.of("x", "z"), Divisor.of("y", "z"))
    SECTION_VALUATIONS = (1, 1, 1, 1, -1, -1, -1)

    TWO_VARIABLE_DIVISORS = (Divisor.of("x", "y"), Divisor.of("x"), Divisor.of("y"))
    TWO_VARIABLE_VALUATIONS = (1, -1, -1)

    def __init__(self, jobs: int = 1):
        """
        Initialize analyzer.

        Args:
            jobs: worker threads for the independent series checks
        """
        self.jobs = jobs

    # Theta on the Tate curve

    def theta(self, trunc_q: int) -> ThetaFunction:
        """
        Theta(u) = (1 - u^-1) prod_{n>=1} (1 - q^n u)(1 - q^n u^-1) / (1 - q^n)^2.

        Args:
            trunc_q: number of q-layers kept

        Returns:
            ThetaFunction with exact integer layers
        """
        if trunc_q < 1:
            raise ValueError(f"trunc_q must be at least 1, got {trunc_q}")
        layers: List[Dict[int, int]] = [{} for _ in range(trunc_q)]
        layers[0] = {0: 1, -1: -1}
        for n in range(1, trunc_q):
            # Descending so that layer a - n still holds the old value
            for step in (1, -1):
                for a in range(trunc_q - 1, n - 1, -1):
                    for k, c in list(layers[a - n].items()):
                        layers[a][k + step] = layers[a].get(k + step, 0) - c
            for _ in range(2):
                for a in range(n, trunc_q):
                    for k, c in layers[a - n].items():
                        layers[a][k] = layers[a].get(k, 0) + c
        theta = ThetaFunction(trunc_q, tuple({k: c for k, c in layer.items() if c} for layer in layers))
        logger.debug("built theta to q^%d", trunc_q)
        return theta

    def quasi_periodicity(self, theta: ThetaFunction) -> Dict[str, Any]:
        """Compare q Theta(qu) with -u^-1 Theta(u) inside the stored q-window."""
        failure = _multiplier_failure(theta.as_laurent(), theta.trunc_q, 0, 1, (1,))
        return {"trunc_q": theta.trunc_q, "passed": failure is None, "first_failure": failure}

    def product_identity(self, theta: ThetaFunction) -> Dict[str, Any]:
        """
        Theta(u) prod (1 - q^n)^3 = sum_k (-1)^k q^(k(k+1)/2) u^k.

        Returns:
            Dictionary with the verdict and the first differing (q, u) exponent pair
        """
        T = theta.trunc_q
        euler = euler_product(T)
        cube = [0] * T
        for i, a in enumerate(euler):
            for j, b in enumerate(euler[:T - i]):
                for m, c in enumerate(euler[:T - i - j]):
                    cube[i + j + m] += a * b * c
        product = {}
        for a in range(T):
            for j in range(a + 1):
                if cube[j]:
                    for k, c in theta.layers[a - j].items():
                        product[(a, k)] = product.get((a, k), 0) + cube[j] * c
        expected = {}
        k = 0
        while k * (k + 1) // 2 < T:
            for j in (k, -k - 1):
                expected[(j * (j + 1) // 2, j)] = -1 if j % 2 else 1
            k += 1
        diffs = sorted(key for key in set(product) | set(expected)
                       if product.get(key, 0) != expected.get(key, 0))
        return {"trunc_q": T, "passed": not diffs, "first_failure": diffs[0] if diffs else None}

    def cube_invariance(self, trunc_q: int) -> Dict[str, Any]:
        """
        Invariance of F(u1, u2, u3) under u_i -> q u_i, with no division.

        Numerator and denominator each pick up a monomial multiplier; the multipliers are
        compared exactly, each side's transformation law is checked on its expansion, and
        both sides are checked for symmetry in the u_i.
        """
        theta = self.theta(trunc_q)

        def product(factors: Sequence[Tuple[int, ...]]) -> Laurent:
            total = theta.as_laurent(factors[0])
            for eps in factors[1:]:
                total = _laurent_mul(total, theta.as_laurent(eps), trunc_q)
            return total

        numerator = product(self.NUMERATOR)
        denominator = product(self.DENOMINATOR)
        logger.debug("cube numerator has %d terms, denominator %d", len(numerator), len(denominator))

        multipliers = {}
        expansions = {}
        for i in range(3):
            laws = {}
            for side, factors, data in (("numerator", self.NUMERATOR, numerator),
                                        ("denominator", self.DENOMINATOR, denominator)):
                moving = [eps for eps in factors if eps[i]]
                count = len(moving)
                shift = tuple(sum(eps[j] for eps in moving) for j in range(3))
                laws[side] = (count, shift)
                expansions[f"u{i + 1}:{side}"] = _multiplier_failure(data, trunc_q, i, count, shift)
            (count, shift) = laws["numerator"]
            multipliers[f"u{i + 1}"] = {
                "sign": -1 if count % 2 else 1,
                "q": -count,
                "u": tuple(-s for s in shift),
                "agree": laws["numerator"] == laws["denominator"],
            }

        symmetric = all(_permuted(data, i, j) == data
                        for data in (numerator, denominator) for i, j in ((0, 1), (1, 2)))
        passed = (all(m["agree"] for m in multipliers.values())
                  and all(f is None for f in expansions.values()) and symmetric)
        logger.info("cube invariance at q^%d: %s", trunc_q, "pass" if passed else "FAIL")
        return {
            "trunc_q": trunc_q,
            "multipliers": multipliers,
            "expansions": expansions,
            "symmetric": symmetric,
            "passed": passed,
        }

    # Sigma and the canonical sections

    def eisenstein_log(self, trunc_z: int, trunc_q: int) -> MultiSeries:
        """log(z/sigma(z)) = sum over even k >= 2 of 2 G_k z^k / k!."""
        terms = {}
        for k in range(2, trunc_z, 2):
            scale = Fraction(2, factorial(k))
            terms[(k, 0)] = scale * (-bernoulli_number(k) / (2 * k))
            for n in range(1, trunc_q):
                terms[(k, n)] = scale * divisor_sum(n, k - 1)
        return MultiSeries(RATIONALS, SIGMA_VARIABLES, trunc_z, terms, {"q": trunc_q})

    def sigma(self, trunc_z: int, trunc_q: int) -> SigmaSeries:
        """
        sigma(z) = (e^(z/2) - e^(-z/2)) prod (1 - q^n e^z)(1 - q^n e^-z) / (1 - q^n)^2.

        Args:
            trunc_z: z-degrees below this are exact
            trunc_q: q-exponents below this are exact

        Returns:
            SigmaSeries with sigma = z exp(-eisenstein_log)
        """
        if trunc_z < 2 or trunc_q < 1:
            raise ValueError(f"need trunc_z >= 2 and trunc_q >= 1, got {trunc_z}, {trunc_q}")
        unit = (-self.eisenstein_log(trunc_z, trunc_q)).exp()
        z = unit.variable("z")
        return SigmaSeries(z * unit)

    def sigma_product(self, trunc_z: int, trunc_q: int) -> SigmaSeries:
        """sigma expanded factor by factor from its product, with no Eisenstein series involved."""
        if trunc_z < 2 or trunc_q < 1:
            raise ValueError(f"need trunc_z >= 2 and trunc_q >= 1, got {trunc_z}, {trunc_q}")
        base = MultiSeries.zero(RATIONALS, SIGMA_VARIABLES, trunc_z, {"q": trunc_q})
        z, q = base.variable("z"), base.variable("q")
        half = z.scale(Fraction(1, 2))
        up, down = z.exp(), (-z).exp()
        total = half.exp() - (-half).exp()
        for n in range(1, trunc_q):
            qn = q ** n
            total = total * (1 - qn * up) * (1 - qn * down) * ((1 - qn) ** 2).invert()
        return SigmaSeries(total)

    def verify_sigma(self, sig: SigmaSeries) -> Dict[str, Any]:
        """
        Leading terms, oddness, the Eisenstein normalization of log(z/sigma), and agreement
        with the product expansion at the same truncation.

        Returns:
            Dictionary with one entry per check and an overall verdict
        """
        s = sig.series
        low_terms = {e: c for e, c in s.terms.items() if e[0] <= 1}
        low = MultiSeries(s.ring, SIGMA_VARIABLES, min(2, s.trunc), low_terms, s.cap_map)
        leading = low.first_difference(low.variable("z"))
        even = [e for e, _ in s.sorted_terms() if e[0] >= 2 and e[0] % 2 == 0]
        odd = even[0] if even else None

        eisenstein: Optional[Tuple[int, ...]] = None
        if leading is not None:
            eisenstein = leading
        else:
            log_ratio = -sig.unit().log()
            expected = self.eisenstein_log(sig.trunc_z - 1, sig.trunc_q)
            eisenstein = log_ratio.first_difference(expected)
        product = s.first_difference(self.sigma_product(sig.trunc_z, sig.trunc_q).series)

        checks = {
            "leading": {"passed": leading is None, "first_failure": leading},
            "odd": {"passed": odd is None, "first_failure": odd},
            "eisenstein": {"passed": eisenstein is None, "first_failure": eisenstein},
            "product": {"passed": product is None, "first_failure": product},
        }
        return {"trunc_z": sig.trunc_z, "trunc_q": sig.trunc_q, "checks": checks,
                "passed": all(c["passed"] for c in checks.values())}

    def additive_law(self, trunc: int) -> FormalGroupLaw:
        return FormalGroupBuilder(RATIONALS, max(trunc, 2)).standard("additive")

    def cube_section(self, trunc_z: int, trunc_q: int) -> LaurentUnit:
        """
        s(x,y,z) = sigma(x+y+z) sigma(x) sigma(y) sigma(z) / (sigma(x+y) sigma(x+z) sigma(y+z)).

        Writing sigma = z * u(z), the section is the product of the seven divisor
        equations with valuations +1 (x+y+z, x, y, z) and -1 (x+y, x+z, y+z), times
        the unit built from u by the same formula.
        """
        g = self.sigma(trunc_z, trunc_q).unit()
        unit = CocycleChecker(self.jobs).cube_coboundary(g, self.additive_law(g.trunc)).f
        return LaurentUnit(self.SECTION_DIVISORS, self.SECTION_VALUATIONS, unit)

    def two_variable_section(self, trunc_z: int, trunc_q: int) -> LaurentUnit:
        """f(x,y) = sigma(x+y) / (sigma(x) sigma(y)) with divisor [x+y] - [x] - [y]."""
        g = self.sigma(trunc_z, trunc_q).unit()
        unit = CocycleChecker(self.jobs).coboundary(g, self.additive_law(g.trunc)).f
        return LaurentUnit(self.TWO_VARIABLE_DIVISORS, self.TWO_VARIABLE_VALUATIONS, unit)

    def _divisor_side(self, s: LaurentUnit,
                      factors: Sequence[Tuple[int, Sequence[Tuple[str, ...]]]]) -> Counter:
        slot = {name: i for i, name in enumerate(VARIABLES[3])}
        side: Counter = Counter()
        for sign, args in factors:
            for divisor, val in s.divisor_map().items():
                members = tuple(sorted(v for m in divisor.members for v in args[slot[m]]))
                side[members] += sign * val
        return Counter({k: v for k, v in side.items() if v})

    def _check_divisors(self, s: LaurentUnit) -> None:
        names = set(VARIABLES[3])
        for divisor in s.divisors:
            if not set(divisor.members) <= names:
                raise DivisorMismatchError(f"divisor {{{divisor.label} = e}} is not a cube divisor")

        base = self._divisor_side(s, [(1, [("x",), ("y",), ("z",)])])
        for perm in CocycleChecker.PERMUTATIONS:
            args = [(VARIABLES[3][p],) for p in perm]
            if self._divisor_side(s, [(1, args)]) != base:
                raise DivisorMismatchError(f"divisor vector is not symmetric under {list(perm)}")

        for pair in CocycleChecker.PAIRS:
            left = self._divisor_side(s, [(1, _slots(pair, ("y",), ("z",))),
                                          (1, _slots(pair, ("x",), ("y", "z")))])
            right = self._divisor_side(s, [(1, _slots(pair, ("x",), ("y",))),
                                           (1, _slots(pair, ("x", "y"), ("z",)))])
            if left != right:
                raise DivisorMismatchError(
                    f"the two sides of the cocycle identity in slots {pair} "
                    f"carry different divisors")

    def verify_cube_conditions(self, s: LaurentUnit, fgl: Optional[FormalGroupLaw] = None) -> Dict[str, Any]:
        """
        Rigidity, symmetry and the 2-cocycle identity in each pair of slots.

        Divisor vectors of both sides are compared first; the unit parts must then agree
        exactly up to truncation.

        Args:
            s: section over (x, y, z), optionally with the parameter q
            fgl: group law of the coordinate; additive by default

        Returns:
            Dictionary with per-condition verdicts and the earliest offending monomials

        Raises:
            DivisorMismatchError: if the divisor bookkeeping of the two sides disagrees
        """
        self._check_divisors(s)
        fgl = fgl or self.additive_law(s.unit.trunc)
        report = CocycleChecker(self.jobs).check3(CocycleCandidate(3, s.unit, fgl))
        return {"divisors": "match", "conditions": report["conditions"], "passed": report["passed"]}

    def divisor_of_section(self, s: LaurentUnit, fgl: Optional[FormalGroupLaw] = None) -> DivisorVector:
        """
        Valuations of s along the seven divisor loci; the constant slot is always 0.

        Raises:
            UndecidableValuationError: if a series vanishes to its truncation
        """
        fgl = fgl or self.additive_law(s.unit.trunc)
        available = set(s.unit.graded_names)
        values = []
        for label in DivisorVector.LABELS[:-1]:
            target = Divisor(tuple(label.split("+")))
            if not set(target.members) <= available:
                values.append(0)
                continue
            total = valuation_along(s.unit, target, fgl)
            for divisor, val in zip(s.divisors, s.vals):
                equation = local_equation(divisor, fgl, s.unit)
                total += val * valuation_along(equation, target, fgl)
            values.append(total)
        values.append(0)
        vector = DivisorVector(tuple(values))
        logger.info("divisor of section: %s", vector)
        return vector


def theta_u(trunc_q: int) -> ThetaFunction:
    return CubeAnalyzer().theta(trunc_q)


def quasi_periodicity_check(t: ThetaFunction) -> bool:
    return CubeAnalyzer().quasi_periodicity(t)["passed"]


def theta_product_identity(t: ThetaFunction) -> bool:
    return CubeAnalyzer().product_identity(t)["passed"]


def cube_invariance_check(trunc_q: int) -> bool:
    return CubeAnalyzer().cube_invariance(trunc_q)["passed"]


def sigma_series(trunc_z: int, trunc_q: int = DEFAULT_Q_ORDER) -> SigmaSeries:
    return CubeAnalyzer().sigma(trunc_z, trunc_q)


def sigma_product(trunc_z: int, trunc_q: int = DEFAULT_Q_ORDER) -> SigmaSeries:
    return CubeAnalyzer().sigma_product(trunc_z, trunc_q)


def verify_sigma(sig: SigmaSeries) -> Dict[str, Any]:
    return CubeAnalyzer().verify_sigma(sig)


def cube_section(trunc_z: int, trunc_q: int) -> LaurentUnit:
    return CubeAnalyzer().cube_section(trunc_z, trunc_q)


def two_variable_section(trunc_z: int, trunc_q: int) -> LaurentUnit:
    return CubeAnalyzer().two_variable_section(trunc_z, trunc_q)


def verify_cube_conditions(s: LaurentUnit, jobs: int = 1) -> Dict[str, Any]:
    return CubeAnalyzer(jobs).verify_cube_conditions(s)


def divisor_of_section(s: LaurentUnit, fgl: Optional[FormalGroupLaw] = None) -> DivisorVector:
    return CubeAnalyzer().divisor_of_section(s, fgl)
