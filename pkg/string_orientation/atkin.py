"""
The Atkin operator U_p, its companion V_p and the level-1 Hecke operator T_p.
Kernel search for 1 - U_p runs exact linear algebra over Z/p^M on the span of
classical forms of one weight and their V_p twists.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Any, Dict, List, Optional, Tuple

from sympy import isprime

from string_orientation.errors import InsufficientPrecisionError, NotPrimeError
from string_orientation.lib.linalg import in_span_mod, kernel_mod
from string_orientation.lib.rings import CoeffRing
from string_orientation.lib.series import DEFAULT_Q_ORDER, QSeries
from string_orientation.lib.workers import run_tasks
from string_orientation.modular_forms import ModularForm, ModularFormsRing

logger = logging.getLogger(__name__)


def _require_prime(p: int) -> None:
    if not isprime(p):
        raise NotPrimeError(f"{p} is not prime")


@dataclass(frozen=True)
class PadicPrecision:
    """Work modulo p^M."""

    p: int
    M: int

    def __post_init__(self):
        _require_prime(self.p)
        if self.M < 1:
            raise ValueError(f"p-adic precision must be at least 1, got {self.M}")

    @property
    def modulus(self) -> int:
        return self.p ** self.M

    @property
    def ring(self) -> CoeffRing:
        return CoeffRing.residue(self.modulus)


class AtkinAnalyzer:
    """U_p, V_p, T_p and 1 - U_p at one prime, plus the finite kernel search."""

    # Weights below this have no Eisenstein witness
    MIN_WITNESS_WEIGHT = 4

    def __init__(self, p: int, jobs: int = 1):
        """
        Initialize analyzer.

        Args:
            p: prime
            jobs: worker threads for matrix assembly
        """
        _require_prime(p)
        self.p = p
        self.jobs = jobs

    def u_p(self, f: QSeries) -> QSeries:
        """(U_p f)[n] = f[p n], known to q^(trunc // p)."""
        return QSeries._make(f.ring, [f.coeffs[self.p * n] for n in range(f.trunc // self.p)])

    def v_p(self, f: QSeries) -> QSeries:
        """f(q^p), known to q^(p trunc)."""
        coeffs = [f.ring.zero] * (self.p * f.trunc)
        for n, c in enumerate(f.coeffs):
            coeffs[self.p * n] = c
        return QSeries._make(f.ring, coeffs)

    def t_p(self, f: ModularForm) -> ModularForm:
        """
        T_p f = U_p f + p^(k-1) V_p f on a level-1 form of weight k.

        Raises:
            InsufficientPrecisionError: if f is known to fewer than p coefficients
        """
        if f.trunc < self.p:
            raise InsufficientPrecisionError(
                f"T_{self.p} needs the expansion to q^{self.p}, have q^{f.trunc}", required=self.p)
        image = self.u_p(f.qexp) + self.v_p(f.qexp).scale(Fraction(self.p) ** (f.weight - 1))
        return ModularForm(f.weight, image)

    def one_minus_up(self, f: QSeries) -> QSeries:
        return f - self.u_p(f)

    def eisenstein_witness(self, k: int, trunc_q: int) -> QSeries:
        """E_k - p^(k-1) V_p E_k, the p-adic Eisenstein series fixed by U_p."""
        e_k = ModularFormsRing(trunc_q).eisenstein(k).qexp
        return e_k - self.v_p(e_k).truncate(trunc_q).scale(self.p ** (k - 1))

    def search_space(self, weight: int, trunc_q: int) -> Tuple[List[str], List[QSeries]]:
        """
        The basis of weight-k forms and their V_p twists, with exact duplicates removed.

        Returns:
            (labels, expansions) over Q, each known to q^trunc_q
        """
        labels: List[str] = []
        space: List[QSeries] = []
        for form in ModularFormsRing(trunc_q).basis(weight):
            twisted = self.v_p(form.qexp).truncate(trunc_q)
            for label, qexp in ((form.label, form.qexp), (f"V{self.p}({form.label})", twisted)):
                if qexp not in space:
                    labels.append(label)
                    space.append(qexp)
        return labels, space

    def _column(self, series: QSeries, rows: int) -> List[int]:
        image = self.one_minus_up(series)
        return [int(image[n]) for n in range(rows)]

    def _witness_vector(self, weight: int, space: List[QSeries], prec: PadicPrecision,
                        trunc_q: int) -> Optional[List[int]]:
        if weight < self.MIN_WITNESS_WEIGHT:
            return None
        forms = ModularFormsRing(trunc_q)
        coordinates = forms.decompose(forms.eisenstein(weight).qexp, weight)["coordinates"]
        vector = [Fraction(0)] * len(space)
        for form, c in zip(forms.basis(weight), coordinates):
            twisted = self.v_p(form.qexp).truncate(trunc_q)
            vector[space.index(form.qexp)] += c
            vector[space.index(twisted)] -= c * self.p ** (weight - 1)
        N = prec.modulus
        if any(c.denominator % self.p == 0 for c in vector):
            logger.warning("Eisenstein witness of weight %d is not %d-integral", weight, self.p)
            return None
        return [c.numerator * pow(c.denominator, -1, N) % N for c in vector]

    def kernel_search(self, weight: int, prec: PadicPrecision,
                      trunc_q: int = DEFAULT_Q_ORDER) -> Dict[str, Any]:
        """
        Kernel of 1 - U_p on the search space of one weight, modulo p^M.

        Args:
            weight: even weight >= 0
            prec: prime and p-adic precision; prec.p must equal the analyzer's prime
            trunc_q: q-precision of the search space

        Returns:
            Dictionary with the search-space labels, kernel generators and their
            q-expansions mod p^M, the kernel order, the re-verification verdict and
            whether the Eisenstein witness lies in the kernel (None below weight 4)

        Raises:
            InsufficientPrecisionError: if trunc_q // p is smaller than the search space
        """
        if prec.p != self.p:
            raise ValueError(f"precision is for p = {prec.p}, analyzer is for p = {self.p}")
        labels, space = self.search_space(weight, trunc_q)
        size = len(space)
        rows = trunc_q // self.p
        if rows < size:
            raise InsufficientPrecisionError(
                f"{size} unknowns need {size} coefficients of (1 - U_{self.p}), have {rows}",
                required=self.p * size)

        N = prec.modulus
        ring = prec.ring
        reduced = [s.map_ring(ring) for s in space]
        tasks = {str(j): partial(self._column, series, rows) for j, series in enumerate(reduced)}
        columns = list(run_tasks(tasks, self.jobs).values())
        matrix = [[columns[j][n] for j in range(size)] for n in range(rows)]
        logger.debug("1 - U_%d matrix: %d x %d mod %d", self.p, rows, size, N)

        generators, order = kernel_mod(matrix, size, N)
        kernel = []
        verified = True
        for g in generators:
            qexp = QSeries.zero(ring, trunc_q)
            for c, series in zip(g, reduced):
                if c:
                    qexp = qexp + series.scale(c)
            if not self.one_minus_up(qexp).is_zero():
                verified = False
            kernel.append({"coordinates": g, "qexp": qexp})

        witness = self._witness_vector(weight, space, prec, trunc_q)
        witness_ok: Optional[bool]
        if weight == 0:
            # the search space is the constant 1 alone
            witness_ok = in_span_mod([1], generators, N)
        elif witness is not None:
            witness_ok = in_span_mod(witness, generators, N)
        else:
            witness_ok = None
        logger.info("kernel of 1 - U_%d in weight %d mod %d: order %d, %d generators",
                    self.p, weight, N, order, len(generators))
        return {
            "weight": weight,
            "p": self.p,
            "M": prec.M,
            "modulus": N,
            "trunc_q": trunc_q,
            "verified_to": rows,
            "space": labels,
            "kernel_order": order,
            "kernel": kernel,
            "verified": verified,
            "witness_in_kernel": witness_ok,
        }

    def hensel_stability(self, weight: int, prec: PadicPrecision,
                         trunc_q: int = DEFAULT_Q_ORDER) -> Dict[str, Any]:
        """Kernel generators found mod p^(M+1) must reduce into the kernel mod p^M."""
        high = self.kernel_search(weight, PadicPrecision(self.p, prec.M + 1), trunc_q)
        low = self.kernel_search(weight, prec, trunc_q)
        low_generators = [v["coordinates"] for v in low["kernel"]]
        N = prec.modulus
        failures = [v["coordinates"] for v in high["kernel"]
                    if not in_span_mod([c % N for c in v["coordinates"]], low_generators, N)]
        return {
            "weight": weight,
            "p": self.p,
            "M": prec.M,
            "checked": len(high["kernel"]),
            "kernel_order_low": low["kernel_order"],
            "kernel_order_high": high["kernel_order"],
            "failures": failures,
            "stable": not failures,
        }


def u_p(f: QSeries, p: int) -> QSeries:
    return AtkinAnalyzer(p).u_p(f)


def v_p(f: QSeries, p: int) -> QSeries:
    return AtkinAnalyzer(p).v_p(f)


def t_p(f: ModularForm, p: int) -> ModularForm:
    return AtkinAnalyzer(p).t_p(f)


def one_minus_up(f: QSeries, p: int) -> QSeries:
    return AtkinAnalyzer(p).one_minus_up(f)


def kernel_search(weight: int, prec: PadicPrecision, trunc_q: int = DEFAULT_Q_ORDER,
                  jobs: int = 1) -> Dict[str, Any]:
    return AtkinAnalyzer(prec.p, jobs).kernel_search(weight, prec, trunc_q)


def hensel_stability(weight: int, prec: PadicPrecision,
                     trunc_q: int = DEFAULT_Q_ORDER) -> Dict[str, Any]:
    return AtkinAnalyzer(prec.p).hensel_stability(weight, prec, trunc_q)
