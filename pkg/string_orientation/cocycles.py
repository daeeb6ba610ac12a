"""
Rigid symmetric 2-cocycles on a formal group.
Checks the two- and three-variable cocycle conditions, builds coboundaries, verifies the
virtual-bundle expansion and compares cocycle counts with maps out of powers of the
augmentation ideal of a finite abelian group.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import expand, symbols

from string_orientation.errors import (
    BoundsExceededError,
    ConstantTermError,
    NonUnitError,
    RingMismatchError,
    VariableMismatchError,
)
from string_orientation.formal_groups import FormalGroupLaw
from string_orientation.lib.linalg import HermiteLattice, kernel_mod, mat_vec_mod
from string_orientation.lib.series import MultiSeries
from string_orientation.lib.workers import run_tasks

logger = logging.getLogger(__name__)

VARIABLES = {2: ("x", "y"), 3: ("x", "y", "z")}


@dataclass(frozen=True)
class CocycleCandidate:
    """A function f on G^arity with unit constant term, over the ring of fgl."""

    arity: int
    f: MultiSeries
    fgl: FormalGroupLaw

    def __post_init__(self):
        if self.arity not in VARIABLES:
            raise ValueError(f"Arity must be 2 or 3, got {self.arity}")
        if self.f.graded_names != VARIABLES[self.arity]:
            raise VariableMismatchError(
                f"arity-{self.arity} candidates use variables {VARIABLES[self.arity]}, "
                f"got {self.f.graded_names}")
        if self.f.ring != self.fgl.ring:
            raise RingMismatchError(f"candidate over {self.f.ring} but law over {self.fgl.ring}")
        if not self.f.ring.is_unit(self.f.constant_term()):
            raise NonUnitError("a candidate must take values in the multiplicative group")


@dataclass(frozen=True)
class FiniteGroupSpec:
    """Gamma = Z/n1 x Z/n2 x ... with coefficients A = Z/modulus."""

    orders: Tuple[int, ...]
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        if any(n < 1 for n in self.orders):
            raise ValueError(f"Cyclic orders must be positive, got {self.orders}")
        if self.modulus < 2:
            raise ValueError(f"Coefficient modulus must be at least 2, got {self.modulus}")

    @property
    def order(self) -> int:
        size = 1
        for n in self.orders:
            size *= n
        return size

    def elements(self) -> List[Tuple[int, ...]]:
        return list(itertools.product(*(range(n) for n in self.orders)))

    def add(self, a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))


def _space(f: MultiSeries, fgl: FormalGroupLaw, names: Tuple[str, ...]) -> MultiSeries:
    """Zero series on the given graded variables plus the parameters of f."""
    return MultiSeries.zero(f.ring, names + f.param_names, min(f.trunc, fgl.trunc), f.cap_map)


def _condition(passed_failure: Optional[Tuple[int, ...]], **extra: Any) -> Dict[str, Any]:
    entry = {"passed": passed_failure is None, "first_failure": passed_failure}
    entry.update(extra)
    return entry


class CocycleChecker:
    """Decides the rigidity, symmetry and cocycle conditions on candidate functions."""

    # The permutations of (x, y, z) other than the identity
    PERMUTATIONS = [p for p in itertools.permutations(range(3)) if p != (0, 1, 2)]

    # (first, second) argument slots of each pairwise cocycle; the third slot is held at v
    PAIRS = [(0, 1), (0, 2), (1, 2)]

    def __init__(self, jobs: int = 1):
        """
        Initialize checker.

        Args:
            jobs: worker threads for independent permutation and pair checks
        """
        self.jobs = jobs

    def check2(self, candidate: CocycleCandidate) -> Dict[str, Any]:
        """
        Check f(0,0) = 1, f(x,y) = f(y,x) and f(y,z) f(x, y+z) = f(x,y) f(x+y, z).

        Args:
            candidate: arity-2 candidate

        Returns:
            Dictionary with one entry per condition and an overall verdict
        """
        if candidate.arity != 2:
            raise ValueError("check2 needs an arity-2 candidate")
        f, fgl = candidate.f, candidate.fgl
        conditions = run_tasks({
            "rigid": lambda: _condition(self._rigid_failure(f)),
            "symmetric": lambda: _condition(f.first_difference(
                f.permute_variables({"x": "y", "y": "x"}))),
            "cocycle": lambda: _condition(self._cocycle_failure(f, fgl)),
        }, self.jobs)
        return self._report(2, conditions)

    def check3(self, candidate: CocycleCandidate) -> Dict[str, Any]:
        """
        Check rigidity, symmetry under all permutations, and the 2-cocycle identity in
        each pair of variables with the third held as a formal parameter v.

        Args:
            candidate: arity-3 candidate

        Returns:
            Dictionary with one entry per condition and an overall verdict
        """
        if candidate.arity != 3:
            raise ValueError("check3 needs an arity-3 candidate")
        f, fgl = candidate.f, candidate.fgl

        tasks = {"rigid": lambda: self._rigid_failure(f)}
        for perm in self.PERMUTATIONS:
            tasks[f"perm{perm}"] = (lambda p=perm: self._permutation_failure(f, p))
        for pair in self.PAIRS:
            tasks[f"pair{pair}"] = (lambda pr=pair: self._pair_cocycle_failure(f, fgl, pr))
        results = run_tasks(tasks, self.jobs)

        symmetric = _condition(None)
        for perm in self.PERMUTATIONS:
            failure = results[f"perm{perm}"]
            if failure is not None:
                symmetric = _condition(failure, permutation=list(perm))
                break
        cocycle = _condition(None)
        for pair in self.PAIRS:
            failure = results[f"pair{pair}"]
            if failure is not None:
                cocycle = _condition(failure, pair=list(pair))
                break
        conditions = {"rigid": _condition(results["rigid"]),
                      "symmetric": symmetric, "cocycle": cocycle}
        return self._report(3, conditions)

    def _report(self, arity: int, conditions: Dict[str, Dict[str, Any]]) -> Dict[str, Any]:
        passed = all(c["passed"] for c in conditions.values())
        logger.info("arity-%d cocycle check: %s", arity, "pass" if passed else "FAIL")
        return {"arity": arity, "conditions": conditions, "passed": passed}

    def _rigid_failure(self, f: MultiSeries) -> Optional[Tuple[int, ...]]:
        at_origin = f.set_zero(f.graded_names)
        return at_origin.first_difference(at_origin.constant(1))

    def _permutation_failure(self, f: MultiSeries, perm: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
        names = VARIABLES[3]
        return f.first_difference(f.permute_variables({names[i]: names[perm[i]] for i in range(3)}))

    def _cocycle_failure(self, f: MultiSeries, fgl: FormalGroupLaw) -> Optional[Tuple[int, ...]]:
        space = _space(f, fgl, ("x", "y", "z"))
        x, y, z = (space.variable(n) for n in ("x", "y", "z"))

        def at(a: MultiSeries, b: MultiSeries) -> MultiSeries:
            return f.substitute({"x": a, "y": b}, target=space)

        # Cross-multiplied, never divided
        left = at(y, z) * at(x, fgl.add(y, z))
        right = at(x, y) * at(fgl.add(x, y), z)
        return left.first_difference(right)

    def _pair_cocycle_failure(self, f: MultiSeries, fgl: FormalGroupLaw,
                              pair: Tuple[int, int]) -> Optional[Tuple[int, ...]]:
        space = _space(f, fgl, ("x", "y", "z", "v"))
        x, y, z, v = (space.variable(n) for n in ("x", "y", "z", "v"))
        first, second = pair
        third = 3 - first - second

        def at(a: MultiSeries, b: MultiSeries) -> MultiSeries:
            slots: List[MultiSeries] = [v, v, v]
            slots[first], slots[second] = a, b
            return f.substitute(dict(zip(VARIABLES[3], slots)), target=space)

        left = at(y, z) * at(x, fgl.add(y, z))
        right = at(x, y) * at(fgl.add(x, y), z)
        logger.debug("pair %s cocycle with slot %d held at v", pair, third)
        return left.first_difference(right)

    def coboundary(self, g: MultiSeries, fgl: FormalGroupLaw) -> CocycleCandidate:
        """
        f(x, y) = g(x +_G y) / (g(x) g(y)) for a one-variable g with g(0) = 1.

        Args:
            g: series in (z,)
            fgl: the group law

        Returns:
            Arity-2 candidate, always a rigid symmetric 2-cocycle
        """
        self._require_normalized(g)
        plane = _space(g, fgl, ("x", "y"))
        x, y = plane.variable("x"), plane.variable("y")
        gx = g.substitute({"z": x})
        gy = g.substitute({"z": y})
        f = g.substitute({"z": fgl.add(x, y)}) * (gx * gy).invert()
        return CocycleCandidate(2, f, fgl)

    def cube_coboundary(self, g: MultiSeries, fgl: FormalGroupLaw) -> CocycleCandidate:
        """
        s(x, y, z) = g(x+y+z) g(x) g(y) g(z) / (g(x+y) g(x+z) g(y+z)), sums taken in G.

        Args:
            g: series in (z,) with g(0) = 1
            fgl: the group law

        Returns:
            Arity-3 candidate passing every condition of check3
        """
        self._require_normalized(g)
        space = _space(g, fgl, ("x", "y", "z"))
        x, y, z = (space.variable(n) for n in ("x", "y", "z"))

        def at(arg: MultiSeries) -> MultiSeries:
            return g.substitute({"z": arg})

        xy = fgl.add(x, y)
        numerator = at(fgl.add(xy, z)) * at(x) * at(y) * at(z)
        denominator = at(xy) * at(fgl.add(x, z)) * at(fgl.add(y, z))
        return CocycleCandidate(3, numerator * denominator.invert(), fgl)

    def _require_normalized(self, g: MultiSeries) -> None:
        if g.graded_names != ("z",):
            raise VariableMismatchError(f"g must be a series in (z,), got {g.graded_names}")
        if self._rigid_failure(g) is not None:
            raise ConstantTermError("g must have constant term 1")

    def log_side_agreement(self, candidate: CocycleCandidate) -> Dict[str, Any]:
        """
        Compare the multiplicative verdict with the additive one on log f.

        Over Q, f is a rigid symmetric 2-cocycle exactly when l = log f satisfies
        l(0,0) = 0, l(x,y) = l(y,x) and l(y,z) + l(x,y+z) = l(x,y) + l(x+y,z).
        """
        if candidate.arity != 2:
            raise ValueError("log-side comparison needs an arity-2 candidate")
        if not candidate.f.ring.is_rational:
            raise RingMismatchError("log-side comparison needs a rational ring")
        f, fgl = candidate.f, candidate.fgl
        multiplicative = self.check2(candidate)["passed"]
        if f.constant_term() != 1:
            return {"multiplicative": multiplicative, "additive": False,
                    "agree": multiplicative is False}

        ell = f.log()
        space = _space(f, fgl, ("x", "y", "z"))
        x, y, z = (space.variable(n) for n in ("x", "y", "z"))

        def at(a: MultiSeries, b: MultiSeries) -> MultiSeries:
            return ell.substitute({"x": a, "y": b}, target=space)

        symmetric = ell.first_difference(ell.permute_variables({"x": "y", "y": "x"})) is None
        defect = at(y, z) + at(x, fgl.add(y, z)) - at(x, y) - at(fgl.add(x, y), z)
        additive = symmetric and defect.is_zero()
        return {"multiplicative": multiplicative, "additive": additive,
                "agree": multiplicative == additive}

    def virtual_bundle_sides(self) -> Tuple[Any, Any]:
        """Both sides of the virtual-bundle expansion as expanded Laurent polynomials."""
        L1, L2, L3 = symbols("L1 L2 L3")
        left = expand((1 - L2) * (1 - L3) + (1 - L1) * (1 - L2 * L3))
        right = expand((1 - L1) * (1 - L2) + (1 - L1 * L2) * (1 - L3))
        return left, right

    def virtual_bundle_identity(self) -> bool:
        left, right = self.virtual_bundle_sides()
        return expand(left - right) == 0


class AugmentationIdealAnalyzer:
    """Counts module maps out of I^k and cocycle solutions for a finite abelian group."""

    MAX_GROUP_ORDER = 64
    MAX_UNKNOWNS = 4096
    MAX_SYSTEM_ENTRIES = 1_000_000

    # Exhaustive enumeration is used while N^(unknowns) stays below this
    ENUMERATION_LIMIT = 2 ** 12

    def __init__(self, spec: FiniteGroupSpec, power: int):
        """
        Initialize analyzer.

        Args:
            spec: the group and the coefficient modulus
            power: 2 or 3
        """
        if power not in (2, 3):
            raise ValueError(f"Power must be 2 or 3, got {power}")
        if spec.order > self.MAX_GROUP_ORDER:
            raise BoundsExceededError(
                f"|Gamma| = {spec.order} exceeds the bound {self.MAX_GROUP_ORDER}")
        if spec.order ** power > self.MAX_UNKNOWNS:
            raise BoundsExceededError(
                f"|Gamma|^{power} = {spec.order ** power} unknowns exceeds {self.MAX_UNKNOWNS}")
        self.spec = spec
        self.power = power
        self.elements = spec.elements()
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.identity = self.elements[0]
        self.tuples = list(itertools.product(range(len(self.elements)), repeat=power))
        self.tuple_index = {t: i for i, t in enumerate(self.tuples)}

    def analyze(self) -> Dict[str, Any]:
        """
        Compare Hom(I^k, Z/N) with rigid symmetric cocycle data on Gamma^k.

        Returns:
            Dictionary with both counts, whether they agree, the bijection checks and the
            index of the image of Hom(I^k, Z/N) among the solutions (cokernel_order)
        """
        N = self.spec.modulus
        conditions = self._conditions()
        n = len(self.tuples)
        if len(conditions) * n > self.MAX_SYSTEM_ENTRIES:
            raise BoundsExceededError(
                f"{len(conditions)} conditions x {n} unknowns exceeds {self.MAX_SYSTEM_ENTRIES} entries")

        _, cocycle_count = kernel_mod(conditions, n, N)
        method = "linear-algebra"
        enumerated = None
        if N ** n <= self.ENUMERATION_LIMIT:
            method = "enumeration"
            enumerated = self._enumerate(conditions, n, N)

        lattice, generators = self._ideal_power()
        rank = lattice.rank
        maps_count = N ** rank

        # Row t of K holds the coordinates of prod(x_i - e) in the lattice basis
        coords = [lattice.coordinates(generators[t]) for t in self.tuples]
        images = [[coords[t][i] % N for t in range(n)] for i in range(rank)]
        image_in_solutions = all(not any(mat_vec_mod(conditions, img, N)) for img in images)
        transpose = [[images[i][t] for i in range(rank)] for t in range(n)]
        _, kernel_size = kernel_mod(transpose, rank, N)
        injective = kernel_size == 1

        counts_agree = maps_count == cocycle_count and (enumerated is None or enumerated == cocycle_count)
        # The images form a subgroup of the solutions; its index counts unmatched cocycles
        cokernel_order = cocycle_count // maps_count if injective and image_in_solutions else None
        report = {
            "group": list(self.spec.orders),
            "modulus": N,
            "power": self.power,
            "rank": rank,
            "maps_count": maps_count,
            "cocycle_count": cocycle_count,
            "enumerated_count": enumerated,
            "method": method,
            "counts_agree": counts_agree,
            "image_in_solutions": image_in_solutions,
            "injective": injective,
            "cokernel_order": cokernel_order,
            "bijection": counts_agree and image_in_solutions and injective,
        }
        logger.info("augmentation ideal %s mod %d power %d: %d maps, %d cocycles",
                    list(self.spec.orders), N, self.power, maps_count, cocycle_count)
        return report

    def _conditions(self) -> List[List[int]]:
        n = len(self.tuples)
        rows = set()

        def row(entries: Sequence[Tuple[Tuple[int, ...], int]]) -> None:
            vec = [0] * n
            for t, c in entries:
                vec[self.tuple_index[t]] += c
            if any(vec):
                rows.add(tuple(vec))

        e = self.index[self.identity]
        row([((e,) * self.power, 1)])

        # Symmetry: adjacent transpositions generate every permutation
        for t in self.tuples:
            for i in range(self.power - 1):
                s = list(t)
                s[i], s[i + 1] = s[i + 1], s[i]
                row([(t, 1), (tuple(s), -1)])

        # f(b,c) + f(a,b+c) = f(a,b) + f(a+b,c) in each pair, the remaining slot held at w
        add = self._add_index
        group = range(len(self.elements))
        pairs = [(0, 1)] if self.power == 2 else CocycleChecker.PAIRS
        held_values = [e] if self.power == 2 else list(group)
        for (first, second), w in itertools.product(pairs, held_values):
            place = self._placer(first, second, w)
            for a, b, c in itertools.product(group, repeat=3):
                row([(place(b, c), 1), (place(a, add(b, c)), 1),
                     (place(a, b), -1), (place(add(a, b), c), -1)])
        logger.debug("%d distinct linear conditions on %d unknowns", len(rows), n)
        return [list(r) for r in sorted(rows)]

    def _placer(self, first: int, second: int, held: int):
        def place(u: int, v: int) -> Tuple[int, ...]:
            slots = [held] * self.power
            slots[first], slots[second] = u, v
            return tuple(slots)
        return place

    def _add_index(self, i: int, j: int) -> int:
        return self.index[self.spec.add(self.elements[i], self.elements[j])]

    def _enumerate(self, conditions: List[List[int]], n: int, N: int) -> int:
        sparse = [[(j, c) for j, c in enumerate(r) if c] for r in conditions]
        count = 0
        for values in itertools.product(range(N), repeat=n):
            if all(sum(c * values[j] for j, c in r) % N == 0 for r in sparse):
                count += 1
        return count

    def _ideal_power(self) -> Tuple[HermiteLattice, Dict[Tuple[int, ...], List[int]]]:
        """Lattice I^k in Z[Gamma] with the generator prod(x_i - e) for every tuple."""
        size = len(self.elements)
        e = self.index[self.identity]
        add = self._add_index

        def times(u: List[int], v: List[int]) -> List[int]:
            out = [0] * size
            for i, a in enumerate(u):
                if a:
                    for j, b in enumerate(v):
                        if b:
                            out[add(i, j)] += a * b
            return out

        def basic(i: int) -> List[int]:
            vec = [0] * size
            vec[i] += 1
            vec[e] -= 1
            return vec

        lattice = HermiteLattice(size)
        generators: Dict[Tuple[int, ...], List[int]] = {}
        cache: Dict[Tuple[int, ...], List[int]] = {}
        for t in self.tuples:
            key = tuple(sorted(t))
            if key not in cache:
                vec = basic(key[0])
                for i in key[1:]:
                    vec = times(vec, basic(i))
                cache[key] = vec
                lattice.insert(vec)
            generators[t] = cache[key]
        return lattice, generators


def check_cocycle2(candidate: CocycleCandidate, jobs: int = 1) -> Dict[str, Any]:
    return CocycleChecker(jobs).check2(candidate)


def check_cocycle3(candidate: CocycleCandidate, jobs: int = 1) -> Dict[str, Any]:
    return CocycleChecker(jobs).check3(candidate)


def coboundary(g: MultiSeries, fgl: FormalGroupLaw) -> CocycleCandidate:
    return CocycleChecker().coboundary(g, fgl)


def cube_coboundary(g: MultiSeries, fgl: FormalGroupLaw) -> CocycleCandidate:
    return CocycleChecker().cube_coboundary(g, fgl)


def virtual_bundle_identity() -> bool:
    return CocycleChecker().virtual_bundle_identity()


def aug_ideal_correspondence(spec: FiniteGroupSpec, power: int) -> Dict[str, Any]:
    return AugmentationIdealAnalyzer(spec, power).analyze()
