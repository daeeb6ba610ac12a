"""
Truncated power series over exact coefficient rings.
QSeries is a dense one-variable q-expansion; MultiSeries is a sparse multivariate series
truncated in total degree, with optional parameter variables (such as q) that carry
their own exponent caps. LaurentUnit adds divisor bookkeeping on top of a unit series.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from string_orientation.errors import (
    ConstantTermError,
    InsufficientPrecisionError,
    NonUnitError,
    RingMismatchError,
    UndecidableValuationError,
    VariableMismatchError,
)
from string_orientation.lib.rings import CoeffRing

logger = logging.getLogger(__name__)

DEFAULT_Q_ORDER = 16
DEFAULT_TOTAL_DEGREE = 8

Exponent = Tuple[int, ...]


def graded_lex_key(exponent: Exponent, degree: int) -> Tuple[int, Tuple[int, ...]]:
    """Sort key: lower total degree first, then larger leading exponents first."""
    return degree, tuple(-e for e in exponent)


class QSeries:
    """Dense truncated power series in q; coeffs[n] is the coefficient of q^n for n < trunc."""

    __slots__ = ("coeffs", "ring")

    def __init__(self, ring: CoeffRing, coeffs: Iterable[Any]):
        self.ring = ring
        self.coeffs = tuple(ring.coerce(c) for c in coeffs)

    @classmethod
    def _make(cls, ring: CoeffRing, coeffs: Iterable[Any]) -> "QSeries":
        # Trusted constructor: coefficients already live in the ring
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.coeffs = tuple(ring.reduce(c) for c in coeffs) if ring.is_residue else tuple(coeffs)
        return obj

    @classmethod
    def zero(cls, ring: CoeffRing, trunc: int) -> "QSeries":
        return cls._make(ring, [ring.zero] * trunc)

    @classmethod
    def one(cls, ring: CoeffRing, trunc: int) -> "QSeries":
        return cls.monomial(ring, 0, trunc)

    @classmethod
    def monomial(cls, ring: CoeffRing, n: int, trunc: int, coefficient: Any = 1) -> "QSeries":
        coeffs = [ring.zero] * trunc
        if n < trunc:
            coeffs[n] = ring.coerce(coefficient)
        return cls._make(ring, coeffs)

    @property
    def trunc(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> Any:
        if not 0 <= n < self.trunc:
            raise IndexError(f"q^{n} is outside the truncation window [0, {self.trunc})")
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ring, self.coeffs))

    def _common(self, other: "QSeries") -> int:
        if self.ring != other.ring:
            raise RingMismatchError(f"cannot combine series over {self.ring} and {other.ring}")
        return min(self.trunc, other.trunc)

    def __add__(self, other: "QSeries") -> "QSeries":
        n = self._common(other)
        return QSeries._make(self.ring, [self.coeffs[i] + other.coeffs[i] for i in range(n)])

    def __sub__(self, other: "QSeries") -> "QSeries":
        n = self._common(other)
        return QSeries._make(self.ring, [self.coeffs[i] - other.coeffs[i] for i in range(n)])

    def __neg__(self) -> "QSeries":
        return QSeries._make(self.ring, [-c for c in self.coeffs])

    def __mul__(self, other: Any) -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(other)
        n = self._common(other)
        a, b = self.coeffs, other.coeffs
        out = [self.ring.zero] * n
        for i in range(n):
            ai = a[i]
            if not ai:
                continue
            for j in range(n - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return QSeries._make(self.ring, out)

    def __rmul__(self, other: Any) -> "QSeries":
        return self.scale(other)

    def __pow__(self, exponent: int) -> "QSeries":
        if exponent < 0:
            return self.invert() ** (-exponent)
        result = QSeries.one(self.ring, self.trunc)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def scale(self, c: Any) -> "QSeries":
        c = self.ring.coerce(c)
        return QSeries._make(self.ring, [c * x for x in self.coeffs])

    def invert(self) -> "QSeries":
        """
        Multiplicative inverse up to truncation.

        Raises:
            NonUnitError: if the constant term is not a unit of the ring
        """
        if self.trunc == 0:
            return self
        inv0 = self.ring.inverse(self.coeffs[0])
        a = self.coeffs
        b = [inv0]
        for k in range(1, self.trunc):
            acc = self.ring.zero
            for i in range(1, k + 1):
                if a[i]:
                    acc += a[i] * b[k - i]
            b.append(self.ring.reduce(-inv0 * acc))
        return QSeries._make(self.ring, b)

    def truncate(self, trunc: int) -> "QSeries":
        if trunc > self.trunc:
            raise InsufficientPrecisionError(
                f"cannot extend a series known to q^{self.trunc} up to q^{trunc}", required=trunc)
        return QSeries._make(self.ring, self.coeffs[:trunc])

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k; the result is known to q^(trunc + k)."""
        return QSeries._make(self.ring, [self.ring.zero] * k + list(self.coeffs))

    def valuation(self) -> Optional[int]:
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return None

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def map_ring(self, target: CoeffRing) -> "QSeries":
        return QSeries._make(target, [target.map_from(self.ring, c) for c in self.coeffs])

    def first_difference(self, other: "QSeries") -> Optional[int]:
        n = self._common(other)
        for i in range(n):
            if self.coeffs[i] != other.coeffs[i]:
                return i
        return None

    def to_text(self) -> str:
        coeffs = ",".join(self.ring.format(c) for c in self.coeffs)
        return f"ring={self.ring.label}; trunc={self.trunc}; coeffs={coeffs}"

    def __repr__(self) -> str:
        return f"QSeries({self.to_text()})"


class MultiSeries:
    """
    Sparse multivariate series truncated at total degree < trunc.

    Graded variables count toward the total degree. Parameter variables (the keys of
    ``caps``) do not; each is truncated separately at exponent < cap.
    """

    __slots__ = ("_by_degree", "_graded", "_params", "caps", "ring", "terms", "trunc", "variables")

    def __init__(
        self,
        ring: CoeffRing,
        variables: Sequence[str],
        trunc: int,
        terms: Optional[Mapping[Exponent, Any]] = None,
        caps: Optional[Mapping[str, int]] = None,
    ):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise VariableMismatchError(f"repeated variable names in {variables}")
        caps = dict(caps or {})
        unknown = set(caps) - set(variables)
        if unknown:
            raise VariableMismatchError(f"caps name unknown variables {sorted(unknown)}")
        self._setup(ring, variables, trunc, caps)

        clean: Dict[Exponent, Any] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(variables):
                raise VariableMismatchError(
                    f"exponent {exp} does not match variables {variables}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            value = ring.coerce(c)
            if value and self._fits(exp, trunc, self._params):
                clean[exp] = clean.get(exp, ring.zero) + value
        self.terms = {e: ring.reduce(c) for e, c in clean.items() if ring.reduce(c)}

    def _setup(self, ring: CoeffRing, variables: Tuple[str, ...], trunc: int,
               caps: Mapping[str, int]) -> None:
        self.ring = ring
        self.variables = variables
        self.trunc = int(trunc)
        self.caps = tuple((name, int(caps[name])) for name in variables if name in caps)
        self._params = tuple((variables.index(name), cap) for name, cap in self.caps)
        param_idx = {i for i, _ in self._params}
        self._graded = tuple(i for i in range(len(variables)) if i not in param_idx)
        self._by_degree = None

    def _spawn(self, terms: Mapping[Exponent, Any], trunc: Optional[int] = None,
               caps: Optional[Mapping[str, int]] = None, check: bool = False) -> "MultiSeries":
        # Trusted constructor sharing this series' ring and variables
        obj = MultiSeries.__new__(MultiSeries)
        obj._setup(self.ring, self.variables,
                   self.trunc if trunc is None else trunc,
                   self.cap_map if caps is None else caps)
        reduce = self.ring.reduce
        if check:
            obj.terms = {e: reduce(c) for e, c in terms.items()
                         if c and reduce(c) and obj._fits(e, obj.trunc, obj._params)}
        else:
            obj.terms = {e: reduce(c) for e, c in terms.items() if c and reduce(c)}
        return obj

    # Shape helpers

    @property
    def cap_map(self) -> Dict[str, int]:
        return dict(self.caps)

    @property
    def param_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.caps)

    @property
    def graded_names(self) -> Tuple[str, ...]:
        return tuple(self.variables[i] for i in self._graded)

    def degree(self, exp: Exponent) -> int:
        return sum(exp[i] for i in self._graded)

    def _fits(self, exp: Exponent, trunc: int, params: Tuple[Tuple[int, int], ...]) -> bool:
        if sum(exp[i] for i in self._graded) >= trunc:
            return False
        return all(exp[i] < cap for i, cap in params)

    def _shape_with(self, other: "MultiSeries") -> Tuple[int, Dict[str, int]]:
        if not isinstance(other, MultiSeries):
            raise TypeError(f"expected MultiSeries, got {type(other).__name__}")
        if self.ring != other.ring:
            raise RingMismatchError(f"cannot combine series over {self.ring} and {other.ring}")
        if self.variables != other.variables or set(self.param_names) != set(other.param_names):
            raise VariableMismatchError(
                f"variable sets differ: {self.variables} vs {other.variables}")
        theirs = other.cap_map
        caps = {name: min(cap, theirs[name]) for name, cap in self.caps}
        return min(self.trunc, other.trunc), caps

    def restrict(self, trunc: Optional[int] = None,
                 caps: Optional[Mapping[str, int]] = None) -> "MultiSeries":
        """Truncate further; asking for more precision than stored raises."""
        trunc = self.trunc if trunc is None else trunc
        new_caps = self.cap_map
        new_caps.update(caps or {})
        if trunc > self.trunc or any(new_caps[n] > c for n, c in self.caps):
            raise InsufficientPrecisionError(
                f"cannot raise truncation beyond degree {self.trunc}", required=trunc)
        return self._spawn(self.terms, trunc, new_caps, check=True)

    # Constructors in the same shape

    @classmethod
    def zero(cls, ring: CoeffRing, variables: Sequence[str], trunc: int,
             caps: Optional[Mapping[str, int]] = None) -> "MultiSeries":
        return cls(ring, variables, trunc, {}, caps)

    @classmethod
    def gens(cls, ring: CoeffRing, variables: Sequence[str], trunc: int,
             caps: Optional[Mapping[str, int]] = None) -> Tuple["MultiSeries", ...]:
        base = cls.zero(ring, variables, trunc, caps)
        return tuple(base.variable(name) for name in base.variables)

    def constant(self, c: Any) -> "MultiSeries":
        zero_exp = (0,) * len(self.variables)
        return self._spawn({zero_exp: self.ring.coerce(c)}, check=True)

    def variable(self, name: str) -> "MultiSeries":
        if name not in self.variables:
            raise VariableMismatchError(f"unknown variable {name!r} (have {self.variables})")
        exp = tuple(int(v == name) for v in self.variables)
        return self._spawn({exp: self.ring.one}, check=True)

    # Arithmetic

    def __add__(self, other: Any) -> "MultiSeries":
        if not isinstance(other, MultiSeries):
            other = self.constant(other)
        trunc, caps = self._shape_with(other)
        params = tuple((self.variables.index(n), c) for n, c in caps.items())
        out = {e: c for e, c in self.terms.items() if self._fits(e, trunc, params)}
        for e, c in other.terms.items():
            if self._fits(e, trunc, params):
                out[e] = out.get(e, self.ring.zero) + c
        return self._spawn(out, trunc, caps)

    def __radd__(self, other: Any) -> "MultiSeries":
        return self + other

    def __neg__(self) -> "MultiSeries":
        return self._spawn({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Any) -> "MultiSeries":
        if not isinstance(other, MultiSeries):
            other = self.constant(other)
        return self + (-other)

    def __rsub__(self, other: Any) -> "MultiSeries":
        return (-self) + other

    def scale(self, c: Any) -> "MultiSeries":
        c = self.ring.coerce(c)
        return self._spawn({e: c * v for e, v in self.terms.items()})

    def _degree_buckets(self) -> List[List[Tuple[Exponent, Any]]]:
        if self._by_degree is None:
            buckets: List[List[Tuple[Exponent, Any]]] = [[] for _ in range(max(self.trunc, 0))]
            for e, c in self.terms.items():
                buckets[self.degree(e)].append((e, c))
            self._by_degree = buckets
        return self._by_degree

    def __mul__(self, other: Any) -> "MultiSeries":
        if not isinstance(other, MultiSeries):
            return self.scale(other)
        trunc, caps = self._shape_with(other)
        params = tuple((self.variables.index(n), c) for n, c in caps.items())
        a_buckets = self._degree_buckets()
        b_buckets = other._degree_buckets()
        zero = self.ring.zero
        out: Dict[Exponent, Any] = {}
        # Pairs are pruned by degree: deg(a) + deg(b) < trunc
        for da in range(min(trunc, len(a_buckets))):
            a_terms = a_buckets[da]
            if not a_terms:
                continue
            for db in range(min(trunc - da, len(b_buckets))):
                for eb, cb in b_buckets[db]:
                    for ea, ca in a_terms:
                        e = tuple(x + y for x, y in zip(ea, eb))
                        if params and not all(e[i] < cap for i, cap in params):
                            continue
                        out[e] = out.get(e, zero) + ca * cb
        return self._spawn(out, trunc, caps)

    def __rmul__(self, other: Any) -> "MultiSeries":
        return self.scale(other)

    def __pow__(self, exponent: int) -> "MultiSeries":
        if exponent < 0:
            return self.invert() ** (-exponent)
        result = self.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def _nilpotency_bound(self) -> int:
        # Powers of a series without graded-degree-0 constant vanish past this many factors
        return max(self.trunc - 1, 0) + sum(cap - 1 for _, cap in self.caps)

    def constant_term(self) -> Any:
        return self.terms.get((0,) * len(self.variables), self.ring.zero)

    def coefficient(self, exp: Sequence[int]) -> Any:
        return self.terms.get(tuple(exp), self.ring.zero)

    def invert(self) -> "MultiSeries":
        """
        Multiplicative inverse up to truncation.

        Raises:
            NonUnitError: if the constant term is not a unit of the ring
        """
        c0 = self.constant_term()
        if not self.ring.is_unit(c0):
            raise NonUnitError(f"constant term {self.ring.format(c0)} is not a unit of {self.ring}")
        inv0 = self.ring.inverse(c0)
        h = self.scale(inv0) - 1
        step = -h
        result = self.constant(1)
        power = result
        for _ in range(self._nilpotency_bound()):
            power = power * step
            if power.is_zero():
                break
            result = result + power
        return result.scale(inv0)

    def exp(self) -> "MultiSeries":
        """Formal exponential; needs a rational ring and zero constant term."""
        self._require_rational("exp")
        if self.constant_term():
            raise ConstantTermError("exp needs a series with zero constant term")
        result = self.constant(1)
        power = result
        for k in range(1, self._nilpotency_bound() + 1):
            power = (power * self).scale(self.ring.divide_by_int(self.ring.one, k))
            if power.is_zero():
                break
            result = result + power
        return result

    def log(self) -> "MultiSeries":
        """Formal logarithm; needs a rational ring and constant term 1."""
        self._require_rational("log")
        if self.constant_term() != 1:
            raise ConstantTermError("log needs a series with constant term 1")
        h = self - 1
        result = h
        power = h
        for k in range(2, self._nilpotency_bound() + 1):
            power = power * h
            if power.is_zero():
                break
            sign = 1 if k % 2 else -1
            result = result + power.scale(self.ring.divide_by_int(self.ring.coerce(sign), k))
        return result

    def _require_rational(self, what: str) -> None:
        if not self.ring.is_rational:
            raise RingMismatchError(f"{what} is only defined over Q, not {self.ring}")

    def derivative(self, name: str) -> "MultiSeries":
        i = self.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        # The derivative of a series known to degree < D is known to degree < D - 1
        trunc = self.trunc - 1 if i in self._graded else self.trunc
        caps = self.cap_map
        if name in caps:
            caps[name] -= 1
        return self._spawn(out, trunc, caps, check=True)

    def integrate(self, name: str) -> "MultiSeries":
        """Term-wise antiderivative in one graded variable, with zero constant of integration."""
        i = self.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            d = list(e)
            d[i] += 1
            out[tuple(d)] = self.ring.divide_by_int(c, d[i])
        return self._spawn(out, self.trunc + 1, check=True)

    # Substitution

    def _simple_target(self) -> Optional[int]:
        """Index of the graded variable this series equals, if it is a bare variable."""
        if len(self.terms) != 1:
            return None
        (e, c), = self.terms.items()
        if c != 1 or sum(e) != 1:
            return None
        i = e.index(1)
        return i if i in self._graded else None

    def substitute(self, assignment: Mapping[str, "MultiSeries"],
                   target: Optional["MultiSeries"] = None) -> "MultiSeries":
        """
        Formal composition f(v1 -> g1, ...).

        Args:
            assignment: map from variables of this series to series in a common target
                ring; each assigned series must have no graded-degree-0 terms
            target: any series of the target shape, needed when assignment is empty

        Returns:
            Composed series, truncated at the smallest total-degree bound involved.
            Unassigned variables pass through by name into the target ring.
        """
        unknown = set(assignment) - set(self.variables)
        if unknown:
            raise VariableMismatchError(f"cannot substitute unknown variables {sorted(unknown)}")
        values = list(assignment.values())
        proto = values[0] if values else target
        if proto is None:
            return self

        for s in values:
            if s.ring != self.ring:
                raise RingMismatchError(f"cannot substitute a {s.ring} series into a {self.ring} series")
            if s.variables != proto.variables or set(s.param_names) != set(proto.param_names):
                raise VariableMismatchError("substituted series use different variable sets")
            for e in s.terms:
                if s.degree(e) == 0:
                    raise ConstantTermError(
                        "substituted series must have zero constant term in the graded variables")
        if proto.ring != self.ring:
            raise RingMismatchError(f"target ring {proto.ring} differs from {self.ring}")

        trunc = min([self.trunc, proto.trunc] + [s.trunc for s in values])
        caps = proto.cap_map
        for s in values:
            for name, cap in s.caps:
                caps[name] = min(caps[name], cap)
        t_index = {name: j for j, name in enumerate(proto.variables)}
        t_params = set(proto.param_names)

        simple: Dict[int, int] = {}
        complex_idx: List[int] = []
        own_params = {i for i, _ in self._params}
        for i, name in enumerate(self.variables):
            if name in assignment:
                if i in own_params:
                    raise VariableMismatchError(f"parameter {name!r} passes through unchanged")
                j = assignment[name]._simple_target()
                if j is None:
                    complex_idx.append(i)
                else:
                    simple[i] = j
                continue
            if name not in t_index:
                raise VariableMismatchError(f"variable {name!r} is missing from the target ring")
            if (i in own_params) != (name in t_params):
                raise VariableMismatchError(f"variable {name!r} changes role between rings")
            simple[i] = t_index[name]
        for i, cap in self._params:
            name = self.variables[i]
            caps[name] = min(caps[name], cap)

        shape = proto._spawn({}, trunc, caps)
        zero = self.ring.zero
        n_t = len(proto.variables)
        groups: Dict[Exponent, Dict[Exponent, Any]] = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in complex_idx)
            t = [0] * n_t
            for i, j in simple.items():
                if e[i]:
                    t[j] += e[i]
            bucket = groups.setdefault(key, {})
            tt = tuple(t)
            bucket[tt] = bucket.get(tt, zero) + c

        powers: Dict[int, List[MultiSeries]] = {}
        for i in complex_idx:
            powers[i] = [shape.constant(1), assignment[self.variables[i]].restrict(trunc, caps)]

        def power_of(i: int, k: int) -> "MultiSeries":
            cached = powers[i]
            while len(cached) <= k:
                cached.append(cached[-1] * cached[1])
            return cached[k]

        total = shape
        for key in sorted(groups):
            part = shape._spawn(groups[key], check=True)
            if part.is_zero():
                continue
            for i, k in zip(complex_idx, key):
                if k:
                    part = part * power_of(i, k)
            total = total + part
        return total

    def permute_variables(self, mapping: Mapping[str, str]) -> "MultiSeries":
        """Rename variables within the same ring, e.g. {'x': 'y', 'y': 'x'}."""
        return self.substitute({old: self.variable(new) for old, new in mapping.items()},
                               target=self)

    def embed(self, variables: Sequence[str], trunc: Optional[int] = None,
              caps: Optional[Mapping[str, int]] = None) -> "MultiSeries":
        """The same series viewed in a larger ring whose variables include ours."""
        target_caps = self.cap_map if caps is None else dict(caps)
        target = MultiSeries.zero(self.ring, variables,
                                  self.trunc if trunc is None else trunc, target_caps)
        return self.substitute({}, target=target)

    def set_zero(self, names: Iterable[str]) -> "MultiSeries":
        idx = [self.variables.index(n) for n in names]
        return self._spawn({e: c for e, c in self.terms.items() if not any(e[i] for i in idx)})

    def map_ring(self, target: CoeffRing) -> "MultiSeries":
        obj = MultiSeries.zero(target, self.variables, self.trunc, self.cap_map)
        return obj._spawn({e: target.map_from(self.ring, c) for e, c in self.terms.items()})

    # Inspection

    def is_zero(self) -> bool:
        return not self.terms

    def min_exponent(self, name: str) -> int:
        if not self.terms:
            raise UndecidableValuationError("series vanishes to its truncation")
        i = self.variables.index(name)
        return min(e[i] for e in self.terms)

    def sorted_terms(self) -> List[Tuple[Exponent, Any]]:
        return sorted(self.terms.items(), key=lambda t: graded_lex_key(t[0], self.degree(t[0])))

    def first_difference(self, other: "MultiSeries") -> Optional[Exponent]:
        """Earliest exponent (graded-lex) where the two series differ at common precision."""
        diff = self - other
        if diff.is_zero():
            return None
        return diff.sorted_terms()[0][0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        if (self.ring != other.ring or self.variables != other.variables
                or set(self.param_names) != set(other.param_names)):
            return False
        return self.first_difference(other) is None

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        shown = " + ".join(f"{self.ring.format(c)}*{e}" for e, c in self.sorted_terms()[:6])
        more = " + ..." if len(self.terms) > 6 else ""
        return f"MultiSeries({self.variables}, trunc={self.trunc}: {shown or '0'}{more})"


def series_arith(a: Any, b: Any, op: str) -> Any:
    """Apply add, sub or mul to two QSeries or two MultiSeries."""
    if type(a) is not type(b):
        raise TypeError(f"cannot combine {type(a).__name__} with {type(b).__name__}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"op must be one of add, sub, mul; got {op!r}")


def series_invert(a: Any) -> Any:
    return a.invert()


def substitute(f: MultiSeries, assignment: Mapping[str, MultiSeries]) -> MultiSeries:
    return f.substitute(assignment)


def exp_log(f: MultiSeries, direction: str) -> MultiSeries:
    if direction == "exp":
        return f.exp()
    if direction == "log":
        return f.log()
    raise ValueError(f"direction must be 'exp' or 'log', got {direction!r}")


@dataclass(frozen=True)
class Divisor:
    """The locus {m1 +_G m2 +_G ... = e} named by its (sorted) member variables."""

    members: Tuple[str, ...]

    def __post_init__(self):
        members = tuple(sorted(self.members))
        if not members:
            raise ValueError("a divisor needs at least one member variable")
        if len(set(members)) != len(members):
            raise ValueError(f"repeated members in divisor {members}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, *names: str) -> "Divisor":
        return cls(tuple(names))

    @property
    def label(self) -> str:
        return "+".join(self.members)

    @property
    def is_coordinate(self) -> bool:
        return len(self.members) == 1


def local_equation(divisor: Divisor, fgl: Any, like: MultiSeries) -> MultiSeries:
    """The series m1 +_G m2 +_G ... in the ring of ``like``."""
    terms = [like.variable(name) for name in divisor.members]
    total = terms[0]
    for term in terms[1:]:
        if fgl is None:
            total = total + term
        else:
            total = fgl.add(total, term)
    return total


def valuation_along(s: MultiSeries, divisor: Any, fgl: Any = None) -> int:
    """
    Order of vanishing of s along a divisor.

    Args:
        s: the series (no divisor bookkeeping)
        divisor: a variable name, or a Divisor; loci with several members need fgl
        fgl: FormalGroupLaw over the ring of s

    Returns:
        Non-negative valuation of the stored truncation

    Raises:
        UndecidableValuationError: if s vanishes to its truncation
    """
    if isinstance(divisor, str):
        divisor = Divisor.of(divisor)
    if s.is_zero():
        raise UndecidableValuationError(
            f"series vanishes to degree {s.trunc}; valuation along {{{divisor.label} = e}} unknown")
    if divisor.is_coordinate:
        return s.min_exponent(divisor.members[0])
    if fgl is None:
        raise ValueError(f"valuation along {{{divisor.label} = e}} needs a formal group law")
    if fgl.ring != s.ring:
        raise RingMismatchError(f"formal group law over {fgl.ring} but series over {s.ring}")

    # New coordinate w = F(members) in the slot of the last member
    *rest, last = divisor.members
    rest_sum = local_equation(Divisor(tuple(rest)), fgl, s)
    moved = fgl.add(s.variable(last), fgl.negate(rest_sum))
    shifted = s.substitute({last: moved})
    if shifted.is_zero():
        raise UndecidableValuationError(
            f"series vanishes to its truncation along {{{divisor.label} = e}}")
    val = shifted.min_exponent(last)
    logger.debug("valuation along {%s = e}: %d", divisor.label, val)
    return val


@dataclass(frozen=True)
class LaurentUnit:
    """(prod divisor_i ^ vals_i) * unit, where unit has an invertible constant term."""

    divisors: Tuple[Divisor, ...]
    vals: Tuple[int, ...]
    unit: MultiSeries

    def __post_init__(self):
        object.__setattr__(self, "divisors", tuple(self.divisors))
        object.__setattr__(self, "vals", tuple(int(v) for v in self.vals))
        if len(self.divisors) != len(self.vals):
            raise ValueError("one valuation per divisor is required")
        if len(set(self.divisors)) != len(self.divisors):
            raise ValueError("divisors must be distinct")
        c0 = self.unit.constant_term()
        if not self.unit.ring.is_unit(c0):
            raise NonUnitError(f"unit part has non-invertible constant term {c0}")

    def valuation(self, divisor: Divisor) -> int:
        for d, v in zip(self.divisors, self.vals):
            if d == divisor:
                return v
        return 0

    def divisor_map(self) -> Dict[Divisor, int]:
        return {d: v for d, v in zip(self.divisors, self.vals) if v}

    def __mul__(self, other: "LaurentUnit") -> "LaurentUnit":
        divisors = list(self.divisors)
        vals = list(self.vals)
        for d, v in zip(other.divisors, other.vals):
            if d in divisors:
                vals[divisors.index(d)] += v
            else:
                divisors.append(d)
                vals.append(v)
        return LaurentUnit(tuple(divisors), tuple(vals), self.unit * other.unit)

    def inverse(self) -> "LaurentUnit":
        return LaurentUnit(self.divisors, tuple(-v for v in self.vals), self.unit.invert())
