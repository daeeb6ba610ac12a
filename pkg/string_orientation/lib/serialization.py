"""
Text formats for series, manifolds and curve data.
Every printer is deterministic and every parser reports the offending line number.
"""

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from string_orientation.errors import MalformedInputError, StringOrientationError
from string_orientation.lib.rings import CoeffRing
from string_orientation.lib.series import MultiSeries, QSeries

Partition = Tuple[int, ...]


def _content_lines(text: str) -> List[Tuple[int, str]]:
    """Non-blank lines with comments stripped, paired with 1-based line numbers."""
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((number, line))
    return lines


def _fields(line: str, number: int) -> Dict[str, str]:
    fields = {}
    for chunk in line.split(";"):
        if not chunk.strip():
            continue
        if "=" not in chunk:
            raise MalformedInputError(f"expected key=value, got {chunk.strip()!r}", line=number)
        key, value = chunk.split("=", 1)
        fields[key.strip()] = value.strip()
    return fields


def _int_field(fields: Dict[str, str], key: str, number: int) -> int:
    if key not in fields:
        raise MalformedInputError(f"missing field {key!r}", line=number)
    try:
        value = int(fields[key])
    except ValueError:
        raise MalformedInputError(f"{key} must be an integer, got {fields[key]!r}", line=number) from None
    if value < 0:
        raise MalformedInputError(f"{key} must be non-negative", line=number)
    return value


def _ring_field(fields: Dict[str, str], number: int) -> CoeffRing:
    if "ring" not in fields:
        raise MalformedInputError("missing field 'ring'", line=number)
    try:
        return CoeffRing.parse(fields["ring"])
    except StringOrientationError as e:
        raise MalformedInputError(str(e), line=number) from e


def format_qseries(s: QSeries) -> str:
    return s.to_text()


def parse_qseries(text: str) -> QSeries:
    """
    Parse 'ring=<Q|Z|Z/N>; trunc=<N>; coeffs=<c0,c1,...>'.

    Args:
        text: file contents; blank lines and '#' comments are ignored

    Returns:
        The parsed QSeries
    """
    lines = _content_lines(text)
    if len(lines) != 1:
        raise MalformedInputError(
            f"expected exactly one series line, found {len(lines)}",
            line=lines[1][0] if len(lines) > 1 else None)
    number, line = lines[0]
    fields = _fields(line, number)
    extra = set(fields) - {"ring", "trunc", "coeffs"}
    if extra:
        raise MalformedInputError(f"unknown fields {sorted(extra)}", line=number)
    ring = _ring_field(fields, number)
    trunc = _int_field(fields, "trunc", number)
    raw = fields.get("coeffs", "")
    tokens = raw.split(",") if raw else []
    if len(tokens) != trunc:
        raise MalformedInputError(f"trunc={trunc} but {len(tokens)} coefficients given", line=number)
    try:
        return QSeries(ring, [ring.parse_element(t) for t in tokens])
    except StringOrientationError as e:
        raise MalformedInputError(str(e), line=number) from e


def format_multiseries(s: MultiSeries) -> str:
    header = f"ring={s.ring.label}; vars={','.join(s.variables)}; trunc={s.trunc}"
    if s.caps:
        header += "; caps=" + ",".join(f"{name}:{cap}" for name, cap in s.caps)
    lines = [header]
    for exp, c in s.sorted_terms():
        lines.append(f"{','.join(str(e) for e in exp)} : {s.ring.format(c)}")
    return "\n".join(lines) + "\n"


def parse_multiseries(text: str) -> MultiSeries:
    """
    Parse a header line 'ring=...; vars=x,y; trunc=D[; caps=q:N]' followed by
    one 'exponent-vector : coefficient' line per stored term.
    """
    lines = _content_lines(text)
    if not lines:
        raise MalformedInputError("empty series file")
    number, header = lines[0]
    fields = _fields(header, number)
    extra = set(fields) - {"ring", "vars", "trunc", "caps"}
    if extra:
        raise MalformedInputError(f"unknown fields {sorted(extra)}", line=number)
    ring = _ring_field(fields, number)
    trunc = _int_field(fields, "trunc", number)
    variables = [v.strip() for v in fields.get("vars", "").split(",") if v.strip()]
    if not variables:
        raise MalformedInputError("missing field 'vars'", line=number)

    caps: Dict[str, int] = {}
    for item in filter(None, (c.strip() for c in fields.get("caps", "").split(","))):
        name, _, cap = item.partition(":")
        try:
            caps[name.strip()] = int(cap)
        except ValueError:
            raise MalformedInputError(f"bad cap {item!r}", line=number) from None

    terms = {}
    for number, line in lines[1:]:
        if ":" not in line:
            raise MalformedInputError(f"expected 'exponents : coefficient', got {line!r}", line=number)
        exp_text, coeff_text = line.split(":", 1)
        try:
            exp = tuple(int(e) for e in exp_text.strip().strip("()").split(","))
        except ValueError:
            raise MalformedInputError(f"bad exponent vector {exp_text.strip()!r}", line=number) from None
        if len(exp) != len(variables) or any(e < 0 for e in exp):
            raise MalformedInputError(
                f"exponent vector {exp} does not fit variables {variables}", line=number)
        if exp in terms:
            raise MalformedInputError(f"exponent vector {exp} given twice", line=number)
        try:
            terms[exp] = ring.parse_element(coeff_text)
        except StringOrientationError as e:
            raise MalformedInputError(str(e), line=number) from e
    try:
        return MultiSeries(ring, variables, trunc, terms, caps)
    except StringOrientationError as e:
        raise MalformedInputError(str(e), line=lines[0][0]) from e


def parse_manifold(text: str) -> Tuple[int, Dict[Partition, int]]:
    """
    Parse Pontryagin-number data.

    Lines are 'dim = 4k' and 'p[l1,l2,...] = integer'. Partitions are normalized to
    non-increasing order and must partition dim/4.

    Returns:
        (dim, numbers) with numbers keyed by partition tuples
    """
    dim: Optional[int] = None
    numbers: Dict[Partition, int] = {}
    pending: List[Tuple[int, Partition]] = []
    for number, line in _content_lines(text):
        if "=" not in line:
            raise MalformedInputError(f"expected 'key = value', got {line!r}", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            parsed = int(value)
        except ValueError:
            raise MalformedInputError(f"value must be an integer, got {value!r}", line=number) from None
        if key == "dim":
            if parsed <= 0 or parsed % 4:
                raise MalformedInputError(f"dim must be a positive multiple of 4, got {parsed}", line=number)
            dim = parsed
            continue
        if not (key.startswith("p[") and key.endswith("]")):
            raise MalformedInputError(f"unknown key {key!r}", line=number)
        try:
            parts = tuple(sorted((int(p) for p in key[2:-1].split(",")), reverse=True))
        except ValueError:
            raise MalformedInputError(f"bad partition {key!r}", line=number) from None
        if not parts or any(p <= 0 for p in parts):
            raise MalformedInputError(f"bad partition {key!r}", line=number)
        if parts in numbers:
            raise MalformedInputError(f"partition {list(parts)} given twice", line=number)
        numbers[parts] = parsed
        pending.append((number, parts))

    if dim is None:
        raise MalformedInputError("missing 'dim = ...' line")
    for number, parts in pending:
        if sum(parts) != dim // 4:
            raise MalformedInputError(
                f"partition {list(parts)} does not partition {dim // 4}", line=number)
    return dim, numbers


def format_manifold(dim: int, numbers: Dict[Partition, int]) -> str:
    lines = [f"dim = {dim}"]
    for parts in sorted(numbers, reverse=True):
        lines.append(f"p[{','.join(str(p) for p in parts)}] = {numbers[parts]}")
    return "\n".join(lines) + "\n"


def parse_curve(text: str) -> Tuple[CoeffRing, Tuple[Fraction, ...]]:
    """
    Parse 'a1,a2,a3,a4,a6' with integer or 'a/b' entries.

    Returns:
        (ring, coefficients): Z when every entry is an integer, Q otherwise
    """
    tokens = [t.strip() for t in text.split(",")]
    if len(tokens) != 5:
        raise MalformedInputError(f"a curve needs 5 coefficients a1,a2,a3,a4,a6; got {len(tokens)}")
    values = []
    for token in tokens:
        try:
            if "/" in token:
                num, den = token.split("/", 1)
                values.append(Fraction(int(num), int(den)))
            else:
                values.append(Fraction(int(token)))
        except (ValueError, ZeroDivisionError):
            raise MalformedInputError(f"bad curve coefficient {token!r}") from None
    ring = CoeffRing.integer() if all(v.denominator == 1 for v in values) else CoeffRing.rational()
    return ring, tuple(values)
