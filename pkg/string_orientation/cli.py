"""
Command-line entry point for the string-orientation algebra.
Output on stdout is deterministic for fixed flags; errors are reported on stderr as
'error: <kind>: <message>' with exit status 1 (domain), 2 (usage), 3 (malformed input)
or 4 (insufficient precision).
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from string_orientation.atkin import AtkinAnalyzer, PadicPrecision
from string_orientation.cocycles import (
    AugmentationIdealAnalyzer,
    CocycleCandidate,
    CocycleChecker,
    FiniteGroupSpec,
)
from string_orientation.errors import (
    InsufficientPrecisionError,
    MalformedInputError,
    StringOrientationError,
)
from string_orientation.formal_groups import (
    FormalGroupBuilder,
    FormalGroupLaw,
    WeierstrassData,
)
from string_orientation.lib.rings import INTEGERS, RATIONALS, CoeffRing
from string_orientation.lib.serialization import (
    format_multiseries,
    format_qseries,
    parse_curve,
    parse_multiseries,
    parse_qseries,
)
from string_orientation.lib.series import DEFAULT_Q_ORDER, DEFAULT_TOTAL_DEGREE
from string_orientation.modular_forms import ModularForm, ModularFormsRing
from string_orientation.theta_cube import CubeAnalyzer
from string_orientation.witten_genus import PontryaginData, WittenGenusAnalyzer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_MALFORMED = 3
EXIT_PRECISION = 4

PRECISION_DEFAULTS = {
    "qorder": DEFAULT_Q_ORDER,
    "zorder": 8,
    "order": DEFAULT_TOTAL_DEGREE,
    "padic": 3,
}

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

Result = Tuple[int, List[str]]


class UsageError(Exception):
    """Bad flags or an unknown subcommand."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message)


def _verdict(passed: bool) -> str:
    return "OK" if passed else "FAIL"


def _status(passed: bool) -> int:
    return EXIT_OK if passed else EXIT_FAILED


def _exponent(exp: Sequence[int]) -> str:
    return "(" + ",".join(str(e) for e in exp) + ")"


def _check_line(name: str, entry: Dict[str, Any]) -> str:
    line = f"{name} : {_verdict(entry['passed'])}"
    failure = entry.get("first_failure")
    if not entry["passed"] and failure is not None:
        line += f" at {_exponent(failure) if isinstance(failure, tuple) else f'q^{failure}'}"
    return line


def _read(path: str) -> str:
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data[:e.start].count(b"\n") + 1
        raise MalformedInputError(f"not UTF-8 text ({e.reason})", line=line) from None


def _law(args: argparse.Namespace, ring: Optional[CoeffRing] = None,
         trunc: Optional[int] = None) -> FormalGroupLaw:
    """The law named by --curve or --kind, over --ring unless a ring is forced."""
    trunc = trunc or args.order
    requested = CoeffRing.parse(args.ring) if getattr(args, "ring", None) else None
    if getattr(args, "curve", None):
        curve_ring, coeffs = parse_curve(args.curve)
        builder = FormalGroupBuilder(ring or requested or curve_ring, trunc)
        return builder.from_weierstrass(WeierstrassData(*coeffs))
    return FormalGroupBuilder(ring or requested or INTEGERS, trunc).standard(args.kind)


# fgl

def _fgl_build(args: argparse.Namespace) -> Result:
    law = _law(args)
    series = law.neg if args.inverse else law.F
    return EXIT_OK, [format_multiseries(series).rstrip("\n")]


def _fgl_verify(args: argparse.Namespace) -> Result:
    law = _law(args)
    report = FormalGroupBuilder(law.ring, law.trunc).verify(law, args.jobs)
    lines = [f"law = {report['law']}; ring = {report['ring']}; trunc = {report['trunc']}"]
    lines += [_check_line(name, entry) for name, entry in report["axioms"].items()]
    lines.append(f"fgl verify : {_verdict(report['passed'])}")
    return _status(report["passed"]), lines


def _fgl_log(args: argparse.Namespace) -> Result:
    law = _law(args, ring=RATIONALS)
    return EXIT_OK, [format_multiseries(FormalGroupBuilder(RATIONALS, law.trunc).logarithm(law)).rstrip("\n")]


# cocycle

def _candidate(args: argparse.Namespace, arity: int) -> CocycleCandidate:
    f = parse_multiseries(_read(args.input))
    return CocycleCandidate(arity, f, _law(args, ring=f.ring, trunc=args.order or f.trunc))


def _conditions(report: Dict[str, Any], title: str) -> Result:
    lines = [_check_line(name, entry) for name, entry in report["conditions"].items()]
    lines.append(f"{title} : {_verdict(report['passed'])}")
    return _status(report["passed"]), lines


def _cocycle_check2(args: argparse.Namespace) -> Result:
    return _conditions(CocycleChecker(args.jobs).check2(_candidate(args, 2)), "check2")


def _cocycle_check3(args: argparse.Namespace) -> Result:
    return _conditions(CocycleChecker(args.jobs).check3(_candidate(args, 3)), "check3")


def _cocycle_coboundary(args: argparse.Namespace) -> Result:
    g = parse_multiseries(_read(args.input))
    law = _law(args, ring=g.ring, trunc=args.order or g.trunc)
    checker = CocycleChecker(args.jobs)
    build = checker.coboundary if args.arity == 2 else checker.cube_coboundary
    return EXIT_OK, [format_multiseries(build(g, law).f).rstrip("\n")]


def _cocycle_virtual(args: argparse.Namespace) -> Result:
    checker = CocycleChecker(args.jobs)
    left, right = checker.virtual_bundle_sides()
    passed = checker.virtual_bundle_identity()
    return _status(passed), [f"left = {left}", f"right = {right}",
                             f"virtual bundle identity : {_verdict(passed)}"]


def _augideal(args: argparse.Namespace) -> Result:
    try:
        orders = tuple(int(n) for n in args.group.split(","))
    except ValueError:
        raise MalformedInputError(f"bad group orders {args.group!r}") from None
    report = AugmentationIdealAnalyzer(FiniteGroupSpec(orders, args.mod), args.power).analyze()
    enumerated = report["enumerated_count"]
    lines = [
        f"group = {' x '.join(f'Z/{n}' for n in report['group'])}",
        f"modulus = {report['modulus']}",
        f"power = {report['power']}",
        f"rank of I^{report['power']} = {report['rank']}",
        f"module maps = {report['maps_count']}",
        f"cocycles = {report['cocycle_count']} ({report['method']})",
        f"enumerated = {'-' if enumerated is None else enumerated}",
        f"image in solutions : {_verdict(report['image_in_solutions'])}",
        f"injective : {_verdict(report['injective'])}",
        f"cokernel order = {'-' if report['cokernel_order'] is None else report['cokernel_order']}",
        f"bijection : {_verdict(report['bijection'])}",
    ]
    return _status(report["bijection"]), lines


# theta

def _theta_quasi(args: argparse.Namespace) -> Result:
    analyzer = CubeAnalyzer(args.jobs)
    theta = analyzer.theta(args.qorder)
    quasi = analyzer.quasi_periodicity(theta)
    product = analyzer.product_identity(theta)
    lines = theta.to_text().rstrip("\n").split("\n") if args.show else []
    lines.append(f"support : {_verdict(theta.support_ok())}")
    lines.append(_check_line(f"q*Theta(qu) = -u^-1*Theta(u) to q^{args.qorder}", quasi))
    lines.append(_check_line(f"triple product to q^{args.qorder}", product))
    passed = theta.support_ok() and quasi["passed"] and product["passed"]
    return _status(passed), lines


def _theta_cube(args: argparse.Namespace) -> Result:
    analyzer = CubeAnalyzer(args.jobs)
    invariance = analyzer.cube_invariance(args.qorder)
    lines = []
    for name, m in invariance["multipliers"].items():
        lines.append(f"{name} -> q*{name} : multiplier {m['sign']:+d} q^{m['q']} u^{_exponent(m['u'])}"
                     f" : {_verdict(m['agree'])}")
    for name, failure in invariance["expansions"].items():
        lines.append(_check_line(f"expansion {name}", {"passed": failure is None, "first_failure": failure}))
    lines.append(f"symmetric : {_verdict(invariance['symmetric'])}")
    lines.append(f"cube invariance : {_verdict(invariance['passed'])}")

    section = analyzer.cube_section(args.zorder, args.qorder)
    report = analyzer.verify_cube_conditions(section)
    lines.append(f"section divisors : {report['divisors']}")
    lines += [_check_line(f"section {name}", entry) for name, entry in report["conditions"].items()]
    lines.append(f"cube section : {_verdict(report['passed'])}")
    return _status(invariance["passed"] and report["passed"]), lines


def _theta_sigma(args: argparse.Namespace) -> Result:
    analyzer = CubeAnalyzer(args.jobs)
    sigma = analyzer.sigma(args.zorder, args.qorder)
    report = analyzer.verify_sigma(sigma)
    lines = format_multiseries(sigma.series).rstrip("\n").split("\n") if args.show else []
    lines += [_check_line(name, entry) for name, entry in report["checks"].items()]
    lines.append(f"sigma : {_verdict(report['passed'])}")
    return _status(report["passed"]), lines


def _theta_divisor(args: argparse.Namespace) -> Result:
    analyzer = CubeAnalyzer(args.jobs)
    if args.two_variable:
        section = analyzer.two_variable_section(args.zorder, args.qorder)
    else:
        section = analyzer.cube_section(args.zorder, args.qorder)
    vector = analyzer.divisor_of_section(section)
    lines = [f"{label} : {value:+d}" if value else f"{label} : 0"
             for label, value in vector.as_dict().items()]
    lines.append(f"divisor = {vector}")
    return EXIT_OK, lines


# mf

def _mf_basis(args: argparse.Namespace) -> Result:
    forms = ModularFormsRing(args.qorder).basis(args.weight)
    if not forms:
        return EXIT_OK, [f"weight {args.weight} : 0"]
    return EXIT_OK, [f"{form.label} : {format_qseries(form.qexp)}" for form in forms]


def _mf_decompose(args: argparse.Namespace) -> Result:
    f = parse_qseries(_read(args.input))
    report = ModularFormsRing(f.trunc).decompose(f, args.weight)
    lines = [f"{label} = {c}" for label, c in zip(report["basis"], report["coordinates"])]
    entry = {"passed": report["success"], "first_failure": report["first_inconsistent_degree"]}
    lines.append(_check_line("consistent", entry))
    return _status(report["success"]), lines


def _mf_image24(args: argparse.Namespace) -> Result:
    forms = ModularFormsRing(args.qorder)
    if not args.input:
        return EXIT_OK, [f"[Z c4^3 + Z Delta : <c4^3, 24 Delta>] = {forms.lattice_index()}"]
    f = parse_qseries(_read(args.input))
    report = ModularFormsRing(f.trunc).mf12_membership(ModularForm(12, f))
    return EXIT_OK, [f"alpha = {report['alpha']}", f"beta = {report['beta']}",
                     f"member of <c4^3, 24 Delta> : {'YES' if report['member'] else 'NO'}"]


def _mf_relation(args: argparse.Namespace) -> Result:
    report = ModularFormsRing(args.qorder).relation_check()
    return _status(report["passed"]), [_check_line(report["relation"], report)]


def _mf_delta(args: argparse.Namespace) -> Result:
    forms = ModularFormsRing(args.qorder)
    delta = forms.delta()
    failure = delta.qexp.first_difference(forms.delta_via_eta_power().qexp)
    entry = {"passed": failure is None, "first_failure": failure}
    return _status(failure is None), [f"Delta : {format_qseries(delta.qexp)}",
                                      _check_line("eta^24 recurrence", entry)]


def _mf_eisenstein(args: argparse.Namespace) -> Result:
    form = ModularFormsRing(args.qorder).eisenstein(args.weight)
    return EXIT_OK, [f"{form.label} : {format_qseries(form.qexp)}"]


# witten

def _manifold(args: argparse.Namespace) -> PontryaginData:
    return PontryaginData.from_text(_read(args.input))


def _witten_genus(args: argparse.Namespace) -> Result:
    value = WittenGenusAnalyzer(args.qorder).witten_genus(_manifold(args))
    return EXIT_OK, [f"weight = {value.weight}", format_qseries(value.qexp)]


def _witten_ahat(args: argparse.Namespace) -> Result:
    return EXIT_OK, [f"A-hat = {WittenGenusAnalyzer(1).a_hat(_manifold(args))}"]


def _witten_modularity(args: argparse.Namespace) -> Result:
    report = WittenGenusAnalyzer(args.qorder).modularity_check(_manifold(args))
    decomposition = report["decomposition"]
    lines = [f"weight = {report['weight']}"]
    lines += [f"{label} = {c}" for label, c in zip(decomposition["basis"], decomposition["coordinates"])]
    lines.append(_check_line("decomposition", {"passed": decomposition["success"],
                                               "first_failure": decomposition["first_inconsistent_degree"]}))
    lines.append(f"G2 invariance : {_verdict(report['g2_invariant'])}")
    lines.append(f"modularity : {_verdict(report['passed'])}")
    return _status(report["passed"]), lines


def _witten_div24(args: argparse.Namespace) -> Result:
    analyzer = WittenGenusAnalyzer(2)
    if args.samples:
        sweep = analyzer.div24_property_run(args.samples, args.seed)
        lines = [f"failure: alpha = {a}, beta = {b}" for a, b in sweep["failures"]]
        lines.append(f"div24 on {sweep['samples']} samples (seed {sweep['seed']}) : {_verdict(sweep['passed'])}")
        return _status(sweep["passed"]), lines
    report = analyzer.div24_check(args.alpha, args.beta)
    line = (f"q1 = {report['q1']} ≡ {report['residue']} (mod {analyzer.DIV24_MODULUS})"
            f" : {_verdict(report['passed'])}")
    return _status(report["passed"]), [line]


# atkin

def _atkin_up(args: argparse.Namespace) -> Result:
    analyzer = AtkinAnalyzer(args.p)
    f = parse_qseries(_read(args.input))
    image = analyzer.one_minus_up(f) if args.one_minus else analyzer.u_p(f)
    return EXIT_OK, [format_qseries(image)]


def _atkin_vp(args: argparse.Namespace) -> Result:
    return EXIT_OK, [format_qseries(AtkinAnalyzer(args.p).v_p(parse_qseries(_read(args.input))))]


def _atkin_tp(args: argparse.Namespace) -> Result:
    f = parse_qseries(_read(args.input))
    image = AtkinAnalyzer(args.p).t_p(ModularForm(args.weight, f))
    return EXIT_OK, [format_qseries(image.qexp)]


def _atkin_kernel(args: argparse.Namespace) -> Result:
    prec = PadicPrecision(args.p, args.padic)
    analyzer = AtkinAnalyzer(args.p, args.jobs)
    report = analyzer.kernel_search(args.weight, prec, args.qorder)
    lines = [
        f"kernel of 1 - U_{args.p} in weight {args.weight} mod {report['modulus']} "
        f"(q-order {args.qorder})",
        f"space = {', '.join(report['space']) or '0'}",
        f"order = {report['kernel_order']}",
    ]
    for i, vector in enumerate(report["kernel"], start=1):
        lines.append(f"v{i} = {_exponent(vector['coordinates'])} : {format_qseries(vector['qexp'])}")
    lines.append(f"verified to q^{report['verified_to']} : {_verdict(report['verified'])}")
    witness = report["witness_in_kernel"]
    lines.append(f"Eisenstein witness : {'n/a' if witness is None else _verdict(witness)}")
    passed = report["verified"] and witness is not False
    if args.hensel:
        stability = analyzer.hensel_stability(args.weight, prec, args.qorder)
        lines.append(f"Hensel stability mod {args.p}^{args.padic + 1} -> {args.p}^{args.padic} : "
                     f"{_verdict(stability['stable'])}")
        passed = passed and stability["stable"]
    return _status(passed), lines


DISPATCH: Dict[Tuple[str, Optional[str]], Callable[[argparse.Namespace], Result]] = {
    ("fgl", "build"): _fgl_build,
    ("fgl", "verify"): _fgl_verify,
    ("fgl", "log"): _fgl_log,
    ("cocycle", "check2"): _cocycle_check2,
    ("cocycle", "check3"): _cocycle_check3,
    ("cocycle", "coboundary"): _cocycle_coboundary,
    ("cocycle", "virtual"): _cocycle_virtual,
    ("augideal", None): _augideal,
    ("theta", "quasi"): _theta_quasi,
    ("theta", "cube"): _theta_cube,
    ("theta", "sigma"): _theta_sigma,
    ("theta", "divisor"): _theta_divisor,
    ("mf", "basis"): _mf_basis,
    ("mf", "decompose"): _mf_decompose,
    ("mf", "image24"): _mf_image24,
    ("mf", "relation"): _mf_relation,
    ("mf", "delta"): _mf_delta,
    ("mf", "eisenstein"): _mf_eisenstein,
    ("witten", "genus"): _witten_genus,
    ("witten", "ahat"): _witten_ahat,
    ("witten", "modularity"): _witten_modularity,
    ("witten", "div24"): _witten_div24,
    ("atkin", "up"): _atkin_up,
    ("atkin", "vp"): _atkin_vp,
    ("atkin", "tp"): _atkin_tp,
    ("atkin", "kernel"): _atkin_kernel,
}


def _precision(parser: argparse.ArgumentParser, *names: str) -> None:
    for name in names:
        parser.add_argument(f"--{name}", type=int, default=PRECISION_DEFAULTS[name],
                            help=f"default {PRECISION_DEFAULTS[name]}")


def _law_flags(parser: argparse.ArgumentParser, order_default: Optional[int]) -> None:
    parser.add_argument("--curve", help="Weierstrass coefficients a1,a2,a3,a4,a6")
    parser.add_argument("--kind", choices=FormalGroupBuilder.STANDARD_KINDS, default="additive")
    parser.add_argument("--ring", help="Q, Z or Z/N")
    parser.add_argument("--order", type=int, default=order_default,
                        help="total-degree truncation")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")

    parser = _Parser(prog="string-orientation",
                     description="Exact algebra of the string orientation of tmf")
    groups = parser.add_subparsers(dest="command", required=True)

    def leaf(sub: Any, name: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common])

    fgl = groups.add_parser("fgl").add_subparsers(dest="action", required=True)
    for name in ("build", "verify", "log"):
        p = leaf(fgl, name)
        _law_flags(p, PRECISION_DEFAULTS["order"])
        if name == "build":
            p.add_argument("--inverse", action="store_true", help="print the formal inverse")

    cocycle = groups.add_parser("cocycle").add_subparsers(dest="action", required=True)
    for name in ("check2", "check3", "coboundary"):
        p = leaf(cocycle, name)
        p.add_argument("--in", dest="input", required=True)
        _law_flags(p, None)
        if name == "coboundary":
            p.add_argument("--arity", type=int, choices=(2, 3), default=2)
    leaf(cocycle, "virtual")

    aug = groups.add_parser("augideal", parents=[common])
    aug.add_argument("--group", required=True, help="cyclic orders, e.g. 2,2")
    aug.add_argument("--mod", type=int, required=True)
    aug.add_argument("--power", type=int, choices=(2, 3), default=2)

    theta = groups.add_parser("theta").add_subparsers(dest="action", required=True)
    p = leaf(theta, "quasi")
    _precision(p, "qorder")
    p.add_argument("--show", action="store_true", help="print the expansion")
    for name in ("cube", "sigma", "divisor"):
        p = leaf(theta, name)
        _precision(p, "zorder", "qorder")
        if name == "sigma":
            p.add_argument("--show", action="store_true", help="print the expansion")
        if name == "divisor":
            p.add_argument("--two-variable", action="store_true")

    mf = groups.add_parser("mf").add_subparsers(dest="action", required=True)
    for name in ("basis", "eisenstein"):
        p = leaf(mf, name)
        p.add_argument("--weight", type=int, required=True)
        _precision(p, "qorder")
    p = leaf(mf, "decompose")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--in", dest="input", required=True)
    p = leaf(mf, "image24")
    p.add_argument("--in", dest="input")
    _precision(p, "qorder")
    for name in ("relation", "delta"):
        _precision(leaf(mf, name), "qorder")

    witten = groups.add_parser("witten").add_subparsers(dest="action", required=True)
    for name in ("genus", "ahat", "modularity"):
        p = leaf(witten, name)
        p.add_argument("--in", dest="input", required=True)
        _precision(p, "qorder")
    p = leaf(witten, "div24")
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--beta", type=int, default=0)
    p.add_argument("--samples", type=int, default=0, help="random (alpha, beta) pairs drawn with --seed")

    atkin = groups.add_parser("atkin").add_subparsers(dest="action", required=True)
    for name in ("up", "vp", "tp"):
        p = leaf(atkin, name)
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--in", dest="input", required=True)
        if name == "up":
            p.add_argument("--one-minus", action="store_true", help="print f - U_p f")
        if name == "tp":
            p.add_argument("--weight", type=int, required=True)
    p = leaf(atkin, "kernel")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--hensel", action="store_true", help="also check stability under M -> M+1")
    _precision(p, "padic", "qorder")
    return parser


def _error(kind: str, message: str) -> None:
    sys.stderr.write(f"error: {kind}: {message}\n")


def run(argv: Sequence[str]) -> Tuple[int, str]:
    """
    Execute one command.

    Args:
        argv: arguments without the program name

    Returns:
        (exit status, stdout text)
    """
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as e:
        _error("usage", str(e))
        return EXIT_USAGE, ""
    except SystemExit as e:
        return (e.code if isinstance(e.code, int) else EXIT_OK), ""

    logging.basicConfig(level=args.log_level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(args.log_level)
    handler = DISPATCH[(args.command, getattr(args, "action", None))]
    logger.debug("dispatching %s %s", args.command, getattr(args, "action", ""))
    try:
        code, lines = handler(args)
    except MalformedInputError as e:
        _error(e.kind, str(e))
        return EXIT_MALFORMED, ""
    except InsufficientPrecisionError as e:
        required = f" (required minimum {e.required})" if e.required is not None else ""
        _error(e.kind, f"{e}{required}")
        return EXIT_PRECISION, ""
    except StringOrientationError as e:
        _error(e.kind, str(e))
        return EXIT_FAILED, ""
    except (ValueError, OSError) as e:
        _error("invalid" if isinstance(e, ValueError) else "io", str(e))
        return EXIT_FAILED, ""
    return code, "\n".join(lines) + "\n"


def main() -> None:
    code, output = run(sys.argv[1:])
    sys.stdout.write(output)
    sys.exit(code)


if __name__ == "__main__":
    main()
