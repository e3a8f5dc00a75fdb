"""Command-line front end.

Every command prints a deterministic UTF-8 report on stdout and, with
`--out`, writes the JSON summary. Exit status: 0 on success, 1 on a failing
check or a library error, 2 on unparseable input, 3 on an unbounded assembly.
"""

import argparse
import sys
from typing import Dict, List, Optional, Sequence

from loguru import logger

from pycyclic.__about__ import version
from pycyclic.braces import BraceContext, brace_sweep, path_sign_report, tree_identity_report
from pycyclic.cocyclic import connes_les_report, identity_report, validate_cocyclic, validate_cosimplicial
from pycyclic.config import THEORIES, RunConfig, parse_window
from pycyclic.dgfrob import load_algebra, validate_algebra, validate_dual_bimodule, validate_pairing, validate_theta
from pycyclic.errors import MissingPairing, ParseError, PyCyclicError, UnboundedAssembly, ValidationFailed
from pycyclic.hochschild import (
    Coefficients,
    WeakInvariants,
    build_ch,
    cochain_total,
    hc_theories,
    hh,
    theta_report,
)
from pycyclic.mixed import Grading, gysin_les_reports, tautological_les_report, validate_mixed
from pycyclic.operads import (
    end_cyclic_structure,
    endomorphism_operad,
    validate_cyclic,
    validate_mult_unit,
    validate_operad,
)
from pycyclic.report import Report
from pycyclic.structures import (
    MODELS,
    chain_vs_homology_gravity,
    extract_bv,
    gravity_from_bv,
    gravity_model,
    gravity_morphism_checks,
    gravity_report,
    second_bracket_consistency,
)
from pycyclic.trees import (
    choose_root,
    enumerate_trees,
    format_combo,
    format_tree,
    forget_root,
    nu,
    parse_tree,
    rho,
    rotate_root,
)

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_UNBOUNDED = 0, 1, 2, 3

# flags shared by every command; None means "not given on the command line"
_SHARED = {
    "builtin": dict(help="builtin algebra: ground, cp2, sphere(n), exterior(g), truncpoly(n,deg)"),
    "file": dict(help="algebra document (JSON)"),
    "K": dict(type=int, help="truncation"),
    "arity_cap": dict(type=int, help="arity cap of operad totalizations"),
    "window": dict(help="degree window a..b"),
    "theory": dict(choices=THEORIES, help="cyclic theory"),
    "seed": dict(type=int, help="seed of randomized suites"),
    "out": dict(help="write the JSON summary here"),
    "kmax": dict(type=int, help="largest gravity bracket"),
    "cutoff": dict(type=int, help="negative power cutoff of periodic and positive assemblies"),
    "samples": dict(type=int, help="samples per randomized check"),
}


def _add_shared(parser: argparse.ArgumentParser):
    for name, options in _SHARED.items():
        flag = "--K" if name == "K" else "--" + name.replace("_", "-")
        parser.add_argument(flag, dest=name, default=None, **options)
    parser.add_argument("--config", default=None, help="YAML run configuration")
    parser.add_argument("--cohomological", action="store_true", default=None, help="read degrees cohomologically")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--json", action="store_true", help="print the JSON summary instead of text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pycyclic", description="exact cyclic homology workbench")
    parser.add_argument("--version", action="version", version=f"pycyclic {version}")
    commands = parser.add_subparsers(dest="command", required=True)

    _add_shared(commands.add_parser("check", help="axiom suites of an algebra and its complexes"))
    command = commands.add_parser("hh", help="Hochschild cohomology dimensions")
    _add_shared(command)
    command.add_argument("--coefficients", choices=("self", "dual"), default="self")
    _add_shared(commands.add_parser("hc", help="cyclic homology dimensions of the chosen theory"))
    _add_shared(commands.add_parser("hclambda", help="HC_lambda dimensions"))
    command = commands.add_parser("les", help="long exact sequence certificates")
    _add_shared(command)
    command.add_argument("--which", choices=("tautological", "gysin", "connes", "all"), default="all")
    command = commands.add_parser("gravity", help="gravity brackets and their morphisms")
    _add_shared(command)
    command.add_argument("--model", choices=MODELS + ("all",), default="all")
    _add_shared(commands.add_parser("bv", help="BV algebra on Hochschild homology"))
    command = commands.add_parser("brace", help="cyclic brace oracles")
    _add_shared(command)
    command.add_argument("--vertices", type=int, default=3, help="largest tree")
    command.add_argument("--tails", type=int, default=6, help="most tails of an evaluated tree")
    command.add_argument("--cases", type=int, default=50, help="seeded route equivalence cases")
    command.add_argument("--invariance-cases", type=int, default=200, help="seeded invariance cases")
    _add_shared(commands.add_parser("theta-report", help="ranks of Theta and of its restriction"))

    trees = commands.add_parser("trees", help="planar trees")
    actions = trees.add_subparsers(dest="action", required=True)
    command = actions.add_parser("enumerate", help="canonical encodings")
    _add_shared(command)
    command.add_argument("--n", type=int, required=True)
    command.add_argument("--tails", type=int, default=0)
    command.add_argument("--rooted", action="store_true")
    command.add_argument("--oriented", action="store_true")
    command = actions.add_parser("show", help="images of a tree literal under the tree maps")
    _add_shared(command)
    command.add_argument("literal")
    command.add_argument("--arities", default=None, help="input arities for nu, as 2,1,...")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: Dict = RunConfig.from_yaml(args.config).to_dict() if args.config else {}
    for name in list(_SHARED) + ["cohomological"]:
        given = getattr(args, name, None)
        if given is not None:
            values[name] = given
    if "window" in values:
        values["window"] = parse_window(values["window"])
    return RunConfig.from_dict(values)


def _grading(config: RunConfig) -> Grading:
    return Grading.COHOMOLOGICAL if config.cohomological else Grading.HOMOLOGICAL


def _internal_degrees(config: RunConfig) -> List[int]:
    grading = _grading(config)
    return sorted(grading.internal(n) for n in config.degrees())


def _algebra(config: RunConfig):
    return load_algebra(config.builtin, config.file)


def _needs_pairing(A, pairing):
    if pairing is None:
        raise MissingPairing(f"{A.name} carries no pairing")
    return pairing


def _rows_text(rows: Sequence[Dict]) -> List[str]:
    lines = ["degree\ttheory\tdimension\tstable\tcertified"]
    for row in rows:
        lines.append(f"{row['degree']}\t{row['theory']}\t{row['dimension']}\t{row['stable']}\t{row['certified']}")
    return lines


# commands ---------------------------------------------------------------------


def cmd_check(config: RunConfig) -> Report:
    try:
        A, pairing = _algebra(config)
    except ValidationFailed as error:
        if error.report is not None:
            return error.report
        raise
    report = Report(f"axioms of {A.name}")
    rng = config.rng("check")
    report.merge(validate_algebra(A))
    if pairing is not None:
        report.merge(validate_pairing(pairing))
        report.merge(validate_dual_bimodule(pairing), "dual bimodule")
        report.merge(validate_theta(pairing), "theta")
    O, mult_unit = endomorphism_operad(A)
    report.merge(validate_operad(O, config.arity_cap, rng, config.samples))
    cyclic = None
    if pairing is not None and pairing.is_nondegenerate():
        cyclic = end_cyclic_structure(pairing, O)
        report.merge(validate_cyclic(O, cyclic, min(config.arity_cap, 2), rng, config.samples))
    report.merge(validate_mult_unit(O, mult_unit, cyclic))
    H = build_ch(A, Coefficients.DUAL if pairing is not None else Coefficients.SELF, config.K, pairing)
    if pairing is not None:
        report.merge(validate_cocyclic(H.complex))
        report.merge(identity_report(H.total))
    else:
        report.merge(validate_cosimplicial(H.complex))
    if H.total.split:
        for column in H.columns():
            report.merge(validate_mixed(column.mixed))
    return report


def cmd_hh(config: RunConfig, coefficients: str = "self") -> Report:
    A, pairing = _algebra(config)
    coeff = Coefficients.DUAL if coefficients == "dual" else Coefficients.SELF
    if coeff is Coefficients.DUAL:
        _needs_pairing(A, pairing)
    H = build_ch(A, coeff, config.K, pairing)
    rows = [hh(H, n, _grading(config)).row() for n in config.degrees()]
    report = Report(f"HH of {H.name}")
    report.meta["rows"] = rows
    report.meta["text"] = _rows_text(rows)
    return report


def cmd_hc(config: RunConfig, theory: Optional[str] = None) -> Report:
    A, pairing = _algebra(config)
    H = build_ch(A, Coefficients.DUAL, config.K, _needs_pairing(A, pairing))
    theory = theory or config.theory
    rows = [hc_theories(H, theory, n, config.cutoff, _grading(config)).row() for n in config.degrees()]
    report = Report(f"{theory} cyclic homology of {H.name}")
    report.meta["rows"] = rows
    report.meta["text"] = _rows_text(rows)
    return report


def cmd_les(config: RunConfig, which: str = "all") -> Report:
    A, pairing = _algebra(config)
    H = build_ch(A, Coefficients.DUAL, config.K, _needs_pairing(A, pairing))
    degrees = _internal_degrees(config)
    report = Report(f"long exact sequences of {H.name}")
    for column in H.columns():
        M = column.mixed
        if which in ("tautological", "all"):
            report.merge(tautological_les_report(M, degrees, config.cutoff), f"{M.name}/tautological")
        if which in ("gysin", "all"):
            report.merge(gysin_les_reports(M, degrees, config.cutoff), M.name)
    if which in ("connes", "all"):
        report.merge(connes_les_report(H.total, degrees), "connes")
    return report


def _bv_algebra(config: RunConfig):
    A, pairing = _algebra(config)
    return extract_bv(
        _needs_pairing(A, pairing), config.K, list(config.degrees()), _grading(config), config.rng("bv"), config.samples
    )


def cmd_bv(config: RunConfig) -> Report:
    algebra = _bv_algebra(config)
    report = algebra.report
    lines = []
    for name, rows in algebra.tables().items():
        for row in rows:
            lines.append(f"{name}\t" + "\t".join(str(x) for x in row))
    report.meta["text"] = lines
    return report


def cmd_gravity(config: RunConfig, which: str = "all") -> Report:
    algebra = _bv_algebra(config)
    report = Report(f"gravity structures of {algebra.name}")
    report.merge(algebra.report, "BV")
    rng = config.rng("gravity")
    lines = []
    H = algebra.model.H
    for name in MODELS if which == "all" else (which,):
        data = gravity_from_bv(algebra, gravity_model(H, name, config.cutoff), config.kmax)
        report.merge(gravity_report(data, rng, config.samples), data.name)
        for k in range(2, config.kmax + 1):
            for refs, coords in data.table(k, rng, config.samples):
                lines.append(f"{data.name}\t{k}\t{refs}\t{coords}")
        if name == "lambda":
            report.merge(second_bracket_consistency(data, rng, config.samples))
            report.merge(chain_vs_homology_gravity(data, rng, config.samples))
    if which == "all":
        report.merge(gravity_morphism_checks(algebra, config.cutoff, config.kmax, rng, config.samples))
    report.meta["text"] = lines
    return report


def cmd_brace(
    config: RunConfig, vertices: int = 3, tails: int = 6, cases: int = 50, invariance_cases: int = 200
) -> Report:
    A, pairing = _algebra(config)
    pairing = _needs_pairing(A, pairing)
    context = BraceContext(cochain_total(A, config.arity_cap, pairing), pairing)
    weak = WeakInvariants(pairing)
    report = Report(f"cyclic braces over {A.name}")
    trees = [tree for n in range(1, vertices + 1) for tree in enumerate_trees(n, oriented=True)]
    sweep = brace_sweep(
        context,
        weak,
        trees,
        lambda *keys: config.rng("brace", *keys),
        tails=tails,
        max_arity=config.arity_cap,
        cases=cases,
        invariance_cases=invariance_cases,
    )
    report.merge(sweep, "sweep")
    # every rooted tree with one tail besides the root, whatever the sweep met
    rooted = [t for n in range(1, vertices + 1) for t in enumerate_trees(n, 1, rooted=True, oriented=True)]
    rooted = [t for t in rooted if t.tails()]
    report.merge(path_sign_report(rooted), "enumerated")
    report.merge(tree_identity_report(rooted + [forget_root(t)[1] for t in rooted]), "enumerated")
    report.meta["trees"] = len(trees)
    report.meta["tailed trees"] = sweep.meta.get("tailed trees", 0)
    return report


def cmd_trees_enumerate(n: int, tails: int, rooted: bool, oriented: bool) -> Report:
    trees = enumerate_trees(n, tails, rooted=rooted, oriented=oriented)
    report = Report(f"planar trees on {n} vertices")
    report.meta["count"] = len(trees)
    report.meta["text"] = [format_tree(t) for t in trees]
    return report


def cmd_trees_show(literal: str, arities: Optional[str] = None) -> Report:
    tree, sign = parse_tree(literal)
    report = Report(f"tree {format_tree(tree)}")
    lines = [f"canonical\t{'+' if sign > 0 else '-'} {format_tree(tree)}"]
    if tree.rooted:
        s, forgotten = forget_root(tree)
        lines.append(f"w\t{'+' if s > 0 else '-'} {format_tree(forgotten)}")
        if tree.tails():
            s, moved, reversed_edges = rotate_root(tree)
            lines.append(f"t\t{'+' if s > 0 else '-'} {format_tree(moved)} ({reversed_edges} reversed)")
    else:
        lines.append("rho\n" + format_combo(rho(tree)))
        if tree.tails():
            lines.append("r\n" + format_combo(choose_root(tree)))
        if arities:
            try:
                values = [int(a) for a in arities.split(",")]
            except ValueError:
                raise ParseError(f"arities {arities!r} are not integers", 1, 1)
            lines.append("nu\n" + format_combo(nu(tree, values)))
    report.meta["text"] = lines
    return report


def cmd_theta_report(config: RunConfig) -> Report:
    A, pairing = _algebra(config)
    return theta_report(_needs_pairing(A, pairing), config.K, list(config.degrees()), _grading(config))


def dispatch(args: argparse.Namespace, config: RunConfig) -> Report:
    command = args.command
    if command == "check":
        return cmd_check(config)
    if command == "hh":
        return cmd_hh(config, args.coefficients)
    if command == "hc":
        return cmd_hc(config)
    if command == "hclambda":
        return cmd_hc(config, "lambda")
    if command == "les":
        return cmd_les(config, args.which)
    if command == "gravity":
        return cmd_gravity(config, args.model)
    if command == "bv":
        return cmd_bv(config)
    if command == "brace":
        return cmd_brace(config, args.vertices, args.tails, args.cases, args.invariance_cases)
    if command == "theta-report":
        return cmd_theta_report(config)
    if args.action == "enumerate":
        return cmd_trees_enumerate(args.n, args.tails, args.rooted, args.oriented)
    return cmd_trees_show(args.literal, args.arities)


def render(report: Report, as_json: bool = False) -> str:
    if as_json:
        return report.to_json() + "\n"
    hidden = {key: report.meta.pop(key) for key in ("rows", "text") if key in report.meta}
    try:
        text = report.to_text()
    finally:
        report.meta.update(hidden)
    lines = hidden.get("text")
    return text + "\n".join(lines) + "\n" if lines else text


def _attached_windows(argv: Sequence[str]) -> List[str]:
    """`--window -6..0` would read -6..0 as a flag; attach it as --window=-6..0"""
    joined: List[str] = []
    tokens = iter(argv)
    for token in tokens:
        joined.append(f"--window={next(tokens, '')}" if token == "--window" else token)
    return joined


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attached_windows(sys.argv[1:] if argv is None else argv))
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if args.verbose else "WARNING")
    try:
        config = config_from_args(args)
        report = dispatch(args, config)
    except ParseError as error:
        logger.error(f"parse error: {error}")
        return EXIT_PARSE
    except UnboundedAssembly as error:
        logger.error(str(error))
        return EXIT_UNBOUNDED
    except PyCyclicError as error:
        logger.error(f"{type(error).__name__}: {error}")
        return EXIT_FAILED
    report.meta["config"] = config.to_dict()
    report.meta["version"] = version
    sys.stdout.write(render(report, args.json))
    if config.out:
        with open(config.out, "w", encoding="utf-8") as stream:
            stream.write(report.to_json() + "\n")
        logger.info(f"report written to {config.out}")
    if not report.passed:
        for check in report.failures:
            logger.warning(f"failed: {check.name} witness {check.witness}")
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
