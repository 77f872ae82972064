"""
cli.py

Command line entry point for torsionkit.

    torsionkit check --input FILE --mode {integral,modr,massey} [--r R] [--m M] [--strike I] [--json OUT]
    torsionkit det-form --input FILE [--r R] [--m M]
    torsionkit fox --input FILE --relator I --var J
    torsionkit selftest [--seed S] [--trials N]

Exit codes: 0 when the two sides agree (a sign-only disagreement is
reported as a warning), 2 when they differ, 1 on input errors.

Environment variables are in torsionkit/utils/utils_config module.
"""

#####################################
# Import Modules
#####################################

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import TorsionKitError
from .fox import abelianize, fox_derivative
from .groupring import truncate, truncation_context
from .pipeline import (
    EQUAL,
    EQUAL_UP_TO_SIGN,
    NicePresentation,
    PresentationSampler,
    TheoremReport,
    check_fox_cup_congruence,
    check_integral_theorem,
    check_massey_theorem,
    check_mod_r_theorem,
    import_presentation,
    integral_refined_determinant,
    linking_number,
    massey_form_from_higher_fox,
    milnor_invariant,
    mod_r_refined_determinant,
)
from .detform import form_determinant, massey_determinant, sign_refine
from .utils import utils_config as config
from .utils.utils_logger import logger, set_console_level

EXIT_EQUAL = 0
EXIT_INPUT_ERROR = 1
EXIT_UNEQUAL = 2

#####################################
# Argument Parsing
#####################################


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torsionkit",
        description="Compare torsion of presented 3-manifolds with determinants of cup and Massey forms.",
    )
    parser.add_argument("--version", action="version", version=f"torsionkit {__version__}")
    parser.add_argument("--log-level", default=None, help="console log level (default from TORSION_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run one of the torsion checks on a presentation file")
    check.add_argument("--input", required=True, type=Path)
    check.add_argument("--mode", required=True, choices=("integral", "modr", "massey"))
    check.add_argument("--r", type=int, default=None, help="prime power modulus for --mode modr")
    check.add_argument("--m", type=int, default=1, help="Massey order for --mode massey")
    check.add_argument("--strike", type=int, default=None, help="struck column, one-indexed")
    check.add_argument("--no-even-term", action="store_true", help="omit the r/2 term for even r")
    check.add_argument("--json", type=Path, default=None, help="write the report as JSON")

    det = sub.add_parser("det-form", help="print the form extracted from a presentation and its determinant")
    det.add_argument("--input", required=True, type=Path)
    det.add_argument("--r", type=int, default=None, help="use the mod-r cup form")
    det.add_argument("--m", type=int, default=None, help="use the Massey form of this order")

    fox = sub.add_parser("fox", help="print a Fox derivative of one relator")
    fox.add_argument("--input", required=True, type=Path)
    fox.add_argument("--relator", required=True, type=int)
    fox.add_argument("--var", required=True, type=int)
    fox.add_argument("--degree", type=int, default=3, help="truncation degree for the leading terms")

    selftest = sub.add_parser("selftest", help="run the bundled examples and random presentations")
    selftest.add_argument("--seed", type=int, default=None)
    selftest.add_argument("--trials", type=int, default=None)
    return parser


#####################################
# Subcommands
#####################################


def _exit_code(verdict: str) -> int:
    if verdict == EQUAL:
        return EXIT_EQUAL
    if verdict == EQUAL_UP_TO_SIGN:
        logger.warning("Sides agree only up to a global sign; accepting under the sign convention")
        return EXIT_EQUAL
    return EXIT_UNEQUAL


def run_check(pres: NicePresentation, mode: str, r: int | None, m: int, strike: int, even_term: bool = True) -> TheoremReport:
    if mode == "integral":
        return check_integral_theorem(pres, strike)
    if mode == "modr":
        if r is None:
            raise TorsionKitError("--mode modr needs --r")
        return check_mod_r_theorem(pres, r, strike, even_term)
    return check_massey_theorem(pres, m, strike)


def cmd_check(args: argparse.Namespace) -> int:
    pres = import_presentation(args.input)
    strike = args.strike if args.strike is not None else config.get_default_strike_index()
    report = run_check(pres, args.mode, args.r, args.m, strike, not args.no_even_term)
    if pres.substitution is not None:
        report.details["substitution"] = pres.substitution.to_json()
    print(report.summary())
    if args.json is not None:
        args.json.parent.mkdir(parents=True, exist_ok=True)
        args.json.write_text(json.dumps(report.to_json(), indent=config.get_report_indent()) + "\n", encoding="utf-8")
        logger.info(f"Report written to {args.json}")
    return _exit_code(report.verdict)


def cmd_det_form(args: argparse.Namespace) -> int:
    pres = import_presentation(args.input)
    if args.m is not None:
        form = massey_form_from_higher_fox(pres, args.m)
        unrefined = massey_determinant(form)
        det = sign_refine(unrefined, 1)
    elif args.r is not None:
        form, det = mod_r_refined_determinant(pres, args.r)
        unrefined = form_determinant(form)
    else:
        form, det = integral_refined_determinant(pres)
        unrefined = form_determinant(form)
    # the refined determinant is the one the check command compares
    output = {"form": form.to_json(), "determinant": det.to_json(), "unrefined_determinant": unrefined.to_json()}
    print(json.dumps(output, indent=config.get_report_indent()))
    return EXIT_EQUAL


def cmd_fox(args: argparse.Namespace) -> int:
    pres = import_presentation(args.input)
    if not 1 <= args.relator <= len(pres.relators):
        raise TorsionKitError(f"relator index {args.relator} outside 1..{len(pres.relators)}")
    if not 1 <= args.var <= pres.num_generators:
        raise TorsionKitError(f"generator index {args.var} outside 1..{pres.num_generators}")
    derivative = fox_derivative(pres.relators[args.relator - 1], args.var)
    image = abelianize(derivative, pres.group, pres.assignment)
    context = truncation_context(pres.group, args.degree)
    truncated = truncate(image, context)
    print(f"d r{args.relator} / d x{args.var} = {derivative}")
    print(f"in Z[H], H = {pres.group}: {image}")
    print(f"mod I^{args.degree}: {truncated} (lowest degree {truncated.lowest_degree()})")
    return EXIT_EQUAL


#####################################
# Self Test
#####################################


def _bundled_checks() -> list[tuple[str, bool]]:
    results = []
    hopf_path = config.get_example_path("hopf")
    borromean_path = config.get_example_path("borromean")
    if hopf_path.exists():
        hopf = import_presentation(hopf_path)
        report = check_integral_theorem(hopf)
        leading = report.left.leading_terms()
        magnitude = max((abs(c) for c in leading.values()), default=0)
        results.append(("hopf integral", report.verdict == EQUAL))
        results.append(("hopf leading term equals linking number", magnitude == abs(linking_number(hopf, 1, 2))))
    else:
        logger.warning(f"Bundled example {hopf_path} not found; skipping")
    if borromean_path.exists():
        borromean = import_presentation(borromean_path)
        report = check_massey_theorem(borromean, 2)
        results.append(("borromean massey order 2", report.verdict == EQUAL))
        results.append(("borromean triple invariant", abs(milnor_invariant(borromean, (1, 2, 3))) == 1))
    else:
        logger.warning(f"Bundled example {borromean_path} not found; skipping")
    return results


def _random_checks(seed: int, trials: int) -> list[tuple[str, bool]]:
    sampler = PresentationSampler(random.Random(seed))
    results = []
    for t in range(trials):
        n = sampler.rng.choice((2, 3))
        orders = sampler.rng.choice(((), (2,), (3,), (4,), (2, 2)))
        pres = sampler.integral(n, orders, name=f"integral-{t}")
        results.append((pres.name, check_integral_theorem(pres).verdict == EQUAL))

        r = sampler.rng.choice((2, 3, 4, 5))
        coprime = () if r % 3 == 0 else sampler.rng.choice(((), (3,)))
        pres = sampler.mod_r(2, r, sampler.rng.randint(0, 1), coprime, name=f"modr-{r}-{t}")
        results.append((pres.name, check_mod_r_theorem(pres, r).verdict == EQUAL))

        pres = sampler.massey(2, sampler.rng.choice(((), (2,))), name=f"massey-{t}")
        results.append((pres.name, check_massey_theorem(pres, 2).verdict == EQUAL))

        modulus = sampler.rng.choice((None, 2, 3, 4, 5, 8, 9))
        if modulus is None:
            pres = sampler.integral(3)
        else:
            pres = sampler.mod_r(3, modulus)
        expansion = pres.expansion(1, modulus)
        j = sampler.rng.randint(1, pres.num_generators)
        ok = check_fox_cup_congruence(expansion, j, pres.num_generators, modulus)
        results.append((f"congruence-{t} mod {modulus}", ok))
    return results


def cmd_selftest(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else config.get_selftest_seed()
    trials = args.trials if args.trials is not None else config.get_selftest_trials()
    results = _bundled_checks() + _random_checks(seed, trials)
    failures = [name for name, ok in results if not ok]
    for name, ok in results:
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
    print(f"{len(results) - len(failures)} of {len(results)} checks passed (seed {seed})")
    return EXIT_UNEQUAL if failures else EXIT_EQUAL


COMMANDS = {
    "check": cmd_check,
    "det-form": cmd_det_form,
    "fox": cmd_fox,
    "selftest": cmd_selftest,
}

#####################################
# Define Main Function
#####################################


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, dispatch the subcommand and map failures to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    set_console_level(args.log_level or config.get_log_level())

    logger.info(f"STARTING torsionkit {args.command}")
    try:
        code = COMMANDS[args.command](args)
    except TorsionKitError as e:
        logger.error(f"ERROR: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    logger.info(f"EXITING torsionkit {args.command} with code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
