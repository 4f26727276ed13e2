"""Command line front end: read a JSON configuration, run one operation, write the reports."""

import argparse
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from blaschke_cyclicity import __version__
from blaschke_cyclicity.common.schema import ReportSchema
from blaschke_cyclicity.config import logger
from blaschke_cyclicity.core import cyclicity, lacunary, toeplitz
from blaschke_cyclicity.core.battery import TOLERANCES, run_invariant_suite
from blaschke_cyclicity.core.enums import ExitCodes, ValidSubcommands, WitnessModes
from blaschke_cyclicity.core.exceptions import NumericalInconsistencyError
from blaschke_cyclicity.core.hardy import HardyFunction
from blaschke_cyclicity.core.loaders import RunConfig, load_run_config
from blaschke_cyclicity.core.reports import envelope, write_csv, write_json
from blaschke_cyclicity.core.validation import (
    validate_exponent_p,
    validate_non_negative_int,
    validate_real,
)


def _report_path(config: RunConfig, suffix: str) -> Path:
    stem = str(config.subcommand).replace("-", "_")
    return config.output_directory / f"{stem}_{suffix}"


def _write_report(config: RunConfig, result: dict) -> Path:
    report = envelope(config.subcommand, config.seed, config.policy, result)
    return write_json(report, _report_path(config, "report.json"))


def _input_function(config: RunConfig) -> HardyFunction:
    """The configured function, or the lacunary sum when a spec is given instead."""
    if config.function is not None:
        return config.function
    return lacunary.build(config.spec)


def cmd_decompose(config: RunConfig) -> int:
    """Decompose f along the powers of b and write the components and their norms."""
    f = _input_function(config)
    decomposition = toeplitz.decompose(config.product, f, config.parameters["K"])
    defect = decomposition.parseval_defect()
    if defect > TOLERANCES["parseval"]:
        raise NumericalInconsistencyError(
            f"Parseval defect {defect:.3e} exceeds {TOLERANCES['parseval']:.0e}"
        )

    result = {"product": config.product.to_dict(), **decomposition.to_dict()}
    _write_report(config, result)
    write_csv(decomposition.norms_frame(), _report_path(config, "norms.csv"))
    return int(ExitCodes.SUCCESS)


def cmd_iterate(config: RunConfig) -> int:
    """Norms of T^n f, the P_k profile in H^p and the remainders r_m."""
    params = config.parameters
    iterations = validate_non_negative_int(params["iterations"], "iterations")
    remainder_max = validate_non_negative_int(params["remainder_max"], "remainder_max")
    p = validate_exponent_p(params["p"])
    f = _input_function(config)
    product = config.product

    iterates = toeplitz.iterate_T(product, f, iterations)
    norms = pd.DataFrame(
        {
            ReportSchema.N: np.arange(len(iterates)),
            ReportSchema.NORM: [g.norm(2) for g in iterates],
        }
    )
    profile = toeplitz.projection_norm_profile(product, f, iterations, p)

    decomposition = toeplitz.decompose(product, f)
    remainders = [
        toeplitz.remainder_consistency(product, f, m, decomposition).to_dict()
        for m in range(remainder_max + 1)
    ]

    result = {
        "iterate_norms": norms[ReportSchema.NORM].tolist(),
        "projection_profile": profile[ReportSchema.PROJECTION_RATIO].tolist(),
        "p": p,
        "remainders": remainders,
    }
    _write_report(config, result)
    write_csv(norms, _report_path(config, "norms.csv"))
    write_csv(profile, _report_path(config, "projection_profile.csv"))
    return int(ExitCodes.SUCCESS)


def cmd_cyclicity(config: RunConfig) -> int:
    """Decide cyclicity. The verdict is a report field; the exit code stays 0."""
    params = config.parameters
    spec = config.spec
    mode = WitnessModes(params["witness_mode"])
    oracle_iterations = validate_non_negative_int(params["oracle_iterations"], "oracle_iterations")

    report = cyclicity.decide(spec, validate_exponent_p(params["p"]), oracle_iterations)
    result = report.to_dict()
    if config.fixture is not None:
        result["fixture"] = config.fixture
    if mode == WitnessModes.EXHAUSTIVE:
        witness = cyclicity.determinant_witness(spec, 0, mode)
        result["exhaustive_witness"] = witness.to_dict() if witness else None

    span = cyclicity.iterate_span_defect(spec)
    result["iterate_span_defect"] = span[ReportSchema.DEFECT].tolist()
    result["reducing_subspace"] = cyclicity.reducing_subspace_defect(
        spec, seed=config.seed
    ).to_dict()

    _write_report(config, result)
    write_csv(report.distances_frame(), _report_path(config, "distances.csv"))
    if report.krylov is not None:
        write_csv(report.krylov.history, _report_path(config, "krylov_history.csv"))
    logger.info(f"Verdict: {report.verdict}")
    return int(ExitCodes.SUCCESS)


def cmd_lacunary_check(config: RunConfig) -> int:
    """Hypotheses, L4 bounds, the phi_q ratio and the divergence diagnostics."""
    params = config.parameters
    spec = config.spec
    p = validate_exponent_p(params["p"], minimum=2.0)
    min_ratio = validate_real(params["min_ratio"], "min_ratio", 1.0)
    gamma = validate_real(params["gamma"], "gamma", 1.0)
    hypotheses = lacunary.check_hypotheses(spec, p, min_ratio)
    result = {"spec": spec.to_dict(), "hypotheses": hypotheses.to_dict()}
    result["l4_l1"] = lacunary.l4_l1_equivalence_check(spec).to_dict()

    f = lacunary.build(spec)
    result["phi_q_ratio"] = lacunary.phi_q_ratio(spec.product, f, p)

    weights = hypotheses.norms ** hypotheses.q
    positive = weights[weights > 0]
    result["series"] = (
        lacunary.series_diagnostics(positive, gamma).to_dict()
        if positive.size >= 2
        else None
    )

    _write_report(config, result)
    write_csv(hypotheses.frame(spec.exponents), _report_path(config, "norms.csv"))
    return int(ExitCodes.SUCCESS)


def cmd_invariant_suite(config: RunConfig) -> int:
    """Run the seeded battery; exit 1 when any invariant fails."""
    suite = run_invariant_suite(config.seed, config.parameters["battery_size"], config.policy)
    _write_report(config, suite.to_dict())
    write_csv(suite.frame(), _report_path(config, "summary.csv"))
    if suite.vacuous:
        logger.warning("Vacuous suite: zero checks were run")
    if not suite.all_passed:
        failed = [r.invariant for r in suite.results if not r.passed]
        logger.error(f"Failed invariants: {failed}")
        return int(ExitCodes.INVARIANT_FAILURE)
    return int(ExitCodes.SUCCESS)


def cmd_kernel_growth(config: RunConfig) -> int:
    """H^1 norms of the Szego kernel at r = 1 - 2^-k."""
    params = config.parameters
    radii = params["radii"]
    if radii is None:
        k_min = validate_non_negative_int(params["k_min"], "k_min")
        k_max = validate_non_negative_int(params["k_max"], "k_max")
        radii = [1 - 2.0**-k for k in range(k_min, k_max + 1)]
    table = toeplitz.h1_kernel_growth_witness(radii, config.policy)

    result = {
        "table": table.to_dict(orient="records"),
        "strictly_increasing": bool(np.all(np.diff(table[ReportSchema.H1_NORM]) > 0)),
    }
    _write_report(config, result)
    write_csv(table, _report_path(config, "table.csv"))
    return int(ExitCodes.SUCCESS)


COMMANDS = {
    ValidSubcommands.DECOMPOSE: cmd_decompose,
    ValidSubcommands.ITERATE: cmd_iterate,
    ValidSubcommands.CYCLICITY: cmd_cyclicity,
    ValidSubcommands.LACUNARY_CHECK: cmd_lacunary_check,
    ValidSubcommands.INVARIANT_SUITE: cmd_invariant_suite,
    ValidSubcommands.KERNEL_GROWTH: cmd_kernel_growth,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON run configuration.")
    common.add_argument("--out", type=Path, default=None, help="Folder for the reports.")
    common.add_argument("--seed", type=int, default=None, help="Unsigned 64-bit seed.")
    common.add_argument(
        "--policy",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Numeric policy override, e.g. N=512. May be repeated.",
    )

    parser = argparse.ArgumentParser(
        prog="blaschke-cyclicity",
        description="Decompositions and cyclicity for the co-analytic Toeplitz operator of a finite Blaschke product.",
    )
    parser.add_argument("--version", action="version", version=f"v{__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for subcommand, command in COMMANDS.items():
        subparsers.add_parser(str(subcommand), parents=[common], help=command.__doc__)
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Entry point of the `blaschke-cyclicity` script.

    Returns:
        int: 0 on success, 1 on an invariant failure, 2 on a configuration
        error and 3 on a numerical inconsistency.
    """
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(args.config, args.subcommand, args.policy, args.seed, args.out)
        return COMMANDS[config.subcommand](config)
    except NumericalInconsistencyError as error:
        print(f"Numerical inconsistency: {error}", file=sys.stderr)
        return int(ExitCodes.NUMERICAL_INCONSISTENCY)
    except (ValueError, OSError) as error:
        print(f"Configuration error: {error}", file=sys.stderr)
        return int(ExitCodes.CONFIG_ERROR)


if __name__ == "__main__":
    sys.exit(main())
