"""
Harmonic CLI — Command-line Front End for the Harmonic Toolkit

Usage:
    python -m cli.harmonic_cli sphfn --space h3 --lambda 2 --t 1.5
    python -m cli.harmonic_cli heat --space h3 --time 1 --r-max 10
    python -m cli.harmonic_cli mass --space h3 --time 1
    python -m cli.harmonic_cli beurling --space h3 --profile heat:1 --d 8
    python -m cli.harmonic_cli verdict hardy --space h3 --a 0.25 --b 1
    python -m cli.harmonic_cli sharpness --zeta 0.1 --c 0.9 --d 8
    python -m cli.harmonic_cli selftest --suite quick

Tables go to stdout (or --output) as CSV, reports as JSON; progress and
warnings go to stderr. Exit codes: 0 success, 1 numerical failure,
2 usage error, 3 selftest failure.
"""

import sys
import math
import logging
import argparse

import numpy as np
import pandas as pd
from dotenv import load_dotenv

from common.errors import (
    CalibrationError,
    ConfigError,
    InconsistentPairError,
    KTypeError,
    PoleError,
    ProfileError,
    SpaceError,
    SpecialFunctionError,
    TruncationError,
)
from space.symmetric_space import model_space
from specfun.spherical_functions import plancherel_density, spherical_function
from transforms.profiles import RadialProfile, SpectralProfile, clean_tabulation
from transforms.quadrature import default_quadrature
from transforms.spherical_transform import abel_transform, spherical_transform
from heat.heat_kernel import heat_kernel_values, total_mass
from uncertainty.beurling_functional import BeurlingConfig, beurling_functional, demange_pair
from uncertainty.sharpness import check_sharpness_bounds, sharpness_construct, sharpness_verify
from uncertainty import verdicts
from cli.report_writer import RunConfig, build_report, load_run_config, write_report_json, write_table_csv
from cli.selftest import SUITES, run_selftest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2
EXIT_SELFTEST = 3

NUMERICAL_ERRORS = (TruncationError, CalibrationError, SpecialFunctionError, PoleError, InconsistentPairError)
USAGE_ERRORS = (ConfigError, SpaceError, KTypeError, ProfileError, ValueError)

HEAT_METHOD_NAMES = {"closed": "closed_form", "quad": "quadrature"}


# -------------------------------------------------------------------
# 1. Argument helpers
# -------------------------------------------------------------------

def _float_list(raw: str) -> tuple:
    try:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {raw!r}")


def _extended_float(raw: str) -> float:
    """Float that also accepts 'inf' for an infinite exponent."""
    try:
        return float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or inf, got {raw!r}")


def parse_profile(spec: str, space, quad) -> tuple:
    """
    Resolve a --profile value into a (RadialProfile, SpectralProfile) pair.

    Accepted forms: heat:T, gaussian:A, zero, table:PATH (CSV with grid,value).
    """
    kind, _, arg = spec.partition(":")
    if kind == "zero" and not arg:
        return RadialProfile.zero(), SpectralProfile.zero()
    if kind in ("heat", "gaussian"):
        try:
            param = float(arg)
        except ValueError:
            raise ConfigError(f"Profile {spec!r} needs a numeric parameter")
        if not param > 0:
            raise ConfigError(f"Profile {spec!r} needs a positive parameter")
        if kind == "heat":
            return RadialProfile.heat(param), SpectralProfile.heat_spectral(param)
        f = RadialProfile.gaussian(param)
        return f, spherical_transform(space, f, quad)
    if kind == "table" and arg:
        try:
            raw = pd.read_csv(arg, comment="#")
        except (OSError, pd.errors.ParserError) as e:
            raise ConfigError(f"Cannot read profile table {arg}: {e}")
        frame = clean_tabulation(raw)
        f = RadialProfile.tabulated(frame["grid"].to_numpy(), frame["value"].to_numpy())
        return f, spherical_transform(space, f, quad)
    raise ConfigError(f"Unknown profile {spec!r}; use heat:T, gaussian:A, zero or table:PATH")


def _grid(end: float, points: int, start: float = 0.0) -> np.ndarray:
    if points < 2:
        raise ConfigError(f"--points must be at least 2, got {points}")
    return np.linspace(start, end, points)


# -------------------------------------------------------------------
# 2. Commands
# -------------------------------------------------------------------

def cmd_sphfn(args, ctx):
    """φ_λ(t) at one radius or on [0, t_end]."""
    space = model_space(ctx["space"])
    if args.t is not None:
        grid = np.array([args.t])
    elif args.t_end is not None:
        grid = _grid(args.t_end, args.points)
    else:
        raise ConfigError("sphfn needs --t or --t-end")
    lam = complex(args.lam, args.lam_im)
    values = np.atleast_1d(spherical_function(space, lam, grid))
    if args.lam_im == 0:
        values = values.real
    return {"space": space.name, "grid": grid, "values": values}


def cmd_plancherel(args, ctx):
    space = model_space(ctx["space"])
    grid = _grid(args.lambda_end, args.points)
    return {"space": space.name, "grid": grid, "values": np.atleast_1d(plancherel_density(space, grid))}


def cmd_heat(args, ctx):
    space = model_space(ctx["space"])
    grid = _grid(args.r_max, args.points)
    method = HEAT_METHOD_NAMES[args.method] if args.method else None
    return {"space": space.name, "grid": grid, "values": heat_kernel_values(space, args.time, grid, ctx["quad"], method)}


def cmd_abel(args, ctx):
    """𝒜f on [−s_max, s_max], using the profile's own spectrum when it has one."""
    space = model_space(ctx["space"])
    f, fhat = parse_profile(args.profile, space, ctx["quad"])
    if args.points < 4:
        raise ConfigError(f"abel needs --points of at least 4, got {args.points}")
    grid = _grid(args.s_max, args.points, start=-args.s_max)
    line = abel_transform(space, f, ctx["quad"], grid=grid, spectrum=fhat)
    return {"space": space.name, "grid": line.grid, "values": line.values}


def cmd_mass(args, ctx):
    space = model_space(ctx["space"])
    mass = total_mass(space, args.time, ctx["quad"])
    return {"space": space.name, "report": {"value": mass, "details": {"time": args.time}}}


def _ladder_entries(report) -> dict:
    entries = report.to_dict()
    return {
        "ladder": entries.pop("ladder"),
        "classification": entries.pop("classification"),
        "value": entries.pop("value"),
        "details": entries,
    }


def cmd_beurling(args, ctx):
    space = model_space(ctx["space"])
    f, fhat = parse_profile(args.profile, space, ctx["quad"])
    cfg = BeurlingConfig(d=args.d, c=args.c, eps=args.eps, ladder=args.ladder)
    report = beurling_functional(space, f, fhat, cfg, ctx["quad"])
    return {"space": space.name, "report": _ladder_entries(report),
            "grid": np.asarray(report.ladder), "values": np.asarray(report.partial_values)}


def cmd_demange(args, ctx):
    """Both cross conditions for a pair of functions on two spaces."""
    space1, space2 = model_space(args.space1), model_space(args.space2)
    f1, fhat1 = parse_profile(args.profile1, space1, ctx["quad"])
    f2, fhat2 = parse_profile(args.profile2, space2, ctx["quad"])
    cfg = BeurlingConfig(d=args.d, c=args.c, ladder=args.ladder)
    first, second = demange_pair(space1, f1, fhat1, space2, f2, fhat2, args.d, ctx["quad"], cfg)
    report = {
        "ladder": list(first.ladder),
        "classification": [first.classification, second.classification],
        "value": [first.stabilized_value, second.stabilized_value],
        "details": {"condition_1": first.to_dict(), "condition_2": second.to_dict()},
    }
    return {"space": f"{space1.name}|{space2.name}", "report": report}


def cmd_verdict(args, ctx):
    space = model_space(ctx["space"])
    if args.theorem == "hardy":
        verdict = verdicts.verdict_hardy(space, args.a, args.b)
    elif args.theorem == "morgan":
        verdict = verdicts.verdict_morgan(space, args.a, args.b, args.p, args.n)
    elif args.theorem == "gs":
        verdict = verdicts.verdict_gelfand_shilov(space, args.alpha, args.beta, args.p, args.N)
    elif args.theorem == "cp":
        verdict = verdicts.verdict_cowling_price(space, args.a, args.b, args.p1, args.p2, args.m, args.n)
    else:
        verdict = verdicts.verdict_beurling(space, args.d)
    entries = verdict.to_dict()
    report = {"verdict": entries.pop("verdict"), "cited_case": entries.pop("cited_case"), "details": entries}
    return {"space": space.name, "report": report}


def cmd_sharpness(args, ctx):
    """Build the ζ-pair on h3, run both envelope checks and the weighted ladder."""
    construction = sharpness_construct(args.zeta, args.poly, ctx["quad"])
    bounds = check_sharpness_bounds(construction, ctx["quad"])
    report = sharpness_verify(construction, args.c, args.eps, args.d, ctx["quad"], args.ladder)
    entries = _ladder_entries(report)
    entries["details"].update({
        "zeta": construction.zeta,
        "poly": list(construction.poly),
        "decay_exponent": construction.decay_exponent,
        "bound_checks": [check.to_dict() for check in bounds],
    })
    return {"space": "h3", "report": entries,
            "grid": np.asarray(report.ladder), "values": np.asarray(report.partial_values)}


def cmd_selftest(args, ctx):
    result = run_selftest(args.suite, ctx["quad"])
    report = {"value": result["status"], "details": result}
    return {"space": "registry", "report": report, "failed": result["status"] != "SUCCESS"}


# -------------------------------------------------------------------
# 3. Parser
# -------------------------------------------------------------------

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Flat JSON run configuration")
    common.add_argument("--format", choices=("csv", "json"), help="Output format")
    common.add_argument("--output", help="Write to this file instead of stdout")
    common.add_argument("--quad-panels", type=int, dest="panels_per_unit", help="Quadrature panels per unit length")
    common.add_argument("--quad-t-max", type=float, dest="t_max", help="Radial truncation")
    common.add_argument("--quad-lambda-max", type=float, dest="lambda_max", help="Spectral truncation floor")
    common.add_argument("--quad-abs-tol", type=float, dest="abs_tol")
    common.add_argument("--quad-rel-tol", type=float, dest="rel_tol")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="harmonic",
        description="Harmonic analysis on rank-one symmetric spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sphfn", parents=[common], help="Spherical function φ_λ(t)")
    p.add_argument("--space")
    p.add_argument("--lambda", type=float, dest="lam", required=True)
    p.add_argument("--lambda-im", type=float, dest="lam_im", default=0.0)
    p.add_argument("--t", type=float)
    p.add_argument("--t-end", type=float, dest="t_end", help="Tabulate on [0, t-end] instead of one radius")
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(handler=cmd_sphfn, default_format="csv")

    p = sub.add_parser("plancherel", parents=[common], help="Plancherel density μ(λ)")
    p.add_argument("--space")
    p.add_argument("--lambda-max", type=float, dest="lambda_end", required=True, help="Upper end of the λ grid")
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(handler=cmd_plancherel, default_format="csv")

    p = sub.add_parser("heat", parents=[common], help="Heat kernel h_t(r)")
    p.add_argument("--space")
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--r-max", type=float, dest="r_max", required=True)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--method", choices=sorted(HEAT_METHOD_NAMES))
    p.set_defaults(handler=cmd_heat, default_format="csv")

    p = sub.add_parser("abel", parents=[common], help="Abel transform of a profile")
    p.add_argument("--space")
    p.add_argument("--profile", required=True)
    p.add_argument("--s-max", type=float, dest="s_max", default=10.0)
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(handler=cmd_abel, default_format="csv")

    p = sub.add_parser("mass", parents=[common], help="Total mass of the heat kernel")
    p.add_argument("--space")
    p.add_argument("--time", type=float, required=True)
    p.set_defaults(handler=cmd_mass, default_format="json")

    p = sub.add_parser("beurling", parents=[common], help="Beurling functional ladder")
    p.add_argument("--space")
    p.add_argument("--profile", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--ladder", type=_float_list)
    p.set_defaults(handler=cmd_beurling, default_format="json")

    p = sub.add_parser("demange", parents=[common], help="Two-space cross conditions")
    p.add_argument("--space1", required=True)
    p.add_argument("--space2", required=True)
    p.add_argument("--profile1", required=True)
    p.add_argument("--profile2", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--ladder", type=_float_list)
    p.set_defaults(handler=cmd_demange, default_format="json")

    p = sub.add_parser("verdict", help="Uncertainty theorem case analysis")
    theorems = p.add_subparsers(dest="theorem", required=True)
    for name, params in (
        ("hardy", (("--a", float), ("--b", float))),
        ("morgan", (("--a", float), ("--b", float), ("--p", float), ("--n", int))),
        ("gs", (("--alpha", float), ("--beta", float), ("--p", float), ("--N", int))),
        ("cp", (("--a", float), ("--b", float), ("--p1", _extended_float), ("--p2", _extended_float),
                ("--m", int), ("--n", int))),
        ("beurling", (("--d", int),)),
    ):
        t = theorems.add_parser(name, parents=[common])
        t.add_argument("--space")
        for flag, kind in params:
            t.add_argument(flag, type=kind, required=True, dest=flag.lstrip("-"))
        t.set_defaults(handler=cmd_verdict, default_format="json")

    p = sub.add_parser("sharpness", parents=[common], help="Sharpness construction on h3")
    p.add_argument("--zeta", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--poly", type=_float_list, default=(1.0,), help="Coefficients of P in λ², constant first")
    p.add_argument("--ladder", type=_float_list)
    p.set_defaults(handler=cmd_sharpness, default_format="json")

    p = sub.add_parser("selftest", parents=[common], help="Run numerical acceptance checks")
    p.add_argument("--suite", choices=sorted(SUITES), default="quick")
    p.set_defaults(handler=cmd_selftest, default_format="json")

    return parser


# -------------------------------------------------------------------
# 4. Orchestration
# -------------------------------------------------------------------

_PLUMBING = {"handler", "default_format", "config", "format", "output", "verbose",
             "panels_per_unit", "t_max", "lambda_max", "abs_tol", "rel_tol", "space"}


def _run_config(args) -> RunConfig:
    """File values first, explicit flags on top."""
    base = load_run_config(args.config) if args.config else RunConfig()
    return base.merged(
        space=getattr(args, "space", None),
        panels_per_unit=args.panels_per_unit,
        t_max=args.t_max,
        lambda_max=args.lambda_max,
        abs_tol=args.abs_tol,
        rel_tol=args.rel_tol,
        output_format=args.format,
        output_path=args.output,
    )


def _command_config(args, run_config: RunConfig) -> dict:
    params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(args).items() if k not in _PLUMBING}
    params = {k: (str(v) if isinstance(v, float) and math.isinf(v) else v) for k, v in params.items()}
    return {"run": run_config.to_dict(), "params": params}


def _operation_name(args) -> str:
    return f"verdict:{args.theorem}" if args.command == "verdict" else args.command


def _emit(outcome: dict, operation: str, config: dict, fmt: str, path, stream):
    if fmt == "csv":
        if "grid" not in outcome:
            raise ConfigError(f"{operation} produces a report only; use --format json")
        write_table_csv(outcome["grid"], outcome["values"], outcome["space"], operation, config, path, stream)
        return
    entries = dict(outcome.get("report", {}))
    if "report" not in outcome:
        values = np.asarray(outcome["values"])
        entries["details"] = {
            "grid": outcome["grid"].tolist(),
            "values": values.real.tolist(),
        }
        if np.iscomplexobj(values):
            entries["details"]["values_im"] = values.imag.tolist()
    write_report_json(build_report(operation, config, **entries), path, stream)


def execute(args, stream) -> int:
    run_config = _run_config(args)
    quad = run_config.quadrature(default_quadrature())
    ctx = {"space": run_config.space, "quad": quad}
    operation = _operation_name(args)
    config = _command_config(args, run_config)

    logger.info(f"Running {operation} on {ctx['space']} (panels_per_unit={quad.panels_per_unit})")
    outcome = args.handler(args, ctx)
    fmt = run_config.output_format or args.default_format
    _emit(outcome, operation, config, fmt, run_config.output_path, stream)
    if outcome.get("failed"):
        logger.error(f"{operation}: selftest reported failures")
        return EXIT_SELFTEST
    return EXIT_OK


def run(argv=None, stdout=None) -> int:
    """Parse argv, run the command and map failures to exit codes."""
    stream = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        return execute(args, stream)
    except NUMERICAL_ERRORS as e:
        logger.error(f"Numerical failure: {type(e).__name__}: {e}")
        return EXIT_NUMERICAL
    except USAGE_ERRORS as e:
        logger.error(f"Usage error: {type(e).__name__}: {e}")
        return EXIT_USAGE


def main():
    load_dotenv()
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s [%(levelname)s] %(message)s",
        stream=sys.stderr,
    )
    sys.exit(run())


if __name__ == "__main__":
    main()
