"""annulus-split command line: synthesize, check, decompose and omega geometry commands.

Exit codes: 0 pass, 1 mathematical rejection, 2 I/O or format error, 3 internal error.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any

import numpy as np
from dotenv import load_dotenv

from .annulus_core import C2Point, CircleSpec, Side, sample
from .config import RunConfig, load_config, parse_grid, resolve_log_dir
from .decompose import split, verify_extensions
from .errors import EXIT_INTERNAL, EXIT_OK, EXIT_REJECTED, ZeroMeanRejected, exit_code_for
from .io_formats import (
    coefficients_to_dict,
    load_coefficients,
    load_sampled,
    membership_to_dict,
    parse_complex,
    plain_json,
    render_csv,
    report_to_dict,
    save_coefficients,
    save_decomposition,
    save_sampled,
    write_csv,
)
from .lambda_domains import (
    LambdaSpec,
    boundary_approach_path,
    classify_points,
    eval_Psi,
    lambda_intersect_plus_minus,
    lambda_intersect_plus_plus,
    omega_membership,
)
from .validation import brute_force_lambda_intersection, mixed_c2_points
from .zero_mean import ZeroMeanReport, check_zero_means, random_zero_mean, synthesize

logger = logging.getLogger(__name__)

LOG_FILE = "annulus_split.log"


def setup_logging(log_dir: str) -> logging.Logger:
    os.makedirs(log_dir, exist_ok=True)
    log_path = os.path.join(log_dir, LOG_FILE)

    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        handlers=[logging.FileHandler(log_path), logging.StreamHandler()],
    )
    return logging.getLogger(__name__)


def _emit(payload: Any) -> None:
    print(json.dumps(plain_json(payload), indent=2))


def _stem_sibling(path: str, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}.{suffix}.json")


def _report_table(report: ZeroMeanReport) -> str:
    lines = [f"{'n':>4}  {'residual':>12}  ok", f"{0:>4}  {report.c0_norm:>12.3e}  {report.c0_norm <= report.tol}"]
    for n, value in sorted(report.residuals.items()):
        lines.append(f"{n:>4}  {value:>12.3e}  {value <= report.tol}")
    lines.append(f"verdict={report.verdict} tol={report.tol:.1e} tail_mass={report.tail_mass:.3e}")
    return "\n".join(lines)


def cmd_synthesize(config: RunConfig, args: argparse.Namespace) -> int:
    out = config.require("output_path")
    if args.random is not None:
        coeffs = random_zero_mean(args.random, config.n_max, args.decay, config.annulus)
    else:
        coeffs = load_coefficients(config.require("input_path"))
    sampled = sample(synthesize(coeffs), config.make_grid())
    save_sampled(out, sampled)
    save_coefficients(args.coeffs_out or _stem_sibling(out, "coeffs"), coeffs)
    _emit(coefficients_to_dict(coeffs))
    return EXIT_OK


def cmd_check(config: RunConfig, args: argparse.Namespace) -> int:
    f = load_sampled(config.require("input_path"))
    report = check_zero_means(f, config.n_max, config.tolerances.zero_mean_tol)
    print(_report_table(report))
    payload = report_to_dict(report)
    if config.output_path:
        Path(config.output_path).write_text(json.dumps(plain_json(payload), indent=2) + "\n")
    _emit(payload)
    return EXIT_OK if report.verdict else EXIT_REJECTED


def cmd_decompose(config: RunConfig, args: argparse.Namespace) -> int:
    f = load_sampled(config.require("input_path"))
    try:
        decomposition = split(f, config.n_max, config.tolerances.zero_mean_tol, hoelder=args.hoelder)
    except ZeroMeanRejected as e:
        print(_report_table(e.report))
        raise

    status = EXIT_OK
    if args.verify:
        worst_plus, worst_minus = verify_extensions(decomposition, f.grid.annulus, args.verify, config.seed)
        decomposition.diagnostics["extension"] = {"circles": args.verify, "plus": worst_plus, "minus": worst_minus}
        print(f"extension sweep over {args.verify} circles: plus={worst_plus:.3e} minus={worst_minus:.3e}")
        if max(worst_plus, worst_minus) > config.tolerances.extension_tol:
            status = EXIT_REJECTED

    if config.output_path:
        save_decomposition(config.output_path, decomposition.coeffs, decomposition.diagnostics)
        if args.write_parts:
            save_sampled(_stem_sibling(config.output_path, "plus"), sample(decomposition.plus, f.grid))
            save_sampled(_stem_sibling(config.output_path, "minus"), sample(decomposition.minus, f.grid))
    elif args.write_parts:
        logger.warning("--write-parts needs --out; parts not written")
    _emit({"coeffs": coefficients_to_dict(decomposition.coeffs), "diagnostics": decomposition.diagnostics})
    return status


def _cmd_member(config: RunConfig, args: argparse.Namespace) -> int:
    p = C2Point(parse_complex(args.z), parse_complex(args.w))
    membership = omega_membership(p, config.annulus, config.tolerances.solver_tol)
    _emit(membership_to_dict(p, membership))
    return EXIT_OK


def _circle_arg(values: list[str]) -> CircleSpec:
    center, radius = values
    return CircleSpec(parse_complex(center), float(radius))


def _cmd_intersect(config: RunConfig, args: argparse.Namespace) -> int:
    c1, c2 = _circle_arg(args.c1), _circle_arg(args.c2)
    if args.kind == "pp":
        predicate = lambda_intersect_plus_plus(c1, c2)
        second = LambdaSpec(c2, Side.PLUS)
    else:
        predicate = lambda_intersect_plus_minus(c1, c2)
        second = LambdaSpec(c2, Side.MINUS)
    oracle = brute_force_lambda_intersection(LambdaSpec(c1, Side.PLUS), second, seed=config.seed)
    _emit({"kind": args.kind, "predicate": predicate, "oracle": oracle, "agree": predicate == oracle})
    return EXIT_OK


def _cmd_psi(config: RunConfig, args: argparse.Namespace) -> int:
    coeffs = load_coefficients(config.require("input_path"))
    z0 = parse_complex(args.z0)
    f_z0 = synthesize(coeffs)(z0)
    rows = []
    for step in boundary_approach_path(z0, config.annulus):
        rows.append({"distance": step.distance, "s": step.s, "abs_error": abs(eval_Psi(coeffs, step.point) - f_z0)})
    fields = ["distance", "s", "abs_error"]
    if config.output_path:
        write_csv(config.output_path, "psi_approach", fields, rows)
    else:
        sys.stdout.write(render_csv("psi_approach", fields, rows))
    return EXIT_OK


def _cmd_cloud(config: RunConfig, args: argparse.Namespace) -> int:
    rng = np.random.default_rng(config.seed)
    z, w = mixed_c2_points(rng, config.annulus, args.n)
    memberships = classify_points(z, w, config.annulus, config.tolerances.solver_tol)
    rows = [
        {"z_re": zi.real, "z_im": zi.imag, "w_re": wi.real, "w_im": wi.imag, "region": m.region.value}
        for zi, wi, m in zip(z, w, memberships)
    ]
    fields = ["z_re", "z_im", "w_re", "w_im", "region"]
    if config.output_path:
        write_csv(config.output_path, "omega_cloud", fields, rows)
    else:
        sys.stdout.write(render_csv("omega_cloud", fields, rows))
    return EXIT_OK


OMEGA_COMMANDS = {"member": _cmd_member, "intersect": _cmd_intersect, "psi": _cmd_psi, "cloud": _cmd_cloud}


def cmd_omega(config: RunConfig, args: argparse.Namespace) -> int:
    return OMEGA_COMMANDS[args.omega_command](config, args)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON run configuration.")
    common.add_argument("--out", type=str, default=None, help="Output file.")
    common.add_argument("--seed", type=int, default=None, help="Seed for random draws.")
    common.add_argument("--nmax", type=int, default=None, help="Truncation order of the fit.")
    common.add_argument("--tol", type=float, default=None, help="Zero-mean verdict tolerance.")
    common.add_argument("--grid", type=str, default=None, help="Grid as NRxNTHETA, e.g. 33x256.")
    common.add_argument("--layout", choices=["uniform", "cheb", "chebyshev"], default=None, help="Radial node layout.")
    common.add_argument("--r1", type=float, default=None, help="Inner radius of the annulus.")
    common.add_argument("--r2", type=float, default=None, help="Outer radius of the annulus.")
    common.add_argument("--log-dir", type=str, default=None, help="Log directory (default: $ANNULUS_SPLIT_LOG_DIR, else logs).")

    parser = argparse.ArgumentParser(prog="annulus-split", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", parents=[common], help="Sample a zero-mean series on a grid.")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--coeffs", type=str, default=None, help="Coefficient JSON file.")
    source.add_argument("--random", type=int, default=None, help="Draw seeded random coefficients.")
    p.add_argument("--decay", type=float, default=0.5, help="Decay rate of random coefficients.")
    p.add_argument("--coeffs-out", type=str, default=None, help="Where to echo the coefficients used.")
    p.set_defaults(handler=cmd_synthesize)

    p = sub.add_parser("check", parents=[common], help="Test a sampled function for zero circle means.")
    p.add_argument("input", help="Sampled function JSON.")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("decompose", parents=[common], help="Split a zero-mean function into f+ and f-.")
    p.add_argument("input", help="Sampled function JSON.")
    p.add_argument("--verify", type=int, default=0, help="Extension sweep over N random admissible circles.")
    p.add_argument("--write-parts", action="store_true", help="Also write sampled f+ and f- next to --out.")
    p.add_argument("--hoelder", action="store_true", help="Add Hoelder exponent estimates of f, f+ and f-.")
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("omega", help="Geometry of the Omega domains.")
    omega = p.add_subparsers(dest="omega_command", required=True)
    q = omega.add_parser("member", parents=[common], help="Classify a point of C^2.")
    q.add_argument("--z", required=True)
    q.add_argument("--w", required=True)
    q = omega.add_parser("intersect", parents=[common], help="Intersection predicate and numeric search.")
    q.add_argument("--c1", nargs=2, metavar=("CENTER", "RADIUS"), required=True)
    q.add_argument("--c2", nargs=2, metavar=("CENTER", "RADIUS"), required=True)
    q.add_argument("--kind", choices=["pp", "pm"], default="pp")
    q = omega.add_parser("psi", parents=[common], help="Psi along a path toward (z0, conj z0).")
    q.add_argument("--coeffs", required=True, help="Coefficient or decomposition JSON.")
    q.add_argument("--z0", required=True)
    q = omega.add_parser("cloud", parents=[common], help="Point cloud CSV with regions.")
    q.add_argument("--n", type=int, default=3000)
    p.set_defaults(handler=cmd_omega)
    return parser


def _config_from(args: argparse.Namespace) -> RunConfig:
    overrides: dict[str, Any] = {
        "r1": args.r1,
        "r2": args.r2,
        "seed": args.seed,
        "n_max": args.nmax,
        "tolerances.zero_mean_tol": args.tol,
        "grid.layout": args.layout,
        "output_path": args.out,
        "input_path": getattr(args, "input", None) or getattr(args, "coeffs", None),
    }
    if args.grid:
        overrides["grid.n_r"], overrides["grid.n_theta"] = parse_grid(args.grid)
    return load_config(args.config, overrides)


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    setup_logging(resolve_log_dir(args.log_dir))

    try:
        config = _config_from(args)
        code = args.handler(config, args)
    except Exception as e:
        code = exit_code_for(e)
        if code == EXIT_INTERNAL:
            logger.exception("internal error: %s", e)
        else:
            logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
    logger.info("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
