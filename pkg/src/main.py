import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Optional

BASE_DIR = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(BASE_DIR))

from src.config.config import CONFIGS, ExperimentConfig, parse_experiment, preset_path
from src.core.fields import BallPolicy, ball_family, read_field, write_field
from src.core.growth import (
    PAIRING_KINDS,
    check_decay_integral,
    check_pairing,
    check_rho_admissible,
    classify_growth,
    growth_from_dict,
)
from src.core.norms import campanato_norm, om_norm
from src.core.operators import OPERATORS, apply_operator, kernel_from_dict
from src.core.quadrature import NonConvergenceError
from src.core.young import check_delta2, check_nabla2, complementary, young_from_dict
from src.harness.catalog import catalog_entries
from src.harness.engine import (
    EXIT_FAILED,
    EXIT_INVALID,
    EXIT_NUMERICAL,
    EXIT_OK,
    exit_code,
    run_experiment,
    run_property,
)
from src.utils.serialization import dumps, read_json

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def load_spec(value: Optional[str]) -> Optional[Dict[str, Any]]:
    """A JSON object given inline or as a path to a JSON file."""
    if value is None:
        return None
    path = Path(value)
    if path.suffix == ".json" or path.exists():
        return read_json(path)
    try:
        return json.loads(value)
    except json.JSONDecodeError as e:
        raise ValueError(f"Not a JSON object or file: {value!r}") from e


def resolve_config(value: str) -> ExperimentConfig:
    """Experiment config from a file path or the name of a shipped preset."""
    path = Path(value)
    if not path.exists():
        path = preset_path(value)
    return CONFIGS.load(str(path))


def emit(value: Any) -> None:
    print(dumps(value))


def _report_code(holds: bool) -> int:
    return EXIT_OK if holds else EXIT_FAILED


def cmd_check_young(args: argparse.Namespace) -> int:
    """Handle the check-young command."""
    phi = young_from_dict(load_spec(args.spec))
    reports = {"young": phi.to_dict()}
    if args.condition in ("delta2", "all"):
        reports["delta2"] = check_delta2(phi)
    if args.condition in ("nabla2", "all"):
        reports["nabla2"] = check_nabla2(phi)
    if args.condition in ("complementary", "all"):
        reports["complementary"] = complementary(phi).to_dict()
    emit(reports)
    if args.condition in ("delta2", "nabla2"):
        return _report_code(reports[args.condition].holds)
    return EXIT_OK


def cmd_check_growth(args: argparse.Namespace) -> int:
    """Handle the check-growth command."""
    g = growth_from_dict(load_spec(args.spec))
    if args.check == "classify":
        emit(classify_growth(g, args.n))
        return EXIT_OK
    if args.check == "decay":
        report = check_decay_integral(g)
        emit(report)
        return _report_code(report.holds)
    reports = check_rho_admissible(g, args.n, args.eps)
    emit(reports)
    return _report_code(all(r.holds for r in reports.values()))


def cmd_check_pairing(args: argparse.Namespace) -> int:
    """Handle the check-pairing command."""
    young = {k: young_from_dict(load_spec(v)) for k, v in (("Theta", args.Theta), ("Phi0", args.Phi0)) if v}
    growth = {
        k: growth_from_dict(load_spec(v))
        for k, v in (("vp", args.vp), ("psi", args.psi_g), ("theta_g", args.theta_g), ("rho", args.rho))
        if v
    }
    report = check_pairing(
        args.kind,
        young_from_dict(load_spec(args.phi)),
        young_from_dict(load_spec(args.psi)) if args.psi else None,
        aux=young,
        **growth,
    )
    emit(report)
    return _report_code(report.holds)


def cmd_norm(args: argparse.Namespace) -> int:
    """Handle the norm command."""
    f = read_field(args.field)
    phi = young_from_dict(load_spec(args.phi))
    vp = growth_from_dict(load_spec(args.vp))
    balls = ball_family(f.window, BallPolicy(args.stride, args.max_radius))
    norm = om_norm if args.kind == "om" else campanato_norm
    emit(norm(f, phi, vp, balls))
    return EXIT_OK


def cmd_apply(args: argparse.Namespace) -> int:
    """Handle the apply command."""
    f = read_field(args.field)
    rho = growth_from_dict(load_spec(args.rho)) if args.rho else None
    kernel = kernel_from_dict(load_spec(args.kernel)) if args.kernel else None
    b = read_field(args.b) if args.b else None
    balls = ball_family(f.window, BallPolicy(args.stride)) if args.op in ("M", "Mrho", "Msharp") else None
    output = apply_operator(args.op, f, balls=balls, rho=rho, kernel=kernel, b=b, depth=args.depth, c=args.c)
    write_field(args.out, output.field)
    logger.info("Wrote %s output to %s (%s)", args.op, args.out, output.truncation_note)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Handle the verify command."""
    if args.config:
        config = resolve_config(args.config)
    else:
        config = parse_experiment({"name": args.property, "properties": [args.property]})
    config = replace(config, properties=[args.property])
    if args.seed is not None:
        config = config.with_seed(args.seed)
    report = run_property(args.property, config, levels=args.levels)
    emit(report)
    return exit_code([report])


def cmd_experiment(args: argparse.Namespace) -> int:
    """Handle the experiment command."""
    config = resolve_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    reports = run_experiment(config, args.out)
    for report in reports:
        print(f"{report.name:<20} {report.verdict:<9} {report.worst_ratio:.6g}")
    return exit_code(reports)


def cmd_list_properties(args: argparse.Namespace) -> int:
    """Handle the list-properties command."""
    for name, description in catalog_entries():
        print(f"{name:<20} {description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Orlicz-Morrey calculus lab")
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose logging",
    )
    parser.add_argument("--seed", type=int, default=None, help="Override the bank seed")

    subparsers = parser.add_subparsers(dest="command", required=True)

    young_parser = subparsers.add_parser("check-young", help="Check Δ₂/∇₂ of a Young function")
    young_parser.add_argument("spec", help="Young function JSON (inline or file)")
    young_parser.add_argument(
        "--condition",
        choices=["delta2", "nabla2", "complementary", "all"],
        default="all",
        help="Condition to check (default: all)",
    )

    growth_parser = subparsers.add_parser("check-growth", help="Classify or check a growth function")
    growth_parser.add_argument("spec", help="Growth function JSON (inline or file)")
    growth_parser.add_argument("--n", type=int, default=1, help="Dimension (default: 1)")
    growth_parser.add_argument(
        "--check",
        choices=["classify", "decay", "rho"],
        default="classify",
        help="classify, the decay integral, or ρ admissibility (default: classify)",
    )
    growth_parser.add_argument("--eps", type=float, default=0.1, help="ε of the ρ continuity condition")

    pairing_parser = subparsers.add_parser("check-pairing", help="Check a pairing hypothesis")
    pairing_parser.add_argument("kind", choices=PAIRING_KINDS)
    pairing_parser.add_argument("--phi", required=True, help="Φ JSON")
    pairing_parser.add_argument("--psi", help="Ψ JSON")
    pairing_parser.add_argument("--Theta", help="Θ JSON")
    pairing_parser.add_argument("--Phi0", help="Φ₀ JSON")
    pairing_parser.add_argument("--vp", help="φ JSON")
    pairing_parser.add_argument("--psi-g", dest="psi_g", help="ψ JSON")
    pairing_parser.add_argument("--theta-g", dest="theta_g", help="θ JSON")
    pairing_parser.add_argument("--rho", help="ρ JSON")

    norm_parser = subparsers.add_parser("norm", help="Orlicz-Morrey or Campanato norm of a field file")
    norm_parser.add_argument("field", help="Field file (.bin or .csv)")
    norm_parser.add_argument("--phi", required=True, help="Φ JSON")
    norm_parser.add_argument("--vp", required=True, help="φ JSON")
    norm_parser.add_argument("--kind", choices=["om", "campanato"], default="om")
    norm_parser.add_argument("--stride", type=int, default=1, help="Ball center stride (default: 1)")
    norm_parser.add_argument("--max-radius", dest="max_radius", type=float, default=None)

    apply_parser = subparsers.add_parser("apply", help="Apply an operator to a field file")
    apply_parser.add_argument("field", help="Field file (.bin or .csv)")
    apply_parser.add_argument("--op", required=True, choices=OPERATORS)
    apply_parser.add_argument("--out", required=True, help="Output field file")
    apply_parser.add_argument("--rho", help="ρ JSON")
    apply_parser.add_argument("--kernel", help="Kernel JSON")
    apply_parser.add_argument("--b", help="Field file of b for commutators")
    apply_parser.add_argument("--depth", type=int, default=None, help="Dyadic depth")
    apply_parser.add_argument("--c", type=float, default=1.0, help="Factor for op=scale")
    apply_parser.add_argument("--stride", type=int, default=1, help="Ball center stride (default: 1)")

    verify_parser = subparsers.add_parser("verify", help="Run one catalog property")
    verify_parser.add_argument("property", help="Property name (see list-properties)")
    verify_parser.add_argument("--config", help="Experiment config path or preset name")
    verify_parser.add_argument("--levels", type=int, nargs="+", default=None, help="Refinement levels")

    experiment_parser = subparsers.add_parser("experiment", help="Run an experiment config")
    experiment_parser.add_argument("config", help="Experiment config path or preset name")
    experiment_parser.add_argument("--out", default="results", help="Report directory (default: results)")

    subparsers.add_parser("list-properties", help="Print the property catalog")
    return parser


COMMANDS = {
    "check-young": cmd_check_young,
    "check-growth": cmd_check_growth,
    "check-pairing": cmd_check_pairing,
    "norm": cmd_norm,
    "apply": cmd_apply,
    "verify": cmd_verify,
    "experiment": cmd_experiment,
    "list-properties": cmd_list_properties,
}


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)

    try:
        return COMMANDS[args.command](args)
    except NonConvergenceError as e:
        logger.exception("Numerical non-convergence: %s", e)
        return EXIT_NUMERICAL
    except (ValueError, FileNotFoundError, KeyError) as e:
        logger.exception("Invalid input: %s", e)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
