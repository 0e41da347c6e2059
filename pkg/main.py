import argparse
import sys
from typing import Any, Dict, Optional

import pydantic

from asymptotics.connection import capture_params
from config.defaults import FIGURE_EPS, FIGURE_PHI0, FIGURE_THETA0, FIGURE_THETA1, POST_FIT_WINDOW, SEED_ABSCISSA
from config.parsers import merge_options, parse_choice, parse_config_file, parse_float
from config.settings import ConnectionVariant, RunConfig, default_ode_tolerances
from core.errors import CaptureLabError, ConfigError, OutOfDomain
from core.state import (
    ConstantVariantPost,
    MatchingRule,
    PainleveSeed,
    PhaseVariantPre,
    PreCaptureParams,
    RhoDenominator,
    Tolerances,
)
from utils.log_utils import configure_logging, logger

VALIDATION_EXIT = 2


def _required(options: Dict[str, Any], key: str) -> float:
    value = parse_float(options, key)
    if value is None:
        raise ConfigError(f"--{key.replace('_', '-')} is required (flag or config file)")
    return value


def _tolerances(options: Dict[str, Any]) -> Tolerances:
    tol = parse_float(options, "tol")
    if tol is None:
        return default_ode_tolerances()
    base = default_ode_tolerances()
    return Tolerances.uniform(tol, max_step=base.max_step, min_step=base.min_step)


def _connection_variant(options: Dict[str, Any],
                        matching: MatchingRule = MatchingRule.AVERAGED) -> ConnectionVariant:
    return ConnectionVariant(
        constant=ConstantVariantPost(parse_choice(options, "variant", [v.value for v in ConstantVariantPost],
                                                  ConstantVariantPost.THEOREM_TWO.value)),
        denominator=RhoDenominator(parse_choice(options, "denominator", [v.value for v in RhoDenominator],
                                                RhoDenominator.TWO.value)),
        matching=MatchingRule(parse_choice(options, "matching", [v.value for v in MatchingRule],
                                           matching.value)),
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(options: Dict[str, Any]) -> Dict[str, Any]:
    from harness.experiments import simulate
    from harness.io import write_trajectory_csv
    from pipeline.capture_node import detect_capture

    cfg = RunConfig(
        eps=_required(options, "eps"),
        theta0=_required(options, "theta0"),
        theta1=_required(options, "theta1"),
        initial=complex(_required(options, "phi_re"), parse_float(options, "phi_im", 0.0)),
        tolerances=_tolerances(options),
    )
    out = options.get("out") or "trajectory.csv"

    traj = simulate(cfg.eps, cfg.theta0, cfg.theta1, cfg.initial, cfg.tolerances)
    write_trajectory_csv(traj, out)

    theta_capture = detect_capture(traj) if cfg.theta1 >= -0.5 else None
    return {"out": out, "samples": traj.size, "theta_capture": theta_capture}


def cmd_portrait(options: Dict[str, Any]) -> Dict[str, Any]:
    from harness.figures import phase_portrait, write_portrait

    T = _required(options, "t")
    out = options.get("out") or f"portrait_T_{T:g}.csv"
    paths = write_portrait(phase_portrait(T), out, options.get("svg"))
    return {"files": paths}


def cmd_painleve(options: Dict[str, Any]) -> Dict[str, Any]:
    from asymptotics.painleve import integrate_painleve
    from harness.io import write_trajectory_csv

    seed = PainleveSeed(
        alpha_t=_required(options, "alpha"),
        phi_t=_required(options, "phi"),
        z0=parse_float(options, "z0", SEED_ABSCISSA),
    )
    z1 = _required(options, "z1")
    out = options.get("out") or "painleve.csv"
    traj = integrate_painleve(seed, z1)
    write_trajectory_csv(traj, out)
    return {"out": out, "samples": traj.size}


def cmd_connect(options: Dict[str, Any]) -> Dict[str, Any]:
    alpha, phi = _required(options, "alpha"), _required(options, "phi")
    eps = parse_float(options, "eps")
    # without eps the layer data are the pre-capture parameters themselves
    variant = _connection_variant(options, MatchingRule.AVERAGED if eps is not None else MatchingRule.IDENTITY)
    if variant.matching is MatchingRule.AVERAGED and eps is None:
        raise ConfigError("--matching averaged needs --eps")
    if alpha < 0.0:
        raise OutOfDomain(f"--alpha must be non-negative, got {alpha}")

    result = capture_params(PreCaptureParams(alpha10=alpha, phi10=phi), variant.constant,
                            denominator=variant.denominator, matching=variant.matching, eps=eps)
    payload: Dict[str, Any] = {"alpha": alpha, "phi": phi, "p_re": result.p.real, "p_im": result.p.imag,
                               "special": result.special, "variant": variant.label}
    if not result.special:
        payload.update({"rho2": result.rho2, "upsilon": result.upsilon,
                        "A00": result.A00, "phi00": result.phi00, "branch_j": result.branch_j})
    return payload


def cmd_match(options: Dict[str, Any]) -> Dict[str, Any]:
    from core.graph import run_scattering

    window = (parse_float(options, "fit_lo", POST_FIT_WINDOW[0]), parse_float(options, "fit_hi", POST_FIT_WINDOW[1]))
    cfg = RunConfig(
        eps=_required(options, "eps"),
        theta0=_required(options, "theta0"),
        theta1=_required(options, "theta1"),
        initial=PreCaptureParams(alpha10=_required(options, "alpha"), phi10=_required(options, "phi")),
        tolerances=_tolerances(options),
        pre_variant=PhaseVariantPre(parse_choice(options, "pre_variant", [v.value for v in PhaseVariantPre],
                                                 PhaseVariantPre.AVERAGED.value)),
        connection=_connection_variant(options),
        fit_window=window,
    )
    report = run_scattering(cfg)
    return report.to_json_dict()


def cmd_figures(options: Dict[str, Any]) -> Dict[str, Any]:
    from harness.figures import FIGURES, emit_figures

    which = parse_choice(options, "which", list(FIGURES))
    if which is None:
        raise ConfigError("--which is required")
    cfg = RunConfig(
        eps=parse_float(options, "eps", FIGURE_EPS),
        theta0=min(FIGURE_THETA0),
        theta1=parse_float(options, "theta1", FIGURE_THETA1),
        initial=complex(parse_float(options, "phi_re", FIGURE_PHI0.real),
                        parse_float(options, "phi_im", FIGURE_PHI0.imag)),
        tolerances=_tolerances(options),
    )
    return {"files": emit_figures(cfg, which, options.get("outdir") or "figures")}


def cmd_calibrate(options: Dict[str, Any]) -> Dict[str, Any]:
    from harness.experiments import calibrate

    return calibrate(export=options.get("export"))


VALIDATIONS = ("census", "conservation", "connection", "special", "decaying", "capture", "overlap")


def cmd_validate(options: Dict[str, Any]) -> Dict[str, Any]:
    from harness import experiments

    which = parse_choice(options, "which", list(VALIDATIONS) + ["all"], "all")
    selected = VALIDATIONS if which == "all" else (which,)

    results: Dict[str, Any] = {}
    for name in selected:
        logger.info(f"Validation: {name}")
        if name == "census":
            results[name] = experiments.census()
        elif name == "conservation":
            results[name] = experiments.conservation()
        elif name == "connection":
            results[name] = experiments.validate_connection()
        elif name == "special":
            results[name] = experiments.probe_special_phases()
        elif name == "decaying":
            results[name] = [experiments.decaying_check(k) for k in experiments.DECAYING_K]
        elif name == "capture":
            results[name] = experiments.figure2_check()
        elif name == "overlap":
            results[name] = experiments.overlap_error()
    return results


COMMANDS = {
    "simulate": cmd_simulate,
    "portrait": cmd_portrait,
    "painleve": cmd_painleve,
    "connect": cmd_connect,
    "match": cmd_match,
    "figures": cmd_figures,
    "calibrate": cmd_calibrate,
    "validate": cmd_validate,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="captureLab",
        description="Capture into parametric autoresonance: integration, asymptotics and connection formulas.",
    )
    parser.add_argument("--config", help="key=value file; flags override its values")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the primary equation")
    p.add_argument("--eps", type=float)
    p.add_argument("--theta0", type=float)
    p.add_argument("--theta1", type=float)
    p.add_argument("--phi-re", type=float)
    p.add_argument("--phi-im", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")

    p = sub.add_parser("portrait", help="level sets of H at a frozen time")
    p.add_argument("--T", dest="t", type=float)
    p.add_argument("--out")
    p.add_argument("--svg")

    p = sub.add_parser("painleve", help="integrate the layer equation from -inf data")
    p.add_argument("--alpha", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--z0", type=float)
    p.add_argument("--z1", type=float)
    p.add_argument("--out")

    p = sub.add_parser("connect", help="evaluate the connection formulas")
    p.add_argument("--alpha", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--variant", choices=[v.value for v in ConstantVariantPost])
    p.add_argument("--denominator", choices=[v.value for v in RhoDenominator])
    p.add_argument("--matching", choices=[v.value for v in MatchingRule])
    p.add_argument("--eps", type=float)

    p = sub.add_parser("match", help="end-to-end run: predicted against measured capture")
    p.add_argument("--eps", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--theta0", type=float)
    p.add_argument("--theta1", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--pre-variant", choices=[v.value for v in PhaseVariantPre])
    p.add_argument("--variant", choices=[v.value for v in ConstantVariantPost])
    p.add_argument("--denominator", choices=[v.value for v in RhoDenominator])
    p.add_argument("--matching", choices=[v.value for v in MatchingRule])
    p.add_argument("--fit-lo", type=float)
    p.add_argument("--fit-hi", type=float)

    p = sub.add_parser("figures", help="write figure data and SVGs")
    p.add_argument("--which", choices=["fig1", "fig2", "fig3"])
    p.add_argument("--outdir")
    p.add_argument("--eps", type=float)
    p.add_argument("--theta1", type=float)
    p.add_argument("--phi-re", type=float)
    p.add_argument("--phi-im", type=float)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("calibrate", help="resolve the formula variants from full runs")
    p.add_argument("--export", help="write the variant tracker JSON here")

    p = sub.add_parser("validate", help="run the numerical checks")
    p.add_argument("--which", choices=list(VALIDATIONS) + ["all"])

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    from harness.io import dumps

    args = build_parser().parse_args(argv)
    configure_logging("INFO" if args.verbose else None)

    flags = {k: v for k, v in vars(args).items() if k not in ("config", "verbose", "command")}
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        options = merge_options(flags, file_values)
        result = COMMANDS[args.command](options)
    except CaptureLabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except pydantic.ValidationError as e:
        print(f"error: invalid parameters: {e}", file=sys.stderr)
        return VALIDATION_EXIT

    print(dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
