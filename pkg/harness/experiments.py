"""
Experiments that put the asymptotic formulas against direct integration.

Each sweep runs its independent integrations through run_many, which uses a
process pool sized by CAPTURE_WORKERS and returns results in submission order.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from asymptotics.connection import compute_p, rho_upsilon, special_phases
from asymptotics.painleve import (
    branch_sign,
    classify_at_plus_infinity,
    decaying_amplitude,
    escape_abscissa,
    fit_minus_infinity,
    integrate_decaying,
    integrate_painleve,
)
from asymptotics.pre_capture import wkb_pre_curve, wkb_pre_eval
from config.defaults import (
    CAPTURE_FACTOR,
    EPS_ODE_TOL,
    FIGURE_EPS,
    FIGURE_PHI0,
    FIGURE_THETA0,
    FIGURE_THETA1,
    MAX_STEP,
    MIN_STEP,
    PLUS_FIT_WINDOW,
    PORTRAIT_BOX,
    PORTRAIT_TIMES,
    POST_FIT_WINDOW,
    SEED_ABSCISSA,
)
from config.settings import RunConfig, worker_count
from core.errors import CaptureLabError, ValidationError
from core.graph import run_scattering
from core.model import (
    equilibria,
    frozen_field,
    hamiltonian,
    hamiltonian_gradient,
    hamiltonian_hessian,
    primary_field,
)
from core.state import (
    ConstantVariantPost,
    EquilibriumKind,
    EquilibriumVariant,
    LayerOutcome,
    PainleveSeed,
    PhaseVariantPre,
    PreCaptureParams,
    RhoDenominator,
    Tolerances,
    Trajectory,
)
from pipeline.capture_node import detect_capture
from pipeline.variants import VariantTracker, angular_distance
from tools.integrator import integrate_adaptive
from utils.log_utils import logger


CONNECTION_ALPHAS = (0.2, 0.5, 0.8, 1.2)
CONNECTION_PHIS = (0.3, 1.3, 2.6, 4.0, 5.5)
SPECIAL_EXCLUSION = 0.1
RHO_REL_TOL = 0.02
UPSILON_TOL = 0.05

SPECIAL_ALPHAS = (0.3, 0.7)
SPECIAL_OFFSET = 0.3
SPECIAL_Z_END = 20.0
DECAYING_K = (0.1, -0.1)

CALIBRATION_ALPHAS = (0.5, 0.8)
CALIBRATION_PHIS = (1.0, 4.0)
CALIBRATION_EPS = (0.01, 0.005)
CALIBRATION_THETA0 = -3.0
CALIBRATION_THETA1 = 1.6

CONSERVATION_EPS = 0.1
CONSERVATION_SPAN = 50.0
CONSERVATION_TOL = 1e-10
CONSERVATION_POINTS = 5


def run_many(fn: Callable[..., Any], jobs: Sequence[tuple], workers: Optional[int] = None) -> List[Any]:
    """
    fn(*job) for every job; results in submission order.

    One worker runs serially in this process.
    """
    workers = workers or worker_count()
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]

    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
        futures = [ex.submit(fn, *job) for job in jobs]
        return [fut.result() for fut in futures]


def simulate(eps: float, theta0: float, theta1: float, phi0: complex,
             tol: Optional[Tolerances] = None) -> Trajectory:
    """Integrate the primary equation from phi(theta0) = phi0."""
    phi0 = complex(phi0)
    return integrate_adaptive(
        primary_field(eps),
        [phi0.real, phi0.imag],
        (theta0, theta1),
        tol or Tolerances.uniform(EPS_ODE_TOL, max_step=MAX_STEP, min_step=MIN_STEP),
        equation_id="primary",
        independent_var="theta",
        eps=eps,
    )


def final_branch(traj: Trajectory, width: float = 0.5) -> Optional[int]:
    """2 or 3 from the sign of mean Re phi over the last `width` of the run."""
    theta1 = float(traj.points.max())
    _, states = traj.window(theta1 - width, theta1)
    if states.shape[0] == 0:
        return None
    mean = float(np.mean(states[:, 0]))
    if mean == 0.0:
        return None
    return 2 if mean > 0.0 else 3


# ---------------------------------------------------------------------------
# Equilibrium census
# ---------------------------------------------------------------------------

def brute_force_critical_points(T: float, box: float = PORTRAIT_BOX, grid: int = 201,
                                newton_steps: int = 50) -> List[complex]:
    """
    Critical points of H from a grid scan followed by Newton iteration.

    Grid cells whose |grad H|^2 is a local minimum seed Newton's method on the
    gradient; converged points are deduplicated.
    """
    axis = np.linspace(-box, box, grid)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    modulus2 = re ** 2 + im ** 2
    ga = 2.0 * re * (1.0 + T - modulus2)
    gb = 2.0 * im * (T - 1.0 - modulus2)
    g2 = ga ** 2 + gb ** 2

    inner = g2[1:-1, 1:-1]
    is_min = np.ones_like(inner, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_min &= inner <= g2[1 + di:g2.shape[0] - 1 + di, 1 + dj:g2.shape[1] - 1 + dj]

    found: List[complex] = []
    for i, j in zip(*np.nonzero(is_min)):
        z = np.array([re[i + 1, j + 1], im[i + 1, j + 1]])
        for _ in range(newton_steps):
            phi = complex(z[0], z[1])
            grad = hamiltonian_gradient(T, phi)
            if np.linalg.norm(grad) < 1e-14:
                break
            try:
                z = z - np.linalg.solve(hamiltonian_hessian(T, phi), grad)
            except np.linalg.LinAlgError:
                break
        phi = complex(z[0], z[1])
        if np.linalg.norm(hamiltonian_gradient(T, phi)) > 1e-10:
            continue
        if all(abs(phi - other) > 1e-8 for other in found):
            found.append(phi)
    return found


def census(times: Iterable[float] = PORTRAIT_TIMES) -> Dict[float, Dict[str, Any]]:
    """
    Centers and saddles of the frozen system at each T, with the largest
    distance to the brute-force critical points.
    """
    results = {}
    for T in times:
        points = equilibria(T)
        oracle = brute_force_critical_points(T)
        error = max(
            (min(abs(e.location - o) for o in oracle) for e in points),
            default=0.0,
        ) if oracle else math.inf
        results[T] = {
            "centers": sum(e.kind is EquilibriumKind.CENTER for e in points),
            "saddles": sum(e.kind is EquilibriumKind.SADDLE for e in points),
            "oracle_count": len(oracle),
            "position_error": error,
        }
        logger.info(f"T = {T:g}: {results[T]}")
    return results


# ---------------------------------------------------------------------------
# Conservation of H by the frozen flow
# ---------------------------------------------------------------------------

def hamiltonian_drift(T: float, phi0: complex, eps: float = CONSERVATION_EPS,
                      span: float = CONSERVATION_SPAN, tol: float = CONSERVATION_TOL) -> float:
    """Largest |H - H0| / max(|H0|, 1) along a frozen run of `span` fast-time units."""
    traj = integrate_adaptive(
        frozen_field(T, eps),
        [phi0.real, phi0.imag],
        (0.0, span * eps),
        Tolerances.uniform(tol, max_step=MAX_STEP, min_step=MIN_STEP),
        equation_id="frozen",
        independent_var="t",
        eps=eps,
    )
    h = hamiltonian(T, traj.as_complex())
    h0 = hamiltonian(T, phi0)
    return float(np.max(np.abs(h - h0)) / max(abs(h0), 1.0))


def conservation(times: Iterable[float] = PORTRAIT_TIMES, n_points: int = CONSERVATION_POINTS,
                 seed: int = 0) -> Dict[float, float]:
    """Worst relative drift of H over n_points random starts per T."""
    rng = np.random.default_rng(seed)
    results = {}
    for T in times:
        starts = rng.uniform(-1.2, 1.2, size=(n_points, 2))
        drifts = [hamiltonian_drift(T, complex(a, b)) for a, b in starts]
        results[T] = max(drifts)
        logger.info(f"T = {T:g}: max relative H drift {results[T]:.3g}")
    return results


# ---------------------------------------------------------------------------
# Layer connection: numeric (rho, upsilon) against the formulas
# ---------------------------------------------------------------------------

def near_special(alpha: float, phi: float, radius: float = SPECIAL_EXCLUSION) -> bool:
    return any(angular_distance(phi, s) < radius for s in special_phases(alpha))


def _layer_point(alpha: float, phi: float) -> Dict[str, Any]:
    traj = integrate_painleve(PainleveSeed(alpha_t=alpha, phi_t=phi, z0=SEED_ABSCISSA), PLUS_FIT_WINDOW[1])
    result = classify_at_plus_infinity(traj, PLUS_FIT_WINDOW)
    return {
        "alpha": alpha,
        "phi": phi,
        "kind": result.kind.value,
        "sign": result.sign,
        "rho": result.rho,
        "upsilon": result.upsilon,
        "residual": result.residual,
    }


def validate_connection(alphas: Sequence[float] = CONNECTION_ALPHAS,
                        phis: Sequence[float] = CONNECTION_PHIS,
                        workers: Optional[int] = None) -> Dict[str, Any]:
    """
    Integrate the layer equation on a grid of -inf data and compare the fitted
    (rho, upsilon) with every constant/denominator variant of the formulas.

    A point passes for a variant when rho is within 2% and upsilon within
    0.05 rad. The sign rule (+ exactly when Im p < 0) is checked per point.
    """
    grid = [(a, f) for a in alphas for f in phis if not near_special(a, f)]
    measured = run_many(_layer_point, grid, workers)

    tracker = VariantTracker()
    rows = []
    for point in measured:
        p = compute_p(point["alpha"], point["phi"])
        row = dict(point, p=p, sign_rule=(point["sign"] == (1 if p.imag < 0 else -1)))
        scores = {}
        for constant in ConstantVariantPost:
            for denominator in RhoDenominator:
                label = f"{constant.value}/{denominator.value}"
                try:
                    rho2, upsilon = rho_upsilon(p, constant, denominator)
                except ValidationError as e:
                    row[label] = {"error": type(e).__name__}
                    scores[label] = math.inf
                    continue
                rho = math.sqrt(rho2)
                rho_err = abs(point["rho"] - rho) / rho if rho > 0 else math.inf
                ups_err = angular_distance(point["upsilon"], upsilon)
                row[label] = {
                    "rho": rho,
                    "upsilon": upsilon,
                    "rho_rel": rho_err,
                    "upsilon_err": ups_err,
                    "pass": rho_err <= RHO_REL_TOL and ups_err <= UPSILON_TOL,
                }
                scores[label] = rho_err + ups_err
        if point["kind"] == LayerOutcome.CAPTURE.value:
            tracker.record_run("connection", f"{point['alpha']:g}/{point['phi']:g}", scores)
        rows.append(row)

    resolution = tracker.resolve("connection")
    winner = resolution["winner"]
    return {
        "rows": rows,
        "resolution": resolution,
        "all_pass": bool(winner) and all(r.get(winner, {}).get("pass", False) for r in rows),
        "sign_rule": all(r["sign_rule"] for r in rows),
    }


# ---------------------------------------------------------------------------
# Special phases: escape abscissa, branch flip, decaying solution
# ---------------------------------------------------------------------------

def _forward_layer(alpha: float, phi: float, z_end: float) -> Dict[str, Any]:
    traj = integrate_painleve(PainleveSeed(alpha_t=alpha, phi_t=phi, z0=SEED_ABSCISSA), z_end)
    z, states = traj.window(z_end / 2.0, z_end)
    return {
        "escape": escape_abscissa(traj),
        "sign": branch_sign(z, states[:, 0]) if z.size else 0,
        "v_end": float(traj.states[-1, 0]),
    }


def probe_special_phases(alphas: Sequence[float] = SPECIAL_ALPHAS, offset: float = SPECIAL_OFFSET,
                         z_end: float = SPECIAL_Z_END, workers: Optional[int] = None) -> Dict[str, Any]:
    """
    Forward runs on and beside each special phase.

    On the special line the solution follows the decaying branch longest, so
    its escape abscissa exceeds those at phase +- offset, and the two sides
    settle on opposite branches.
    """
    jobs, keys = [], []
    for alpha in alphas:
        for kappa, phase in enumerate(special_phases(alpha)):
            for shift in (-offset, 0.0, offset):
                jobs.append((alpha, phase + shift, z_end))
                keys.append((alpha, kappa, shift))
    results = dict(zip(keys, run_many(_forward_layer, jobs, workers)))

    rows = []
    for alpha in alphas:
        for kappa, phase in enumerate(special_phases(alpha)):
            on = results[(alpha, kappa, 0.0)]
            below = results[(alpha, kappa, -offset)]
            above = results[(alpha, kappa, offset)]
            rows.append({
                "alpha": alpha,
                "kappa": kappa,
                "phase": phase,
                "escape_special": on["escape"],
                "escape_below": below["escape"],
                "escape_above": above["escape"],
                "sign_below": below["sign"],
                "sign_above": above["sign"],
                "branch_flip": below["sign"] != 0 and below["sign"] == -above["sign"],
            })
    return {"rows": rows}


def decaying_check(k: float) -> Dict[str, Any]:
    """
    Backward run from k Ai(z): fitted -inf data against
    alpha~^2 = ln(1 + k^2) / pi and the special phase (kappa = 0 for k > 0).
    """
    fit = fit_minus_infinity(integrate_decaying(k))
    alpha = decaying_amplitude(k)
    expected_phase = special_phases(alpha)[0 if k > 0 else 1]
    return {
        "k": k,
        "alpha_fit": fit.alpha_t,
        "alpha_expected": alpha,
        "alpha_rel": abs(fit.alpha_t - alpha) / alpha,
        "phase_fit": fit.phi_t,
        "phase_expected": expected_phase,
        "phase_err": angular_distance(fit.phi_t, expected_phase),
    }


# ---------------------------------------------------------------------------
# Canonical capture runs
# ---------------------------------------------------------------------------

def capture_slope(traj: Trajectory, window: tuple[float, float] = (0.0, 1.0)) -> float:
    """Slope of a linear fit of |phi|^2 against 1 + theta."""
    theta, states = traj.window(*window)
    slope, _ = np.polyfit(1.0 + theta, states[:, 0] ** 2 + states[:, 1] ** 2, 1)
    return float(slope)


def equilibrium_from_slope(slope: float) -> Optional[EquilibriumVariant]:
    if abs(slope - 1.0) <= 0.15:
        return EquilibriumVariant.FULL_ROOT
    if abs(slope - 0.25) <= 0.05:
        return EquilibriumVariant.HALF_ROOT
    return None


def _capture_run(eps: float, theta0: float, theta1: float, phi0: complex) -> Dict[str, Any]:
    traj = simulate(eps, theta0, theta1, phi0)
    theta_capture = detect_capture(traj, CAPTURE_FACTOR)
    if theta_capture is None:
        return {"theta0": theta0, "theta_capture": None, "branch_j": None, "slope": None, "equilibrium": None}

    slope = capture_slope(traj, (0.0, theta1))
    variant = equilibrium_from_slope(slope)
    return {
        "theta0": theta0,
        "theta_capture": theta_capture,
        "branch_j": final_branch(traj),
        "slope": slope,
        "equilibrium": variant.value if variant else None,
    }


def figure2_check(eps: float = FIGURE_EPS, theta0s: Sequence[float] = FIGURE_THETA0,
                  theta1: float = FIGURE_THETA1, phi0: complex = FIGURE_PHI0,
                  workers: Optional[int] = None) -> Dict[str, Any]:
    """
    Capture moment, branch and |phi|^2 slope for runs that differ only in the
    starting moment.
    """
    runs = run_many(_capture_run, [(eps, t0, theta1, phi0) for t0 in theta0s], workers)
    branches = [r["branch_j"] for r in runs]
    return {
        "runs": runs,
        "opposite_branches": len(runs) == 2 and None not in branches and branches[0] != branches[1],
    }


# ---------------------------------------------------------------------------
# End-to-end calibration of the flagged variants
# ---------------------------------------------------------------------------

def _calibration_run(eps: float, alpha: float, phi: float, pre_variant: str) -> Dict[str, Any]:
    cfg = RunConfig(
        eps=eps,
        theta0=CALIBRATION_THETA0,
        theta1=CALIBRATION_THETA1,
        initial=PreCaptureParams(alpha10=alpha, phi10=phi),
        pre_variant=PhaseVariantPre(pre_variant),
        fit_window=POST_FIT_WINDOW,
    )
    try:
        report = run_scattering(cfg)
    except CaptureLabError as e:
        logger.warning(f"calibration run eps={eps:g} alpha={alpha:g} phi={phi:g} failed: {e}")
        return {"eps": eps, "alpha": alpha, "phi": phi, "pre_variant": pre_variant,
                "error": f"{type(e).__name__}: {e}"}
    return dict(report.to_json_dict(), eps=eps, alpha=alpha, phi=phi, pre_variant=pre_variant)


def calibrate(alphas: Sequence[float] = CALIBRATION_ALPHAS, phis: Sequence[float] = CALIBRATION_PHIS,
              eps_values: Sequence[float] = CALIBRATION_EPS,
              pre_variants: Sequence[PhaseVariantPre] = tuple(PhaseVariantPre),
              workers: Optional[int] = None, export: Optional[str] = None) -> Dict[str, Any]:
    """
    Full runs seeded from pre-capture data at theta0 = -3 under every
    pre-capture variant; every connection variant is scored against the fit.

    Categories resolved by the tracker: one per eps for the combined
    pre/connection label, and the post-capture fit variant.
    """
    jobs = [(eps, a, f, pv.value) for eps in eps_values for pv in pre_variants
            for a in alphas for f in phis]
    runs = run_many(_calibration_run, jobs, workers)

    tracker = VariantTracker()
    for run in runs:
        if "error" in run:
            continue
        residuals = run["residuals"]
        run_id = f"{run['alpha']:g}/{run['phi']:g}"
        scores = {
            f"{run['pre_variant']}/{key[:-len('/score')]}": value
            for key, value in residuals.items() if key.endswith("/score")
        }
        if scores:
            tracker.record_run(f"eps={run['eps']:g}", f"{run_id}/{run['pre_variant']}", scores)
        fit_scores = {key[len("fit/"):]: value for key, value in residuals.items() if key.startswith("fit/")}
        if fit_scores:
            tracker.record_run("post_fit", f"{run_id}/{run['pre_variant']}@{run['eps']:g}", fit_scores)

    if export:
        tracker.export_data(export)

    return {"runs": runs, "resolution": tracker.resolve_all()}


def overlap_error(eps: float = 0.01, pre: PreCaptureParams = PreCaptureParams(alpha10=0.5, phi10=1.0),
                  theta_range: tuple[float, float] = (-3.0, -2.5)) -> Dict[str, float]:
    """
    Largest |phi - phi_WKB| / sqrt(eps) over theta_range for each pre-capture
    variant, each run seeded from its own leading term.
    """
    theta0, theta1 = theta_range
    errors = {}
    for variant in PhaseVariantPre:
        traj = simulate(eps, theta0, theta1, wkb_pre_eval(theta0, eps, pre, variant))
        expected = wkb_pre_curve(traj.points, eps, pre, variant)
        errors[variant.value] = float(np.max(np.abs(traj.as_complex() - expected)) / math.sqrt(eps))
    return errors
