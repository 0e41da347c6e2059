"""
Figure reproduction: trajectory traces for two nearby starting moments,
|phi|^2 growth through capture, and level sets of the frozen Hamiltonian.

Every figure is written as CSV data plus an SVG rendered with matplotlib's
Agg backend.
"""
import os
from typing import Any, Dict, List, Optional

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from contourpy import contour_generator

from config.defaults import (
    FIGURE_THETA0,
    PORTRAIT_BOX,
    PORTRAIT_GRID,
    PORTRAIT_LEVELS,
    PORTRAIT_TIMES,
)
from core.errors import ConfigError
from core.model import equilibria, hamiltonian
from core.state import Equilibrium, EquilibriumKind, Trajectory
from harness.experiments import run_many, simulate
from harness.io import write_table, write_trajectory_csv
from utils.log_utils import logger


FIGURES = ("fig1", "fig2", "fig3")
PORTRAIT_HEADER = "level,segment,re,im"
EQUILIBRIA_HEADER = "re,im,center,family"


def _svg(fig, path: str) -> str:
    # svg.hashsalt fixes the generated ids so reruns give identical files
    with plt.rc_context({"svg.hashsalt": "captureLab", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


# ---------------------------------------------------------------------------
# Phase portraits
# ---------------------------------------------------------------------------

def portrait_levels(T: float, values: np.ndarray, n_levels: int = PORTRAIT_LEVELS) -> np.ndarray:
    """Evenly spaced levels over the upper part of H plus the saddle values (separatrices)."""
    levels = np.linspace(np.percentile(values, 5.0), values.max(), n_levels + 2)[1:-1]
    saddles = [hamiltonian(T, e.location) for e in equilibria(T) if e.kind is EquilibriumKind.SADDLE]
    return np.unique(np.concatenate([levels, saddles]))


def phase_portrait(T: float, grid: int = PORTRAIT_GRID, box: float = PORTRAIT_BOX,
                   n_levels: int = PORTRAIT_LEVELS) -> Dict[str, Any]:
    """
    Level sets of H on a grid x grid mesh over [-box, box]^2.

    Returns:
        levels, a list of (level, segment array of shape (n, 2)) and the equilibria
    """
    axis = np.linspace(-box, box, grid)
    re, im = np.meshgrid(axis, axis, indexing="xy")
    values = hamiltonian(T, re + 1j * im)

    generator = contour_generator(axis, axis, values, line_type="Separate")
    levels = portrait_levels(T, values, n_levels)
    segments = [(float(level), seg) for level in levels for seg in generator.lines(level) if len(seg) > 1]

    logger.info(f"portrait T = {T:g}: {len(levels)} levels, {len(segments)} segments")
    return {"T": T, "levels": levels, "segments": segments, "equilibria": equilibria(T)}


def write_portrait(portrait: Dict[str, Any], csv_path: str, svg_path: Optional[str] = None) -> List[str]:
    """Level-set CSV, equilibria CSV next to it, and optionally the SVG."""
    rows = [
        np.column_stack([np.full(len(seg), level), np.full(len(seg), index), seg[:, 0], seg[:, 1]])
        for index, (level, seg) in enumerate(portrait["segments"])
    ]
    data = np.vstack(rows) if rows else np.empty((0, 4))
    paths = [write_table(csv_path, PORTRAIT_HEADER, list(data.T))]

    points: List[Equilibrium] = portrait["equilibria"]
    eq_path = os.path.splitext(csv_path)[0] + "_equilibria.csv"
    paths.append(write_table(eq_path, EQUILIBRIA_HEADER, [
        np.array([e.location.real for e in points]),
        np.array([e.location.imag for e in points]),
        np.array([1.0 if e.kind is EquilibriumKind.CENTER else 0.0 for e in points]),
        np.array([float(e.family) for e in points]),
    ]))

    if svg_path:
        fig, ax = plt.subplots(figsize=(6, 6))
        for _, seg in portrait["segments"]:
            ax.plot(seg[:, 0], seg[:, 1], color="tab:blue", linewidth=0.6)
        for e in points:
            marker = "o" if e.kind is EquilibriumKind.CENTER else "x"
            ax.plot(e.location.real, e.location.imag, marker, color="tab:red", markersize=7)
        ax.set_xlabel("Re phi")
        ax.set_ylabel("Im phi")
        ax.set_title(f"T = {portrait['T']:g}")
        ax.set_aspect("equal")
        paths.append(_svg(fig, svg_path))

    return paths


# ---------------------------------------------------------------------------
# Trajectory figures
# ---------------------------------------------------------------------------

def _tag(theta0: float) -> str:
    return f"theta0_{theta0:g}"


def _traces_svg(runs: List[Trajectory], path: str) -> str:
    fig, (left, right) = plt.subplots(1, 2, figsize=(12, 4.5))
    for traj in runs:
        label = f"theta0 = {traj.points[0]:g}"
        left.plot(traj.points, traj.states[:, 0], linewidth=0.6, label=f"Re, {label}")
        left.plot(traj.points, traj.states[:, 1], linewidth=0.6, linestyle="--", label=f"Im, {label}")
        right.plot(traj.states[:, 0], traj.states[:, 1], linewidth=0.5, label=label)
    left.set_xlabel("theta")
    left.legend(fontsize=7)
    right.set_xlabel("Re phi")
    right.set_ylabel("Im phi")
    right.legend(fontsize=7)
    return _svg(fig, path)


def _abs2_svg(runs: List[Trajectory], path: str) -> str:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for traj in runs:
        ax.plot(traj.points, traj.states[:, 0] ** 2 + traj.states[:, 1] ** 2,
                linewidth=0.6, label=f"theta0 = {traj.points[0]:g}")
    theta = np.linspace(-1.0, float(max(t.points[-1] for t in runs)), 200)
    ax.plot(theta, 1.0 + theta, color="black", linewidth=0.8, linestyle=":", label="1 + theta")
    ax.set_xlabel("theta")
    ax.set_ylabel("|phi|^2")
    ax.legend(fontsize=7)
    return _svg(fig, path)


def emit_figures(cfg: Any, which: str, outdir: str, workers: Optional[int] = None) -> List[str]:
    """
    Write the data and SVG files of one figure into outdir.

    fig1 and fig2 integrate from cfg.initial at each canonical starting moment
    with cfg.eps, cfg.theta1 and cfg.tolerances. fig3 draws portraits at the
    canonical frozen times.

    Returns:
        Paths written, in a fixed order
    """
    if which not in FIGURES:
        raise ConfigError(f"unknown figure {which}; choose from {FIGURES}")
    os.makedirs(outdir, exist_ok=True)
    logger.info(f"Emitting {which} into {outdir}")

    if which == "fig3":
        paths = []
        for T in PORTRAIT_TIMES:
            stem = os.path.join(outdir, f"fig3_T_{T:g}")
            paths += write_portrait(phase_portrait(T), stem + ".csv", stem + ".svg")
        return paths

    phi0 = complex(cfg.initial)
    runs = run_many(simulate, [(cfg.eps, t0, cfg.theta1, phi0, cfg.tolerances) for t0 in FIGURE_THETA0], workers)

    paths = []
    if which == "fig1":
        for t0, traj in zip(FIGURE_THETA0, runs):
            paths.append(write_trajectory_csv(traj, os.path.join(outdir, f"fig1_{_tag(t0)}.csv")))
        paths.append(_traces_svg(runs, os.path.join(outdir, "fig1.svg")))
    else:
        for t0, traj in zip(FIGURE_THETA0, runs):
            abs2 = traj.states[:, 0] ** 2 + traj.states[:, 1] ** 2
            paths.append(write_table(os.path.join(outdir, f"fig2_{_tag(t0)}.csv"), "theta,abs2",
                                     [traj.points, abs2]))
        paths.append(_abs2_svg(runs, os.path.join(outdir, "fig2.svg")))
    return paths
