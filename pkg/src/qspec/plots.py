"""Matplotlib figure builders and deterministic SVG emission.

SVG output is byte-stable across runs: the hash salt is pinned and the
creation date metadata is dropped, so repeated runs differ at most in the
matplotlib version comment.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .qubits import Wavefunction, wavefunction_component

matplotlib.rcParams["svg.hashsalt"] = "qspec"

_SUBSYSTEM_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red",
                     "tab:purple", "tab:brown", "tab:pink", "tab:olive")


def save_svg(fig, path, description: Optional[str] = None) -> None:
    metadata = {"Date": None}
    if description:
        metadata["Description"] = description
    fig.savefig(path, format="svg", metadata=metadata)
    plt.close(fig)


def spectrum_figure(axis_values, evals, xlabel: str, units: str):
    """Eigenenergies versus one scan parameter, one line per level."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    evals = np.asarray(evals)
    for k in range(evals.shape[1]):
        ax.plot(axis_values, evals[:, k], lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(f"energy [{units}]")
    fig.tight_layout()
    return fig


def matelem_grid_figure(table, operator: str, units: str, show_numbers: bool = True):
    """|<i|O|j>| magnitude grid with optional numeric annotations."""
    magnitudes = np.abs(np.asarray(table))
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    image = ax.imshow(magnitudes, cmap="viridis", origin="upper")
    fig.colorbar(image, ax=ax, label=f"|matrix element| [{operator}]")
    if show_numbers:
        threshold = 0.5 * magnitudes.max() if magnitudes.size else 0.0
        for i in range(magnitudes.shape[0]):
            for j in range(magnitudes.shape[1]):
                color = "white" if magnitudes[i, j] < threshold else "black"
                ax.text(j, i, f"{magnitudes[i, j]:.3f}", ha="center", va="center",
                        color=color, fontsize=7)
    ax.set_xlabel("state j")
    ax.set_ylabel("state i")
    fig.tight_layout()
    return fig


def matelem_scan_figure(axis_values, tables, operator: str, xlabel: str):
    """|<i|O|j>| versus the scan parameter, one line per (i, j) with i <= j."""
    tables = np.asarray(tables)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    count = tables.shape[1]
    for i in range(count):
        for j in range(i, count):
            ax.plot(axis_values, np.abs(tables[:, i, j]), lw=1.1,
                    label=f"({i},{j})")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(f"|<i|{operator}|j>|")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    return fig


def wavefunction_overlay_figure(
    wavefunctions: Sequence[Wavefunction],
    mode: str,
    units: str,
    potential: Optional[np.ndarray] = None,
    support: Optional[np.ndarray] = None,
):
    """Wavefunctions offset vertically by their eigenenergies, optionally on
    top of the potential curve.

    The amplitude scale factor is 0.8 * (minimum level spacing) / max
    rendered amplitude, recorded in the SVG description metadata.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    energies = [wf.energy for wf in wavefunctions]
    if len(energies) > 1:
        spacing = min(np.diff(sorted(energies)))
    else:
        spacing = max(abs(energies[0]), 1.0)
    peak = max(
        float(np.max(np.abs(wavefunction_component(wf.amplitudes, mode))))
        for wf in wavefunctions
    )
    scale = 0.8 * spacing / peak if peak > 0 else 1.0

    if potential is not None and support is not None:
        ax.plot(support, potential, color="black", lw=1.0, label="potential")
    for wf, color in zip(wavefunctions, _SUBSYSTEM_COLORS):
        xs = np.asarray(wf.support_values, dtype=float)
        ys = wavefunction_component(wf.amplitudes, mode)
        ax.plot(xs, wf.energy + scale * ys, color=color, lw=1.1)
        ax.axhline(wf.energy, color=color, lw=0.4, alpha=0.5)
    ax.set_xlabel("phase" if wavefunctions[0].representation == "phase" else "basis index")
    ax.set_ylabel(f"energy [{units}]")
    fig.tight_layout()
    return fig, scale


def transitions_figure(view: dict, units: str):
    """Transition branches versus the sweep axis; labeled branches colored
    per changing subsystem, sidebands dashed, plain differences grey."""
    fig, ax = plt.subplots(figsize=(6.8, 4.6))
    xs = np.asarray(view["axis"]["values"], dtype=float)
    for branch in view["branches"]:
        ys = np.asarray(
            [np.nan if e is None else e for e in branch["energies"]], dtype=float
        )
        if branch["kind"] == "plain":
            ax.plot(xs, ys, color="0.6", lw=0.8)
        elif branch["kind"] == "sideband":
            ax.plot(xs, ys, ls="--", lw=1.0,
                    label=f"{tuple(view['initial'])}->{tuple(branch['final'])}")
        else:
            color = _SUBSYSTEM_COLORS[branch["subsystem"] % len(_SUBSYSTEM_COLORS)]
            ax.plot(xs, ys, color=color, lw=1.2,
                    label=f"{tuple(view['initial'])}->{tuple(branch['final'])}")
    ax.set_xlabel(view["axis"]["name"])
    n = view.get("photon_number", 1)
    ylabel = f"transition energy [{units}]"
    if n > 1:
        ylabel += f" / {n} photons"
    ax.set_ylabel(ylabel)
    if any(b["kind"] != "plain" for b in view["branches"]):
        ax.legend(fontsize=7)
    fig.tight_layout()
    return fig


def coherence_figure(axis_values, curves: dict[str, np.ndarray], xlabel: str,
                     units: str, scale: float = 1.0):
    """Coherence times versus a parameter; infinities become axis-break gaps."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    xs = np.asarray(axis_values, dtype=float)
    for name, times in curves.items():
        ys = np.asarray(times, dtype=float) * scale
        ys = np.where(np.isinf(ys), np.nan, ys)  # sweet spots render as gaps
        ax.plot(xs, ys, lw=1.2, label=name)
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(f"coherence time [1/{units}]" + (f" x {scale:g}" if scale != 1.0 else ""))
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def potential_curve(spec, phis: np.ndarray) -> Optional[np.ndarray]:
    try:
        values = spec.potential(phis)
    except Exception:
        return None
    arr = np.asarray(values, dtype=float)
    if arr.shape != phis.shape:
        arr = np.full(phis.shape, float(values))
    return arr


def infer_min_level_spacing(energies: Sequence[float]) -> float:
    diffs = np.diff(sorted(energies))
    positive = diffs[diffs > 0]
    return float(positive.min()) if positive.size else 1.0
