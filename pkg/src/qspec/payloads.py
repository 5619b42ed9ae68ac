"""Result payload builders shared by the CLI and the HTTP service.

Every payload is a plain JSON-representable dict carrying the unit context
and the fully resolved input definition (provenance), so identical requests
produce byte-identical canonical JSON through either surface.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import composite, noise as noise_mod, serialize, sweep as sweep_mod
from .qubits import QubitSpec, wavefunction_component
from .units import UnitContext


def _axis_json(name: str, values: np.ndarray) -> dict:
    return {"name": name, "values": np.asarray(values).tolist()}


def spectrum_payload(
    spec: QubitSpec,
    units: str,
    evals_count: int = 6,
    scan: Optional[dict] = None,
    operator: Optional[str] = None,
    select_elems: Optional[int] = None,
) -> dict:
    """Eigenvalues (and optionally matrix elements) for a single qubit,
    either at the current operating point or along one scanned parameter."""
    input_block = {
        "qubit": serialize.qubit_to_json(spec),
        "evals_count": evals_count,
        "scan": scan,
        "operator": operator,
        "select_elems": select_elems,
    }
    data: dict = {}
    if scan is None:
        data["evals"] = spec.eigenvals(evals_count).tolist()
        if operator is not None:
            table = spec.matrixelement_table(operator, select_elems or evals_count)
            data["matelems"] = serialize.complex_array_json(table)
    else:
        param = scan["param"]
        values = serialize.values_from_json(scan["values"])
        grid = spec.spectrum_vs_param(param, values, evals_count)
        data["axis"] = _axis_json(param, values)
        data["evals"] = grid.payload.tolist()
        if operator is not None:
            table = spec.matelem_vs_param(
                operator, param, values, select_elems or evals_count
            )
            data["matelems"] = serialize.complex_array_json(table.payload)
    return {"kind": "qubit-spectrum", "units": units, "input": input_block, "data": data}


def wavefunction_payload(
    spec: QubitSpec,
    units: str,
    which: Sequence[int],
    representation: str = "native",
    mode: str = "real",
) -> dict:
    wavefunctions = spec.wavefunction(list(which), representation)
    entries = []
    for index, wf in zip(which, wavefunctions):
        entry = {
            "index": index,
            "energy": float(wf.energy),
            "amplitudes": serialize.complex_array_json(wf.amplitudes),
            "rendered": wavefunction_component(wf.amplitudes, mode).tolist(),
        }
        try:
            entry["support"] = np.asarray(wf.support_values, dtype=float).tolist()
        except Exception:
            entry["support"] = None
        entries.append(entry)
    return {
        "kind": "qubit-wavefunction",
        "units": units,
        "input": {
            "qubit": serialize.qubit_to_json(spec),
            "which": list(which),
            "representation": representation,
            "mode": mode,
        },
        "data": {"wavefunctions": entries},
    }


def noise_point_payload(
    spec: QubitSpec,
    units: str,
    channels: Sequence[str],
    effective: Sequence[str],
    options: Optional[dict] = None,
    ctx: Optional[UnitContext] = None,
) -> dict:
    ctx = ctx or UnitContext(units)
    options = options or {}
    values: dict[str, float] = {}
    for name in channels:
        values[name] = noise_mod.channel(spec, name, ctx, **options).time
    for which in effective:
        func = noise_mod.t1_effective if which == "t1" else noise_mod.t2_effective
        values[f"{which}_effective"] = func(
            spec, common_noise_options=options, ctx=ctx
        ).time
    return {
        "kind": "coherence",
        "units": units,
        "time_units": f"1/{units}",
        "input": {
            "qubit": serialize.qubit_to_json(spec),
            "channels": list(channels),
            "effective": list(effective),
            "options": options,
        },
        "data": {"times": values},
    }


def noise_scan_payload(
    spec: QubitSpec,
    units: str,
    param: str,
    values,
    channels: Sequence[str],
    effective: Sequence[str],
    options: Optional[dict] = None,
    ctx: Optional[UnitContext] = None,
) -> dict:
    ctx = ctx or UnitContext(units)
    options = options or {}
    values = np.asarray(values, dtype=float)
    curves: dict[str, list] = {}
    if channels:
        per_channel = noise_mod.coherence_vs_param(
            spec, param, values, list(channels), options, ctx
        )
        for name, grid in per_channel.items():
            curves[name] = grid.payload.tolist()
    for which in effective:
        grid = noise_mod.effective_vs_param(
            spec, which, param, values, None, options, ctx
        )
        curves[f"{which}_effective"] = grid.payload.tolist()
    return {
        "kind": "coherence-scan",
        "units": units,
        "time_units": f"1/{units}",
        "input": {
            "qubit": serialize.qubit_to_json(spec),
            "param": param,
            "channels": list(channels),
            "effective": list(effective),
            "options": options,
        },
        "data": {"axis": _axis_json(param, values), "times": curves},
    }


# ---------------------------------------------------------------------------
# sweep views (service slice endpoint and CLI transitions command)


def evals_view(result: sweep_mod.SweepResult, units: str) -> dict:
    grid = result["evals"]
    return {
        "kind": "sweep-evals",
        "units": units,
        "axes": [_axis_json(n, v) for n, v in grid.axes],
        "fixed": result.point_values(),
        "evals": grid.payload.tolist(),
    }


def coefficient_view(result: sweep_mod.SweepResult, key: str, units: str) -> dict:
    grid = result[key]
    return {
        "kind": f"sweep-{key}",
        "units": units,
        "axes": [_axis_json(n, v) for n, v in grid.axes],
        "fixed": result.point_values(),
        "values": grid.payload.tolist(),
        "layout": {
            "lamb": "[subsystem, level]",
            "chi": "[subsystem j, subsystem l, level k, level m]",
            "kerr": "[subsystem j, subsystem l]; diagonal entries are self-Kerr",
        }.get(key, ""),
    }


def transitions_view(
    result: sweep_mod.SweepResult,
    units: str,
    initial: Optional[tuple[int, ...]] = None,
    photon_number: int = 1,
    sidebands: bool = False,
    subsystems: Optional[Sequence[int]] = None,
    coloring: str = "dispersive",
) -> dict:
    ts = sweep_mod.transitions(
        result, initial=initial, photon_number=photon_number,
        sidebands=sidebands, subsystems=subsystems, coloring=coloring,
    )
    return {
        "kind": "sweep-transitions",
        "units": units,
        "axis": _axis_json(ts.axis_name, ts.axis_values),
        "fixed": result.point_values(),
        "initial": list(ts.initial),
        "photon_number": ts.photon_number,
        "branches": [
            {
                "final": list(t.final) if t.final is not None else None,
                "kind": t.kind,
                "subsystem": t.subsystem,
                "energies": t.energies.tolist(),
            }
            for t in ts.transitions
        ],
    }


def matelem_view(
    result: sweep_mod.SweepResult,
    units: str,
    subsystem: int,
    operator: str,
    initial_level: int = 0,
) -> dict:
    """|<initial_level| O |j>| for one subsystem along the remaining axis,
    computed from the stored bare eigenvectors."""
    if len(result.axis_names) != 1:
        raise ValueError("matelem view needs exactly one free axis")
    axis_name = result.axis_names[0]
    axis_values = result["evals"].axis_values(axis_name)
    bare_evecs = result["bare_evecs"][subsystem].payload  # (npoints, dim, trunc)
    npoints = bare_evecs.shape[0]
    trunc = bare_evecs.shape[2]
    magnitudes = np.empty((npoints, trunc))
    for p in range(npoints):
        point = {axis_name: float(axis_values[p])}
        point.update(result.point_values())
        spec = sweep_mod.specs_at_point(result.sweep, point)[subsystem]
        op = spec.operator(operator)
        vecs = bare_evecs[p]
        col = vecs[:, initial_level].conj() @ (op @ vecs)
        magnitudes[p] = np.abs(col)
    return {
        "kind": "sweep-matelem",
        "units": units,
        "axis": _axis_json(axis_name, axis_values),
        "fixed": result.point_values(),
        "subsystem": subsystem,
        "operator": operator,
        "initial_level": initial_level,
        "magnitudes": magnitudes.tolist(),
    }


def wavefunction_view(
    result: sweep_mod.SweepResult,
    units: str,
    subsystem: int,
    which: Sequence[int],
    representation: str = "native",
    mode: str = "abs_sqr",
) -> dict:
    """Bare wavefunctions of one subsystem at a fully sliced grid point."""
    if result.axis_names:
        raise ValueError("wavefunction view needs all axes sliced")
    point = result.point_values()
    spec = sweep_mod.specs_at_point(result.sweep, point)[subsystem]
    payload = wavefunction_payload(spec, units, which, representation, mode)
    payload["kind"] = "sweep-wavefunction"
    payload["fixed"] = point
    payload["subsystem"] = subsystem
    return payload


def bare_evals_view(result: sweep_mod.SweepResult, units: str) -> dict:
    return {
        "kind": "sweep-bare-evals",
        "units": units,
        "axes": [_axis_json(n, v) for n, v in result["evals"].axes],
        "fixed": result.point_values(),
        "bare_evals": [g.payload.tolist() for g in result["bare_evals"]],
    }
