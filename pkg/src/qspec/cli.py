"""qspec command line: spectra, wavefunctions, matrix elements, sweeps,
transitions, coherence estimates, Hamiltonian export, validation, service.

    qspec <command> --in <file> --out <dir> [--units U] [--workers N]
                    [--evals-count K]

Exit codes: 0 ok, 1 compute error, 2 input error.  Data artifacts (JSON and
CSV) carry a provenance header with the unit context and the fully resolved
input; figures are SVG with pinned hash salt, so repeated runs are
byte-identical up to the renderer version comment.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, composite, expressions, linalg, noise as noise_mod
from . import payloads, plots, qubits, serialize, sweep as sweep_mod
from .grids import UnknownAxisError
from .serialize import SpecFileError, canonical_dumps
from .units import UnitContext, UnknownUnitError

INPUT_ERRORS = (
    SpecFileError,
    qubits.SpecValidationError,
    qubits.UnknownOperatorError,
    qubits.UnknownParameterError,
    qubits.UnsupportedRepresentationError,
    qubits.MissingOscillatorLengthError,
    UnknownUnitError,
    UnknownAxisError,
    noise_mod.UnsupportedChannelError,
    noise_mod.UnknownLambdaFieldError,
    expressions.ExprSyntaxError,
    expressions.UnboundIdentifierError,
    expressions.ExprTypeError,
    composite.DimensionMismatchError,
    composite.NonHermitianInteractionError,
    linalg.LinalgError,
    FileNotFoundError,
    NotADirectoryError,
)

COMPUTE_ERRORS = (
    linalg.SolverFailure,
    sweep_mod.SweepPointFailure,
    composite.DispersiveBreakdownError,
    noise_mod.NumericalDerivativeFailure,
    noise_mod.SpectralDensityDomainError,
)


def _load_json(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def _provenance_lines(units: str, input_obj) -> list[str]:
    return [
        f"# qspec {__version__}",
        f"# units: {units}",
        f"# input: {canonical_dumps(input_obj)}",
    ]


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(canonical_dumps(payload), encoding="utf-8")


def _write_csv(path: Path, header_lines: list[str], columns: list[str], rows) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _units(args) -> str:
    return serialize.validate_units(args.units)


def _parse_range(text: str) -> np.ndarray:
    try:
        start, stop, num = text.split(":")
        return np.linspace(float(start), float(stop), int(num))
    except ValueError as exc:
        raise SpecFileError(f"range: expected start:stop:num, got {text!r}") from exc


def _parse_options(text: Optional[str]) -> dict:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise SpecFileError(f"options: expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        try:
            out[key.strip()] = float(value)
        except ValueError:
            out[key.strip()] = value.strip()
    return out


# ---------------------------------------------------------------------------
# commands


def _cmd_spectrum(args) -> None:
    units = _units(args)
    obj = _load_json(args.input)
    spec = serialize.qubit_from_json(obj.get("qubit", obj))
    evals_count = args.evals_count or int(obj.get("evals_count", 6))
    scan = obj.get("scan")
    payload = payloads.spectrum_payload(
        spec, units, evals_count, scan,
        operator=obj.get("operator"), select_elems=obj.get("select_elems"),
    )
    out = _out_dir(args)
    _write_json(out / "spectrum.json", payload)

    header = _provenance_lines(units, payload["input"])
    if scan is None:
        evals = payload["data"]["evals"]
        _write_csv(out / "spectrum.csv", header,
                   [f"E{k}" for k in range(len(evals))], [evals])
    else:
        axis = payload["data"]["axis"]
        evals = np.asarray(payload["data"]["evals"])
        rows = [[axis["values"][i], *evals[i]] for i in range(len(axis["values"]))]
        _write_csv(out / "spectrum.csv", header,
                   [axis["name"], *[f"E{k}" for k in range(evals.shape[1])]], rows)
        fig = plots.spectrum_figure(axis["values"], evals, axis["name"], units)
        plots.save_svg(fig, out / "spectrum.svg")


def _cmd_wavefunction(args) -> None:
    units = _units(args)
    obj = _load_json(args.input)
    spec = serialize.qubit_from_json(obj.get("qubit", obj))
    which = obj.get("which", 0)
    which = [which] if isinstance(which, int) else list(which)
    representation = obj.get("representation", "native")
    mode = obj.get("mode", "real")
    payload = payloads.wavefunction_payload(spec, units, which, representation, mode)
    out = _out_dir(args)
    _write_json(out / "wavefunction.json", payload)

    wavefunctions = spec.wavefunction(which, representation)
    header = _provenance_lines(units, payload["input"])
    rows = []
    for index, wf in zip(which, wavefunctions):
        xs = np.asarray(wf.support_values, dtype=float)
        ys = qubits.wavefunction_component(wf.amplitudes, mode)
        rows.extend([index, float(x), float(y)] for x, y in zip(xs, ys))
    _write_csv(out / "wavefunction.csv", header, ["state", "support", mode], rows)

    potential = None
    support = None
    if representation == "phase":
        support = np.asarray(wavefunctions[0].support_values, dtype=float)
        potential = plots.potential_curve(spec, support)
    fig, scale = plots.wavefunction_overlay_figure(
        wavefunctions, mode, units, potential, support
    )
    plots.save_svg(fig, out / "wavefunction.svg",
                   description=f"amplitude_scale={scale!r}")


def _cmd_matelem(args) -> None:
    units = _units(args)
    obj = _load_json(args.input)
    spec = serialize.qubit_from_json(obj.get("qubit", obj))
    operator = obj.get("operator")
    if not operator:
        raise SpecFileError("operator: required for the matelem command")
    evals_count = args.evals_count or int(obj.get("evals_count", 6))
    scan = obj.get("scan")
    select = obj.get("select_elems", 4 if scan else evals_count)
    payload = payloads.spectrum_payload(
        spec, units, evals_count, scan, operator=operator, select_elems=select
    )
    out = _out_dir(args)
    _write_json(out / "matelem.json", payload)
    header = _provenance_lines(units, payload["input"])

    if scan is None:
        table = spec.matrixelement_table(operator, select)
        rows = [
            [i, j, float(np.real(table[i, j])), float(np.imag(table[i, j]))]
            for i in range(table.shape[0]) for j in range(table.shape[1])
        ]
        _write_csv(out / "matelem.csv", header, ["i", "j", "re", "im"], rows)
        fig = plots.matelem_grid_figure(table, operator, units)
        plots.save_svg(fig, out / "matelem.svg")
    else:
        axis = payload["data"]["axis"]
        grid = spec.matelem_vs_param(operator, axis["name"],
                                     np.asarray(axis["values"]), select)
        tables = grid.payload
        columns = [axis["name"]] + [
            f"abs({i},{j})" for i in range(select) for j in range(select)
        ]
        rows = [
            [axis["values"][p], *np.abs(tables[p]).ravel()]
            for p in range(len(axis["values"]))
        ]
        _write_csv(out / "matelem.csv", header, columns, rows)
        fig = plots.matelem_scan_figure(axis["values"], tables, operator, axis["name"])
        plots.save_svg(fig, out / "matelem.svg")


def _sweep_def_from_args(args, obj) -> sweep_mod.SweepDef:
    sd = serialize.sweep_from_json(obj)
    changes = {}
    if args.workers:
        changes["worker_count"] = args.workers
    if args.evals_count:
        changes["evals_count"] = args.evals_count
    if changes:
        sd = dataclasses.replace(sd, **changes)
    return sd


def _cmd_sweep(args) -> None:
    units = _units(args)
    obj = _load_json(args.input)
    sd = _sweep_def_from_args(args, obj)
    result = sweep_mod.run_sweep(sd)
    out = _out_dir(args)

    keys = ["evals", "evecs", "labels", "overlaps", "lamb", "chi", "kerr"]
    manifest = {
        "format": "qspec-sweep-archive/1",
        "units": units,
        "axes": [{"name": n, "values": v.tolist()} for n, v in result.axes],
        "input": serialize.sweep_to_json(sd),
        "arrays": {},
    }
    for key in keys:
        arr = result[key].payload
        np.save(out / f"{key}.npy", arr)
        manifest["arrays"][key] = {"file": f"{key}.npy", "shape": list(arr.shape)}
    for s, (evals_grid, evecs_grid) in enumerate(
        zip(result["bare_evals"], result["bare_evecs"])
    ):
        np.save(out / f"bare_evals_{s}.npy", evals_grid.payload)
        np.save(out / f"bare_evecs_{s}.npy", evecs_grid.payload)
        manifest["arrays"][f"bare_evals_{s}"] = {
            "file": f"bare_evals_{s}.npy", "shape": list(evals_grid.payload.shape)
        }
        manifest["arrays"][f"bare_evecs_{s}"] = {
            "file": f"bare_evecs_{s}.npy", "shape": list(evecs_grid.payload.shape)
        }
    _write_json(out / "axes.json", manifest)


def _cmd_transitions(args) -> None:
    units = _units(args)
    obj = _load_json(args.input)
    if "sweep" not in obj:
        raise SpecFileError("sweep: transitions input needs a 'sweep' definition")
    sd = _sweep_def_from_args(args, obj["sweep"])
    result = sweep_mod.run_sweep(sd)
    for axis, value in (obj.get("slice") or {}).items():
        result = result.slice(axis, value=float(value))
    options = obj.get("options") or {}
    initial = options.get("initial")
    view = payloads.transitions_view(
        result, units,
        initial=tuple(initial) if initial is not None else None,
        photon_number=int(options.get("photon_number", 1)),
        sidebands=bool(options.get("sidebands", False)),
        subsystems=options.get("subsystems"),
        coloring=options.get("coloring", "dispersive"),
    )
    out = _out_dir(args)
    _write_json(out / "transitions.json", view)

    header = _provenance_lines(units, {"sweep": serialize.sweep_to_json(sd),
                                       "slice": obj.get("slice"), "options": options})
    rows = []
    xs = view["axis"]["values"]
    for branch in view["branches"]:
        label = (
            f"{tuple(view['initial'])}->{tuple(branch['final'])}"
            if branch["final"] is not None else "plain"
        )
        for x, e in zip(xs, branch["energies"]):
            if e is not None:
                rows.append([float(x), label, float(e)])
    _write_csv(out / "transitions.csv", header,
               [view["axis"]["name"], "transition", "energy"], rows)
    fig = plots.transitions_figure(view, units)
    plots.save_svg(fig, out / "transitions.svg")


def _cmd_noise(args) -> None:
    units = _units(args)
    ctx = UnitContext(units)
    obj = _load_json(args.input)
    spec = serialize.qubit_from_json(obj.get("qubit", obj))
    channels = list(args.channel or obj.get("channels") or [])
    effective = []
    if args.effective:
        effective.append(args.effective)
    effective.extend(obj.get("effective") or [])
    if not channels and not effective:
        channels = noise_mod.supported_noise_channels(spec)
    options = {**(obj.get("options") or {}), **_parse_options(args.options)}

    out = _out_dir(args)
    param = args.param or (obj.get("scan") or {}).get("param")
    if param:
        if args.range:
            values = _parse_range(args.range)
        else:
            values = serialize.values_from_json((obj.get("scan") or {}).get("values"))
        payload = payloads.noise_scan_payload(
            spec, units, param, values, channels, effective, options, ctx
        )
        _write_json(out / "noise.json", payload)
        header = _provenance_lines(units, payload["input"])
        names = sorted(payload["data"]["times"])
        rows = []
        for k, x in enumerate(payload["data"]["axis"]["values"]):
            row = [float(x)]
            for name in names:
                value = payload["data"]["times"][name][k]
                row.append(float("inf") if value == "inf" else float(value))
            rows.append(row)
        _write_csv(out / "noise.csv", header, [param, *names], rows)
        curves = {
            name: np.asarray(
                [np.inf if v == "inf" else v for v in payload["data"]["times"][name]],
                dtype=float,
            )
            for name in names
        }
        fig = plots.coherence_figure(values, curves, param, units)
        plots.save_svg(fig, out / "noise.svg")
    else:
        payload = payloads.noise_point_payload(spec, units, channels, effective,
                                               options, ctx)
        _write_json(out / "noise.json", payload)
        header = _provenance_lines(units, payload["input"])
        names = sorted(payload["data"]["times"])
        row = []
        for name in names:
            value = payload["data"]["times"][name]
            row.append(float("inf") if value == "inf" else float(value))
        _write_csv(out / "noise.csv", header, names, [row])


def _cmd_export_hamiltonian(args) -> None:
    units = _units(args)
    obj = _load_json(args.input)
    hs = serialize.hilbertspace_from_json(obj.get("hilbertspace", obj))
    document = serialize.export_hamiltonian(hs, units)
    out = _out_dir(args)
    _write_json(out / "hamiltonian.json", document)


def _cmd_validate(args) -> tuple[int, dict]:
    obj = _load_json(args.input)
    if "qubit" in obj or "family" in obj:
        report = serialize.validate_qubit_json(obj.get("qubit", obj))
    elif "hilbertspace" in obj or "axes" in obj:
        try:
            serialize.sweep_from_json(obj)
            report = {"errors": [], "warnings": []}
        except (SpecFileError, qubits.SpecValidationError) as exc:
            report = {"errors": [str(exc)], "warnings": []}
    elif "subsystems" in obj:
        try:
            serialize.hilbertspace_from_json(obj)
            report = {"errors": [], "warnings": []}
        except (SpecFileError, qubits.SpecValidationError) as exc:
            report = {"errors": [str(exc)], "warnings": []}
    else:
        report = {"errors": ["unrecognized spec file: expected a qubit, "
                             "hilbertspace, or sweep document"], "warnings": []}
    if args.out:
        _write_json(_out_dir(args) / "validate.json", report)
    print(canonical_dumps(report))
    return 0, report


def _cmd_serve(args) -> None:
    import uvicorn

    from .service import create_app

    app = create_app(units=_units(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qspec",
        description="spectral engine for superconducting circuits",
    )
    parser.add_argument("--version", action="version", version=f"qspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--in", dest="input", required=True, help="input spec file (JSON)")
        if needs_out:
            p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--units", default="GHz", choices=["GHz", "MHz", "kHz", "Hz"])
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--evals-count", dest="evals_count", type=int, default=None)

    for name in ("spectrum", "wavefunction", "matelem", "sweep", "export-hamiltonian"):
        common(sub.add_parser(name))

    p_tr = sub.add_parser("transitions")
    common(p_tr)

    p_noise = sub.add_parser("noise")
    common(p_noise)
    p_noise.add_argument("--channel", action="append", help="noise channel name (repeatable)")
    p_noise.add_argument("--effective", choices=["t1", "t2"], default=None)
    p_noise.add_argument("--param", default=None, help="scan parameter name")
    p_noise.add_argument("--range", default=None, help="start:stop:num")
    p_noise.add_argument("--options", default=None, help="key=value[,key=value...]")

    p_val = sub.add_parser("validate")
    p_val.add_argument("--in", dest="input", required=True)
    p_val.add_argument("--out", default=None)
    p_val.add_argument("--units", default="GHz", choices=["GHz", "MHz", "kHz", "Hz"])

    p_serve = sub.add_parser("serve")
    p_serve.add_argument("--in", dest="input", default=None, help="unused; present for symmetry")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--units", default="GHz", choices=["GHz", "MHz", "kHz", "Hz"])

    return parser


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "wavefunction": _cmd_wavefunction,
    "matelem": _cmd_matelem,
    "sweep": _cmd_sweep,
    "transitions": _cmd_transitions,
    "noise": _cmd_noise,
    "export-hamiltonian": _cmd_export_hamiltonian,
    "serve": _cmd_serve,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            code, _ = _cmd_validate(args)
            return code
        _COMMANDS[args.command](args)
        return 0
    except json.JSONDecodeError as exc:
        print(
            f"error[input]: malformed JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}",
            file=sys.stderr,
        )
        return 2
    except INPUT_ERRORS as exc:
        print(f"error[input]: {exc}", file=sys.stderr)
        return 2
    except COMPUTE_ERRORS as exc:
        print(f"error[compute]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
