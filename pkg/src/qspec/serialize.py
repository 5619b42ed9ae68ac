"""JSON codecs for specs, sweep definitions, matrices, and result payloads.

All machine-readable output funnels through canonical_dumps so that CLI
files and service responses are byte-identical for identical inputs:
sorted keys, compact separators, shortest round-trip float repr, NaN
mapped to null and infinities to the strings "inf" / "-inf".
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Any, Union

import numpy as np
import scipy.sparse

from . import composite, qubits, sweep as sweep_mod
from .linalg import GridBasis
from .qubits import QubitSpec, min_ncut_estimate
from .units import SUPPORTED_UNITS


class SpecFileError(ValueError):
    """Invalid spec-file content; message names the offending field."""


# ---------------------------------------------------------------------------
# canonical JSON


def sanitize(obj: Any) -> Any:
    """Recursively convert numpy containers and non-finite floats into
    JSON-representable values."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return sanitize(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": sanitize(float(obj.real)), "im": sanitize(float(obj.imag))}
    return obj


def canonical_dumps(payload: Any) -> str:
    return json.dumps(sanitize(payload), sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def complex_array_json(arr: np.ndarray) -> dict:
    arr = np.asarray(arr)
    out = {"re": np.real(arr).tolist()}
    if np.iscomplexobj(arr) and np.any(np.imag(arr) != 0):
        out["im"] = np.imag(arr).tolist()
    return out


# ---------------------------------------------------------------------------
# matrices


def matrix_to_json(matrix: Union[np.ndarray, scipy.sparse.spmatrix]) -> dict:
    """Dense or coordinate-list encoding of a (possibly complex) matrix."""
    if scipy.sparse.issparse(matrix):
        coo = matrix.tocoo()
        out = {
            "kind": "coo",
            "shape": list(coo.shape),
            "rows": coo.row.tolist(),
            "cols": coo.col.tolist(),
            "re": np.real(coo.data).tolist(),
        }
        if np.iscomplexobj(coo.data) and np.any(np.imag(coo.data) != 0):
            out["im"] = np.imag(coo.data).tolist()
        return out
    matrix = np.asarray(matrix)
    out = {"kind": "dense", "shape": list(matrix.shape), "re": np.real(matrix).tolist()}
    if np.iscomplexobj(matrix) and np.any(np.imag(matrix) != 0):
        out["im"] = np.imag(matrix).tolist()
    return out


def matrix_from_json(obj: dict) -> Union[np.ndarray, scipy.sparse.spmatrix]:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SpecFileError("matrix: expected an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "dense":
        re = np.asarray(obj["re"], dtype=float)
        if "im" in obj:
            return re + 1j * np.asarray(obj["im"], dtype=float)
        return re
    if kind == "coo":
        shape = tuple(obj["shape"])
        data = np.asarray(obj["re"], dtype=float)
        if "im" in obj:
            data = data + 1j * np.asarray(obj["im"], dtype=float)
        return scipy.sparse.coo_matrix(
            (data, (obj["rows"], obj["cols"])), shape=shape
        ).tocsr()
    raise SpecFileError(f"matrix: unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# qubit specs


def qubit_to_json(spec: QubitSpec) -> dict:
    params = {}
    for field in dataclasses.fields(spec):
        value = getattr(spec, field.name)
        if isinstance(value, GridBasis):
            value = {"min": value.min, "max": value.max, "points": value.points}
        params[field.name] = value
    return {"family": spec.family, "params": params}


def qubit_from_json(obj: dict) -> QubitSpec:
    if not isinstance(obj, dict):
        raise SpecFileError("qubit spec: expected an object")
    family = obj.get("family")
    if family not in qubits.FAMILIES:
        raise SpecFileError(
            f"family: unknown family {family!r}; supported: {sorted(qubits.FAMILIES)}"
        )
    cls = qubits.FAMILIES[family]
    params = dict(obj.get("params", {}))
    field_names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(params) - field_names
    if unknown:
        raise SpecFileError(f"params: unknown parameter(s) {sorted(unknown)} for {family}")
    if "grid" in params and isinstance(params["grid"], dict):
        g = params["grid"]
        try:
            params["grid"] = GridBasis(float(g["min"]), float(g["max"]), int(g["points"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFileError(f"grid: expected min/max/points, got {g!r}") from exc
    try:
        return cls(**params)
    except TypeError as exc:
        raise SpecFileError(f"params: {exc}") from exc


# ---------------------------------------------------------------------------
# composite definitions


def _operator_ref_to_json(ref, subsystem: int) -> dict:
    out = {"subsystem": subsystem}
    if isinstance(ref, str):
        out["operator"] = ref
    else:
        out["matrix"] = matrix_to_json(ref)
    return out


def _operator_ref_from_json(obj: dict) -> tuple[object, int]:
    if "subsystem" not in obj:
        raise SpecFileError("interaction operand: missing 'subsystem'")
    subsystem = int(obj["subsystem"])
    if "operator" in obj:
        return obj["operator"], subsystem
    if "matrix" in obj:
        return matrix_from_json(obj["matrix"]), subsystem
    raise SpecFileError("interaction operand: provide 'operator' or 'matrix'")


def _complex_from_json(value) -> complex:
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    return complex(value)


def _complex_to_json(value: complex):
    value = complex(value)
    if value.imag == 0:
        return value.real
    return {"re": value.real, "im": value.imag}


def interaction_to_json(term) -> dict:
    if isinstance(term, composite.ProductTerm):
        return {
            "type": "product",
            "g": _complex_to_json(term.g),
            "factors": [_operator_ref_to_json(ref, s) for ref, s in term.factors],
            "add_hc": term.add_hc,
        }
    if isinstance(term, composite.ExpressionTerm):
        return {
            "type": "expression",
            "expr": term.expr,
            "ops": {
                name: _operator_ref_to_json(ref, s)
                for name, ref, s in term.bindings
            },
            "constants": {name: _complex_to_json(v) for name, v in term.constants},
            "add_hc": term.add_hc,
        }
    if isinstance(term, composite.RawMatrixTerm):
        return {"type": "matrix", "matrix": matrix_to_json(term.matrix)}
    raise SpecFileError(f"unknown interaction term {term!r}")


def interaction_from_json(obj: dict):
    kind = obj.get("type")
    if kind == "product":
        factors = tuple(_operator_ref_from_json(f) for f in obj.get("factors", []))
        if not factors:
            raise SpecFileError("product interaction: at least one factor required")
        return composite.ProductTerm(
            g=_complex_from_json(obj.get("g", 1.0)),
            factors=factors,
            add_hc=bool(obj.get("add_hc", False)),
        )
    if kind == "expression":
        ops = obj.get("ops", {})
        if not isinstance(ops, dict) or not ops:
            raise SpecFileError("expression interaction: 'ops' map required")
        bindings = tuple(
            (name, *_operator_ref_from_json(ref)) for name, ref in sorted(ops.items())
        )
        constants = tuple(
            (name, _complex_from_json(v))
            for name, v in sorted(obj.get("constants", {}).items())
        )
        expr = obj.get("expr")
        if not expr:
            raise SpecFileError("expression interaction: 'expr' required")
        return composite.ExpressionTerm(
            expr=expr, bindings=bindings, constants=constants,
            add_hc=bool(obj.get("add_hc", False)),
        )
    if kind == "matrix":
        if "matrix" not in obj:
            raise SpecFileError("matrix interaction: 'matrix' required")
        return composite.RawMatrixTerm(matrix_from_json(obj["matrix"]))
    raise SpecFileError(f"interaction type: unknown type {kind!r}")


def hilbertspace_to_json(hs: composite.HilbertSpaceDef) -> dict:
    return {
        "subsystems": [qubit_to_json(s) for s in hs.subsystems],
        "interactions": [interaction_to_json(t) for t in hs.interactions],
    }


def hilbertspace_from_json(obj: dict) -> composite.HilbertSpaceDef:
    if not isinstance(obj, dict) or "subsystems" not in obj:
        raise SpecFileError("hilbertspace: 'subsystems' list required")
    subsystems = tuple(qubit_from_json(s) for s in obj["subsystems"])
    interactions = tuple(interaction_from_json(t) for t in obj.get("interactions", []))
    return composite.HilbertSpaceDef(subsystems, interactions)


# ---------------------------------------------------------------------------
# sweep definitions


def values_from_json(obj) -> np.ndarray:
    if isinstance(obj, dict):
        try:
            return np.linspace(float(obj["start"]), float(obj["stop"]), int(obj["num"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFileError(f"values: expected start/stop/num, got {obj!r}") from exc
    values = np.asarray(obj, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise SpecFileError("values: expected a non-empty 1d array")
    return values


def sweep_to_json(sd: sweep_mod.SweepDef) -> dict:
    out = {
        "hilbertspace": hilbertspace_to_json(sd.hilbertspace),
        "axes": [{"name": name, "values": np.asarray(values).tolist()}
                 for name, values in sd.axes],
        "bindings": [dataclasses.asdict(b) for b in sd.bindings],
        "evals_count": sd.evals_count,
        "worker_count": sd.worker_count,
    }
    if sd.subsys_update_info is not None:
        out["subsys_update_info"] = {
            axis: list(subs) for axis, subs in sd.subsys_update_info
        }
    return out


def sweep_from_json(obj: dict) -> sweep_mod.SweepDef:
    if not isinstance(obj, dict) or "hilbertspace" not in obj:
        raise SpecFileError("sweep: 'hilbertspace' required")
    hs = hilbertspace_from_json(obj["hilbertspace"])
    axes = []
    for ax in obj.get("axes", []):
        if "name" not in ax or "values" not in ax:
            raise SpecFileError("axes: each axis needs 'name' and 'values'")
        axes.append((str(ax["name"]), values_from_json(ax["values"])))
    bindings = []
    for b in obj.get("bindings", []):
        try:
            bindings.append(
                sweep_mod.ParamBinding(
                    subsystem=int(b["subsystem"]),
                    field=str(b["field"]),
                    axis=str(b["axis"]),
                    scale=float(b.get("scale", 1.0)),
                    offset=float(b.get("offset", 0.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFileError(f"bindings: {exc}") from exc
    info = obj.get("subsys_update_info")
    info_tuple = None
    if info is not None:
        info_tuple = tuple(
            (axis, tuple(int(s) for s in subs)) for axis, subs in sorted(info.items())
        )
    try:
        return sweep_mod.SweepDef(
            hilbertspace=hs,
            axes=tuple(axes),
            bindings=tuple(bindings),
            evals_count=int(obj.get("evals_count", 6)),
            subsys_update_info=info_tuple,
            worker_count=int(obj.get("worker_count", 1)),
        )
    except sweep_mod.SweepDefinitionError as exc:
        raise SpecFileError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Hamiltonian export (replaces any external solver hand-off)

HAMILTONIAN_FORMAT = "qspec-hamiltonian/1"


def export_hamiltonian(hs: composite.HilbertSpaceDef, units: str) -> dict:
    """Assembled composite Hamiltonian in the bare product basis as a
    self-describing JSON document (UTF-8 text; dense for small systems,
    coordinate list above 64x64)."""
    operator = composite.assemble_hamiltonian(hs)
    matrix = operator.matrix
    if matrix.shape[0] > 64:
        matrix = scipy.sparse.csr_matrix(matrix)
        matrix.eliminate_zeros()
    return {
        "format": HAMILTONIAN_FORMAT,
        "units": units,
        "subsystem_dims": list(hs.bare_dims),
        "basis": "bare product basis",
        "ordering": "row-major over the subsystem list (last subsystem fastest)",
        "hilbertspace": hilbertspace_to_json(hs),
        "matrix": matrix_to_json(matrix),
    }


# ---------------------------------------------------------------------------
# validation reports


def validate_qubit_json(obj: dict) -> dict:
    """Schema and invariant check without diagonalization; returns a report
    {errors: [...], warnings: [...]} with findings naming the fields."""
    errors: list[str] = []
    warnings: list[str] = []
    try:
        spec = qubit_from_json(obj)
    except (SpecFileError, qubits.SpecValidationError) as exc:
        return {"errors": [str(exc)], "warnings": []}
    if isinstance(spec, qubits.Transmon):
        recommended = min_ncut_estimate(spec.EJ, spec.EC)
        if spec.ncut < recommended:
            warnings.append(
                f"ncut: {spec.ncut} is below the recommended minimum {recommended} "
                f"for EJ/EC = {spec.EJ / spec.EC:.3g}"
            )
    if isinstance(spec, qubits.TunableTransmon):
        recommended = min_ncut_estimate(spec.EJmax, spec.EC)
        if spec.ncut < recommended:
            warnings.append(
                f"ncut: {spec.ncut} is below the recommended minimum {recommended} "
                f"for EJmax/EC = {spec.EJmax / spec.EC:.3g}"
            )
    return {"errors": errors, "warnings": warnings}


def validate_units(units: str) -> str:
    if units not in SUPPORTED_UNITS:
        raise SpecFileError(
            f"units: unknown unit {units!r}; supported: {', '.join(SUPPORTED_UNITS)}"
        )
    return units
