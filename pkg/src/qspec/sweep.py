"""Multi-dimensional parameter sweeps over a composite Hilbert space.

A sweep is declarative: named axes of strictly monotonic values plus a list
of affine bindings `subsystem.field = offset + scale * axis`, which keeps
sweep definitions serializable and reproducible.  Grid points are
independent work items; results are position-addressed, so payloads are
bit-identical regardless of worker count or evaluation order.

Bare subsystem spectra are memoized by the updated subsystem spec itself,
which makes the reuse promised by `subsys_update_info` automatic and
exactly equal to recomputation; the field, when provided, is validated
against the bindings.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import composite
from .composite import DispersiveBreakdownError, HilbertSpaceDef
from .grids import NamedGridArray, UnknownAxisError
from .qubits import QubitSpec


class SweepDefinitionError(ValueError):
    pass


class SweepPointFailure(RuntimeError):
    def __init__(self, coordinates: dict, cause: Exception):
        self.coordinates = coordinates
        super().__init__(f"sweep evaluation failed at {coordinates}: {cause}")


@dataclass(frozen=True)
class ParamBinding:
    """subsystem.field = offset + scale * axis_value"""

    subsystem: int
    field: str
    axis: str
    scale: float = 1.0
    offset: float = 0.0


@dataclass(frozen=True, eq=False)
class SweepDef:
    hilbertspace: HilbertSpaceDef
    axes: tuple[tuple[str, np.ndarray], ...]
    bindings: tuple[ParamBinding, ...]
    evals_count: int = 6
    subsys_update_info: Optional[tuple[tuple[str, tuple[int, ...]], ...]] = None
    worker_count: int = 1

    def __post_init__(self):
        names = [name for name, _ in self.axes]
        if not names:
            raise SweepDefinitionError("at least one axis is required")
        if len(set(names)) != len(names):
            raise SweepDefinitionError(f"duplicate axis names in {names}")
        for name, values in self.axes:
            arr = np.asarray(values, dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise SweepDefinitionError(f"axis {name!r} must be a non-empty 1d array")
            if arr.size > 1:
                diffs = np.diff(arr)
                if not (np.all(diffs > 0) or np.all(diffs < 0)):
                    raise SweepDefinitionError(f"axis {name!r} must be strictly monotonic")
        subsys_count = len(self.hilbertspace.subsystems)
        for b in self.bindings:
            if b.axis not in names:
                raise SweepDefinitionError(f"binding references unknown axis {b.axis!r}")
            if not 0 <= b.subsystem < subsys_count:
                raise SweepDefinitionError(f"binding references subsystem {b.subsystem}")
            spec = self.hilbertspace.subsystems[b.subsystem]
            if b.field not in {f.name for f in dataclasses.fields(spec)}:
                raise SweepDefinitionError(
                    f"{type(spec).__name__} has no parameter {b.field!r}"
                )
        if not 1 <= self.evals_count <= self.hilbertspace.bare_dimension:
            raise SweepDefinitionError(
                f"evals_count must be in [1, {self.hilbertspace.bare_dimension}]"
            )
        if self.worker_count < 1:
            raise SweepDefinitionError("worker_count must be >= 1")
        if self.subsys_update_info is not None:
            info = dict(self.subsys_update_info)
            affected: dict[str, set[int]] = {name: set() for name in names}
            for b in self.bindings:
                affected[b.axis].add(b.subsystem)
            for axis, subsystems in info.items():
                if axis not in names:
                    raise SweepDefinitionError(
                        f"subsys_update_info references unknown axis {axis!r}"
                    )
                if not affected[axis] <= set(subsystems):
                    raise SweepDefinitionError(
                        f"subsys_update_info for axis {axis!r} omits subsystems "
                        f"{sorted(affected[axis] - set(subsystems))} that its "
                        "bindings update"
                    )

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.axes)

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return tuple(len(values) for _, values in self.axes)


def specs_at_point(
    sweep: SweepDef, point: dict[str, float]
) -> tuple[QubitSpec, ...]:
    """Subsystem specs with all bindings applied at the given axis values."""
    updates: dict[int, dict[str, float]] = {}
    for b in sweep.bindings:
        updates.setdefault(b.subsystem, {})[b.field] = b.offset + b.scale * point[b.axis]
    return tuple(
        spec.updated(**updates[s]) if s in updates else spec
        for s, spec in enumerate(sweep.hilbertspace.subsystems)
    )


def hilbertspace_at_point(sweep: SweepDef, point: dict[str, float]) -> HilbertSpaceDef:
    return HilbertSpaceDef(specs_at_point(sweep, point), sweep.hilbertspace.interactions)


def _evaluate_point(sweep: SweepDef, point: dict[str, float], cache: dict) -> dict:
    hs = hilbertspace_at_point(sweep, point)
    bare = []
    for spec in hs.subsystems:
        if spec not in cache:
            cache[spec] = spec.eigensys(spec.truncated_dim)
        bare.append(cache[spec])
    system = composite.dressed_eigensys(hs, sweep.evals_count, bare)
    labels = composite.label_dressed_states(hs, system)
    coeffs = composite.dispersive_coefficients(
        hs, system, bare, labels, strict=False
    )
    n_subsys = len(hs.subsystems)
    label_array = np.full((sweep.evals_count, n_subsys), -1, dtype=int)
    overlap_array = np.zeros(sweep.evals_count)
    for k, label in enumerate(labels):
        if label is not None:
            label_array[k] = label.excitations
            overlap_array[k] = label.overlap
    return {
        "evals": system.evals,
        "evecs": system.evecs,
        "bare_evals": [b.evals for b in bare],
        "bare_evecs": [b.evecs for b in bare],
        "labels": label_array,
        "overlaps": overlap_array,
        "lamb": coeffs["lamb"],
        "chi": coeffs["chi"],
        "kerr": coeffs["kerr"],
    }


def _evaluate_chunk(sweep: SweepDef, flat_indices: list[int]) -> list[tuple[int, dict]]:
    shape = sweep.grid_shape
    cache: dict = {}
    out = []
    for flat in flat_indices:
        multi = np.unravel_index(flat, shape)
        point = {
            name: float(values[multi[k]])
            for k, (name, values) in enumerate(sweep.axes)
        }
        try:
            out.append((flat, _evaluate_point(sweep, point, cache)))
        except Exception as exc:
            raise SweepPointFailure(point, exc) from exc
    return out


class SweepResult:
    """Named-grid payloads produced by run_sweep, dict-addressable by key.

    Keys: "evals", "evecs", "labels", "overlaps", "lamb", "chi", "kerr" map
    to NamedGridArray; "bare_evals" / "bare_evecs" map to one NamedGridArray
    per subsystem.  Custom sweeps are stored under their registered name.
    """

    def __init__(
        self,
        sweep: SweepDef,
        data: dict[str, NamedGridArray],
        bare_evals: tuple[NamedGridArray, ...],
        bare_evecs: tuple[NamedGridArray, ...],
        fixed: Optional[dict[str, int]] = None,
    ):
        self.sweep = sweep
        self._data = data
        self._bare_evals = bare_evals
        self._bare_evecs = bare_evecs
        self.fixed = dict(fixed or {})

    def __getitem__(self, key: str):
        if key == "bare_evals":
            return self._bare_evals
        if key == "bare_evecs":
            return self._bare_evecs
        if key in self._data:
            return self._data[key]
        raise KeyError(f"no stored sweep data under {key!r}; have {sorted(self.keys())}")

    def keys(self) -> list[str]:
        return [*self._data.keys(), "bare_evals", "bare_evecs"]

    @property
    def axes(self) -> tuple[tuple[str, np.ndarray], ...]:
        return self._data["evals"].axes

    @property
    def axis_names(self) -> tuple[str, ...]:
        return self._data["evals"].axis_names

    def point_values(self) -> dict[str, float]:
        """Axis values of the fixed coordinates (for fully sliced results)."""
        out = {}
        for name, index in self.fixed.items():
            for axis_name, values in self.sweep.axes:
                if axis_name == name:
                    out[name] = float(values[index])
        return out

    def slice(self, axis: str, value: float | None = None, index: int | None = None) -> "SweepResult":
        """Fix one axis at a value (nearest-grid rule) or index; composable."""
        reference = self._data["evals"]
        pos = reference.axis_index(axis)  # raises UnknownAxisError
        if index is None:
            if value is None:
                raise ValueError("provide exactly one of value= or index=")
            index = reference.nearest_index(axis, value)
        data = {k: v.slice_at(axis, index=index) for k, v in self._data.items()}
        bare_evals = tuple(b.slice_at(axis, index=index) for b in self._bare_evals)
        bare_evecs = tuple(b.slice_at(axis, index=index) for b in self._bare_evecs)
        fixed = dict(self.fixed)
        fixed[axis] = index
        return SweepResult(self.sweep, data, bare_evals, bare_evecs, fixed)

    def add_custom(self, name: str, fn: Callable[["PointContext"], np.ndarray]) -> None:
        """Evaluate fn at every grid point and store the stacked result."""
        if name in self.keys():
            raise ValueError(f"sweep data key {name!r} already exists")
        if self.fixed:
            raise ValueError("custom sweeps must be added to the unsliced result")
        shape = self.sweep.grid_shape
        samples = []
        for flat in range(int(np.prod(shape))):
            multi = np.unravel_index(flat, shape)
            ctx = PointContext(self, tuple(int(i) for i in multi))
            try:
                samples.append(np.asarray(fn(ctx)))
            except Exception as exc:
                raise SweepPointFailure(ctx.point, exc) from exc
        stacked = np.stack(samples).reshape(shape + samples[0].shape)
        self._data[name] = NamedGridArray(self.axes, stacked)


@dataclass(frozen=True)
class PointContext:
    """Access to one grid point's data for custom sweep functions."""

    result: SweepResult
    index: tuple[int, ...]

    @property
    def point(self) -> dict[str, float]:
        return {
            name: float(values[self.index[k]])
            for k, (name, values) in enumerate(self.result.sweep.axes)
        }

    def __getitem__(self, key: str):
        data = self.result[key]
        if key in ("bare_evals", "bare_evecs"):
            return tuple(d.payload[self.index] for d in data)
        return data.payload[self.index]


def run_sweep(
    sweep: SweepDef, progress: Optional[Callable[[int, int], None]] = None
) -> SweepResult:
    """Evaluate the sweep over its full grid.

    Points are split into contiguous chunks over `worker_count` processes;
    assembly is position-addressed so the stored payloads do not depend on
    the worker count.
    """
    shape = sweep.grid_shape
    total = int(np.prod(shape))
    records: list[Optional[dict]] = [None] * total

    if sweep.worker_count == 1:
        cache: dict = {}
        for flat in range(total):
            multi = np.unravel_index(flat, shape)
            point = {
                name: float(values[multi[k]])
                for k, (name, values) in enumerate(sweep.axes)
            }
            try:
                records[flat] = _evaluate_point(sweep, point, cache)
            except Exception as exc:
                raise SweepPointFailure(point, exc) from exc
            if progress is not None:
                progress(flat + 1, total)
    else:
        workers = min(sweep.worker_count, total)
        chunks = [list(range(start, total, workers)) for start in range(workers)]
        done = 0
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_evaluate_chunk, sweep, chunk) for chunk in chunks]
            for future in concurrent.futures.as_completed(futures):
                for flat, record in future.result():
                    records[flat] = record
                    done += 1
                if progress is not None:
                    progress(done, total)

    axes = tuple((name, np.asarray(values, dtype=float)) for name, values in sweep.axes)

    def stack(key: str) -> NamedGridArray:
        arr = np.stack([r[key] for r in records])
        return NamedGridArray(axes, arr.reshape(shape + arr.shape[1:]))

    data = {key: stack(key) for key in ("evals", "evecs", "labels", "overlaps", "lamb", "chi", "kerr")}
    n_subsys = len(sweep.hilbertspace.subsystems)
    bare_evals = []
    bare_evecs = []
    for s in range(n_subsys):
        evals = np.stack([r["bare_evals"][s] for r in records])
        evecs = np.stack([r["bare_evecs"][s] for r in records])
        bare_evals.append(NamedGridArray(axes, evals.reshape(shape + evals.shape[1:])))
        bare_evecs.append(NamedGridArray(axes, evecs.reshape(shape + evecs.shape[1:])))
    return SweepResult(sweep, data, tuple(bare_evals), tuple(bare_evecs))


# ---------------------------------------------------------------------------
# transitions


@dataclass(frozen=True)
class Transition:
    """One transition branch over the remaining sweep axis."""

    final: Optional[tuple[int, ...]]
    energies: np.ndarray  # NaN where the final label did not resolve
    kind: str  # "subsystem" | "sideband" | "plain"
    subsystem: Optional[int] = None


@dataclass(frozen=True)
class TransitionSet:
    initial: tuple[int, ...]
    axis_name: str
    axis_values: np.ndarray
    transitions: tuple[Transition, ...]
    photon_number: int


def transitions(
    result: SweepResult,
    initial: Optional[tuple[int, ...]] = None,
    photon_number: int = 1,
    sidebands: bool = False,
    subsystems: Optional[Sequence[int]] = None,
    coloring: str = "dispersive",
) -> TransitionSet:
    """Transition energies (E_final - E_initial) / photon_number along the
    one remaining axis of a pre-sliced sweep result.

    Dispersive coloring classifies each labeled branch as a single-subsystem
    transition or (with sidebands=True) a sideband; coloring="plain" keeps
    all dressed-level differences from the initial state without labels.
    """
    if len(result.axis_names) != 1:
        raise ValueError(
            f"transitions need exactly one free axis; have {result.axis_names}"
        )
    if photon_number < 1:
        raise ValueError("photon_number must be >= 1")
    n_subsys = len(result.sweep.hilbertspace.subsystems)
    initial = tuple([0] * n_subsys) if initial is None else tuple(initial)
    if len(initial) != n_subsys:
        raise ValueError(f"initial label must have {n_subsys} entries")

    axis_name = result.axis_names[0]
    axis_values = result["evals"].axis_values(axis_name)
    evals = result["evals"].payload  # (npoints, k)
    labels = result["labels"].payload  # (npoints, k, S)
    npoints, count = evals.shape

    label_maps: list[dict[tuple[int, ...], int]] = []
    for p in range(npoints):
        mapping = {}
        for k in range(count):
            if labels[p, k, 0] >= 0:
                mapping[tuple(int(x) for x in labels[p, k])] = k
        label_maps.append(mapping)

    initial_energy = np.empty(npoints)
    for p in range(npoints):
        if initial not in label_maps[p]:
            raise DispersiveBreakdownError([initial]) from ValueError(
                f"initial label {initial} unresolved at {axis_name}={axis_values[p]}"
            )
        initial_energy[p] = evals[p, label_maps[p][initial]]

    branches: list[Transition] = []
    if coloring == "plain":
        for k in range(count):
            energies = (evals[:, k] - initial_energy) / photon_number
            branches.append(Transition(None, energies, "plain"))
    elif coloring == "dispersive":
        finals = sorted({t for m in label_maps for t in m} - {initial})
        allowed = None if subsystems is None else set(subsystems)
        for final in finals:
            changed = [s for s in range(n_subsys) if final[s] != initial[s]]
            if not changed:
                continue
            if len(changed) == 1:
                kind, subsystem = "subsystem", changed[0]
            else:
                if not sidebands:
                    continue
                kind, subsystem = "sideband", None
            if allowed is not None and not set(changed) <= allowed:
                continue
            energies = np.full(npoints, np.nan)
            for p in range(npoints):
                if final in label_maps[p]:
                    energies[p] = (
                        evals[p, label_maps[p][final]] - initial_energy[p]
                    ) / photon_number
            branches.append(Transition(final, energies, kind, subsystem))
    else:
        raise ValueError(f"unknown coloring {coloring!r}; use 'dispersive' or 'plain'")

    return TransitionSet(initial, axis_name, np.asarray(axis_values), tuple(branches), photon_number)
