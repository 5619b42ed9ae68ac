"""HTTP API backing the explorer UI: synchronous single-qubit spectra plus
job-based composite sweeps with slice views.

Protocol: submit-and-poll.  POST /v1/sweep returns a job id immediately;
the sweep runs on a worker thread and GET /v1/sweep/{id} reports progress
as completed grid points / total.  Slice views are pure functions of the
finished result and the query, rendered through the same canonical JSON
serializer as the CLI, so identical specs produce byte-identical payloads
on either surface.  Finished jobs are kept in a bounded LRU table; evicted
ids answer 410 with a re-submit hint.
"""

from __future__ import annotations

import itertools
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from . import __version__, composite, expressions, linalg, noise as noise_mod
from . import payloads, qubits, serialize, sweep as sweep_mod
from .grids import UnknownAxisError
from .serialize import SpecFileError, canonical_dumps
from .units import UnknownUnitError

BAD_REQUEST_ERRORS = (
    SpecFileError,
    qubits.SpecValidationError,
    qubits.UnknownOperatorError,
    qubits.UnknownParameterError,
    qubits.UnsupportedRepresentationError,
    qubits.MissingOscillatorLengthError,
    UnknownUnitError,
    UnknownAxisError,
    noise_mod.UnsupportedChannelError,
    expressions.ExprSyntaxError,
    expressions.UnboundIdentifierError,
    expressions.ExprTypeError,
    composite.DimensionMismatchError,
    composite.NonHermitianInteractionError,
    linalg.LinalgError,
    ValueError,
)

COMPUTE_ERRORS = (
    linalg.SolverFailure,
    sweep_mod.SweepPointFailure,
    composite.DispersiveBreakdownError,
    noise_mod.NumericalDerivativeFailure,
    noise_mod.SpectralDensityDomainError,
)


@dataclass
class SweepJob:
    id: str
    definition: sweep_mod.SweepDef
    state: str = "queued"  # queued | running | done | failed
    progress: float = 0.0
    error: Optional[str] = None
    result: Optional[sweep_mod.SweepResult] = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class JobTable:
    """Process-lifetime job registry with LRU eviction of finished jobs."""

    def __init__(self, capacity: int = 8):
        self.capacity = capacity
        self._jobs: "OrderedDict[str, SweepJob]" = OrderedDict()
        self._evicted: set[str] = set()
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def create(self, definition: sweep_mod.SweepDef) -> SweepJob:
        with self._lock:
            job = SweepJob(id=f"job-{next(self._counter)}", definition=definition)
            self._jobs[job.id] = job
            self._evict_if_needed()
            return job

    def get(self, job_id: str) -> SweepJob:
        with self._lock:
            if job_id in self._evicted:
                raise HTTPException(
                    status_code=410,
                    detail=f"job {job_id} was evicted from the result cache; "
                    "re-submit the sweep",
                )
            if job_id not in self._jobs:
                raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
            self._jobs.move_to_end(job_id)
            return self._jobs[job_id]

    def _evict_if_needed(self) -> None:
        finished = [j for j in self._jobs.values() if j.state in ("done", "failed")]
        while len(self._jobs) > self.capacity and finished:
            victim = finished.pop(0)
            del self._jobs[victim.id]
            self._evicted.add(victim.id)


def _run_job(job: SweepJob) -> None:
    def progress(done: int, total: int) -> None:
        with job.lock:
            job.progress = done / total

    with job.lock:
        job.state = "running"
    try:
        result = sweep_mod.run_sweep(job.definition, progress=progress)
    except Exception as exc:
        with job.lock:
            job.state = "failed"
            job.error = str(exc)
        return
    with job.lock:
        job.result = result
        job.progress = 1.0
        job.state = "done"


def _canonical_response(payload) -> Response:
    return Response(content=canonical_dumps(payload), media_type="application/json")


def _parse_int_tuple(text: Optional[str]) -> Optional[tuple[int, ...]]:
    if text is None or text == "":
        return None
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=f"bad tuple {text!r}") from exc


def create_app(units: str = "GHz", job_capacity: int = 8,
               cors_origins: Optional[list[str]] = None) -> FastAPI:
    serialize.validate_units(units)
    app = FastAPI(title="qspec service", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    jobs = JobTable(capacity=job_capacity)
    app.state.jobs = jobs
    app.state.units = units

    def guard(func):
        try:
            return func()
        except HTTPException:
            raise
        except COMPUTE_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except BAD_REQUEST_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__, "units": units}

    @app.post("/v1/qubit/spectrum")
    async def qubit_spectrum(request: Request):
        body = await request.json()

        def work():
            if not isinstance(body, dict) or "qubit" not in body:
                raise SpecFileError("qubit: request body must carry a 'qubit' spec")
            spec = serialize.qubit_from_json(body["qubit"])
            scan = body.get("scan")
            if scan is not None:
                serialize.values_from_json(scan.get("values"))
                if scan.get("param") not in {
                    f.name for f in __import__("dataclasses").fields(spec)
                }:
                    raise SpecFileError(
                        f"scan.param: unknown parameter {scan.get('param')!r}"
                    )
            payload = payloads.spectrum_payload(
                spec,
                body.get("units", units),
                int(body.get("evals_count", 6)),
                scan,
                operator=body.get("operator"),
                select_elems=body.get("select_elems"),
            )
            return _canonical_response(payload)

        return guard(work)

    @app.post("/v1/qubit/wavefunction")
    async def qubit_wavefunction(request: Request):
        body = await request.json()

        def work():
            spec = serialize.qubit_from_json(body.get("qubit", body))
            which = body.get("which", 0)
            which = [which] if isinstance(which, int) else list(which)
            payload = payloads.wavefunction_payload(
                spec, body.get("units", units), which,
                body.get("representation", "native"), body.get("mode", "real"),
            )
            return _canonical_response(payload)

        return guard(work)

    @app.post("/v1/sweep")
    async def submit_sweep(request: Request):
        body = await request.json()

        def work():
            definition = serialize.sweep_from_json(body)
            job = jobs.create(definition)
            thread = threading.Thread(target=_run_job, args=(job,), daemon=True)
            thread.start()
            return {"job_id": job.id}

        return guard(work)

    @app.get("/v1/sweep/{job_id}")
    def sweep_state(job_id: str):
        job = jobs.get(job_id)
        with job.lock:
            payload = {
                "id": job.id,
                "state": job.state,
                "progress": job.progress,
                "axes": [
                    {"name": n, "values": v.tolist()} for n, v in job.definition.axes
                ],
                "subsystem_count": len(job.definition.hilbertspace.subsystems),
                "truncated_dims": list(job.definition.hilbertspace.bare_dims),
                "evals_count": job.definition.evals_count,
            }
            if job.error is not None:
                payload["error"] = job.error
        return payload

    @app.get("/v1/sweep/{job_id}/slice")
    def sweep_slice(
        job_id: str,
        view: str = Query("evals"),
        axis: list[str] = Query(default=[]),
        value: list[float] = Query(default=[]),
        initial: Optional[str] = None,
        photon_number: int = 1,
        sidebands: bool = False,
        subsystems: Optional[str] = None,
        coloring: str = "dispersive",
        subsystem: int = 0,
        operator: str = "n_operator",
        initial_level: int = 0,
        which: str = "0",
        representation: str = "native",
        mode: str = "abs_sqr",
    ):
        job = jobs.get(job_id)
        with job.lock:
            state, error, result = job.state, job.error, job.result
        if state == "failed":
            raise HTTPException(status_code=409, detail=f"job failed: {error}")
        if state != "done":
            raise HTTPException(
                status_code=409, detail=f"job {job_id} is {state}; result not ready"
            )
        if len(axis) != len(value):
            raise HTTPException(
                status_code=400, detail="axis and value query lists must pair up"
            )

        def work():
            sliced = result
            for ax, val in zip(axis, value):
                sliced = sliced.slice(ax, value=val)
            if view == "evals":
                return _canonical_response(payloads.evals_view(sliced, units))
            if view == "bare_evals":
                return _canonical_response(payloads.bare_evals_view(sliced, units))
            if view in ("lamb", "chi", "kerr"):
                return _canonical_response(payloads.coefficient_view(sliced, view, units))
            if view == "transitions":
                return _canonical_response(
                    payloads.transitions_view(
                        sliced, units,
                        initial=_parse_int_tuple(initial),
                        photon_number=photon_number,
                        sidebands=sidebands,
                        subsystems=_parse_int_tuple(subsystems),
                        coloring=coloring,
                    )
                )
            if view == "matelem":
                return _canonical_response(
                    payloads.matelem_view(sliced, units, subsystem, operator,
                                          initial_level)
                )
            if view == "wavefunction":
                levels = _parse_int_tuple(which) or (0,)
                return _canonical_response(
                    payloads.wavefunction_view(sliced, units, subsystem, list(levels),
                                               representation, mode)
                )
            raise HTTPException(status_code=400, detail=f"unknown view {view!r}")

        return guard(work)

    return app
