"""Composite Hilbert spaces: hierarchical diagonalization, the three
interaction interfaces, dressed-state labeling, and dispersive coefficients.

Assembly follows the two-step scheme: every subsystem is diagonalized on
its own, the lowest `truncated_dim` bare states are kept, and the coupled
Hamiltonian is represented in the resulting bare product basis.  The basis
is ordered row-major over the subsystem list (last subsystem varies
fastest), matching numpy's kron convention.

Interaction operators are given in each subsystem's native basis, either as
a named built-in (the subsystem's published operator names) or as an inline
matrix; they are rotated into the bare eigenbasis and truncated during
assembly.  In the expression interface every bound operator denotes its
embedded full-space matrix, so products across subsystems are ordinary
matrix products and cos/sin/exp act after truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse

from . import expressions, linalg
from .linalg import Eigensystem, HermitianOperator
from .qubits import QubitSpec


class DimensionMismatchError(ValueError):
    pass


class NonHermitianInteractionError(ValueError):
    pass


class DispersiveBreakdownError(ValueError):
    def __init__(self, missing: Sequence[tuple]):
        self.missing = list(missing)
        super().__init__(
            "dispersive labeling failed; missing bare labels: "
            + ", ".join(str(t) for t in self.missing)
        )


OperatorRef = Union[str, np.ndarray, scipy.sparse.spmatrix]


@dataclass(frozen=True, eq=False)
class ProductTerm:
    """g * A_1 A_2 ... with each factor acting on one subsystem; add_hc
    appends the Hermitian conjugate of the whole term."""

    g: complex
    factors: tuple[tuple[OperatorRef, int], ...]
    add_hc: bool = False


@dataclass(frozen=True, eq=False)
class ExpressionTerm:
    """Interaction defined in the closed expression language; bindings map
    identifier -> (operator-ref, subsystem index)."""

    expr: str
    bindings: tuple[tuple[str, OperatorRef, int], ...]
    constants: tuple[tuple[str, complex], ...] = ()
    add_hc: bool = False


@dataclass(frozen=True, eq=False)
class RawMatrixTerm:
    """Hermitian matrix over the full bare product space, identities
    already in place."""

    matrix: Union[np.ndarray, scipy.sparse.spmatrix]


InteractionTerm = Union[ProductTerm, ExpressionTerm, RawMatrixTerm]


@dataclass(frozen=True)
class BareEigenbasis:
    """Product of truncated subsystem eigenbases."""

    dims: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return math.prod(self.dims)


@dataclass(frozen=True, eq=False)
class HilbertSpaceDef:
    subsystems: tuple[QubitSpec, ...]
    interactions: tuple[InteractionTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.subsystems) == 0:
            raise ValueError("at least one subsystem is required")

    @property
    def bare_dims(self) -> tuple[int, ...]:
        return tuple(s.truncated_dim for s in self.subsystems)

    @property
    def bare_dimension(self) -> int:
        return math.prod(self.bare_dims)


@dataclass(frozen=True)
class DressedLabel:
    """Bare excitation tuple assigned to a dressed state by maximal overlap."""

    excitations: tuple[int, ...]
    overlap: float


def bare_spectra(hs: HilbertSpaceDef) -> list[Eigensystem]:
    """Diagonalize each subsystem and keep its lowest truncated_dim pairs."""
    systems = []
    for index, spec in enumerate(hs.subsystems):
        try:
            systems.append(spec.eigensys(spec.truncated_dim))
        except linalg.SolverFailure as exc:
            raise linalg.SolverFailure(f"subsystem {index}: {exc}") from exc
    return systems


def _to_dense(matrix) -> np.ndarray:
    if scipy.sparse.issparse(matrix):
        return matrix.toarray()
    return np.asarray(matrix)


def _resolve_native(spec: QubitSpec, ref: OperatorRef) -> np.ndarray:
    if isinstance(ref, str):
        return _to_dense(spec.operator(ref))
    matrix = _to_dense(ref)
    if matrix.shape != (spec.hilbert_dim, spec.hilbert_dim):
        raise DimensionMismatchError(
            f"inline operator shape {matrix.shape} does not match the subsystem "
            f"dimension {spec.hilbert_dim}"
        )
    return matrix


def _rotate_truncate(native: np.ndarray, system: Eigensystem, truncated_dim: int) -> np.ndarray:
    v = system.evecs[:, :truncated_dim]
    return v.conj().T @ native @ v


def _embed(dims: tuple[int, ...], blocks: dict[int, np.ndarray]) -> np.ndarray:
    mats = [blocks.get(i, np.eye(d)) for i, d in enumerate(dims)]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def embed_operator(
    hs: HilbertSpaceDef,
    subsystem: int,
    ref: OperatorRef,
    bare: Optional[list[Eigensystem]] = None,
) -> np.ndarray:
    """Rotate a native-basis subsystem operator into the bare eigenbasis,
    truncate, and Kronecker-embed with identities in subsystem order."""
    if not 0 <= subsystem < len(hs.subsystems):
        raise DimensionMismatchError(f"no subsystem with index {subsystem}")
    bare = bare if bare is not None else bare_spectra(hs)
    spec = hs.subsystems[subsystem]
    native = _resolve_native(spec, ref)
    small = _rotate_truncate(native, bare[subsystem], spec.truncated_dim)
    return _embed(hs.bare_dims, {subsystem: small})


def _term_matrix(hs: HilbertSpaceDef, term: InteractionTerm, bare: list[Eigensystem]) -> np.ndarray:
    dims = hs.bare_dims
    if isinstance(term, ProductTerm):
        # factors on the same subsystem multiply natively, in listed order,
        # before rotation; distinct subsystems tensor-combine
        native_chain: dict[int, np.ndarray] = {}
        for ref, subsys in term.factors:
            if not 0 <= subsys < len(hs.subsystems):
                raise DimensionMismatchError(f"no subsystem with index {subsys}")
            native = _resolve_native(hs.subsystems[subsys], ref)
            native_chain[subsys] = (
                native_chain[subsys] @ native if subsys in native_chain else native
            )
        blocks = {
            s: _rotate_truncate(m, bare[s], hs.subsystems[s].truncated_dim)
            for s, m in native_chain.items()
        }
        matrix = term.g * _embed(dims, blocks)
    elif isinstance(term, ExpressionTerm):
        operators = {
            name: embed_operator(hs, subsys, ref, bare)
            for name, ref, subsys in term.bindings
        }
        scalars = dict(term.constants)
        ast = expressions.parse_expression(term.expr, set(operators), set(scalars))
        if ast.type != expressions.OPERATOR:
            raise NonHermitianInteractionError(
                "interaction expression evaluates to a scalar, not an operator"
            )
        matrix = expressions.evaluate(ast, operators, scalars)
    elif isinstance(term, RawMatrixTerm):
        matrix = _to_dense(term.matrix)
        if matrix.shape != (hs.bare_dimension, hs.bare_dimension):
            raise DimensionMismatchError(
                f"raw interaction matrix shape {matrix.shape} does not match the "
                f"bare product dimension {hs.bare_dimension}"
            )
    else:
        raise TypeError(f"unknown interaction term {term!r}")

    if getattr(term, "add_hc", False):
        matrix = matrix + matrix.conj().T
    if not linalg.is_hermitian(matrix):
        raise NonHermitianInteractionError(
            "interaction term is not Hermitian; set add_hc=True or supply a "
            "Hermitian combination"
        )
    return matrix


def assemble_hamiltonian(
    hs: HilbertSpaceDef, bare: Optional[list[Eigensystem]] = None
) -> HermitianOperator:
    """Bare-energy diagonal plus all lifted interaction terms, in the bare
    product basis."""
    bare = bare if bare is not None else bare_spectra(hs)
    dims = hs.bare_dims
    energies = np.zeros(dims)
    for s, system in enumerate(bare):
        shape = [1] * len(dims)
        shape[s] = dims[s]
        energies = energies + system.evals[: dims[s]].reshape(shape)
    matrix = np.diag(energies.ravel(order="C")).astype(complex)
    for term in hs.interactions:
        matrix = matrix + _term_matrix(hs, term, bare)
    return HermitianOperator(matrix, BareEigenbasis(dims))


def dressed_eigensys(
    hs: HilbertSpaceDef,
    evals_count: int,
    bare: Optional[list[Eigensystem]] = None,
) -> Eigensystem:
    return linalg.eigensolve(assemble_hamiltonian(hs, bare).matrix, evals_count)


def label_dressed_states(
    hs: HilbertSpaceDef, system: Eigensystem, threshold: float = 0.5
) -> list[Optional[DressedLabel]]:
    """Assign each dressed state its dominant bare product label.

    A label is granted only when the squared overlap reaches the threshold,
    and each bare tuple is given out at most once: candidates are ranked by
    overlap (ties resolved toward the lower dressed index).
    """
    dims = hs.bare_dims
    overlaps = np.abs(system.evecs) ** 2
    count = system.evecs.shape[1]
    best_bare = np.argmax(overlaps, axis=0)
    best_overlap = overlaps[best_bare, np.arange(count)]

    labels: list[Optional[DressedLabel]] = [None] * count
    claimed: set[int] = set()
    order = sorted(range(count), key=lambda j: (-best_overlap[j], j))
    for j in order:
        bare_index = int(best_bare[j])
        if best_overlap[j] >= threshold and bare_index not in claimed:
            claimed.add(bare_index)
            excitations = tuple(int(x) for x in np.unravel_index(bare_index, dims))
            labels[j] = DressedLabel(excitations, float(best_overlap[j]))
    return labels


def _labeled_energies(
    labels: Sequence[Optional[DressedLabel]], evals: np.ndarray
) -> dict[tuple[int, ...], float]:
    out: dict[tuple[int, ...], float] = {}
    for j, label in enumerate(labels):
        if label is not None:
            out[label.excitations] = float(evals[j])
    return out


def dispersive_coefficients(
    hs: HilbertSpaceDef,
    system: Optional[Eigensystem] = None,
    bare: Optional[list[Eigensystem]] = None,
    labels: Optional[Sequence[Optional[DressedLabel]]] = None,
    threshold: float = 0.5,
    strict: bool = True,
) -> dict[str, np.ndarray]:
    """Lamb shifts, cross-Kerr (chi) and self-Kerr coefficients from labeled
    dressed energies.

    With E(t) the dressed energy labeled by excitation tuple t, e_j the unit
    excitation of subsystem j, and eps_j(k) the bare level-k energy:

        lamb[j, k]       = [E(k e_j) - E(0)] - [eps_j(k) - eps_j(0)]
        chi[j, l, k, m]  = E(k e_j + m e_l) - E(k e_j) - E(m e_l) + E(0)
        kerr[j, j]       = [E(2 e_j) - 2 E(e_j) + E(0)]
                           - [eps_j(2) - 2 eps_j(1) + eps_j(0)]
        kerr[j, l] (j!=l) = chi[j, l, 1, 1]

    All are coupling-induced quantities: they vanish identically at zero
    coupling (the bare level structure is subtracted out).

    Entries whose labels did not resolve are NaN; in strict mode, missing
    ground / single- / double-excitation labels raise DispersiveBreakdownError.
    """
    bare = bare if bare is not None else bare_spectra(hs)
    if system is None:
        system = dressed_eigensys(hs, hs.bare_dimension, bare)
    if labels is None:
        labels = label_dressed_states(hs, system, threshold)
    energy = _labeled_energies(labels, system.evals)

    dims = hs.bare_dims
    n_subsys = len(dims)
    kmax = max(dims)

    def tup(**levels) -> tuple[int, ...]:
        t = [0] * n_subsys
        for idx, k in levels.items():
            t[int(idx)] = k
        return tuple(t)

    if strict:
        required = [tuple([0] * n_subsys)]
        for j in range(n_subsys):
            if dims[j] >= 2:
                required.append(tup(**{str(j): 1}))
            if dims[j] >= 3:
                required.append(tup(**{str(j): 2}))
        for j in range(n_subsys):
            for l in range(j + 1, n_subsys):
                if dims[j] >= 2 and dims[l] >= 2:
                    t = [0] * n_subsys
                    t[j] = 1
                    t[l] = 1
                    required.append(tuple(t))
        missing = [t for t in required if t not in energy]
        if missing:
            raise DispersiveBreakdownError(missing)

    ground = tuple([0] * n_subsys)
    e0 = energy.get(ground, np.nan)

    lamb = np.full((n_subsys, kmax), np.nan)
    for j in range(n_subsys):
        for k in range(dims[j]):
            t = tup(**{str(j): k})
            if t in energy and not np.isnan(e0):
                bare_gap = bare[j].evals[k] - bare[j].evals[0]
                lamb[j, k] = (energy[t] - e0) - bare_gap

    chi = np.full((n_subsys, n_subsys, kmax, kmax), np.nan)
    for j in range(n_subsys):
        for l in range(n_subsys):
            if j == l:
                continue
            for k in range(dims[j]):
                for m in range(dims[l]):
                    t_jl = [0] * n_subsys
                    t_jl[j], t_jl[l] = k, m
                    t_j = tup(**{str(j): k})
                    t_l = tup(**{str(l): m})
                    keys = (tuple(t_jl), t_j, t_l)
                    if all(key in energy for key in keys) and not np.isnan(e0):
                        chi[j, l, k, m] = (
                            energy[keys[0]] - energy[t_j] - energy[t_l] + e0
                        )

    kerr = np.full((n_subsys, n_subsys), np.nan)
    for j in range(n_subsys):
        t2 = tup(**{str(j): 2}) if dims[j] >= 3 else None
        t1 = tup(**{str(j): 1})
        if t2 is not None and t2 in energy and t1 in energy and not np.isnan(e0):
            # coupling-induced self-Kerr: the subsystem's own bare
            # anharmonicity is subtracted so kerr vanishes at zero coupling
            bare_anharm = bare[j].evals[2] - 2.0 * bare[j].evals[1] + bare[j].evals[0]
            kerr[j, j] = (energy[t2] - 2.0 * energy[t1] + e0) - bare_anharm
        for l in range(n_subsys):
            if l != j and kmax >= 2:
                kerr[j, l] = chi[j, l, 1, 1]

    return {"lamb": lamb, "chi": chi, "kerr": kerr}
