"""qspec: spectral engine for superconducting circuits.

Library surface: qubit/oscillator families (qspec.qubits), composite
Hilbert spaces (qspec.composite), parameter sweeps (qspec.sweep),
coherence estimation (qspec.noise), unit handling (qspec.units), plus a
CLI (qspec.cli) and an HTTP service (qspec.service).
"""

from .units import (
    UnitContext,
    DEFAULT_UNITS,
    supported_units,
    to_standard_units,
    from_standard_units,
    units_scale_factor,
)
from .linalg import (
    ChargeBasis,
    LadderBasis,
    GridBasis,
    ProductBasis,
    HermitianOperator,
    Eigensystem,
    eigensolve,
    hermitian_matrix_function,
)
from .qubits import (
    Transmon,
    TunableTransmon,
    Fluxonium,
    FluxQubit,
    ZeroPi,
    FullZeroPi,
    Cos2Phi,
    Oscillator,
    KerrOscillator,
    GenericQubit,
    Wavefunction,
    min_ncut_estimate,
    FAMILIES,
)
from .grids import NamedGridArray
from .composite import (
    HilbertSpaceDef,
    ProductTerm,
    ExpressionTerm,
    RawMatrixTerm,
    assemble_hamiltonian,
    bare_spectra,
    dressed_eigensys,
    label_dressed_states,
    dispersive_coefficients,
)
from .sweep import SweepDef, ParamBinding, run_sweep, transitions

__version__ = "0.1.0"

__all__ = [
    "UnitContext",
    "DEFAULT_UNITS",
    "supported_units",
    "to_standard_units",
    "from_standard_units",
    "units_scale_factor",
    "ChargeBasis",
    "LadderBasis",
    "GridBasis",
    "ProductBasis",
    "HermitianOperator",
    "Eigensystem",
    "eigensolve",
    "hermitian_matrix_function",
    "Transmon",
    "TunableTransmon",
    "Fluxonium",
    "FluxQubit",
    "ZeroPi",
    "FullZeroPi",
    "Cos2Phi",
    "Oscillator",
    "KerrOscillator",
    "GenericQubit",
    "Wavefunction",
    "min_ncut_estimate",
    "FAMILIES",
    "NamedGridArray",
    "HilbertSpaceDef",
    "ProductTerm",
    "ExpressionTerm",
    "RawMatrixTerm",
    "assemble_hamiltonian",
    "bare_spectra",
    "dressed_eigensys",
    "label_dressed_states",
    "dispersive_coefficients",
    "SweepDef",
    "ParamBinding",
    "run_sweep",
    "transitions",
    "__version__",
]
