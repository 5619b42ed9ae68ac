"""Coherence-time estimation: 1/f dephasing, golden-rule depolarization with
detailed balance, a predefined channel catalogue, and effective T1/T2.

Unit handling: qubit energies are plain frequencies in context units; this
module converts them to angular frequencies in rad/s (omega = 2 pi E *
scale_to_Hz) before applying any rate formula, and converts the resulting
times from seconds back to context time units (1 / context frequency unit,
so GHz yields ns).

Rate conventions:

* golden rule: Gamma_{i->j} = |<i|B|j>|^2 S(omega_ij) / hbar^2 with
  omega_ij = omega_i - omega_j, positive for decay, so that thermal spectral
  densities obeying S(omega)/S(-omega) = exp(hbar omega / kB T) suppress
  upward transitions by the Boltzmann factor;
* 1/f dephasing: S(omega) = 2 pi A^2 / |omega| leads to the pure dephasing
  rate Gamma_phi = A |d omega_01 / d lambda| sqrt(2 |ln(omega_low t_exp)|),
  and the returned time is 1/Gamma_phi (the printed closed form reads
  dimensionally as a rate and is used as such);
* at sweet spots (the finite-difference derivative vanishes) the dephasing
  time is +infinity; higher-order corrections are out of scope.

Predefined depolarization channels use literature-standard spectral
densities (none of them carries a quoted number from the source text; they
are validated through detailed balance, reciprocity, and linearity):

* t1_capacitive: dielectric loss, B = n,
  S = 16 E_C hbar / Q_cap(|w|) * sgn(w)/(1 - e^{-hbar w/kB T}),
  Q_cap(w) = Q_cap_0 (2 pi 6 GHz / |w|)^0.7;
* t1_charge_impedance: B = n, S = 8 e^2 hbar w Re Z(|w|) / (1 - e^{-x});
* t1_flux_bias_line: B = dH/dflux (Joules per flux quantum),
  S = M^2 2 hbar w / (R (1 - e^{-x})), M in flux quanta per ampere;
* t1_inductive: B = phi, S = 2 E_L hbar / Q_ind * sgn(w)/(1 - e^{-x});
* t1_quasiparticle_tunneling: B = sin(phi/2),
  S = x_qp (8 E_J hbar / pi) sqrt(2 Delta / (hbar |w|)) sgn(w)/(1 - e^{-x}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.constants
import scipy.sparse

from . import linalg
from .grids import NamedGridArray
from .qubits import (
    Cos2Phi,
    FluxQubit,
    Fluxonium,
    FullZeroPi,
    QubitBase,
    Transmon,
    TunableTransmon,
    ZeroPi,
)
from .units import DEFAULT_UNITS, UnitContext

HBAR = scipy.constants.hbar
H_PLANCK = scipy.constants.h
KB = scipy.constants.k
E_CHARGE = scipy.constants.e

# defaults for Eq.-level parameters
T_EXP_DEFAULT = 10e-6  # s
OMEGA_LOW_DEFAULT = 2.0 * math.pi * 1.0  # rad/s
TEMPERATURE_DEFAULT = 0.015  # K

# documented channel defaults (literature-informed, not quoted values)
A_FLUX_DEFAULT = 1e-6  # flux quanta
A_NG_DEFAULT = 1e-4  # Cooper pairs
A_CC_DEFAULT = 1e-7  # fractional critical-current amplitude
Q_CAP_DEFAULT = 1e6
Q_IND_DEFAULT = 500e6
Z_LINE_DEFAULT = 50.0  # Ohm
R_FLUX_LINE_DEFAULT = 50.0  # Ohm
M_FLUX_LINE_DEFAULT = 1000.0  # flux quanta per ampere
X_QP_DEFAULT = 3e-6
DELTA_GAP_DEFAULT = 3.4e-4 * scipy.constants.e  # superconducting gap, J

SWEET_SPOT_DERIVATIVE_THRESHOLD = 1e-12  # rad/s per unit lambda


class UnsupportedChannelError(ValueError):
    pass


class SpectralDensityDomainError(ValueError):
    pass


class NumericalDerivativeFailure(RuntimeError):
    pass


class UnknownLambdaFieldError(KeyError):
    pass


@dataclass(frozen=True)
class CoherenceEstimate:
    """Coherence time in context time units (1/context frequency unit).

    `rate` is exactly 1/time (0 for an infinite, sweet-spot time).
    """

    time: float
    levels: tuple[int, int]
    channel: str
    params: dict = dataclass_field(default_factory=dict)

    @property
    def rate(self) -> float:
        if math.isinf(self.time):
            return 0.0
        return 1.0 / self.time

    def value(self, get_rate: bool = False) -> float:
        return self.rate if get_rate else self.time


@dataclass(frozen=True)
class SpectralDensity:
    """Noise power as a function of angular frequency (rad/s), with the bath
    temperature recorded for thermal densities."""

    func: Callable[[float], float]
    temperature: Optional[float] = None

    def __call__(self, omega: float) -> float:
        return self.func(omega)


def _thermal_step(omega: float, temperature: float) -> float:
    """sgn(omega) / (1 - exp(-hbar omega / kB T)); obeys detailed balance and
    is positive for either sign of omega."""
    if omega == 0.0:
        raise SpectralDensityDomainError("spectral density undefined at zero frequency")
    if temperature <= 0.0:
        return 1.0 if omega > 0 else 0.0
    x = HBAR * omega / (KB * temperature)
    if x > 700.0:
        return 1.0
    if x < -700.0:
        return 0.0
    return math.copysign(1.0, omega) / (1.0 - math.exp(-x))


def one_over_f_spectral_density(A: float, lambda_units_to_si: float = 1.0) -> SpectralDensity:
    """1/f density S(omega) = 2 pi A^2 / |omega|."""

    def func(omega: float) -> float:
        if omega == 0.0:
            raise SpectralDensityDomainError("1/f density diverges at zero frequency")
        return 2.0 * math.pi * (A * lambda_units_to_si) ** 2 / abs(omega)

    return SpectralDensity(func)


# ---------------------------------------------------------------------------
# derivative machinery


def _energy_gap_si(spec: QubitBase, i: int, j: int, ctx: UnitContext) -> float:
    """omega_ij = 2 pi (E_j - E_i) in rad/s."""
    evals = spec.eigenvals(max(i, j) + 1)
    return 2.0 * math.pi * (evals[j] - evals[i]) * ctx.scale_to_hz


def _domega_dlambda(
    spec: QubitBase,
    lambda_field: str,
    i: int,
    j: int,
    ctx: UnitContext,
    rel_tol: float = 1e-6,
    max_halvings: int = 12,
) -> float:
    """d omega_ij / d lambda by central differences with step halving until
    the estimate is stable to rel_tol."""
    fields = {f.name for f in __import__("dataclasses").fields(spec)}
    if lambda_field not in fields:
        raise UnknownLambdaFieldError(
            f"{type(spec).__name__} has no parameter {lambda_field!r}"
        )
    lam0 = float(getattr(spec, lambda_field))

    def gap(lam: float) -> float:
        return _energy_gap_si(spec.updated(**{lambda_field: lam}), i, j, ctx)

    h = 1e-2 * (1.0 + abs(lam0))
    previous = None
    for _ in range(max_halvings):
        d = (gap(lam0 + h) - gap(lam0 - h)) / (2.0 * h)
        if not math.isfinite(d):
            raise NumericalDerivativeFailure(
                f"non-finite derivative of omega_{i}{j} with respect to {lambda_field}"
            )
        if previous is not None:
            scale = max(abs(d), abs(previous))
            if scale < SWEET_SPOT_DERIVATIVE_THRESHOLD:
                return 0.0
            if abs(d - previous) <= rel_tol * scale:
                # Richardson combination of the last two central differences
                # removes the leading O(h^2) truncation term
                return (4.0 * d - previous) / 3.0
        previous = d
        h *= 0.5
    return previous


def derivative_hamiltonian_matrix(
    spec: QubitBase, field_name: str, step: float = 1e-6
):
    """Central finite-difference dH/dfield in the family's native basis
    (context energy units per unit field)."""
    plus = spec.updated(**{field_name: getattr(spec, field_name) + step}).hamiltonian().matrix
    minus = spec.updated(**{field_name: getattr(spec, field_name) - step}).hamiltonian().matrix
    return (plus - minus) / (2.0 * step)


# ---------------------------------------------------------------------------
# core engines


def tphi_1_over_f(
    spec: QubitBase,
    A: float,
    lambda_field: str,
    i: int = 0,
    j: int = 1,
    omega_low: float = OMEGA_LOW_DEFAULT,
    t_exp: float = T_EXP_DEFAULT,
    ctx: UnitContext = DEFAULT_UNITS,
    channel: str = "tphi_1_over_f",
) -> CoherenceEstimate:
    """Pure dephasing time from 1/f noise in the parameter lambda_field:
    Gamma_phi = A |d omega_ij / d lambda| sqrt(2 |ln(omega_low t_exp)|)."""
    if A <= 0:
        raise ValueError("noise amplitude A must be positive")
    if not omega_low * t_exp < 1.0:
        raise ValueError("omega_low * t_exp must be < 1 for the 1/f log factor")
    derivative = _domega_dlambda(spec, lambda_field, i, j, ctx)
    params = {"A": A, "lambda": lambda_field, "omega_low": omega_low, "t_exp": t_exp}
    if abs(derivative) < SWEET_SPOT_DERIVATIVE_THRESHOLD:
        return CoherenceEstimate(math.inf, (i, j), channel, params)
    rate_si = A * abs(derivative) * math.sqrt(2.0 * abs(math.log(omega_low * t_exp)))
    return CoherenceEstimate((1.0 / rate_si) * ctx.scale_to_hz, (i, j), channel, params)


def _matrix_element(spec: QubitBase, operator, i: int, j: int) -> complex:
    system = spec.eigensys(max(i, j) + 1)
    vi = system.evecs[:, i]
    vj = system.evecs[:, j]
    if scipy.sparse.issparse(operator):
        return complex(vi.conj() @ (operator @ vj))
    return complex(vi.conj() @ np.asarray(operator) @ vj)


def t1(
    spec: QubitBase,
    operator,
    spectral_density: Union[SpectralDensity, Callable[[float], float]],
    i: int = 0,
    j: int = 1,
    total: bool = True,
    ctx: UnitContext = DEFAULT_UNITS,
    channel: str = "t1",
    params: Optional[dict] = None,
) -> CoherenceEstimate:
    """Golden-rule depolarization time between levels i and j.

    One-way rate: Gamma_{i->j} = |<i|B|j>|^2 S(omega_i - omega_j) / hbar^2
    (argument positive for decay); total=True returns 1/(Gamma_ij + Gamma_ji).
    """
    if i == j:
        raise ValueError("depolarization requires two distinct levels")
    evals = spec.eigenvals(max(i, j) + 1)
    omega_ij = 2.0 * math.pi * (evals[i] - evals[j]) * ctx.scale_to_hz
    melem_sq = abs(_matrix_element(spec, operator, i, j)) ** 2

    def one_way(omega: float) -> float:
        return melem_sq * spectral_density(omega) / HBAR**2

    rate_si = one_way(omega_ij)
    if total:
        rate_si += one_way(-omega_ij)
    time = math.inf if rate_si == 0.0 else (1.0 / rate_si) * ctx.scale_to_hz
    return CoherenceEstimate(time, (i, j), channel, params or {})


# ---------------------------------------------------------------------------
# channel catalogue


def _charge_operator(spec: QubitBase):
    if isinstance(spec, FluxQubit):
        return spec.operator("n_1_operator")
    return spec.operator("n_operator")


def _capacitive_energy(spec: QubitBase) -> float:
    if isinstance(spec, FluxQubit):
        return spec.ECJ1
    return spec.EC


def _cc_field(spec: QubitBase) -> str:
    if isinstance(spec, TunableTransmon):
        return "EJmax"
    if isinstance(spec, FluxQubit):
        return "EJ1"
    return "EJ"


def _ng_field(spec: QubitBase) -> str:
    return "ng1" if isinstance(spec, FluxQubit) else "ng"


def _channel_tphi_flux(spec, ctx, options):
    A = options.pop("A_noise", A_FLUX_DEFAULT)
    return tphi_1_over_f(
        spec, A, "flux", options.pop("i", 0), options.pop("j", 1),
        options.pop("omega_low", OMEGA_LOW_DEFAULT), options.pop("t_exp", T_EXP_DEFAULT),
        ctx, channel="tphi_1_over_f_flux",
    )


def _channel_tphi_ng(spec, ctx, options):
    A = options.pop("A_noise", A_NG_DEFAULT)
    return tphi_1_over_f(
        spec, A, _ng_field(spec), options.pop("i", 0), options.pop("j", 1),
        options.pop("omega_low", OMEGA_LOW_DEFAULT), options.pop("t_exp", T_EXP_DEFAULT),
        ctx, channel="tphi_1_over_f_ng",
    )


def _channel_tphi_cc(spec, ctx, options):
    # fractional critical-current amplitude: the effective 1/f amplitude in
    # absolute energy units is A * EJ
    A = options.pop("A_noise", A_CC_DEFAULT)
    field_name = _cc_field(spec)
    a_abs = A * abs(getattr(spec, field_name))
    return tphi_1_over_f(
        spec, a_abs, field_name, options.pop("i", 0), options.pop("j", 1),
        options.pop("omega_low", OMEGA_LOW_DEFAULT), options.pop("t_exp", T_EXP_DEFAULT),
        ctx, channel="tphi_1_over_f_cc",
    )


def _channel_t1_capacitive(spec, ctx, options):
    T = options.pop("T", TEMPERATURE_DEFAULT)
    q_cap = options.pop("Q_cap", None)
    ec_joule = H_PLANCK * _capacitive_energy(spec) * ctx.scale_to_hz

    def quality(omega: float) -> float:
        if q_cap is not None:
            return q_cap(abs(omega)) if callable(q_cap) else q_cap
        return Q_CAP_DEFAULT * (2.0 * math.pi * 6e9 / abs(omega)) ** 0.7

    def s_func(omega: float) -> float:
        return 16.0 * ec_joule * HBAR / quality(omega) * _thermal_step(omega, T)

    return t1(
        spec, _charge_operator(spec), SpectralDensity(s_func, T),
        options.pop("i", 0), options.pop("j", 1), options.pop("total", True),
        ctx, channel="t1_capacitive", params={"T": T},
    )


def _channel_t1_charge_impedance(spec, ctx, options):
    T = options.pop("T", TEMPERATURE_DEFAULT)
    Z = options.pop("Z", Z_LINE_DEFAULT)

    def s_func(omega: float) -> float:
        re_z = float(np.real(Z(abs(omega)) if callable(Z) else Z))
        # 8 e^2 hbar omega Re Z / (1 - e^{-x}) = 8 e^2 hbar |omega| Re Z * step
        return 8.0 * E_CHARGE**2 * HBAR * abs(omega) * re_z * _thermal_step(omega, T)

    return t1(
        spec, _charge_operator(spec), SpectralDensity(s_func, T),
        options.pop("i", 0), options.pop("j", 1), options.pop("total", True),
        ctx, channel="t1_charge_impedance", params={"T": T, "Z": Z},
    )


def _channel_t1_flux_bias_line(spec, ctx, options):
    T = options.pop("T", TEMPERATURE_DEFAULT)
    M = options.pop("M", M_FLUX_LINE_DEFAULT)
    R = options.pop("R", R_FLUX_LINE_DEFAULT)
    # dH/dflux in Joules per flux quantum
    dh = derivative_hamiltonian_matrix(spec, "flux")
    dh = dh * (H_PLANCK * ctx.scale_to_hz)

    def s_func(omega: float) -> float:
        # M^2 2 hbar omega / (R (1 - e^{-x})) = M^2 2 hbar |omega| / R * step
        return M**2 * 2.0 * HBAR * abs(omega) / R * _thermal_step(omega, T)

    return t1(
        spec, dh, SpectralDensity(s_func, T),
        options.pop("i", 0), options.pop("j", 1), options.pop("total", True),
        ctx, channel="t1_flux_bias_line", params={"T": T, "M": M, "R": R},
    )


def _channel_t1_inductive(spec, ctx, options):
    T = options.pop("T", TEMPERATURE_DEFAULT)
    q_ind = options.pop("Q_ind", Q_IND_DEFAULT)
    el_joule = H_PLANCK * spec.EL * ctx.scale_to_hz

    def s_func(omega: float) -> float:
        q = q_ind(abs(omega)) if callable(q_ind) else q_ind
        return 2.0 * el_joule * HBAR / q * _thermal_step(omega, T)

    return t1(
        spec, spec.operator("phi_operator"), SpectralDensity(s_func, T),
        options.pop("i", 0), options.pop("j", 1), options.pop("total", True),
        ctx, channel="t1_inductive", params={"T": T},
    )


def _channel_t1_quasiparticle(spec, ctx, options):
    T = options.pop("T", TEMPERATURE_DEFAULT)
    x_qp = options.pop("x_qp", X_QP_DEFAULT)
    gap = options.pop("Delta", DELTA_GAP_DEFAULT)
    ej_joule = H_PLANCK * spec.EJ * ctx.scale_to_hz
    sin_half_phi = linalg.hermitian_matrix_function(
        0.5 * np.asarray(spec.operator("phi_operator")), np.sin
    )

    def s_func(omega: float) -> float:
        return (
            x_qp * (8.0 * ej_joule * HBAR / math.pi)
            * math.sqrt(2.0 * gap / (HBAR * abs(omega)))
            * _thermal_step(omega, T)
        )

    return t1(
        spec, sin_half_phi, SpectralDensity(s_func, T),
        options.pop("i", 0), options.pop("j", 1), options.pop("total", True),
        ctx, channel="t1_quasiparticle_tunneling", params={"T": T, "x_qp": x_qp},
    )


_TPHI_OPTIONS = frozenset({"i", "j", "A_noise", "omega_low", "t_exp"})

_CHANNELS: dict[str, tuple[str, Callable, frozenset]] = {
    "tphi_1_over_f_flux": ("dephasing", _channel_tphi_flux, _TPHI_OPTIONS),
    "tphi_1_over_f_cc": ("dephasing", _channel_tphi_cc, _TPHI_OPTIONS),
    "tphi_1_over_f_ng": ("dephasing", _channel_tphi_ng, _TPHI_OPTIONS),
    "t1_capacitive": (
        "depolarization", _channel_t1_capacitive,
        frozenset({"i", "j", "total", "T", "Q_cap"}),
    ),
    "t1_flux_bias_line": (
        "depolarization", _channel_t1_flux_bias_line,
        frozenset({"i", "j", "total", "T", "M", "R"}),
    ),
    "t1_charge_impedance": (
        "depolarization", _channel_t1_charge_impedance,
        frozenset({"i", "j", "total", "T", "Z"}),
    ),
    "t1_inductive": (
        "depolarization", _channel_t1_inductive,
        frozenset({"i", "j", "total", "T", "Q_ind"}),
    ),
    "t1_quasiparticle_tunneling": (
        "depolarization", _channel_t1_quasiparticle,
        frozenset({"i", "j", "total", "T", "x_qp", "Delta"}),
    ),
}

_FAMILY_CHANNELS: dict[type, tuple[str, ...]] = {
    Transmon: (
        "tphi_1_over_f_cc",
        "tphi_1_over_f_ng",
        "t1_capacitive",
        "t1_charge_impedance",
    ),
    TunableTransmon: (
        "tphi_1_over_f_flux",
        "tphi_1_over_f_cc",
        "tphi_1_over_f_ng",
        "t1_capacitive",
        "t1_flux_bias_line",
        "t1_charge_impedance",
    ),
    Fluxonium: (
        "tphi_1_over_f_flux",
        "tphi_1_over_f_cc",
        "t1_capacitive",
        "t1_charge_impedance",
        "t1_flux_bias_line",
        "t1_inductive",
        "t1_quasiparticle_tunneling",
    ),
    FluxQubit: (
        "tphi_1_over_f_flux",
        "tphi_1_over_f_cc",
        "tphi_1_over_f_ng",
        "t1_capacitive",
        "t1_flux_bias_line",
        "t1_charge_impedance",
    ),
    ZeroPi: ("tphi_1_over_f_flux", "tphi_1_over_f_cc", "tphi_1_over_f_ng", "t1_flux_bias_line"),
    FullZeroPi: ("tphi_1_over_f_flux", "tphi_1_over_f_cc", "tphi_1_over_f_ng", "t1_flux_bias_line"),
    Cos2Phi: ("tphi_1_over_f_flux", "tphi_1_over_f_cc", "tphi_1_over_f_ng", "t1_flux_bias_line"),
}


def supported_noise_channels(spec: QubitBase) -> list[str]:
    """Channel names available for this qubit family."""
    for cls, channels in _FAMILY_CHANNELS.items():
        if type(spec) is cls:
            return list(channels)
    return []


def effective_noise_channels(spec: QubitBase) -> list[str]:
    """Channels included by default in the effective T1/T2 compositions.

    t1_charge_impedance is excluded by default: it models direct galvanic
    coupling to a transmission line (sub-ns times for a transmon), which is
    a deliberate spectrometer configuration rather than an always-on loss;
    include it explicitly via noise_channels when wanted.
    """
    return [
        name for name in supported_noise_channels(spec)
        if name != "t1_charge_impedance"
    ]


def channel_kind(name: str) -> str:
    if name not in _CHANNELS:
        raise UnsupportedChannelError(f"unknown noise channel {name!r}")
    return _CHANNELS[name][0]


def channel_options(name: str) -> frozenset:
    if name not in _CHANNELS:
        raise UnsupportedChannelError(f"unknown noise channel {name!r}")
    return _CHANNELS[name][2]


def channel(
    spec: QubitBase, name: str, ctx: UnitContext = DEFAULT_UNITS, **options
) -> CoherenceEstimate:
    """Evaluate a predefined noise channel with optional parameter overrides."""
    if name not in _CHANNELS:
        raise UnsupportedChannelError(f"unknown noise channel {name!r}")
    if name not in supported_noise_channels(spec):
        raise UnsupportedChannelError(
            f"channel {name!r} is not supported for {type(spec).__name__}"
        )
    kind, func, accepted = _CHANNELS[name]
    opts = dict(options)
    opts.pop("get_rate", None)
    unknown = set(opts) - accepted
    if unknown:
        raise UnsupportedChannelError(
            f"unknown option(s) {sorted(unknown)} for channel {name!r}; "
            f"accepted: {sorted(accepted)}"
        )
    return func(spec, ctx, opts)


def _normalize_channel_list(
    spec: QubitBase, channels: Optional[Sequence], kind_filter: Optional[str]
) -> list[tuple[str, dict]]:
    if channels is None:
        names = [
            (name, {})
            for name in effective_noise_channels(spec)
            if kind_filter is None or channel_kind(name) == kind_filter
        ]
        return names
    result = []
    for entry in channels:
        if isinstance(entry, str):
            name, opts = entry, {}
        else:
            name, opts = entry[0], dict(entry[1])
        if kind_filter is not None and channel_kind(name) != kind_filter:
            raise UnsupportedChannelError(
                f"channel {name!r} has kind {channel_kind(name)!r}; expected {kind_filter!r}"
            )
        result.append((name, opts))
    return result


def _applicable_options(name: str, common: Optional[dict]) -> dict:
    """Common noise options filtered to the subset a channel understands
    (temperature does not enter 1/f dephasing, for example)."""
    if not common:
        return {}
    accepted = channel_options(name)
    return {k: v for k, v in common.items() if k in accepted}


def t1_effective(
    spec: QubitBase,
    noise_channels: Optional[Sequence] = None,
    common_noise_options: Optional[dict] = None,
    ctx: UnitContext = DEFAULT_UNITS,
) -> CoherenceEstimate:
    """Harmonic composition 1/T1_eff = sum_k 1/T1_k over depolarization
    channels (all supported ones by default)."""
    entries = _normalize_channel_list(spec, noise_channels, "depolarization")
    total_rate = 0.0
    for name, opts in entries:
        merged = _applicable_options(name, common_noise_options)
        merged.update(opts)
        estimate = channel(spec, name, ctx, **merged)
        total_rate += estimate.rate
    time = math.inf if total_rate == 0.0 else 1.0 / total_rate
    return CoherenceEstimate(time, (0, 1), "t1_effective", dict(common_noise_options or {}))


def t2_effective(
    spec: QubitBase,
    noise_channels: Optional[Sequence] = None,
    common_noise_options: Optional[dict] = None,
    ctx: UnitContext = DEFAULT_UNITS,
) -> CoherenceEstimate:
    """1/T2_eff = sum_deph 1/Tphi_k + (1/2) sum_depol 1/T1_k."""
    entries = _normalize_channel_list(spec, noise_channels, None)
    total_rate = 0.0
    for name, opts in entries:
        merged = _applicable_options(name, common_noise_options)
        merged.update(opts)
        estimate = channel(spec, name, ctx, **merged)
        if channel_kind(name) == "dephasing":
            total_rate += estimate.rate
        else:
            total_rate += 0.5 * estimate.rate
    time = math.inf if total_rate == 0.0 else 1.0 / total_rate
    return CoherenceEstimate(time, (0, 1), "t2_effective", dict(common_noise_options or {}))


def coherence_vs_param(
    spec: QubitBase,
    param: str,
    values: Sequence[float],
    noise_channels: Optional[Sequence] = None,
    common_noise_options: Optional[dict] = None,
    ctx: UnitContext = DEFAULT_UNITS,
) -> dict[str, NamedGridArray]:
    """Per-channel coherence times over a parameter scan; sweet-spot
    infinities are preserved (rendered as gaps downstream)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("parameter value array is empty")
    entries = _normalize_channel_list(spec, noise_channels, None)
    out: dict[str, NamedGridArray] = {}
    for name, opts in entries:
        merged = _applicable_options(name, common_noise_options)
        merged.update(opts)
        times = np.empty(len(values))
        for k, v in enumerate(values):
            point = spec.updated(**{param: float(v)})
            times[k] = channel(point, name, ctx, **merged).time
        out[name] = NamedGridArray(((param, values),), times)
    return out


def effective_vs_param(
    spec: QubitBase,
    which: str,
    param: str,
    values: Sequence[float],
    noise_channels: Optional[Sequence] = None,
    common_noise_options: Optional[dict] = None,
    ctx: UnitContext = DEFAULT_UNITS,
) -> NamedGridArray:
    """t1_effective or t2_effective over a parameter scan."""
    if which not in ("t1", "t2"):
        raise ValueError("which must be 't1' or 't2'")
    func = t1_effective if which == "t1" else t2_effective
    values = np.asarray(values, dtype=float)
    times = np.empty(len(values))
    for k, v in enumerate(values):
        point = spec.updated(**{param: float(v)})
        times[k] = func(point, noise_channels, common_noise_options, ctx).time
    return NamedGridArray(((param, values),), times)
