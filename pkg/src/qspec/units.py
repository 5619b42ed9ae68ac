"""Energy-unit context and conversions.

All energies handled by the library are plain frequencies (not angular
frequencies) expressed in the context unit, GHz by default.  Angular
factors of 2*pi enter only inside the coherence-time engine, which needs
angular frequencies in rad/s.
"""

from __future__ import annotations

from dataclasses import dataclass

SUPPORTED_UNITS = ("GHz", "MHz", "kHz", "Hz")

_SCALE_TO_HZ = {
    "GHz": 1e9,
    "MHz": 1e6,
    "kHz": 1e3,
    "Hz": 1e0,
}


class UnknownUnitError(ValueError):
    pass


@dataclass(frozen=True)
class UnitContext:
    """Immutable energy-unit context; safe to share across threads."""

    unit: str = "GHz"

    def __post_init__(self):
        if self.unit not in _SCALE_TO_HZ:
            raise UnknownUnitError(
                f"unknown unit {self.unit!r}; supported: {', '.join(SUPPORTED_UNITS)}"
            )

    @property
    def scale_to_hz(self) -> float:
        return _SCALE_TO_HZ[self.unit]


DEFAULT_UNITS = UnitContext("GHz")


def supported_units() -> list[str]:
    """Names of the supported energy units, default (GHz) first."""
    return list(SUPPORTED_UNITS)


def to_standard_units(value: float, ctx: UnitContext = DEFAULT_UNITS) -> float:
    """Convert an energy from context units to Hz."""
    return value * ctx.scale_to_hz


def from_standard_units(value: float, ctx: UnitContext = DEFAULT_UNITS) -> float:
    """Convert an energy from Hz back to context units; exact inverse of
    :func:`to_standard_units`."""
    return value / ctx.scale_to_hz


def units_scale_factor(ctx: UnitContext = DEFAULT_UNITS) -> float:
    """Multiplier taking context-unit energies to Hz."""
    return ctx.scale_to_hz
