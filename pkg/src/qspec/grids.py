"""Multi-dimensional result arrays with named, value-addressable axes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class UnknownAxisError(KeyError):
    pass


@dataclass(frozen=True)
class NamedGridArray:
    """n-dimensional payload whose leading dimensions carry named parameter axes.

    Payload shape must start with the axis lengths; trailing dimensions hold
    per-point data (energies, labels, coefficient blocks, ...).
    """

    axes: tuple[tuple[str, np.ndarray], ...]
    payload: np.ndarray

    def __post_init__(self):
        names = [name for name, _ in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis names in {names}")
        for name, values in self.axes:
            if len(values) == 0:
                raise ValueError(f"axis {name!r} is empty")
        expected = tuple(len(values) for _, values in self.axes)
        if self.payload.shape[: len(expected)] != expected:
            raise ValueError(
                f"payload shape {self.payload.shape} does not start with axis "
                f"lengths {expected}"
            )

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.axes)

    def axis_values(self, name: str) -> np.ndarray:
        for axis_name, values in self.axes:
            if axis_name == name:
                return values
        raise UnknownAxisError(f"unknown axis {name!r}; have {self.axis_names}")

    def axis_index(self, name: str) -> int:
        for i, (axis_name, _) in enumerate(self.axes):
            if axis_name == name:
                return i
        raise UnknownAxisError(f"unknown axis {name!r}; have {self.axis_names}")

    def nearest_index(self, name: str, value: float) -> int:
        """Grid index closest to value; exact for on-grid values, ties go to
        the lower index."""
        values = self.axis_values(name)
        return int(np.argmin(np.abs(np.asarray(values, dtype=float) - value)))

    def slice_at(
        self, name: str, value: float | None = None, index: int | None = None
    ) -> "NamedGridArray":
        """Fix one named axis at a value (nearest-grid rule) or index."""
        if (value is None) == (index is None):
            raise ValueError("provide exactly one of value= or index=")
        pos = self.axis_index(name)
        if index is None:
            index = self.nearest_index(name, value)
        taken = np.take(self.payload, index, axis=pos)
        remaining = tuple(ax for ax in self.axes if ax[0] != name)
        return NamedGridArray(remaining, taken)
