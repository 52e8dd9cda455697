# models/grid.py
from dataclasses import dataclass

import numpy as np

from utils.errors import GridMismatchError


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid x_i = x_min + i h, i = 0 .. n_points - 1."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if self.x_min >= self.x_max:
            raise ValueError(f"x_min must be < x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise ValueError(f"n_points must be an integer >= 3, got {self.n_points}")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, spacing: float) -> "Grid1D":
        """Grid whose spacing is ``spacing`` rounded to divide the interval."""
        n_intervals = int(round((x_max - x_min) / spacing))
        return cls(float(x_min), float(x_max), max(n_intervals, 2) + 1)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def coordinate(self, index: int) -> float:
        return self.x_min + index * self.spacing

    def index_of(self, x: float) -> int:
        """Index of the grid point nearest to x."""
        index = int(round((x - self.x_min) / self.spacing))
        if not 0 <= index < self.n_points:
            raise IndexError(f"x = {x} lies outside [{self.x_min}, {self.x_max}]")
        return index

    def refined(self, factor: int) -> "Grid1D":
        """Nested grid with ``factor`` times smaller spacing."""
        return Grid1D(self.x_min, self.x_max, (self.n_points - 1) * factor + 1)

    def check_samples(self, *arrays) -> None:
        for array in arrays:
            if np.shape(array) != (self.n_points,):
                raise GridMismatchError(
                    f"expected {self.n_points} samples, got shape {np.shape(array)}"
                )
