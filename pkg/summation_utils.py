import math
from typing import Iterable

import numpy as np


class CompensatedSum:
    """
    Running sum with Neumaier compensation.

    Partial sums built over separate index ranges can be combined with `merge`,
    so a scan split into chunks reduces to the same total as a single pass.
    """

    def __init__(self):
        self.total = 0.0
        self.carry = 0.0

    def add(self, value: float) -> None:
        value = float(value)
        t = self.total + value
        if abs(self.total) >= abs(value):
            self.carry += (self.total - t) + value
        else:
            self.carry += (value - t) + self.total
        self.total = t

    def add_array(self, values: np.ndarray) -> None:
        """Add a whole chunk; the chunk itself is summed with correct rounding"""
        if len(values):
            self.add(math.fsum(np.asarray(values, dtype=float)))

    def extend(self, values: Iterable[float]) -> None:
        for value in values:
            self.add(value)

    def merge(self, other: "CompensatedSum") -> "CompensatedSum":
        merged = CompensatedSum()
        merged.add(self.total)
        merged.add(other.total)
        merged.add(self.carry)
        merged.add(other.carry)
        return merged

    @property
    def value(self) -> float:
        return self.total + self.carry

    def __float__(self):
        return self.value

    def __repr__(self):
        return f"CompensatedSum({self.value!r})"
