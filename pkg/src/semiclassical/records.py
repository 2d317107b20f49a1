"""
Time series containers filled by the trajectory driver.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class InvariantSeries:
    """
    Append-only series of one quantity along a trajectory.

    Values may be scalars, vectors or (complex) matrices; the first
    value is the reference.
    """

    name: str
    times: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def append(self, t, value):
        """
        Add a sample.

        Args:
            t (float): Time, strictly larger than the last one
            value: Sample value
        """
        t = float(t)
        if self.times and t <= self.times[-1]:
            raise ValueError(
                f"series '{self.name}': time {t!r} does not follow {self.times[-1]!r}"
            )
        self.times.append(t)
        self.values.append(np.array(value))

    def __len__(self):
        return len(self.times)

    @property
    def reference(self):
        if not self.values:
            raise ValueError(f"series '{self.name}' is empty")
        return self.values[0]

    def as_array(self):
        return np.array(self.values)


@dataclass
class TrajectoryRecord:
    """Recorded states and invariant series of one integration run."""

    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    series: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def __getitem__(self, name):
        return self.series[name]
