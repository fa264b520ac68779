"""Time-quadrature rules shared by the Gramian, HUM, and density modules."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TorusError

TWO_PI = 2.0 * math.pi


def sampling_rule(horizon: float, lambda_max: float, minimum: int = 8) -> int:
    """Node count for resolving phases exp(i*t*lam), lam <= lambda_max.

    Oversamples the fastest Gramian beat frequency by a factor of 4.
    """
    return max(minimum, math.ceil(4.0 * horizon * lambda_max / TWO_PI))


@dataclass(frozen=True)
class TimeGrid:
    """Quadrature nodes and weights on (0, horizon)."""

    horizon: float
    nodes: np.ndarray
    weights: np.ndarray
    rule: str

    @classmethod
    def midpoint(cls, horizon: float, count: int) -> "TimeGrid":
        if horizon <= 0 or count < 1:
            raise TorusError(f"invalid time grid: T={horizon}, Nt={count}")
        dt = horizon / count
        nodes = (np.arange(count) + 0.5) * dt
        weights = np.full(count, dt)
        return cls(horizon, nodes, weights, "midpoint")

    @classmethod
    def trapezoid(cls, horizon: float, count: int) -> "TimeGrid":
        if horizon <= 0 or count < 2:
            raise TorusError(f"invalid time grid: T={horizon}, Nt={count}")
        nodes = np.linspace(0.0, horizon, count)
        dt = horizon / (count - 1)
        weights = np.full(count, dt)
        weights[0] = weights[-1] = dt / 2
        return cls(horizon, nodes, weights, "trapezoid")

    @classmethod
    def make(cls, rule: str, horizon: float, count: int) -> "TimeGrid":
        if rule == "midpoint":
            return cls.midpoint(horizon, count)
        if rule == "trapezoid":
            return cls.trapezoid(horizon, count)
        raise TorusError(f"unknown quadrature rule {rule!r}")

    @property
    def count(self) -> int:
        return len(self.nodes)

    def refined(self, factor: int = 4) -> "TimeGrid":
        """Independent finer grid of the same rule (for verification passes)."""
        return self.make(self.rule, self.horizon, factor * self.count)
