"""Finite-frequency proxies for the semiclassical transport diagnostics.

Everything here is an honest finite computation: time-averaged position
densities, Fourier-mass histograms over primitive rational directions, and
the defect left after exact averaging along a rational flow direction.  No
convergence toward the limit measures is asserted; outputs are labeled as
proxies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TorusError
from .geometry import FourierField, SpatialField, TorusGeometry
from .timegrid import TimeGrid, sampling_rule

_CHUNK_BUDGET = 2_000_000


def support_lambda_max(u: FourierField) -> float:
    """Largest eigenvalue carried by a nonzero coefficient (0 for u = 0)."""
    nz = u.coefficients != 0
    if not np.any(nz):
        return 0.0
    return float(np.max(u.geometry.eigenvalues()[nz]))


def time_quadrature_density(
    u0: FourierField, horizon: float, nt: int | None = None, rule: str = "midpoint"
) -> np.ndarray:
    """Pointwise quadrature of |e^{itD} u0|^2 over (0, horizon)."""
    geo = u0.geometry
    if nt is None:
        nt = sampling_rule(horizon, support_lambda_max(u0))
    tg = TimeGrid.make(rule, horizon, nt)
    lam = geo.eigenvalues()
    density = np.zeros((geo.nx, geo.ny))
    chunk = max(1, _CHUNK_BUDGET // geo.size)
    for start in range(0, tg.count, chunk):
        nodes = tg.nodes[start : start + chunk]
        phases = np.exp(-1j * nodes[:, None, None] * lam[None, :, :])
        v = u0.coefficients[None, :, :] * phases
        u = np.fft.ifft2(v, axes=(1, 2)) * geo.size
        density += np.einsum(
            "t,txy->xy", tg.weights[start : start + chunk], np.abs(u) ** 2
        )
    return density


@dataclass(frozen=True)
class TimeAveragedDensity:
    """Proxy for the time-averaged position density U^tau."""

    geometry: TorusGeometry
    values: np.ndarray
    horizon: float
    node_count: int

    def mass(self) -> float:
        return float(self.geometry.cell_area * np.sum(self.values))

    def l2_norm(self) -> float:
        return float(np.sqrt(self.geometry.cell_area * np.sum(self.values**2)))

    def as_field(self) -> SpatialField:
        return SpatialField(self.geometry, self.values.astype(np.complex128))

    def describe(self) -> dict:
        return {
            "proxy": "time averaged position density",
            "horizon": self.horizon,
            "node_count": self.node_count,
            "mass": self.mass(),
            "l2_norm": self.l2_norm(),
            "min": float(self.values.min()),
            "max": float(self.values.max()),
        }


def time_averaged_density(
    u0: FourierField, horizon: float, nt: int | None = None, rule: str = "midpoint"
) -> TimeAveragedDensity:
    """U^tau(z) = quadrature of |e^{itD}u0(z)|^2; mass equals tau*||u0||^2."""
    if nt is None:
        nt = sampling_rule(horizon, support_lambda_max(u0))
    values = time_quadrature_density(u0, horizon, nt=nt, rule=rule)
    return TimeAveragedDensity(u0.geometry, values, horizon, nt)


def _canonical_direction(m: int, n: int) -> tuple[int, int]:
    g = math.gcd(abs(m), abs(n))
    p, q = m // g, n // g
    if p < 0 or (p == 0 and q < 0):
        p, q = -p, -q
    return p, q


@dataclass(frozen=True)
class DirectionHistogram:
    """Fourier mass per primitive rational direction class.

    ``fractions`` maps canonical primitive (p, q) to its share of the total
    mass; ``zero_mode`` is the share sitting on the constant mode; ``tails``
    lists, for m = 1..m_max, the share carried by directions with
    max(|p|, |q|) > m.
    """

    fractions: dict
    zero_mode: float
    tails: tuple
    m_max: int
    total_mass: float

    def tail(self, m: int) -> float:
        if not 1 <= m <= self.m_max:
            raise TorusError(f"tail index {m} outside 1..{self.m_max}")
        return self.tails[m - 1]

    def rows(self):
        return [(p, q, frac) for (p, q), frac in sorted(self.fractions.items())]

    def tail_rows(self):
        return [(m, self.tails[m - 1]) for m in range(1, self.m_max + 1)]

    def describe(self) -> dict:
        return {
            "proxy": "rational direction mass histogram",
            "convention": "dual-lattice integer pair (m, n) reduced to a primitive "
            "representative with p > 0 or (p == 0, q > 0)",
            "zero_mode": self.zero_mode,
            "m_max": self.m_max,
            "total_mass": self.total_mass,
            "direction_count": len(self.fractions),
        }


def direction_mass(u: FourierField, m_max: int = 8) -> DirectionHistogram:
    """Histogram of |c_k|^2 mass over primitive directions of the modes."""
    coeffs = u.coefficients
    power = np.abs(coeffs) ** 2
    total = float(power.sum())
    if total == 0:
        raise TorusError("direction_mass of the zero field")
    m, n = u.geometry.mode_numbers()
    fractions: dict = {}
    zero = 0.0
    for (i, j), mass in np.ndenumerate(power):
        if mass == 0.0:
            continue
        mi, ni = int(m[i, j]), int(n[i, j])
        if mi == 0 and ni == 0:
            zero += mass
            continue
        key = _canonical_direction(mi, ni)
        fractions[key] = fractions.get(key, 0.0) + mass
    fractions = {k: v / total for k, v in fractions.items()}
    zero /= total
    tails = tuple(
        sum(frac for (p, q), frac in fractions.items() if max(abs(p), abs(q)) > m)
        for m in range(1, m_max + 1)
    )
    return DirectionHistogram(fractions, zero, tails, m_max, total)


def direction_average_mask(geometry: TorusGeometry, p: int, q: int) -> np.ndarray:
    """Fourier mask of the exact averaging projector along z + s(p, q).

    A mode (m, n) survives iff its phase is constant along the flow, i.e.
    m*p/A + n*q/B = 0 (tested in the cleared-denominator form with a
    relative tolerance so rational period ratios are handled exactly).
    """
    if (p, q) == (0, 0):
        raise TorusError("direction (0, 0) has no flow")
    if math.gcd(abs(p), abs(q)) != 1:
        raise TorusError(f"direction ({p}, {q}) is not primitive")
    a, b = geometry.periods
    m, n = geometry.mode_numbers()
    lhs = m * (p * b)
    rhs = n * (q * a)
    scale = np.maximum(np.abs(lhs) + np.abs(rhs), 1.0)
    return np.abs(lhs + rhs) <= 1e-9 * scale


def flow_average(field_values: np.ndarray, geometry: TorusGeometry, p: int, q: int) -> np.ndarray:
    """Orthogonal projection of a grid function onto flow-invariant modes."""
    mask = direction_average_mask(geometry, p, q)
    hat = np.fft.fft2(field_values)
    hat *= mask
    return np.fft.ifft2(hat)


def flow_average_defect(
    u0: FourierField,
    horizon: float,
    direction: tuple[int, int],
    nt: int | None = None,
) -> float:
    """Relative L2 distance between U^tau and its flow average, in [0, 1]."""
    p, q = direction
    density = time_quadrature_density(u0, horizon, nt=nt)
    avg = flow_average(density.astype(np.complex128), u0.geometry, p, q)
    norm = np.linalg.norm(density)
    if norm == 0:
        raise TorusError("zero density (zero state?)")
    return float(np.linalg.norm(density - avg) / norm)
