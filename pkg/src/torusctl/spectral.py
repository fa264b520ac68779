"""FFT transforms, the exact free propagator, and spectral cutoffs.

Everything here is a Fourier multiplier or a pointwise multiplication, so
all operations are pure functions of immutable inputs and trivially
thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .errors import GeometryMismatchError, TorusError, UncoveredSpectrumError
from .geometry import FourierField, SpatialField, _check_same_geometry


def to_fourier(u: SpatialField) -> FourierField:
    """Forward transform; divides by the number of grid points."""
    coeffs = np.fft.fft2(u.values) / u.geometry.size
    return FourierField(u.geometry, coeffs)


def from_fourier(c: FourierField, role: str = "state") -> SpatialField:
    """Inverse transform back to grid samples."""
    values = np.fft.ifft2(c.coefficients) * c.geometry.size
    return SpatialField(c.geometry, values, role=role)


def propagate(u: FourierField, t: float) -> FourierField:
    """Free Schrodinger propagator: multiply mode (m, n) by exp(-i*t*lam)."""
    phase = np.exp(-1j * t * u.geometry.eigenvalues())
    return FourierField(u.geometry, u.coefficients * phase)


def multiply(w: SpatialField, u: SpatialField) -> SpatialField:
    """Pointwise multiplication operator M_w."""
    _check_same_geometry(w, u)
    return SpatialField(w.geometry, w.values * u.values, role=u.role)


def smooth_step(s: np.ndarray, order: int = 3) -> np.ndarray:
    """C^order step: 0 at s<=0, 1 at s>=1, integrated-bump profile between.

    Realized as the regularized incomplete beta function, i.e. the
    normalized integral of the polynomial bump (s(1-s))^order.
    """
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    return betainc(order + 1, order + 1, s)


@dataclass(frozen=True)
class CutoffProfile:
    """Even cutoff chi with chi = 1 on [-r1, r1] and chi = 0 outside (-1, 1)."""

    plateau: float = 0.5
    order: int = 3

    def __post_init__(self):
        if not 0.0 < self.plateau < 1.0:
            raise TorusError(f"plateau half-width must lie in (0, 1), got {self.plateau}")
        if self.order < 1:
            raise TorusError("smoothness order must be >= 1")

    def __call__(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        # map (plateau, 1) onto (1, 0) and feed the smooth step
        s = (1.0 - r) / (1.0 - self.plateau)
        return smooth_step(s, self.order)


def project_spectral(
    u: FourierField, h: float, rho: float, chi: CutoffProfile | None = None
) -> FourierField:
    """Spectral shell projector: multiply by chi((h^2*lam - 1) / rho)."""
    if h <= 0 or rho <= 0:
        raise TorusError(f"h and rho must be positive, got h={h}, rho={rho}")
    if chi is None:
        chi = CutoffProfile()
    arg = (h * h * u.geometry.eigenvalues() - 1.0) / rho
    return FourierField(u.geometry, u.coefficients * chi(arg))


@dataclass(frozen=True)
class DyadicSpec:
    """Dyadic-type partition of unity in the frequency magnitude r = sqrt(lam).

    Level k has plateau near r = R**k (so eigenvalues lam near R**(2k)) and
    support in (R**(k-1), R**(k+1)); level 0 covers r <= R.  The squares of
    the level profiles sum to one on [0, R**max_level].
    """

    ratio: float = 2.0
    max_level: int = 12
    order: int = 3

    def __post_init__(self):
        if self.ratio <= 1.0:
            raise TorusError(f"ratio must exceed 1, got {self.ratio}")
        if self.max_level < 1:
            raise TorusError("max_level must be >= 1")

    def _bump_plateau(self, r: np.ndarray) -> np.ndarray:
        # smooth transition 1 -> 0 across [1, R]
        s = (self.ratio - np.abs(np.asarray(r, dtype=float))) / (self.ratio - 1.0)
        return smooth_step(s, self.order)

    def level_profile(self, r, k: int) -> np.ndarray:
        """phi_k(r); level 0 is the base plateau, k >= 1 the shell at R**k."""
        if not 0 <= k <= self.max_level:
            raise TorusError(f"level {k} outside [0, {self.max_level}]")
        r = np.abs(np.asarray(r, dtype=float))
        if k == 0:
            return np.sqrt(self._bump_plateau(r))
        scaled = r / self.ratio**k
        low = self._bump_plateau(scaled)
        high = self._bump_plateau(scaled * self.ratio)
        return np.sqrt(np.maximum(low - high, 0.0))

    def covered_radius(self) -> float:
        return float(self.ratio**self.max_level)


def dyadic_project(u: FourierField, spec: DyadicSpec, k: int) -> FourierField:
    """Level-k Littlewood-Paley piece of u (multiplier phi_k(sqrt(lam)))."""
    r = np.sqrt(u.geometry.eigenvalues())
    uncovered = (r > spec.covered_radius()) & (u.coefficients != 0)
    if np.any(uncovered):
        m, n = u.geometry.mode_numbers()
        modes = sorted(zip(m[uncovered].tolist(), n[uncovered].tolist()))
        raise UncoveredSpectrumError(
            f"{len(modes)} modes exceed the covered range "
            f"r <= {spec.covered_radius():g}: {modes[:10]}{'...' if len(modes) > 10 else ''}",
            uncovered_modes=modes,
        )
    return FourierField(u.geometry, u.coefficients * spec.level_profile(r, k))


def dyadic_pieces(u: FourierField, spec: DyadicSpec) -> list[FourierField]:
    return [dyadic_project(u, spec, k) for k in range(spec.max_level + 1)]
