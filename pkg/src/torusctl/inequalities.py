"""Lattice circles, the Zygmund L4 bound, and Ingham Gram matrices.

The Zygmund ratio is checked in the normalization-independent form
``||p||_{L4(dmu)} <= 5**(1/4) ||p||_{L2(dmu)}`` with the normalized measure
``dmu = dz / (4 pi^2)`` on the square 2pi-torus; L4 norms of trigonometric
polynomials are exact on a grid oversampled 4x past the one-sided band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoCertificateError, TorusError
from .geometry import SpatialField, TorusGeometry
from .observability import eigenspace_observability

ZYGMUND_BOUND = math.sqrt(5.0)


@dataclass(frozen=True)
class LatticeCircle:
    """Integer points on the circle p^2 + q^2 = lam."""

    lam: int
    points: tuple

    @property
    def count(self) -> int:
        return len(self.points)


def lattice_circle(lam: int) -> LatticeCircle:
    """Enumerate {(p, q) in Z^2 : p^2 + q^2 = lam} by a bounded p-loop."""
    if lam < 0:
        raise TorusError(f"lam must be nonnegative, got {lam}")
    pts = []
    root = math.isqrt(lam)
    for p in range(-root, root + 1):
        q2 = lam - p * p
        q = math.isqrt(q2)
        if q * q == q2:
            pts.append((p, q))
            if q > 0:
                pts.append((p, -q))
    return LatticeCircle(lam, tuple(sorted(pts)))


def sums_of_two_squares(limit: int) -> list[int]:
    """Distinct eigenvalues of -Laplacian on (R/2piZ)^2 up to limit (incl 0)."""
    flags = np.zeros(limit + 1, dtype=bool)
    root = math.isqrt(limit)
    for p in range(root + 1):
        for q in range(p, math.isqrt(limit - p * p) + 1):
            flags[p * p + q * q] = True
    return [int(v) for v in np.flatnonzero(flags)]


def _zygmund_grid(lam: int) -> int:
    # |p|^4 is band-limited to 4B; N = 4(B + 1) > 4B makes the rectangle
    # rule exact (and keeps the grid even)
    return 4 * (math.isqrt(max(lam, 1)) + 1)


def zygmund_ratio(lam: int, coefficients) -> float:
    """||p||^2_{L4(dmu)} / ||p||^2_{L2(dmu)} for p supported on the circle."""
    ratios = zygmund_ratio_batch(lam, np.asarray(coefficients, dtype=np.complex128)[None, :])
    return float(ratios[0])


def zygmund_ratio_batch(lam: int, coefficients: np.ndarray) -> np.ndarray:
    """Vectorized ratio over rows of a (trials, circle_count) matrix."""
    circle = lattice_circle(lam)
    coefficients = np.asarray(coefficients, dtype=np.complex128)
    if coefficients.ndim != 2 or coefficients.shape[1] != circle.count:
        raise TorusError(
            f"coefficient rows must have length {circle.count} for lam={lam}"
        )
    if np.any(np.all(coefficients == 0, axis=1)):
        raise TorusError("zero coefficient vector")
    n = _zygmund_grid(lam)
    trials = coefficients.shape[0]
    spec = np.zeros((trials, n, n), dtype=np.complex128)
    for col, (p, q) in enumerate(circle.points):
        spec[:, p % n, q % n] += coefficients[:, col]
    values = np.fft.ifft2(spec, axes=(1, 2)) * (n * n)
    power = np.abs(values) ** 2
    mean_sq = power.mean(axis=(1, 2))
    mean_quart = (power**2).mean(axis=(1, 2))
    return np.sqrt(mean_quart) / mean_sq


def zygmund_sweep(
    lambda_limit: int,
    min_circle: int = 8,
    trials: int = 50,
    seed: int = 0,
) -> list[tuple]:
    """Rows (lambda, circle_count, max_ratio) over random-coefficient trials."""
    rng = np.random.default_rng(seed)
    rows = []
    for lam in range(1, lambda_limit + 1):
        circle = lattice_circle(lam)
        if circle.count < min_circle:
            continue
        coeffs = rng.standard_normal((trials, circle.count)) + 1j * rng.standard_normal(
            (trials, circle.count)
        )
        ratios = zygmund_ratio_batch(lam, coeffs)
        rows.append((lam, circle.count, float(np.max(ratios))))
    return rows


ZYGMUND_HEADER = ("lambda", "circle_count", "max_ratio")


@dataclass(frozen=True)
class InghamReport:
    """Spectral data of the Gram matrix of exp(i t lam_j) on (0, T)."""

    frequencies: tuple
    horizon: float
    lower_constant: float  # B(T), the smallest eigenvalue
    largest: float
    condition: float

    def describe(self) -> dict:
        return {
            "frequencies": list(self.frequencies),
            "horizon": self.horizon,
            "lower_constant": self.lower_constant,
            "largest": self.largest,
            "condition": self.condition,
        }


def ingham_gram_matrix(frequencies, horizon: float) -> np.ndarray:
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.ndim != 1 or len(freqs) == 0:
        raise TorusError("need a nonempty frequency list")
    if np.any(np.diff(freqs) <= 0):
        raise TorusError("frequencies must be strictly increasing (no duplicates)")
    diff = freqs[:, None] - freqs[None, :]
    mat = np.empty(diff.shape, dtype=np.complex128)
    off = diff != 0
    mat[off] = (np.exp(1j * horizon * diff[off]) - 1.0) / (1j * diff[off])
    mat[~off] = horizon
    return 0.5 * (mat + mat.conj().T)


def ingham_gram(frequencies, horizon: float) -> InghamReport:
    """Closed-form Gram matrix; its smallest eigenvalue is the Ingham B(T)."""
    mat = ingham_gram_matrix(frequencies, horizon)
    eigs = np.linalg.eigvalsh(mat)
    b, largest = float(eigs[0]), float(eigs[-1])
    cond = math.inf if b <= 0 else largest / b
    return InghamReport(
        frequencies=tuple(float(f) for f in np.asarray(frequencies, dtype=float)),
        horizon=horizon,
        lower_constant=b,
        largest=largest,
        condition=cond,
    )


def ingham_chart(frequencies, horizons) -> list[tuple]:
    """Rows (T, B) for a range of horizons."""
    return [(float(t), ingham_gram(frequencies, float(t)).lower_constant) for t in horizons]


INGHAM_HEADER = ("T", "B")


def distinct_eigenvalues(geometry: TorusGeometry, lambda_cutoff: float) -> list[float]:
    """Distinct -Laplacian eigenvalues <= cutoff on this grid's dual lattice."""
    lam = geometry.eigenvalues()[geometry.nyquist_mask()]
    lam = np.sort(lam[lam <= lambda_cutoff])
    out: list[float] = []
    for v in lam:
        if not out or v - out[-1] > 1e-9 * max(1.0, v):
            out.append(float(v))
    return out


def observability_from_ingham(
    weight: SpatialField, horizon: float, lambda_cutoff: float
) -> float:
    """Ingham-route lower bound for 1/K: B(T) * min over eigenspaces.

    Requires a square torus with rational aspect ratio so the spectrum is
    genuinely clustered into lattice-circle eigenspaces.
    """
    geo = weight.geometry
    if geo.dim != 2 or abs(geo.periods[0] - geo.periods[1]) > 1e-12 * geo.periods[0]:
        raise TorusError("the Ingham route is implemented for square tori")
    rational, _, _ = geo.gamma_rationality()
    if not rational:
        raise TorusError("the Ingham route needs a rational aspect ratio")
    freqs = distinct_eigenvalues(geo, lambda_cutoff)
    if not freqs:
        raise TorusError("no eigenvalues below the cutoff")
    report = ingham_gram(freqs, horizon)
    if report.lower_constant <= 0:
        raise NoCertificateError(
            f"no certificate at this T: Ingham constant B({horizon:g}) = "
            f"{report.lower_constant:.3e} <= 0",
            best_estimate=report.lower_constant,
        )
    per_eigenspace = [eigenspace_observability(geo, lam, weight) for lam in freqs]
    return report.lower_constant * min(per_eigenspace)
