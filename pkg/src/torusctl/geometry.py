"""Rectangular torus geometry and the two field representations.

Conventions used everywhere in the package:

* The torus is ``[0, A) x [0, B)`` with periodic identification; for the
  one-dimensional circle only ``A`` is used and ``Ny == 1``.
* Grid samples sit at ``x_i = i*A/Nx``, ``y_j = j*B/Ny``.  Field values are
  stored as complex ``(Nx, Ny)`` arrays in C order, so ``values.ravel()``
  is row-major with y fastest.
* A Fourier coefficient ``c[m, n]`` (numpy FFT index order) multiplies the
  character ``exp(2j*pi*(m*x/A + n*y/B))``, and the forward transform
  divides by ``Nx*Ny``.  Under this normalization Parseval reads
  ``||u||_L2^2 = A*B*sum |c|^2``.
* ``-Laplacian`` has eigenvalue ``lam(m, n) = (2*pi*m/A)**2 + (2*pi*n/B)**2``
  on the ``(m, n)`` character, with the centered integer bands
  ``m in [-Nx/2, Nx/2)``, ``n in [-Ny/2, Ny/2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import GeometryMismatchError, TorusError

TWO_PI = 2.0 * np.pi


def _as_even_positive(n: int, name: str) -> int:
    n = int(n)
    if n < 2 or n % 2 != 0:
        raise TorusError(f"{name} must be an even integer >= 2, got {n}")
    return n


@dataclass(frozen=True)
class TorusGeometry:
    """Periods and grid resolution of a rectangular torus.

    ``dim == 1`` is realized as ``Ny = 1`` with the second period ignored
    (it is normalized to 1 so that ``cell_area == A/Nx``).
    """

    dim: int
    periods: tuple[float, float]
    grid: tuple[int, int]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise TorusError(f"dim must be 1 or 2, got {self.dim}")
        A, B = (float(self.periods[0]), float(self.periods[1]))
        if self.dim == 1:
            B = 1.0
        if A <= 0 or B <= 0:
            raise TorusError(f"periods must be positive, got {(A, B)}")
        Nx = _as_even_positive(self.grid[0], "Nx")
        Ny = 1 if self.dim == 1 else _as_even_positive(self.grid[1], "Ny")
        object.__setattr__(self, "periods", (A, B))
        object.__setattr__(self, "grid", (Nx, Ny))

    @classmethod
    def square(cls, period: float = TWO_PI, n: int = 64) -> "TorusGeometry":
        return cls(dim=2, periods=(period, period), grid=(n, n))

    @classmethod
    def rectangle(cls, a: float, gamma: float, nx: int, ny: int) -> "TorusGeometry":
        """Torus R^2 / (A Z + gamma A Z); gamma is the aspect ratio B/A."""
        if gamma == 0:
            raise TorusError("gamma must be nonzero")
        return cls(dim=2, periods=(a, abs(gamma) * a), grid=(nx, ny))

    @classmethod
    def circle(cls, a: float = TWO_PI, n: int = 64) -> "TorusGeometry":
        return cls(dim=1, periods=(a, 1.0), grid=(n, 1))

    # -- derived quantities ------------------------------------------------

    @property
    def nx(self) -> int:
        return self.grid[0]

    @property
    def ny(self) -> int:
        return self.grid[1]

    @property
    def cell_area(self) -> float:
        A, B = self.periods
        return A * B / (self.nx * self.ny)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        A, B = self.periods
        x = np.arange(self.nx) * (A / self.nx)
        y = np.arange(self.ny) * (B / self.ny)
        return x, y

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        x, y = self.axes()
        return np.meshgrid(x, y, indexing="ij")

    def mode_numbers(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer mode grids ``(m, n)`` in numpy FFT index order."""
        if "modes" not in self._cache:
            m = np.rint(np.fft.fftfreq(self.nx) * self.nx).astype(np.int64)
            n = np.rint(np.fft.fftfreq(self.ny) * self.ny).astype(np.int64)
            self._cache["modes"] = np.meshgrid(m, n, indexing="ij")
        return self._cache["modes"]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalue table of ``-Laplacian``, shape ``(Nx, Ny)``, FFT order."""
        if "lam" not in self._cache:
            A, B = self.periods
            m, n = self.mode_numbers()
            lam = (TWO_PI * m / A) ** 2 + (TWO_PI * n / B) ** 2
            lam.flags.writeable = False
            self._cache["lam"] = lam
        return self._cache["lam"]

    def nyquist_mask(self) -> np.ndarray:
        """Boolean table, True away from the asymmetric Nyquist rows."""
        if "nyq" not in self._cache:
            m, n = self.mode_numbers()
            mask = (m != -self.nx // 2) & (n != -self.ny // 2)
            mask.flags.writeable = False
            self._cache["nyq"] = mask
        return self._cache["nyq"]

    @property
    def gamma(self) -> float:
        """Aspect ratio B/A of the two periods (1.0 for dim == 1)."""
        A, B = self.periods
        return B / A

    def gamma_rationality(self, tol: float = 1e-9, max_den: int = 10**4):
        """Detect whether the aspect ratio is p/q with a modest denominator.

        The denominator cap is tied to the tolerance: continued-fraction
        approximants of a generic irrational with q <= max_den sit at
        distance ~1/q^2 >> tol, so only genuine small fractions match.
        Returns ``(is_rational, p, q)`` (``None, None`` when not detected).
        """
        g = self.gamma
        frac = Fraction(g).limit_denominator(max_den)
        if abs(float(frac) - g) <= tol * max(1.0, abs(g)):
            return True, frac.numerator, frac.denominator
        return False, None, None

    def describe(self) -> dict:
        rational, p, q = self.gamma_rationality()
        return {
            "dim": self.dim,
            "periods": list(self.periods),
            "grid": list(self.grid),
            "cell_area": self.cell_area,
            "gamma": self.gamma,
            "gamma_rational": rational,
            "gamma_fraction": [p, q] if rational else None,
        }


def _check_same_geometry(a, b):
    if a.geometry != b.geometry:
        raise GeometryMismatchError(
            f"geometry mismatch: {a.geometry.describe()} vs {b.geometry.describe()}"
        )


@dataclass(frozen=True)
class SpatialField:
    """Complex scalar field sampled on the grid; ``role`` tags weights.

    Weight-tagged fields (observation weights W, damping coefficients a)
    must be real; damping additionally must be nonnegative, which is
    enforced where it matters (see :func:`torusctl.damping.damped_step`).
    """

    geometry: TorusGeometry
    values: np.ndarray
    role: str = "state"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.geometry.nx, self.geometry.ny):
            raise GeometryMismatchError(
                f"field shape {vals.shape} does not match grid {self.geometry.grid}"
            )
        if self.role not in ("state", "weight"):
            raise TorusError(f"unknown role {self.role!r}")
        if self.role == "weight" and np.max(np.abs(vals.imag)) > 1e-12 * max(
            1.0, float(np.max(np.abs(vals)))
        ):
            raise TorusError("weight fields must be real")
        if not np.all(np.isfinite(vals)):
            raise TorusError("field values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def real_values(self) -> np.ndarray:
        return self.values.real

    def norm(self) -> float:
        """L2 norm with the cell-area measure."""
        return float(
            np.sqrt(self.geometry.cell_area * np.sum(np.abs(self.values) ** 2))
        )

    def inner(self, other: "SpatialField") -> complex:
        _check_same_geometry(self, other)
        return complex(
            self.geometry.cell_area * np.sum(self.values * np.conj(other.values))
        )

    def lp_norm(self, p: float) -> float:
        return float(
            (self.geometry.cell_area * np.sum(np.abs(self.values) ** p)) ** (1.0 / p)
        )

    def integral(self) -> complex:
        return complex(self.geometry.cell_area * np.sum(self.values))


@dataclass(frozen=True)
class FourierField:
    """Mode-space representation; coefficients in numpy FFT index order."""

    geometry: TorusGeometry
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        if coeffs.shape != (self.geometry.nx, self.geometry.ny):
            raise GeometryMismatchError(
                f"coefficient shape {coeffs.shape} does not match grid {self.geometry.grid}"
            )
        object.__setattr__(self, "coefficients", coeffs)

    def norm(self) -> float:
        A, B = self.geometry.periods
        return float(np.sqrt(A * B * np.sum(np.abs(self.coefficients) ** 2)))

    def inner(self, other: "FourierField") -> complex:
        _check_same_geometry(self, other)
        A, B = self.geometry.periods
        return complex(A * B * np.sum(self.coefficients * np.conj(other.coefficients)))


def random_state(
    geometry: TorusGeometry,
    rng: np.random.Generator,
    lambda_max: float | None = None,
    normalize: bool = True,
) -> FourierField:
    """Gaussian random Fourier data, Nyquist rows masked.

    With ``lambda_max`` the support is restricted to ``lam <= lambda_max``.
    """
    shape = (geometry.nx, geometry.ny)
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    coeffs *= geometry.nyquist_mask()
    if lambda_max is not None:
        coeffs *= geometry.eigenvalues() <= lambda_max
    u = FourierField(geometry, coeffs)
    if normalize:
        nrm = u.norm()
        if nrm == 0:
            raise TorusError("random state collapsed to zero (empty band?)")
        u = FourierField(geometry, coeffs / nrm)
    return u
