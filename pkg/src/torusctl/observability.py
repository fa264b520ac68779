"""Observability Gramian of the free evolution through a rough weight.

The Gramian is ``G_T = sum_j w_j e^{-i t_j D} M_{W^2} e^{i t_j D}`` followed
by re-projection onto the working subspace ``{lam <= lambda_max}``; it is
Hermitian positive semidefinite by construction since every quadrature term
is a conjugated nonnegative multiplier with positive weight.  The
observability constant of the truncated problem is ``K = 1/lambda_min``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import time_quadrature_density
from .errors import SubspaceError, TorusError
from .geometry import FourierField, SpatialField, TorusGeometry
from .solvers import EigenResult, largest_eigenvalue, smallest_eigenvalue
from .spectral import to_fourier
from .timegrid import TimeGrid, sampling_rule

# grid points per chunk of batched node FFTs (keeps peak memory ~tens of MB)
_CHUNK_BUDGET = 2_000_000


@dataclass(frozen=True)
class ObservationSetup:
    """Weight, horizon, quadrature, and frequency truncation for G_T."""

    weight: SpatialField
    horizon: float
    lambda_max: float
    nt: int | None = None
    rule: str = "midpoint"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.weight.role != "weight":
            object.__setattr__(
                self,
                "weight",
                SpatialField(self.weight.geometry, self.weight.values.real, role="weight"),
            )
        if self.horizon <= 0:
            raise TorusError(f"horizon must be positive, got {self.horizon}")
        if self.weight.lp_norm(4) <= 1e-12:
            raise TorusError("weight has (numerically) vanishing L4 norm")
        geo = self.weight.geometry
        lam = geo.eigenvalues()
        nyquist_lams = lam[~geo.nyquist_mask()]
        if self.lambda_max <= 0:
            raise TorusError(f"lambda_max must be positive, got {self.lambda_max}")
        if nyquist_lams.size and self.lambda_max >= nyquist_lams.min():
            raise TorusError(
                f"lambda_max={self.lambda_max:g} reaches the Nyquist band "
                f"(first Nyquist eigenvalue {nyquist_lams.min():g}); refine the grid"
            )

    @property
    def geometry(self) -> TorusGeometry:
        return self.weight.geometry

    @property
    def nt_rule(self) -> int:
        return sampling_rule(self.horizon, self.lambda_max)

    @property
    def nt_effective(self) -> int:
        return self.nt_rule if self.nt is None else int(self.nt)

    @property
    def nt_override(self) -> bool:
        return self.nt is not None and int(self.nt) < self.nt_rule

    def time_grid(self) -> TimeGrid:
        if "tgrid" not in self._cache:
            self._cache["tgrid"] = TimeGrid.make(self.rule, self.horizon, self.nt_effective)
        return self._cache["tgrid"]

    def subspace_mask(self) -> np.ndarray:
        if "mask" not in self._cache:
            mask = self.geometry.eigenvalues() <= self.lambda_max
            mask.flags.writeable = False
            self._cache["mask"] = mask
        return self._cache["mask"]

    def subspace_indices(self) -> np.ndarray:
        if "idx" not in self._cache:
            self._cache["idx"] = np.flatnonzero(self.subspace_mask().ravel())
        return self._cache["idx"]

    @property
    def dim(self) -> int:
        return len(self.subspace_indices())

    def describe(self) -> dict:
        w = self.weight
        return {
            "geometry": self.geometry.describe(),
            "horizon": self.horizon,
            "lambda_max": self.lambda_max,
            "nt": self.nt_effective,
            "nt_rule": self.nt_rule,
            "nt_override": self.nt_override,
            "rule": self.rule,
            "subspace_dim": self.dim,
            "weight_l2": w.lp_norm(2),
            "weight_l4": w.lp_norm(4),
            "weight_linf": float(np.max(np.abs(w.values.real))),
        }

    # -- packing between FourierField and solver vectors -------------------

    def pack(self, u: FourierField) -> np.ndarray:
        return u.coefficients.ravel()[self.subspace_indices()].copy()

    def unpack(self, vec: np.ndarray) -> FourierField:
        flat = np.zeros(self.geometry.size, dtype=np.complex128)
        flat[self.subspace_indices()] = vec
        return FourierField(self.geometry, flat.reshape(self.geometry.nx, self.geometry.ny))


def _node_phases(setup: ObservationSetup) -> np.ndarray:
    """exp(-i t_j lam) for all quadrature nodes, shape (Nt, Nx, Ny)."""
    if "phases" not in setup._cache:
        lam = setup.geometry.eigenvalues()
        tg = setup.time_grid()
        setup._cache["phases"] = np.exp(-1j * tg.nodes[:, None, None] * lam[None, :, :])
    return setup._cache["phases"]


def _gramian_raw(setup: ObservationSetup, coeffs: np.ndarray) -> np.ndarray:
    """Quadrature sum without the final subspace projection."""
    w2 = setup._cache.get("w2")
    if w2 is None:
        w2 = setup.weight.values.real**2
        setup._cache["w2"] = w2
    phases = _node_phases(setup)
    weights = setup.time_grid().weights
    nt = len(weights)
    chunk = max(1, _CHUNK_BUDGET // setup.geometry.size)
    acc = np.zeros_like(coeffs)
    for start in range(0, nt, chunk):
        ph = phases[start : start + chunk]
        v = coeffs[None, :, :] * ph
        u = np.fft.ifft2(v, axes=(1, 2))
        u *= w2[None, :, :]
        m = np.fft.fft2(u, axes=(1, 2))
        m *= ph.conj()
        acc += np.einsum("t,txy->xy", weights[start : start + chunk], m)
    return acc


def gramian_apply(setup: ObservationSetup, u: FourierField, check_support: bool = True) -> FourierField:
    """Apply the truncated observability Gramian to a subspace state."""
    if u.geometry != setup.geometry:
        raise TorusError("state geometry does not match the observation setup")
    mask = setup.subspace_mask()
    if check_support and np.any(u.coefficients[~mask] != 0):
        outside = int(np.count_nonzero(u.coefficients[~mask]))
        raise SubspaceError(
            f"state has {outside} nonzero modes outside lambda <= {setup.lambda_max:g}"
        )
    out = _gramian_raw(setup, u.coefficients)
    out *= mask
    return FourierField(setup.geometry, out)


def gramian_operator(setup: ObservationSetup):
    """Packed-vector callable suitable for the Krylov solvers."""
    idx = setup.subspace_indices()
    geo = setup.geometry

    def apply(vec: np.ndarray) -> np.ndarray:
        flat = np.zeros(geo.size, dtype=np.complex128)
        flat[idx] = vec
        out = _gramian_raw(setup, flat.reshape(geo.nx, geo.ny))
        return out.ravel()[idx]

    return apply


@dataclass(frozen=True)
class GramianReport:
    """Smallest/largest Gramian eigenvalues and the derived constant K."""

    lambda_min: float
    lambda_max: float
    observability_constant: float
    dim: int
    outer_iterations: int
    operator_applies: int
    eigen_residual: float
    lambda_max_residual: float
    tolerance: float
    seed: int
    setup: dict

    def to_dict(self) -> dict:
        return {
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "observability_constant": self.observability_constant,
            "dim": self.dim,
            "outer_iterations": self.outer_iterations,
            "operator_applies": self.operator_applies,
            "eigen_residual": self.eigen_residual,
            "lambda_max_residual": self.lambda_max_residual,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "setup": self.setup,
        }


def observability_constant(
    setup: ObservationSetup,
    tol: float = 1e-8,
    seed: int = 0,
    max_outer: int = 80,
) -> GramianReport:
    """Certify lambda_min of G_T on the truncated subspace, matrix-free."""
    if setup.dim < 1:
        raise SubspaceError("empty working subspace: raise lambda_max")
    apply = gramian_operator(setup)
    rng = np.random.default_rng(seed)
    small: EigenResult = smallest_eigenvalue(apply, setup.dim, rng, rtol=tol, max_outer=max_outer)
    big: EigenResult = largest_eigenvalue(apply, setup.dim, rng, rtol=max(tol, 1e-6))
    lam_min = small.value
    constant = 1.0 / lam_min if lam_min > 0 else math.inf
    return GramianReport(
        lambda_min=lam_min,
        lambda_max=big.value,
        observability_constant=constant,
        dim=setup.dim,
        outer_iterations=small.iterations,
        operator_applies=small.operator_applies + big.operator_applies,
        eigen_residual=small.residual,
        lambda_max_residual=big.residual,
        tolerance=tol,
        seed=seed,
        setup=setup.describe(),
    )


def assemble_dense(setup: ObservationSetup) -> np.ndarray:
    """Dense Gramian on the subspace, column by column via gramian_apply."""
    n = setup.dim
    if n > 400:
        raise TorusError(f"dense assembly capped at dim 400, requested {n}")
    apply = gramian_operator(setup)
    cols = np.empty((n, n), dtype=np.complex128)
    basis = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        basis[:] = 0
        basis[i] = 1.0
        cols[:, i] = apply(basis)
    return 0.5 * (cols + cols.conj().T)


def sweep_constants(
    weight: SpatialField,
    horizon: float,
    lambda_values,
    tol: float = 1e-8,
    seed: int = 0,
    rule: str = "midpoint",
) -> list[GramianReport]:
    """K(lambda_max) sweep over a list of truncation radii."""
    reports = []
    for lam in lambda_values:
        setup = ObservationSetup(weight=weight, horizon=horizon, lambda_max=float(lam), rule=rule)
        reports.append(observability_constant(setup, tol=tol, seed=seed))
    return reports


def sweep_rows(reports: list[GramianReport]) -> list[tuple]:
    """Rows for the (lambda_max, dim, lambda_min, K, iters) CSV schema."""
    return [
        (
            r.setup["lambda_max"],
            r.dim,
            r.lambda_min,
            r.observability_constant,
            r.operator_applies,
        )
        for r in reports
    ]


SWEEP_HEADER = ("lambda_max", "dim", "lambda_min", "K", "iters")


def mixed_norm_L4L2(
    u0: FourierField, horizon: float, nt: int | None = None, rule: str = "midpoint"
) -> float:
    """Mixed norm ||e^{itD} u0||_{L4(T^2; L2(0,T))} by time quadrature.

    Per grid point the squared L2(0,T) trace is accumulated, then the
    spatial L4 norm of its square root is returned.
    """
    q = time_quadrature_density(u0, horizon, nt=nt, rule=rule)
    cell = u0.geometry.cell_area
    return float((cell * np.sum(q**2)) ** 0.25)


def eigenspace_modes(geometry: TorusGeometry, lam: float, rtol: float = 1e-9):
    """Mode indices (FFT order) spanning the eigenspace of -Laplacian at lam."""
    table = geometry.eigenvalues()
    mask = np.abs(table - lam) <= rtol * max(1.0, abs(lam))
    mask &= geometry.nyquist_mask()
    return np.argwhere(mask)


def eigenspace_matrix(geometry: TorusGeometry, lam: float, weight: SpatialField) -> np.ndarray:
    """Matrix of M_{W^2} compressed to the eigenspace, in the normalized basis.

    Entry (j, k) is the Fourier coefficient of W^2 at the mode difference
    k_j - k_k, so W == 1 gives the identity.
    """
    if weight.geometry != geometry:
        raise TorusError("weight geometry mismatch")
    modes = eigenspace_modes(geometry, lam)
    if len(modes) == 0:
        raise TorusError(f"lam={lam:g} is not an eigenvalue of -Laplacian on this grid")
    m, n = geometry.mode_numbers()
    mj = m[modes[:, 0], modes[:, 1]]
    nj = n[modes[:, 0], modes[:, 1]]
    dmax_x = int(np.max(np.abs(mj[:, None] - mj[None, :])))
    dmax_y = int(np.max(np.abs(nj[:, None] - nj[None, :])))
    if dmax_x >= geometry.nx // 2 or dmax_y >= geometry.ny // 2:
        raise TorusError(
            "mode differences of the eigenspace alias on this grid; refine the grid"
        )
    w2 = SpatialField(geometry, weight.values.real**2, role="weight")
    w2_hat = to_fourier(w2).coefficients
    dm = (mj[:, None] - mj[None, :]) % geometry.nx
    dn = (nj[:, None] - nj[None, :]) % geometry.ny
    mat = w2_hat[dm, dn]
    return 0.5 * (mat + mat.conj().T)


def eigenspace_observability(geometry: TorusGeometry, lam: float, weight: SpatialField) -> float:
    """Smallest eigenvalue of P_lam M_{W^2} P_lam on the lam-eigenspace."""
    mat = eigenspace_matrix(geometry, lam, weight)
    return float(np.linalg.eigvalsh(mat)[0])
