"""Matrix-free Krylov solvers for Hermitian positive (semi)definite operators.

Operators are plain callables on packed complex vectors.  All randomness
comes from caller-provided generators, so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalError

Apply = Callable[[np.ndarray], np.ndarray]


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residual: float  # relative to ||b||
    converged: bool


def conjugate_gradient(
    apply: Apply,
    b: np.ndarray,
    tol: float = 1e-10,
    maxiter: int | None = None,
    x0: np.ndarray | None = None,
) -> CGResult:
    """CG for Hermitian positive definite operators on complex vectors."""
    n = b.size
    if maxiter is None:
        maxiter = max(100, 4 * n)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return CGResult(np.zeros_like(b), 0, 0.0, True)
    x = np.zeros_like(b) if x0 is None else x0.copy()
    r = b - apply(x) if x0 is not None else b.copy()
    p = r.copy()
    rz = np.vdot(r, r).real
    best_x, best_res = x.copy(), np.sqrt(rz) / bnorm
    for it in range(1, maxiter + 1):
        ap = apply(p)
        denom = np.vdot(p, ap).real
        if denom <= 0:
            # numerically indefinite direction: stop with the best iterate
            break
        alpha = rz / denom
        x = x + alpha * p
        r = r - alpha * ap
        rz_new = np.vdot(r, r).real
        res = np.sqrt(rz_new) / bnorm
        if res < best_res:
            best_x, best_res = x.copy(), res
        if res <= tol:
            return CGResult(x, it, res, True)
        p = r + (rz_new / rz) * p
        rz = rz_new
    return CGResult(best_x, maxiter, best_res, False)


@dataclass
class EigenResult:
    value: float
    vector: np.ndarray
    iterations: int
    operator_applies: int
    residual: float  # ||A x - value x|| for the unit Ritz vector
    converged: bool


class _RitzWindow:
    """Trailing window of iterates for a small Rayleigh-Ritz refinement.

    Keeps (x, Ax) pairs; extremal Ritz pairs of A restricted to their span
    are computed without further operator applications.  This makes the
    pure power/inverse-power value estimates robust to clustered spectra.
    """

    def __init__(self, size: int = 4):
        self.size = size
        self.xs: list[np.ndarray] = []
        self.axs: list[np.ndarray] = []

    def push(self, x: np.ndarray, ax: np.ndarray):
        self.xs.append(x)
        self.axs.append(ax)
        if len(self.xs) > self.size:
            self.xs.pop(0)
            self.axs.pop(0)

    def extremal(self, smallest: bool):
        X = np.stack(self.xs)  # (w, n)
        AX = np.stack(self.axs)
        S = X.conj() @ X.T
        H = X.conj() @ AX.T
        # orthonormalize the window, discarding nearly dependent directions
        evals, evecs = np.linalg.eigh(S)
        keep = evals > 1e-12 * max(evals.max(), 1e-300)
        if not np.any(keep):
            return None
        T = evecs[:, keep] / np.sqrt(evals[keep])
        Hp = T.conj().T @ H @ T
        Hp = 0.5 * (Hp + Hp.conj().T)
        vals, vecs = np.linalg.eigh(Hp)
        idx = 0 if smallest else -1
        coeff = T @ vecs[:, idx]
        z = coeff @ X
        az = coeff @ AX
        znorm = np.linalg.norm(z)
        if znorm == 0:
            return None
        z /= znorm
        az /= znorm
        theta = float(np.vdot(z, az).real)
        residual = float(np.linalg.norm(az - theta * z))
        return theta, z, az, residual


def smallest_eigenvalue(
    apply: Apply,
    dim: int,
    rng: np.random.Generator,
    rtol: float = 1e-8,
    max_outer: int = 80,
    cg_maxiter: int | None = None,
) -> EigenResult:
    """Smallest eigenvalue by shifted inverse power with CG inner solves.

    The shift is kept at ``theta - 2*residual``, a certified lower bound of
    the target eigenvalue for Hermitian operators, so the shifted operator
    stays positive definite while the effective spectral ratio shrinks with
    the residual (Rayleigh-quotient-like acceleration on clustered spectra).
    Stops once the Ritz residual ``||A x - theta x||`` drops below
    ``rtol * theta``, which bounds the eigenvalue error by the same amount.
    """
    if cg_maxiter is None:
        cg_maxiter = max(200, 4 * dim)
    applies = 0

    def counted(v):
        nonlocal applies
        applies += 1
        return apply(v)

    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    ax = counted(x)
    theta = float(np.vdot(x, ax).real)
    residual = float(np.linalg.norm(ax - theta * x))
    window = _RitzWindow()
    window.push(x, ax)
    best = (theta, x, residual)
    for outer in range(1, max_outer + 1):
        floor = max(abs(theta), 1e-300)
        if residual <= rtol * floor:
            return EigenResult(theta, x, outer - 1, applies, residual, True)
        # engage the shift only once theta - 2*residual certifiably undershoots
        # the bottom eigenvalue; early on plain inverse power drives the
        # iterate into the bottom cluster first
        shift = max(0.0, theta - 2.0 * residual) if residual <= 0.01 * floor else 0.0
        inner_tol = min(1e-3, max(1e-13, 1e-2 * residual / floor))
        sol = conjugate_gradient(
            lambda v: counted(v) - shift * v, x, tol=inner_tol, maxiter=cg_maxiter
        )
        y = sol.x
        ynorm = np.linalg.norm(y)
        if ynorm == 0:
            break
        x = y / ynorm
        ax = counted(x)
        window.push(x, ax)
        ritz = window.extremal(smallest=True)
        if ritz is not None:
            theta, x, ax, residual = ritz
        else:
            theta = float(np.vdot(x, ax).real)
            residual = float(np.linalg.norm(ax - theta * x))
        if theta < best[0] or residual < best[2]:
            best = (theta, x, residual)
    theta, x, residual = best
    if residual <= rtol * max(abs(theta), 1e-300):
        return EigenResult(theta, x, max_outer, applies, residual, True)
    raise NumericalError(
        f"inverse power iteration did not converge after {max_outer} outer "
        f"iterations: best estimate {theta:.6e} with residual {residual:.2e} "
        f"(bracket [{max(theta - residual, 0.0):.6e}, {theta + residual:.6e}])",
        best_estimate=theta,
        residual=residual,
    )


def largest_eigenvalue(
    apply: Apply,
    dim: int,
    rng: np.random.Generator,
    rtol: float = 1e-6,
    max_iter: int = 200,
) -> EigenResult:
    """Largest eigenvalue by power iteration (with the same Ritz window)."""
    applies = 0

    def counted(v):
        nonlocal applies
        applies += 1
        return apply(v)

    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    window = _RitzWindow()
    theta, residual = 0.0, np.inf
    for it in range(1, max_iter + 1):
        ax = counted(x)
        window.push(x, ax)
        ritz = window.extremal(smallest=False)
        if ritz is None:
            break
        theta, z, az, residual = ritz
        if residual <= rtol * max(abs(theta), 1e-300):
            return EigenResult(theta, z, it, applies, residual, True)
        nrm = np.linalg.norm(az)
        if nrm == 0:
            break
        x = az / nrm
    return EigenResult(theta, x, max_iter, applies, residual, False)
