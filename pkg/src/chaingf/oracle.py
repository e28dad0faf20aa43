"""Dense reference solvers: resolvent by LU factorization, time evolution by
eigendecomposition.

These are the brute-force cross-checks for the recursive Green's-function
routines.  They scale as O(N^3) and are only meant for validation and for
small chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import DynamicalMatrix

Array = np.ndarray

__all__ = ["Trajectory", "dense_gf", "propagate"]


def dense_gf(matrix: DynamicalMatrix, omega: complex) -> Array:
    """Full resolvent (omega - D)^{-1} as a dense N x N array.

    One LU factorization with partial pivoting, then one unit-vector
    back-substitution per column.  The per-column substitutions keep the
    cost profile uniformly cubic across chain sizes, which is what the
    scaling benchmark quotes; a blocked all-columns solve returns the same
    numbers but its throughput drifts with N.

    Raises RuntimeError when omega sits numerically on an eigenvalue; shift
    omega slightly off the real axis in that case.
    """
    n = matrix.n_sites
    lhs = omega * np.eye(n, dtype=complex) - matrix.dense()
    try:
        lu, piv = scipy.linalg.lu_factor(lhs)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise RuntimeError(
            f"resolvent is singular at omega={omega}; displace omega off the "
            "real axis (e.g. add 1e-9j) and retry"
        ) from exc
    getrs, = scipy.linalg.get_lapack_funcs(("getrs",), (lu,))
    gf = np.empty((n, n), dtype=complex)
    rhs = np.zeros((n, 1), dtype=complex, order="F")
    for col in range(n):
        rhs[:, 0] = 0.0
        rhs[col, 0] = 1.0
        sol, info = getrs(lu, piv, rhs)
        if info != 0:
            raise RuntimeError(
                f"back-substitution failed at omega={omega} (lapack info "
                f"{info}); displace omega off the real axis and retry"
            )
        gf[:, col] = sol[:, 0]
    if not np.all(np.isfinite(gf)):
        raise RuntimeError(
            f"resolvent overflowed at omega={omega}; omega is too close to an "
            "eigenvalue for double precision"
        )
    return gf


@dataclass
class Trajectory:
    """Sampled first-moment evolution <a_j(t)>.

    times        1d array of sample times
    amplitudes   array of shape (len(times), n_sites)
    truncated    True when the evolution overflowed and the trajectory was
                 cut at the last finite sample
    """

    times: Array
    amplitudes: Array
    truncated: bool = field(default=False)


def propagate(
    matrix: DynamicalMatrix,
    initial: Array,
    times: Array,
) -> Trajectory:
    """Evolve <a(t)> = exp(-i D t) <a(0)> at the requested times.

    Uses the eigendecomposition of D when it is well conditioned, otherwise
    falls back to scaling-and-squaring matrix exponentials per time step.
    Unstable chains grow exponentially; if amplitudes overflow, the
    trajectory is truncated at the last finite sample and flagged.
    """
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (matrix.n_sites,):
        raise ValueError(
            f"initial vector must have shape ({matrix.n_sites},), got {initial.shape}"
        )
    times = np.asarray(times, dtype=float)
    dense = matrix.dense()

    use_eig = True
    try:
        evals, vecs = np.linalg.eig(dense)
        cond = np.linalg.cond(vecs)
        if not np.isfinite(cond) or cond > 1e8:
            use_eig = False
    except np.linalg.LinAlgError:
        use_eig = False

    amps = np.empty((len(times), matrix.n_sites), dtype=complex)
    if use_eig:
        coeffs = np.linalg.solve(vecs, initial)
        with np.errstate(over="ignore", invalid="ignore"):
            phases = np.exp(-1j * np.outer(times, evals))
            amps[:] = (vecs @ (phases * coeffs).T).T
    else:
        for i, t in enumerate(times):
            with np.errstate(over="ignore", invalid="ignore"):
                amps[i] = scipy.linalg.expm(-1j * dense * t) @ initial

    finite = np.all(np.isfinite(amps), axis=1)
    if np.all(finite):
        return Trajectory(times=times, amplitudes=amps, truncated=False)
    cut = int(np.argmin(finite))
    return Trajectory(times=times[:cut], amplitudes=amps[:cut], truncated=True)
