"""Chain parameters, effective complex couplings, and the dynamical matrix.

A driven-dissipative bosonic chain with quadratic (linear-EOM) dynamics is
described by a tridiagonal non-Hermitian matrix acting on the vector of field
amplitudes: local loss and pump shift the on-site energy into the complex
plane, nearest-neighbor loss and pump do the same for the hoppings.  The two
concrete families covered here are the reciprocal lossy cavity array
(phi = 0, no nearest-neighbor dissipation) and the dissipative Hatano-Nelson
chain (gauge phase phi plus nearest-neighbor pump locked to half the local
pump).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

Array = np.ndarray

__all__ = [
    "ChainParams",
    "EffectiveCouplings",
    "DynamicalMatrix",
    "effective_couplings",
    "build_dynamical_matrix",
    "stability_report",
    "hatano_nelson_params",
]


@dataclass(frozen=True)
class ChainParams:
    """Physical parameters of a homogeneous chain, in absolute units.

    epsilon   on-site energy
    t_c       coherent hopping amplitude (>= 0)
    phi       gauge phase of the hopping, in radians
    gamma     local loss rate (>= 0)
    pump      local gain rate (>= 0)
    gamma_nn  nearest-neighbor loss rate (>= 0)
    pump_nn   nearest-neighbor gain rate (>= 0)
    """

    epsilon: float = 0.0
    t_c: float = 1.0
    phi: float = 0.0
    gamma: float = 0.0
    pump: float = 0.0
    gamma_nn: float = 0.0
    pump_nn: float = 0.0

    def __post_init__(self) -> None:
        for name in ("t_c", "gamma", "pump", "gamma_nn", "pump_nn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")

    @property
    def net_loss(self) -> float:
        """Net local loss rate gamma - P (positive means overall damping)."""
        return self.gamma - self.pump

    def mirrored(self) -> "ChainParams":
        """Parameters of the spatially mirrored chain (swaps the two hopping
        directions; for the gauge-phased chain this is phi -> -phi)."""
        return replace(self, phi=-self.phi)


def hatano_nelson_params(
    epsilon: float = 0.0,
    t_c: float = 1.0,
    phi: float = 0.0,
    gamma: float = 0.0,
    pump: float = 0.0,
) -> ChainParams:
    """Standard-form dissipative Hatano-Nelson chain.

    Local pump P comes with a nearest-neighbor pump P/2 (the two rates are
    locked, P = 2 P_nn) and no nearest-neighbor loss, which produces the
    effective hoppings t_c e^{+-i phi} + i P/4.
    """
    return ChainParams(
        epsilon=epsilon,
        t_c=t_c,
        phi=phi,
        gamma=gamma,
        pump=pump,
        gamma_nn=0.0,
        pump_nn=pump / 2.0,
    )


@dataclass(frozen=True)
class EffectiveCouplings:
    """Complex on-site energy and directional hoppings of the dynamical matrix.

    eps_tilde  effective on-site energy, epsilon - i(gamma - P)/2
    t_plus     coupling of site j to j+1 (upper off-diagonal)
    t_minus    coupling of site j+1 to j (lower off-diagonal)
    """

    eps_tilde: complex
    t_plus: complex
    t_minus: complex

    @property
    def hop_product(self) -> complex:
        """Direction-independent product t_plus * t_minus."""
        return self.t_plus * self.t_minus

    def mirrored(self) -> "EffectiveCouplings":
        """Couplings of the spatially mirrored chain (t_plus <-> t_minus)."""
        return EffectiveCouplings(self.eps_tilde, self.t_minus, self.t_plus)


def effective_couplings(params: ChainParams) -> EffectiveCouplings:
    """Combine coherent and dissipative rates into the complex couplings.

    Pump enters with the opposite sign to loss in both the on-site term and
    the hopping terms.
    """
    eps_tilde = params.epsilon - 0.5j * (params.gamma - params.pump)
    hop = params.t_c * np.exp(1j * params.phi)
    dissipative = -0.5j * (params.gamma_nn - params.pump_nn)
    return EffectiveCouplings(
        eps_tilde=complex(eps_tilde),
        t_plus=complex(hop + dissipative),
        t_minus=complex(np.conj(hop) + dissipative),
    )


@dataclass(frozen=True)
class DynamicalMatrix:
    """Tridiagonal generator of the first-moment equations of motion."""

    n_sites: int
    diagonal: Array
    off_upper: Array
    off_lower: Array

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if len(self.diagonal) != self.n_sites:
            raise ValueError("diagonal length must equal n_sites")
        if len(self.off_upper) != self.n_sites - 1 or len(self.off_lower) != self.n_sites - 1:
            raise ValueError("off-diagonals must have length n_sites - 1")

    def dense(self) -> Array:
        """Full dense complex matrix."""
        mat = np.diag(self.diagonal.astype(complex))
        if self.n_sites > 1:
            mat += np.diag(self.off_upper.astype(complex), 1)
            mat += np.diag(self.off_lower.astype(complex), -1)
        return mat

    @property
    def inf_norm(self) -> float:
        """Maximum absolute row sum, used to scale stability tolerances."""
        return float(np.linalg.norm(self.dense(), np.inf))


def build_dynamical_matrix(params: ChainParams, n_sites: int) -> DynamicalMatrix:
    """Assemble the tridiagonal dynamical matrix for a homogeneous chain.

    Row j couples to j+1 through t_plus and row j+1 couples back to j
    through t_minus; this orientation is assumed by every downstream
    Green's-function formula.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    c = effective_couplings(params)
    return DynamicalMatrix(
        n_sites=n_sites,
        diagonal=np.full(n_sites, c.eps_tilde, dtype=complex),
        off_upper=np.full(n_sites - 1, c.t_plus, dtype=complex),
        off_lower=np.full(n_sites - 1, c.t_minus, dtype=complex),
    )


def stability_report(matrix: DynamicalMatrix) -> dict:
    """Classify dynamical stability from the eigenvalues of the generator.

    The evolution is exp(-i D t), so a positive imaginary part of any
    eigenvalue means exponential growth.  The tolerance absorbs eigensolver
    noise at marginal points.

    Returns a dict with keys max_imag_eigenvalue, stable, eigenvalues.
    """
    try:
        eigenvalues = np.linalg.eigvals(matrix.dense())
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            "eigenvalue solver failed to converge; stability is undetermined "
            "(try a slightly perturbed parameter point)"
        ) from exc
    tol = 1e-9 * max(matrix.inf_norm, 1e-300)
    max_imag = float(np.max(eigenvalues.imag))
    return {
        "max_imag_eigenvalue": max_imag,
        "stable": bool(max_imag <= tol),
        "eigenvalues": eigenvalues,
    }
