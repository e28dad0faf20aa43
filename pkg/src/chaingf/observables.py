"""Physical observables built on the resolvent machinery.

Local density of states, infinite-chain (bulk) resolvent, spectral winding
number and its decay-exponent proxy, gain/noise figures of a chain used as
a directional amplifier, and the stability/topology diagram over the
loss-pump plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import ChainParams, build_dynamical_matrix, effective_couplings, stability_report
from .surface import (
    CorrelationData,
    SurfaceGF,
    correlation_data,
    gf_pair,
    glue_chains,
    solve_surface_gf,
)

Array = np.ndarray

__all__ = [
    "GapClosingError",
    "PhaseDiagram",
    "NoiseReport",
    "local_dos",
    "glue_dos",
    "bulk_gf_pbc",
    "winding_number",
    "winding_number_quadrature",
    "topo_indicator_from_xi",
    "phase_diagram",
    "gain",
    "pump_matrix",
    "added_noise",
    "noise_row_length",
    "hatano_noise",
]


class GapClosingError(RuntimeError):
    """Raised when a point sits on a phase boundary (spectral gap closes),
    where integer invariants are undefined."""


def local_dos(g_jj: complex) -> float:
    """Local density of states -(1/pi) Im G_{jj}.

    The diagonal element must be a retarded-branch value (evaluate at
    omega + i*eta for lossless chains).  A clearly negative result means a
    wrong branch was used upstream and is raised, not returned.
    """
    dos = -g_jj.imag / math.pi
    if dos < -1e-8:
        raise RuntimeError(
            f"negative density of states ({dos:.3g}); the Green's function "
            "value is not on the retarded branch"
        )
    return dos


def glue_dos(couplings, omega: float, *, eta: float = 1e-6) -> float:
    """Bulk density of states from two glued semi-infinite chains.

    Evaluated a distance eta above the real axis, so it is retarded even
    for a lossless chain.
    """
    w = complex(omega, eta) if np.isreal(omega) else complex(omega)
    left = solve_surface_gf(couplings.mirrored(), w, eta=eta)
    right = solve_surface_gf(couplings, w, eta=eta)
    bulk = glue_chains(left, right, couplings)
    return local_dos(bulk(0, 0))


def bulk_gf_pbc(omega: complex, t_c: float, omega_a: float, d: int) -> complex:
    """Bulk (translation-invariant) lattice Green's function at separation d.

    Closed form via the two roots of t_c z^2 - (omega - omega_a) z + t_c:
    the root inside the unit circle is kept, and on the real in-band axis,
    where both roots have unit modulus, the retarded root (the limit from
    Im omega > 0) is selected.
    """
    if t_c <= 0:
        raise ValueError(f"t_c must be positive, got {t_c}")
    w = complex(omega) - omega_a
    disc = w * w - 4.0 * t_c * t_c
    if disc == 0:
        # band edge: nudge into the upper half-plane
        w = w + 1j * 1e-9 * t_c
        disc = w * w - 4.0 * t_c * t_c
    s = np.sqrt(complex(disc))
    z_minus = (w - s) / (2.0 * t_c)
    z_plus = (w + s) / (2.0 * t_c)
    if abs(abs(z_minus) - abs(z_plus)) <= 1e-12 * max(abs(z_minus), abs(z_plus)):
        # unit-modulus tie on the real in-band axis: the principal minus
        # root is the retarded limit
        z_in, z_out = z_minus, z_plus
    elif abs(z_minus) < abs(z_plus):
        z_in, z_out = z_minus, z_plus
    else:
        z_in, z_out = z_plus, z_minus
    return complex(z_in ** abs(d) / (t_c * (z_out - z_in)))


def _symbol_roots(couplings, omega: complex):
    """Zeros of omega - D(k) in the z = e^{ik} plane, with the pole count
    of the symbol at the origin.

    The symbol is mu - t_plus/z - t_minus z (mu = omega - eps_tilde): it has
    one pole at z = 0 whenever t_plus is nonzero, and up to two zeros.
    """
    tp, tm = couplings.t_plus, couplings.t_minus
    mu = omega - couplings.eps_tilde
    if tm != 0:
        # Rational form -(tm z^2 - mu z + tp)/z: always one pole at the
        # origin.  The large quadratic root is built constructively (s
        # aligned with mu) and the small one from the root product
        # tp/tm, so neither suffers subtractive cancellation when
        # |mu|^2 >> |tp tm| (a tiny residual tm makes that the common
        # case, and the naive (mu - s)/(2 tm) form is pure noise there).
        s = np.sqrt(complex(mu * mu - 4.0 * tp * tm))
        proj = s * np.conj(mu)
        if proj.real < 0 or (proj.real == 0 and proj.imag < 0):
            s = -s
        z_big = (mu + s) / (2.0 * tm)
        if z_big == 0:
            # mu == 0 and tp == 0: both zeros sit at the origin
            zeros = [0j, 0j]
        else:
            zeros = [z_big, tp / (tm * z_big)]
        return zeros, 1
    # tm == 0: linear (or constant) symbol
    if tp == 0:
        if mu == 0:
            raise GapClosingError("flat symbol is identically zero; spectrum touches omega")
        return [], 0
    if mu == 0:
        return [], 1
    return [tp / mu], 1


def winding_number(params: ChainParams, omega: float) -> int:
    """Spectral winding of the chain's Bloch symbol around omega.

    Counted as poles minus zeros of the symbol inside the unit circle, the
    orientation that makes the amplifying phase come out at +1.  Points
    with a zero within 1e-6 of the unit circle are phase boundaries and
    raise GapClosingError rather than rounding the step function.
    """
    c = effective_couplings(params)
    zeros, poles = _symbol_roots(c, omega)
    inside = 0
    for z in zeros:
        m = abs(z)
        if abs(m - 1.0) < 1e-6:
            raise GapClosingError(
                f"symbol zero has modulus {m:.8f} at omega={omega}; this is "
                "a phase boundary"
            )
        if m < 1.0:
            inside += 1
    return poles - inside


def winding_number_quadrature(params: ChainParams, omega: float, n_k: int = 4096) -> int:
    """Same invariant from the accumulated phase of omega - D(k) over the
    Brillouin zone, with the same orientation as ``winding_number``."""
    c = effective_couplings(params)
    k = np.linspace(-math.pi, math.pi, n_k, endpoint=False)
    f = omega - (c.eps_tilde + c.t_plus * np.exp(-1j * k) + c.t_minus * np.exp(1j * k))
    scale = max(abs(c.t_plus), abs(c.t_minus), abs(omega - c.eps_tilde), 1e-300)
    if np.min(np.abs(f)) < 1e-9 * scale:
        raise GapClosingError(f"symbol passes through the origin at omega={omega}")
    phase = np.angle(f)
    steps = np.diff(np.concatenate([phase, phase[:1]]))
    steps = (steps + math.pi) % (2.0 * math.pi) - math.pi
    turns = steps.sum() / (2.0 * math.pi)
    rounded = int(round(turns))
    if abs(turns - rounded) > 0.01:
        raise RuntimeError(
            f"winding quadrature did not close to an integer ({turns:.4f}); "
            "increase n_k or move omega away from a boundary"
        )
    return -rounded


def topo_indicator_from_xi(corr: CorrelationData) -> int:
    """1 when the chain amplifies in either direction (some Re xi > 0).

    The two directional exponents are checked jointly, so the indicator
    does not depend on which end of the chain is called the surface.
    """
    re_xi = max(corr.xi_plus.real, corr.xi_minus.real)
    if abs(re_xi) < 1e-8:
        raise GapClosingError(
            f"decay exponent Re xi = {re_xi:.3g} is at the phase boundary"
        )
    return 1 if re_xi > 0 else 0


@dataclass(frozen=True)
class PhaseDiagram:
    """Classification of the loss-pump plane at one frequency.

    classification[i, k] corresponds to (gamma_grid[i], pump_grid[k]) and
    is one of "trivial_stable", "topological_stable",
    "topological_unstable", or "boundary"; a trivial yet unstable cell
    (not expected on the physical grids) would be labeled
    "trivial_unstable".
    """

    gamma_grid: Array
    pump_grid: Array
    classification: Array


def phase_diagram(
    params_template: ChainParams,
    gamma_grid,
    pump_grid,
    omega: float,
    n_sites: int,
    *,
    eta: float = 1e-6,
) -> PhaseDiagram:
    """Joint topology/stability classification over a (gamma, pump) grid.

    When the template locks the nearest-neighbor pump to half the local
    pump (the standard nonreciprocal configuration), that locking is
    maintained as the pump is swept; otherwise the template's
    nearest-neighbor rates are held fixed.
    """
    gamma_grid = np.asarray(gamma_grid, dtype=float)
    pump_grid = np.asarray(pump_grid, dtype=float)
    if gamma_grid.size == 0 or pump_grid.size == 0:
        raise ValueError("gamma and pump grids must be nonempty")
    # A template with no nn pump at all is a plain chain, not a degenerate
    # member of the locked family, so the vacuous 0 == 0/2 match is excluded.
    locked = (
        params_template.gamma_nn == 0.0
        and params_template.pump_nn != 0.0
        and params_template.pump_nn == 0.5 * params_template.pump
    )
    cls = np.empty((gamma_grid.size, pump_grid.size), dtype=object)
    for i, g in enumerate(gamma_grid):
        for k, p in enumerate(pump_grid):
            pars = replace(
                params_template,
                gamma=float(g),
                pump=float(p),
                pump_nn=0.5 * float(p) if locked else params_template.pump_nn,
            )
            c = effective_couplings(pars)
            try:
                surface = solve_surface_gf(c, omega, eta=eta)
                topo = topo_indicator_from_xi(correlation_data(surface, c))
            except GapClosingError:
                cls[i, k] = "boundary"
                continue
            stable = stability_report(build_dynamical_matrix(pars, n_sites))["stable"]
            if topo:
                cls[i, k] = "topological_stable" if stable else "topological_unstable"
            else:
                cls[i, k] = "trivial_stable" if stable else "trivial_unstable"
    return PhaseDiagram(gamma_grid=gamma_grid, pump_grid=pump_grid, classification=cls)


def gain(surface: SurfaceGF, corr: CorrelationData, gamma: float, j: int) -> float:
    """Power gain gamma^2 |G_{j,0}|^2 of site j driven through site 0.

    Uses the row-direction exponent, so it equals gamma^2 |gf_pair(j,0)|^2
    identically (the j=0 column has no surface correction).
    """
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    base = gamma * gamma * abs(surface.value) ** 2
    if j == 0:
        return float(base)
    re_xi = corr.xi_minus.real
    if re_xi == -math.inf:
        return 0.0
    try:
        factor = math.exp(2.0 * j * re_xi)
    except OverflowError:
        raise RuntimeError(
            f"gain overflows at site {j}; work with the exponent "
            "2*j*Re(xi_minus) instead"
        ) from None
    return float(base * factor)


def pump_matrix(params: ChainParams, size: int) -> Array:
    """Tridiagonal pump kernel: local pump on the diagonal, nearest-neighbor
    pump on the off-diagonals."""
    if size < 1:
        raise ValueError("size must be >= 1")
    mat = np.zeros((size, size))
    np.fill_diagonal(mat, params.pump)
    if size > 1:
        idx = np.arange(size - 1)
        mat[idx, idx + 1] = params.pump_nn
        mat[idx + 1, idx] = params.pump_nn
    return mat


@dataclass(frozen=True)
class NoiseReport:
    """Amplified noise quanta and the added-noise figure at one site.

    n_add is NaN when the gain vanishes (the added-noise figure is
    undefined for a dead channel).  l_max records where the row sum was
    truncated.
    """

    omega: complex
    site: int
    gain: float
    n_amp: float
    n_add: float
    l_max: int = -1


def added_noise(
    gf_row,
    pump_kernel: Array,
    gamma: float,
    *,
    omega: complex = complex("nan"),
    site: int = -1,
) -> NoiseReport:
    """Noise quanta added by the pump, referred to the input.

    Evaluates the quadratic form (gamma/2) G* . P . G over the supplied
    resolvent row and divides by the gain gamma^2 |G_{row,0}|^2.  The
    kernel is positive semidefinite for the physical pump patterns, so a
    clearly negative quadratic form indicates inconsistent inputs and
    raises.
    """
    row = np.asarray(gf_row, dtype=complex)
    if row.ndim != 1 or row.size == 0:
        raise ValueError("gf_row must be a nonempty 1-D sequence")
    pump_kernel = np.asarray(pump_kernel, dtype=float)
    if pump_kernel.shape != (row.size, row.size):
        raise ValueError(
            f"pump kernel shape {pump_kernel.shape} does not match row length {row.size}"
        )
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    quad = np.vdot(row, pump_kernel @ row).real
    scale = float(np.max(np.abs(pump_kernel))) * float(np.vdot(row, row).real) + 1e-300
    if quad < -1e-10 * scale:
        raise RuntimeError(
            f"pump quadratic form came out negative ({quad:.3g}); the kernel "
            "or row is inconsistent"
        )
    n_amp = 0.5 * gamma * max(quad, 0.0)
    g_j = gamma * gamma * abs(row[0]) ** 2
    n_add = n_amp / g_j if g_j > 0 else float("nan")
    return NoiseReport(
        omega=omega,
        site=site,
        gain=g_j,
        n_amp=n_amp,
        n_add=n_add,
        l_max=row.size - 1,
    )


def noise_row_length(j: int, re_xi_decay: float) -> int:
    """Row-sum cutoff: keep columns past j until the decaying directional
    factor has shed ~8 e-foldings."""
    rate = max(abs(re_xi_decay), 1e-6)
    return j + int(math.ceil(8.0 / rate))


def hatano_noise(
    params: ChainParams,
    omega: complex,
    j: int,
    *,
    eta: float = 1e-6,
) -> NoiseReport:
    """Full noise figure of site j for the given chain at one frequency.

    Convenience driver: solves the surface problem, truncates the row sum
    by the column-direction decay exponent, and assembles the report.
    Amplification direction follows the sign convention of the supplied
    parameters; to evaluate the opposite port, pass ``params.mirrored()``.
    """
    c = effective_couplings(params)
    surf = solve_surface_gf(c, omega, eta=eta)
    corr = correlation_data(surf, c)
    if corr.xi_plus.real >= 0 and np.isfinite(corr.xi_plus.real):
        raise RuntimeError(
            "column-direction exponent does not decay; the noise row sum "
            "would diverge (check the amplification direction or omega)"
        )
    l_max = noise_row_length(j, corr.xi_plus.real)
    row = np.array([gf_pair(surf, c, j, l) for l in range(l_max + 1)])
    kernel = pump_matrix(params, l_max + 1)
    return added_noise(row, kernel, params.gamma, omega=omega, site=j)
