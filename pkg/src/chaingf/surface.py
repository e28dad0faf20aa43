"""Semi-infinite surface Green's function and everything derived from it.

Detaching the surface site of a semi-infinite chain leaves another
semi-infinite chain, so the surface resolvent element solves a quadratic
self-consistency equation.  Its two roots are reciprocal in the contraction
factor rho = G00^2 t_plus t_minus; the physical root has |rho| < 1, which
is also what makes two-point entries decay (or amplify no faster than the
directional factor) away from the diagonal.

Two-point entries, directional decay lengths, and the bulk (infinite-chain)
resolvent obtained by gluing two half-chains all follow in closed form from
that single scalar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChainParams, EffectiveCouplings, effective_couplings

Array = np.ndarray

__all__ = [
    "SurfaceGF",
    "CorrelationData",
    "BulkGF",
    "solve_surface_gf",
    "gf_pair",
    "correlation_data",
    "xi_decay_formula",
    "glue_chains",
    "unwrap_imag",
]

# |rho| window treated as "on the unit circle" and broken by displacement
_RHO_TIE = 1e-9
# degenerate geometric-sum switch
_RHO_ONE = 1e-8


@dataclass(frozen=True)
class SurfaceGF:
    """Surface resolvent element of a semi-infinite chain at one frequency.

    value              the root of the quadratic self-consistency equation
    residual           normalized self-consistency mismatch
                       |G - g - g t_plus G t_minus G| / max(1, |G|)
    branch_tag         "physical" (|rho| < 1) or "alternate" (the other root)
    near_branch_point  True when the two roots are close enough that the
                       selection relied on an infinitesimal frequency
                       displacement
    """

    omega: complex
    value: complex
    residual: float
    branch_tag: str
    near_branch_point: bool = False


def _both_roots(couplings: EffectiveCouplings, omega: complex):
    """Both quadratic roots, written to stay finite at omega = eps_tilde.

    With s aligned so that w + s is constructive, the decaying root is
    2 / (w + s): algebraically identical to (w - s) / (2 alpha) but free
    of the subtractive cancellation that wrecks the latter once
    |w|^2 >> |alpha|.
    """
    alpha = couplings.hop_product
    w = omega - couplings.eps_tilde
    s = np.sqrt(complex(w * w - 4.0 * alpha))
    proj = s * np.conj(w)
    if proj.real < 0 or (proj.real == 0 and proj.imag < 0):
        s = -s
    return 2.0 / (w + s), (w + s) / (2.0 * alpha), s, w


def _residual(couplings: EffectiveCouplings, omega: complex, g00: complex) -> float:
    alpha = couplings.hop_product
    w = omega - couplings.eps_tilde
    scale = max(1.0, abs(g00))
    if w == 0:
        return abs(alpha * g00 * g00 - w * g00 + 1.0) / scale
    return abs(g00 - 1.0 / w - (alpha / w) * g00 * g00) / scale


def solve_surface_gf(
    couplings: EffectiveCouplings,
    omega: complex,
    *,
    eta: float = 1e-6,
    branch_point_tol: float = 1e-8,
    want: str = "physical",
) -> SurfaceGF:
    """Surface resolvent element, on the requested branch.

    The physical branch is the root with |rho| < 1 (two-point entries
    bounded by the directional factors; |G00| ~ 1/|omega| at large
    frequency).  When |rho| sits on the unit circle to within rounding,
    which happens on the real axis of a marginal chain and at square-root
    branch points, the tie is broken by evaluating at omega + i*eta and
    following the root continuously back; such points are flagged.
    """
    if want not in ("physical", "alternate"):
        raise ValueError(f"want must be 'physical' or 'alternate', got {want!r}")
    alpha = couplings.hop_product
    if alpha == 0:
        if want == "alternate":
            raise ValueError(
                "unidirectional couplings have a single (linear) solution; "
                "there is no alternate branch"
            )
        w = omega - couplings.eps_tilde
        if w == 0:
            raise RuntimeError(
                f"surface resolvent is singular at omega={omega}; displace "
                "omega off the real axis"
            )
        g = 1.0 / w
        return SurfaceGF(omega=omega, value=g, residual=_residual(couplings, omega, g),
                         branch_tag=want, near_branch_point=False)

    root_a, root_b, s, w = _both_roots(couplings, omega)
    near = abs(s) <= branch_point_tol * max(abs(w), 2.0 * np.sqrt(abs(alpha)), 1e-300)

    mod_a = abs(root_a * root_a * alpha)
    mod_b = abs(root_b * root_b * alpha)
    if abs(mod_a - 1.0) > _RHO_TIE or abs(mod_b - 1.0) > _RHO_TIE:
        physical, alternate = (root_a, root_b) if mod_a < mod_b else (root_b, root_a)
    else:
        near = True
        eta_eff = eta if eta > 0 else 1e-9
        da, db, _, _ = _both_roots(couplings, omega + 1j * eta_eff)
        d_phys = da if abs(da * da * alpha) < abs(db * db * alpha) else db
        physical, alternate = (
            (root_a, root_b) if abs(root_a - d_phys) <= abs(root_b - d_phys)
            else (root_b, root_a)
        )

    value = physical if want == "physical" else alternate
    return SurfaceGF(
        omega=omega,
        value=value,
        residual=_residual(couplings, omega, value),
        branch_tag=want,
        near_branch_point=bool(near),
    )


@dataclass(frozen=True)
class CorrelationData:
    """Directional decay/amplification exponents of the semi-infinite chain.

    xi_plus    log(G00 * t_plus): per-site exponent moving away from the
               surface in the second index (columns)
    xi_minus   log(G00 * t_minus): same for the first index (rows)
    rho        G00^2 * t_plus * t_minus, the surface-correction contraction
               factor; equals exp(xi_plus + xi_minus)
    """

    xi_plus: complex
    xi_minus: complex
    rho: complex


def _safe_log(z: complex) -> complex:
    if z == 0:
        return complex(-np.inf, 0.0)
    return complex(np.log(complex(z)))


def correlation_data(surface: SurfaceGF, couplings: EffectiveCouplings) -> CorrelationData:
    """Directional exponents from an already-solved surface element.

    Logs are principal-branch; use ``unwrap_imag`` on a frequency sweep to
    plot a continuous imaginary part.
    """
    g00 = surface.value
    if g00 == 0:
        raise ValueError("surface value is zero; correlation exponents are undefined")
    return CorrelationData(
        xi_plus=_safe_log(g00 * couplings.t_plus),
        xi_minus=_safe_log(g00 * couplings.t_minus),
        rho=g00 * g00 * couplings.hop_product,
    )


def _xi_prefactor(rho: complex, m: int) -> complex:
    """Geometric surface correction 1 + Xi_m = (rho^{m+1} - 1)/(rho - 1)."""
    if abs(rho - 1.0) < _RHO_ONE:
        return 1.0 + m * rho
    with np.errstate(over="ignore", invalid="ignore"):
        num = np.complex128(rho) ** (m + 1) - 1.0
    if not np.isfinite(num):
        raise RuntimeError(
            f"surface correction overflowed at |rho|={abs(rho):.3g}, m={m}; "
            "this point amplifies too strongly for direct evaluation, work "
            "with the exponents from correlation_data instead"
        )
    return complex(num / (rho - 1.0))


def gf_pair(
    surface: SurfaceGF,
    couplings: EffectiveCouplings,
    j: int,
    l: int,
) -> complex:
    """Two-point entry G_{j,l} of the semi-infinite chain.

    Closed form: the directional factor (G00 t)^{|j-l|} times the geometric
    surface correction at distance min(j, l) from the boundary, times G00.
    Growth past double-precision range (strong amplification at large
    separation) raises rather than returning inf.
    """
    if j < 0 or l < 0:
        raise ValueError(f"site indices must be >= 0, got j={j}, l={l}")
    g00 = surface.value
    rho = g00 * g00 * couplings.hop_product
    hop = couplings.t_minus if j > l else couplings.t_plus
    with np.errstate(over="ignore", invalid="ignore"):
        factor = np.complex128(g00 * hop) ** abs(j - l)
    pref = _xi_prefactor(rho, min(j, l))
    value = pref * factor * g00
    if not np.isfinite(value):
        raise RuntimeError(
            f"G_({j},{l}) overflowed double precision; evaluate the exponent "
            "via correlation_data instead of the raw entry"
        )
    return complex(value)


def xi_decay_formula(params: ChainParams, omega: float) -> complex:
    """Decay exponent from chain rates alone, no surface solve.

    Closed form in the reduced frequency a = (omega - epsilon + i Gamma) /
    (2 sqrt(t_plus t_minus)) with Gamma the net local rate; the asymmetry
    of the hoppings enters only through the additive (1/2) log(t-/t+).
    Its real part reproduces the real part of log(rho) up to corrections
    quadratic in Gamma.
    """
    c = effective_couplings(params)
    if c.hop_product == 0:
        raise ValueError("decay formula needs bidirectional hopping (t_plus*t_minus != 0)")
    gamma_net = params.net_loss
    root_hop = np.sqrt(complex(c.hop_product))
    a = (omega - params.epsilon + 1j * gamma_net) / (2.0 * root_hop)
    if abs(a) < 1e-6:
        inner = np.sqrt(complex(a * a - 1.0))
        if a.imag < 0:
            inner = -inner
        term = a - inner
    else:
        term = a - a * np.sqrt(1.0 - 1.0 / (a * a))
    if term == 0 or not np.isfinite(term):
        raise RuntimeError(
            f"decay formula is singular at omega={omega}; displace omega "
            "slightly and retry"
        )
    return complex(0.5 * np.log(complex(c.t_minus / c.t_plus)) + np.log(complex(term)))


@dataclass(frozen=True)
class BulkGF:
    """Infinite-chain resolvent assembled from two half-chain surfaces.

    Calling the object with (j, l) gives the bulk entry; the surface
    corrections of the two halves cancel, so the result depends on j - l
    only (``at_displacement`` is the convenience form of that fact).
    """

    omega: complex
    couplings: EffectiveCouplings
    surface_left: SurfaceGF
    surface_right: SurfaceGF

    def __call__(self, j: int, l: int) -> complex:
        right = self.surface_right
        c = self.couplings
        alpha = c.hop_product
        denom = 1.0 - alpha * right.value * self.surface_left.value
        if denom == 0:
            raise RuntimeError(
                f"half-chain glue is resonant at omega={self.omega}; displace "
                "omega off the real axis"
            )
        direct = gf_pair(right, c, j, l)
        correction = (
            gf_pair(right, c, j, 0)
            * gf_pair(right, c, 0, l)
            * alpha
            * self.surface_left.value
            / denom
        )
        return complex(direct + correction)

    def at_displacement(self, d: int) -> complex:
        """Bulk entry for site separation d = j - l."""
        if d >= 0:
            return self(d, 0)
        return self(0, -d)


def glue_chains(
    surface_left: SurfaceGF,
    surface_right: SurfaceGF,
    couplings: EffectiveCouplings,
) -> BulkGF:
    """Join two semi-infinite chains through one bond into a bulk resolvent.

    Both surfaces must be physical-branch solutions at the same frequency;
    the left chain is the mirror half, whose surface value coincides with
    the right one because the quadratic involves the hoppings only through
    their product.
    """
    if surface_left.omega != surface_right.omega:
        raise ValueError(
            f"surfaces were solved at different frequencies "
            f"({surface_left.omega} vs {surface_right.omega})"
        )
    return BulkGF(
        omega=surface_right.omega,
        couplings=couplings,
        surface_left=surface_left,
        surface_right=surface_right,
    )


def unwrap_imag(xi_values: Array) -> Array:
    """Continue the imaginary parts of a sweep of exponents across branch
    cuts of the principal log; real parts pass through unchanged."""
    xi_values = np.asarray(xi_values, dtype=complex)
    return xi_values.real + 1j * np.unwrap(xi_values.imag)
