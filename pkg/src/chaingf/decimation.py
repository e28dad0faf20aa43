"""Real-space decimation of the tridiagonal resolvent.

The first row of G = (omega - D)^{-1} for an open chain is obtained by
repeatedly eliminating the site next to the surface: each step folds one
site into a renormalized surface energy, a renormalized frontier energy,
and a pair of renormalized long-range couplings.  Source bookkeeping
vectors carry enough information to read off every entry G_{0,j} at the
end, and the remaining rows follow from the bare equations of motion.

The frontier-energy recursion also has a closed form in terms of the two
roots of its Moebius iteration, which gives the semi-infinite limit
directly and a convergence-rate handle for finite chains.  Interior
entries are also available without any row climb, as hop powers times
principal-minor ratios built from corner resolvents of shorter chains;
that assembly has no growing direction and is the one to use far outside
the band.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .model import EffectiveCouplings

Array = np.ndarray

__all__ = [
    "DecimationState",
    "LambdaPair",
    "decimate_step",
    "lambda_pair",
    "eps1_closed_form",
    "eps1_semi_infinite",
    "surface_gf_finite",
    "recover_row",
    "gf_entry",
    "gf_matrix",
]


@dataclass(frozen=True)
class DecimationState:
    """Working state of the surface decimation after ``n`` regular steps.

    eps0    renormalized energy of the surface site 0
    eps1    renormalized energy of the current frontier site (index n+1)
    tp      effective coupling from site 0 to the frontier
    tm      effective coupling from the frontier back to site 0
    delta0  source row of the surface equation (length n_sites)
    delta1  source row of the frontier equation (length n_sites)
    n       number of regular elimination steps performed
    """

    eps0: complex
    eps1: complex
    tp: complex
    tm: complex
    delta0: Array
    delta1: Array
    n: int

    @classmethod
    def initial(cls, couplings: EffectiveCouplings, n_sites: int) -> "DecimationState":
        if n_sites < 2:
            raise ValueError("decimation state needs at least 2 sites")
        delta0 = np.zeros(n_sites, dtype=complex)
        delta1 = np.zeros(n_sites, dtype=complex)
        delta0[0] = 1.0
        delta1[1] = 1.0
        return cls(
            eps0=couplings.eps_tilde,
            eps1=couplings.eps_tilde,
            tp=couplings.t_plus,
            tm=couplings.t_minus,
            delta0=delta0,
            delta1=delta1,
            n=0,
        )

    @property
    def n_sites(self) -> int:
        return len(self.delta0)


def _frontier_gap(state: DecimationState, omega: complex) -> complex:
    gap = omega - state.eps1
    if gap == 0:
        raise RuntimeError(
            f"decimation hit a resonance at omega={omega} (frontier energy "
            "equals omega); displace omega off the real axis and retry"
        )
    return gap


def decimate_step(
    state: DecimationState,
    couplings: EffectiveCouplings,
    omega: complex,
    *,
    terminal: bool = False,
) -> DecimationState:
    """Eliminate the current frontier site.

    A regular step folds the frontier into the surface and promotes the
    next bare site to frontier; it needs a site beyond the frontier, so it
    is allowed while ``state.n <= n_sites - 3``.  A terminal step closes
    the chain at the frontier (valid whenever a frontier exists) and
    leaves a state from which the first row is read off directly.
    """
    gap = _frontier_gap(state, omega)
    eps0 = state.eps0 + state.tp * state.tm / gap
    delta0 = state.delta0 + (state.tp / gap) * state.delta1
    if terminal:
        return DecimationState(
            eps0=eps0,
            eps1=np.nan + 0j,
            tp=0j,
            tm=0j,
            delta0=delta0,
            delta1=np.zeros_like(state.delta1),
            n=state.n,
        )
    promoted = state.n + 2  # bare index of the incoming frontier site
    if promoted > state.n_sites - 1:
        raise ValueError(
            f"no site left to promote (n={state.n}, n_sites={state.n_sites}); "
            "use terminal=True to close the chain"
        )
    delta1 = (couplings.t_minus / gap) * state.delta1
    delta1[promoted] += 1.0
    return DecimationState(
        eps0=eps0,
        eps1=couplings.eps_tilde + couplings.hop_product / gap,
        tp=state.tp * couplings.t_plus / gap,
        tm=state.tm * couplings.t_minus / gap,
        delta0=delta0,
        delta1=delta1,
        n=state.n + 1,
    )


@dataclass(frozen=True)
class LambdaPair:
    """Roots of the Moebius iteration behind the frontier-energy recursion.

    Ordered so that ``|lambda_plus| >= |lambda_minus|``; their product is
    4 / (t_plus * t_minus).
    """

    lambda_plus: complex
    lambda_minus: complex

    @property
    def ratio(self) -> complex:
        """Contraction factor lambda_minus / lambda_plus, modulus <= 1."""
        return self.lambda_minus / self.lambda_plus


def _signed_sqrt(w: complex, alpha: complex) -> complex:
    """sqrt(w^2 - 4 alpha) with the branch aligned to w (s ~ +w at large |w|)."""
    s = np.sqrt(complex(w * w - 4.0 * alpha))
    proj = s * np.conj(w)
    if proj.real < 0 or (proj.real == 0 and proj.imag < 0):
        s = -s
    return s


def lambda_pair(couplings: EffectiveCouplings, omega: complex) -> LambdaPair:
    """Both Moebius roots at frequency ``omega``.

    Undefined for unidirectional couplings (t_plus * t_minus = 0).
    """
    alpha = couplings.hop_product
    if alpha == 0:
        raise ValueError("lambda pair is undefined for unidirectional couplings")
    w = omega - couplings.eps_tilde
    s = _signed_sqrt(w, alpha)
    return LambdaPair(lambda_plus=(w + s) / alpha, lambda_minus=(w - s) / alpha)


def eps1_closed_form(
    n: int,
    couplings: EffectiveCouplings,
    omega: complex,
) -> complex:
    """Frontier energy after ``n`` regular steps, without iterating.

    Agrees with repeated ``decimate_step`` application to rounding; near
    the branch point the two roots coincide and a separate limit branch
    avoids 0/0.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    eps = couplings.eps_tilde
    alpha = couplings.hop_product
    if alpha == 0 or n == 0:
        return eps
    pair = lambda_pair(couplings, omega)
    lp, lm = pair.lambda_plus, pair.lambda_minus
    if abs(lp - lm) <= 1e-8 * abs(lp):
        lam = 0.5 * (lp + lm)
        return eps + 2.0 * n / (lam * (n + 1))
    r = pair.ratio
    rn = r**n
    den = lp * (1.0 - rn * r)
    if den == 0:
        raise RuntimeError(
            f"frontier energy has a pole at omega={omega} (sub-chain "
            "resonance); displace omega off the real axis"
        )
    return ((eps * lp + 2.0) - (eps * lm + 2.0) * rn) / den


def eps1_semi_infinite(couplings: EffectiveCouplings, omega: complex) -> complex:
    """Fixed point of the frontier-energy recursion (semi-infinite chain).

    This is the branch the finite-chain iteration converges to whenever it
    converges at all; it equals eps_tilde + t_plus * t_minus * G00 with G00
    the semi-infinite surface Green's function.
    """
    w = omega - couplings.eps_tilde
    s = _signed_sqrt(w, couplings.hop_product)
    return 0.5 * (couplings.eps_tilde + omega - s)


def surface_gf_finite(
    couplings: EffectiveCouplings,
    omega: complex,
    n_sites: int,
    *,
    full_row: bool = False,
):
    """First-row resolvent entries of an ``n_sites`` open chain.

    By default returns the scalar G_{0,0} via an O(N) scalar recursion.
    With ``full_row=True`` returns the length-``n_sites`` array G_{0,j},
    carrying the source bookkeeping through every elimination step (still
    O(N^2) work in the vector updates; intended for moderate chain sizes).
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    eps = couplings.eps_tilde

    if n_sites == 1:
        gap = omega - eps
        if gap == 0:
            raise RuntimeError(
                f"surface resolvent is singular at omega={omega}; displace "
                "omega off the real axis"
            )
        g00 = 1.0 / gap
        if full_row:
            return np.array([g00], dtype=complex)
        return g00

    if not full_row:
        alpha = couplings.hop_product
        eps0 = eps
        eps1 = eps
        pi = couplings.t_plus * couplings.t_minus
        for _ in range(n_sites - 1):
            gap = omega - eps1
            if gap == 0:
                raise RuntimeError(
                    f"decimation hit a resonance at omega={omega}; displace "
                    "omega off the real axis and retry"
                )
            eps0 = eps0 + pi / gap
            pi = pi * alpha / (gap * gap)
            eps1 = eps + alpha / gap
        gap = omega - eps0
        if gap == 0:
            raise RuntimeError(
                f"surface resolvent is singular at omega={omega}; displace "
                "omega off the real axis"
            )
        return 1.0 / gap

    state = DecimationState.initial(couplings, n_sites)
    for _ in range(n_sites - 2):
        state = decimate_step(state, couplings, omega)
    state = decimate_step(state, couplings, omega, terminal=True)
    gap = omega - state.eps0
    if gap == 0:
        raise RuntimeError(
            f"surface resolvent is singular at omega={omega}; displace omega "
            "off the real axis"
        )
    return state.delta0 / gap


def recover_row(
    first_row: Array,
    couplings: EffectiveCouplings,
    omega: complex,
    row: int,
) -> Array:
    """Row ``row`` of the finite-chain resolvent from its first row.

    Climbs the bare equations of motion: each row determines the next one
    through the upward coupling.  The climb amplifies rounding by the ratio
    of the growing to the decaying solution per site, which is ~1 near the
    band but exponential in the row index far outside it, so prefer
    ``gf_entry`` there.  When t_plus vanishes the climb divides by zero:
    decimate the mirrored chain (swap t_plus and t_minus) and map indices
    j -> N-1-j instead.
    """
    first_row = np.asarray(first_row, dtype=complex)
    n_sites = len(first_row)
    if not 0 <= row < n_sites:
        raise ValueError(f"row must be in [0, {n_sites - 1}], got {row}")
    if row == 0:
        return first_row.copy()
    if couplings.t_plus == 0:
        raise RuntimeError(
            "row recovery divides by t_plus, which is zero here; decimate the "
            "mirrored chain (swap t_plus and t_minus) and relabel sites "
            "j -> N-1-j instead"
        )
    eps = couplings.eps_tilde
    prev = np.zeros(n_sites, dtype=complex)
    cur = first_row
    for r in range(row):
        source = np.zeros(n_sites, dtype=complex)
        source[r] = 1.0
        nxt = ((omega - eps) * cur - source - couplings.t_minus * prev) / couplings.t_plus
        prev, cur = cur, nxt
    return cur


def _log_corner_prefix(
    couplings: EffectiveCouplings,
    omega: complex,
    n_sites: int,
) -> Array:
    """Prefix sums of log corner resolvents, L[m] = sum_{k<=m} log F(k).

    F(k) is the corner entry of the k-site open-chain resolvent, grown one
    site at a time through the continued fraction F(k) = 1/(omega - eps
    - alpha F(k-1)).  Ratios of exp(L) reproduce every principal-minor
    ratio of the resolvent without ever forming a growing product.
    """
    eps = couplings.eps_tilde
    alpha = couplings.hop_product
    prefix = np.empty(n_sites + 1, dtype=complex)
    prefix[0] = 0j
    corner = 0j
    for m in range(1, n_sites + 1):
        gap = omega - eps - alpha * corner
        if gap == 0:
            raise RuntimeError(
                f"decimation hit a resonance at omega={omega}; displace "
                "omega off the real axis and retry"
            )
        corner = 1.0 / gap
        prefix[m] = prefix[m - 1] + cmath.log(corner)
    return prefix


def _entry_from_prefix(
    prefix: Array,
    couplings: EffectiveCouplings,
    j: int,
    l: int,
) -> complex:
    n_sites = len(prefix) - 1
    lo, hi = min(j, l), max(j, l)
    hop = couplings.t_minus if j >= l else couplings.t_plus
    if hi > lo and hop == 0:
        return 0j
    expo = prefix[n_sites] - prefix[lo] - prefix[n_sites - 1 - hi]
    if hi > lo:
        expo = expo + (hi - lo) * cmath.log(hop)
    return cmath.exp(expo)


def gf_entry(
    couplings: EffectiveCouplings,
    omega: complex,
    n_sites: int,
    j: int,
    l: int,
) -> complex:
    """Single entry G_{j,l} of the finite open-chain resolvent.

    Assembled as a hop power times a ratio of leading and trailing
    principal minors, each expressed through corner resolvents of shorter
    chains and accumulated as log-sums.  Nothing in the assembly grows, so
    the entry stays accurate arbitrarily far off the diagonal and outside
    the band, where the row climb of ``recover_row`` loses digits; entries
    below the double-precision floor underflow cleanly to zero.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if not (0 <= j < n_sites and 0 <= l < n_sites):
        raise ValueError(f"j and l must be in [0, {n_sites - 1}], got ({j}, {l})")
    prefix = _log_corner_prefix(couplings, omega, n_sites)
    return _entry_from_prefix(prefix, couplings, j, l)


def gf_matrix(
    couplings: EffectiveCouplings,
    omega: complex,
    n_sites: int,
) -> Array:
    """Full finite-chain resolvent, every entry via ``gf_entry``'s assembly.

    One O(N) corner-resolvent sweep is shared by all N^2 entries.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    prefix = _log_corner_prefix(couplings, omega, n_sites)
    idx = np.arange(n_sites)
    lo = np.minimum.outer(idx, idx)
    hi = np.maximum.outer(idx, idx)
    expo = prefix[n_sites] - prefix[lo] - prefix[n_sites - 1 - hi]
    out = np.exp(expo)
    steps = hi - lo
    below = np.greater.outer(idx, idx)
    for mask, hop in ((below, couplings.t_minus), (below.T, couplings.t_plus)):
        if hop == 0:
            out[mask] = 0j
        else:
            out[mask] *= np.exp(steps[mask] * cmath.log(hop))
    return out
