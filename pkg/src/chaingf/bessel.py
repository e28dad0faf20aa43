"""Bessel functions of the first kind, integer order, complex argument.

The time-domain propagator of a semi-infinite chain is a Bessel function of
a complex argument, which the usual special-function stacks only cover on
the real axis.  Evaluation here uses the defining power series where it is
both fast and cancellation-free, and Miller's backward recurrence with
plane-wave normalization elsewhere.  The plane-wave sum e^{+-iz} = J_0 +
2*sum_n (+-i)^n J_n is preferred over the textbook even-order sum because
its modulus e^{|Im z|} is as large as the biggest ladder entries, so the
normalization never cancels.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

Array = np.ndarray

__all__ = ["bessel_j_complex", "bessel_j_sequence", "recurrence_residual"]

# validated evaluation envelope
_MAX_ORDER = 1000
_MAX_ABS_Z = 1000.0

# rescaling guards for the backward recurrence
_BIGNO = 1e10
_BIGNI = 1e-10

# worst acceptable (largest term)/(sum) ratio before the series is deemed
# cancellation-limited and the recurrence path takes over
_SERIES_CANCEL = 1e4


def _check_domain(order: int, z: complex) -> complex:
    if order < 0:
        raise ValueError(f"order must be a nonnegative integer, got {order}")
    if order > _MAX_ORDER:
        raise ValueError(f"order {order} exceeds the validated range (<= {_MAX_ORDER})")
    z = complex(z)
    if abs(z) > _MAX_ABS_Z:
        raise ValueError(f"|z| = {abs(z):.3g} exceeds the validated range (<= {_MAX_ABS_Z:g})")
    return z


def _series(order: int, z: complex, max_terms: int = 600):
    """Defining power series with a cancellation monitor.

    Returns (value, ok); ok=False means alternating terms cancelled away
    too many digits and the recurrence path should be used instead.
    """
    half = 0.5 * z
    log_pref = order * cmath.log(half) - math.lgamma(order + 1)
    if log_pref.real < -745.0:
        return 0j, True  # below double-precision range; the value underflows
    term = cmath.exp(log_pref)
    total = term
    peak = abs(term)
    zz = half * half
    for m in range(1, max_terms):
        term *= -zz / (m * (order + m))
        total += term
        mag = abs(term)
        if mag > peak:
            peak = mag
        if mag <= 1e-18 * max(abs(total), 1e-300):
            break
    ok = abs(total) > 0 and peak / abs(total) < _SERIES_CANCEL
    return total, ok


_POW_I = (1 + 0j, 1j, -1 + 0j, -1j)
_POW_MI = (1 + 0j, -1j, -1 + 0j, 1j)


def _miller(n_max: int, z: complex) -> Array:
    """Ladder J_0..J_{n_max} by backward recurrence.

    The seed at the start order is arbitrary; recursing downward suppresses
    the contamination by at least a factor 4 per order above max(n, |z|),
    and the whole ladder is fixed afterwards by matching the plane-wave sum
    to e^{+-iz}, with the sign chosen to make the target large.
    """
    nu0 = max(n_max, int(abs(z)))
    start = nu0 + 40 + int(0.6 * math.sqrt(nu0 + 1.0))
    if z.imag > 0:
        powers, exponent = _POW_MI, -1j * z
    else:
        powers, exponent = _POW_I, 1j * z
    try:
        target = cmath.exp(exponent)
    except OverflowError:
        raise RuntimeError(
            f"J_n overflows double precision for |Im z| = {abs(z.imag):.3g}"
        ) from None

    out = np.zeros(n_max + 1, dtype=complex)
    jp = 0j
    jc = 1e-30 + 0j
    norm = 0j
    for m in range(start, -1, -1):
        if m <= n_max:
            out[m] = jc
        norm += (jc if m == 0 else 2.0 * powers[m % 4] * jc)
        if m > 0:
            jm = (2.0 * m / z) * jc - jp
            jp, jc = jc, jm
            if abs(jc.real) > _BIGNO or abs(jc.imag) > _BIGNO:
                jc *= _BIGNI
                jp *= _BIGNI
                norm *= _BIGNI
                out *= _BIGNI
    if norm == 0 or not cmath.isfinite(norm):
        raise RuntimeError(f"backward recurrence failed to normalize at z = {z}")
    return out * (target / norm)


def bessel_j_complex(order: int, z: complex) -> complex:
    """J_order(z) for complex z, relative accuracy ~1e-10 inside the
    validated envelope order <= 1000, |z| <= 1000."""
    z = _check_domain(order, z)
    if z == 0:
        return 1.0 + 0j if order == 0 else 0j
    if abs(z) <= 20.0:
        value, ok = _series(order, z)
        if ok:
            return complex(value)
    return complex(_miller(order, z)[order])


def bessel_j_sequence(n_max: int, z: complex) -> Array:
    """All of J_0(z) .. J_{n_max}(z) in one sweep.

    Cheaper than order-by-order calls when a whole ladder is needed (one
    time sample of a chain trajectory uses consecutive orders at the same
    argument).
    """
    z = _check_domain(n_max, z)
    if z == 0:
        out = np.zeros(n_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    if abs(z) <= 1.0:
        # term ratio is at most |z|^2/4, so the series never cancels here
        return np.array([_series(n, z)[0] for n in range(n_max + 1)], dtype=complex)
    return _miller(n_max, z)


def recurrence_residual(order: int, z: complex) -> float:
    """Normalized defect of J_{n-1} + J_{n+1} = (2n/z) J_n with each order
    evaluated independently; a cross-path consistency probe."""
    if order < 1:
        raise ValueError("recurrence check needs order >= 1")
    z = _check_domain(order + 1, z)
    if z == 0:
        raise ValueError("recurrence check is undefined at z = 0")
    below = bessel_j_complex(order - 1, z)
    center = bessel_j_complex(order, z)
    above = bessel_j_complex(order + 1, z)
    scale = max(abs(below), abs(center), abs(above), 1e-300)
    return abs(below + above - (2.0 * order / z) * center) / scale
