"""Surface decimation: stepwise elimination, closed form, row recovery."""

from __future__ import annotations

import numpy as np
import pytest

from chaingf.decimation import (
    DecimationState,
    decimate_step,
    eps1_closed_form,
    eps1_semi_infinite,
    gf_matrix,
    lambda_pair,
    recover_row,
    surface_gf_finite,
)
from chaingf.model import (
    ChainParams,
    EffectiveCouplings,
    build_dynamical_matrix,
    effective_couplings,
)
from chaingf.oracle import dense_gf

from conftest import draw_stable_params

FIG2 = ChainParams(epsilon=-0.2, gamma=0.1, pump=0.05)


def test_first_elimination_step_by_hand():
    c = effective_couplings(ChainParams(epsilon=0.1, gamma=0.4))
    state = DecimationState.initial(c, 4)
    w = 0.7 + 0.3j
    gap = w - c.eps_tilde
    nxt = decimate_step(state, c, w)
    assert nxt.n == 1
    assert nxt.eps0 == pytest.approx(c.eps_tilde + c.t_plus * c.t_minus / gap)
    assert nxt.eps1 == pytest.approx(c.eps_tilde + c.hop_product / gap)
    assert nxt.tp == pytest.approx(c.t_plus**2 / gap)
    assert nxt.tm == pytest.approx(c.t_minus**2 / gap)
    assert nxt.delta0 == pytest.approx(
        np.array([1.0, c.t_plus / gap, 0.0, 0.0], dtype=complex)
    )
    assert nxt.delta1 == pytest.approx(
        np.array([0.0, c.t_minus / gap, 1.0, 0.0], dtype=complex)
    )


def test_step_past_the_end_raises():
    c = effective_couplings(ChainParams())
    state = DecimationState.initial(c, 2)
    with pytest.raises(ValueError, match="terminal"):
        decimate_step(state, c, 0.5 + 0.5j)


def test_resonant_frontier_raises():
    c = EffectiveCouplings(eps_tilde=0.5 + 0j, t_plus=1.0 + 0j, t_minus=1.0 + 0j)
    state = DecimationState.initial(c, 3)
    with pytest.raises(RuntimeError, match="displace omega"):
        decimate_step(state, c, 0.5 + 0j)


def test_silenced_direction_leaves_surface_energy_bare():
    # with no feedback path the surface site never renormalizes
    c = EffectiveCouplings(eps_tilde=0.2 - 0.3j, t_plus=0j, t_minus=1.1 + 0j)
    w = 0.9 + 1e-6j
    for n in (1, 2, 7, 40):
        assert surface_gf_finite(c, w, n) == pytest.approx(1.0 / (w - c.eps_tilde))


def test_iterated_steps_match_dense_surface_entry():
    c = effective_couplings(FIG2)
    w = 0.3 + 1e-6j
    n = 41
    state = DecimationState.initial(c, n)
    for _ in range(n - 2):
        state = decimate_step(state, c, w)
    state = decimate_step(state, c, w, terminal=True)
    g00 = state.delta0[0] / (w - state.eps0)
    ref = dense_gf(build_dynamical_matrix(FIG2, n), w)[0, 0]
    assert abs(g00 - ref) < 1e-12 * abs(ref)


def test_closed_form_tracks_the_iteration():
    c = effective_couplings(FIG2)
    w = 0.3 + 1e-6j
    state = DecimationState.initial(c, 50)
    for n in range(1, 40):
        state = decimate_step(state, c, w)
        assert eps1_closed_form(n, c, w) == pytest.approx(state.eps1, rel=1e-10)


def test_closed_form_random_draws(rng):
    for _ in range(25):
        p = draw_stable_params(rng, with_nn=True)
        c = effective_couplings(p)
        w = rng.uniform(-3, 3) + 1j * rng.uniform(1e-4, 0.5)
        n = int(rng.integers(1, 60))
        state = DecimationState.initial(c, n + 2)
        for _ in range(n):
            state = decimate_step(state, c, w)
        assert eps1_closed_form(n, c, w) == pytest.approx(state.eps1, rel=1e-8)


def test_fixed_point_unidirectional_is_exact():
    c = EffectiveCouplings(eps_tilde=0.1 - 0.2j, t_plus=0j, t_minus=0.9 + 0j)
    assert eps1_semi_infinite(c, 0.5 + 0j) == pytest.approx(c.eps_tilde, rel=1e-15)


def test_fixed_point_absorbs_the_iteration():
    c = effective_couplings(FIG2)
    w = 0.3 + 1e-3j
    fp = eps1_semi_infinite(c, w)
    state = DecimationState.initial(c, 2000)
    for _ in range(1000):
        state = decimate_step(state, c, w)
    assert abs(state.eps1 - fp) < 1e-8


def test_fixed_point_high_frequency_tail():
    c = effective_couplings(FIG2)
    w = 1e6 + 0j
    # far above the band the correction is alpha/omega + O(1/omega^2)
    assert abs(eps1_semi_infinite(c, w) - c.eps_tilde - c.hop_product / w) < 1e-5


def test_lambda_product_invariant(rng):
    for _ in range(50):
        p = draw_stable_params(rng)
        c = effective_couplings(p)
        w = rng.uniform(-3, 3) + 1j * rng.uniform(1e-6, 1.0)
        pair = lambda_pair(c, w)
        prod = pair.lambda_plus * pair.lambda_minus
        assert prod == pytest.approx(4.0 / c.hop_product, rel=1e-12)
        assert abs(pair.ratio) <= 1.0 + 1e-12


def test_lambda_pair_rejects_unidirectional():
    c = EffectiveCouplings(eps_tilde=0j, t_plus=0j, t_minus=1.0 + 0j)
    with pytest.raises(ValueError, match="unidirectional"):
        lambda_pair(c, 0.5 + 0.5j)


def test_surface_single_site():
    c = effective_couplings(ChainParams(epsilon=0.3, gamma=1.0))
    w = 0.1 + 0j
    assert surface_gf_finite(c, w, 1) == pytest.approx(1.0 / (w - c.eps_tilde))
    row = surface_gf_finite(c, w, 1, full_row=True)
    assert row.shape == (1,)
    with pytest.raises(RuntimeError, match="singular"):
        surface_gf_finite(c, 0.3 - 0.5j, 1)
    with pytest.raises(ValueError):
        surface_gf_finite(c, w, 0)


def test_surface_row_matches_dense():
    p = ChainParams(epsilon=0.1, gamma=0.6, pump=0.2, phi=0.4)
    c = effective_couplings(p)
    w = -0.4 + 1e-6j
    row = surface_gf_finite(c, w, 10, full_row=True)
    ref = dense_gf(build_dynamical_matrix(p, 10), w)[0]
    assert np.max(np.abs(row - ref)) < 1e-12 * np.max(np.abs(ref))


def test_surface_scalar_equals_row_head(rng):
    for _ in range(10):
        p = draw_stable_params(rng, with_nn=True)
        c = effective_couplings(p)
        w = rng.uniform(-2, 2) + 1e-6j
        n = int(rng.integers(2, 25))
        scalar = surface_gf_finite(c, w, n)
        row = surface_gf_finite(c, w, n, full_row=True)
        assert abs(scalar - row[0]) < 1e-12 * max(abs(scalar), 1e-300)


def test_recover_second_row_two_site_hermitian():
    p = ChainParams(epsilon=0.2)
    c = effective_couplings(p)
    w = 2.7 + 0j
    first = surface_gf_finite(c, w, 2, full_row=True)
    second = recover_row(first, c, w, 1)
    # G_{1,0} of a two-site chain has the textbook closed form
    expect = 1.0 / ((w - 0.2) ** 2 - 1.0)
    assert second[0] == pytest.approx(expect)
    assert second[1] == pytest.approx((w - 0.2) * expect)


def test_recover_rows_match_dense():
    p = ChainParams(epsilon=0.1, gamma=0.8, pump=0.3, phi=1.1)
    c = effective_couplings(p)
    w = 0.5 + 1e-6j
    n = 20
    first = surface_gf_finite(c, w, n, full_row=True)
    ref = dense_gf(build_dynamical_matrix(p, n), w)
    for j in (1, 5, 19):
        got = recover_row(first, c, w, j)
        assert np.max(np.abs(got - ref[j])) < 1e-9 * np.max(np.abs(ref[j]))


def test_recover_row_needs_the_upward_coupling():
    c = EffectiveCouplings(eps_tilde=0j, t_plus=0j, t_minus=1.0 + 0j)
    first = surface_gf_finite(c, 0.3 + 1e-6j, 5, full_row=True)
    with pytest.raises(RuntimeError, match="mirrored"):
        recover_row(first, c, 0.3 + 1e-6j, 2)


def test_gf_matrix_equals_dense(rng):
    for _ in range(8):
        p = draw_stable_params(rng, with_nn=True)
        c = effective_couplings(p)
        w = rng.uniform(-2.5, 2.5) + 1e-6j
        n = int(rng.integers(2, 22))
        got = gf_matrix(c, w, n)
        ref = dense_gf(build_dynamical_matrix(p, n), w)
        assert np.max(np.abs(got - ref)) < 1e-10 * np.max(np.abs(ref))
