"""Dense resolvent and eigendecomposition propagator (reference paths)."""

from __future__ import annotations

import numpy as np
import pytest

from chaingf.model import ChainParams, build_dynamical_matrix, hatano_nelson_params
from chaingf.oracle import dense_gf, propagate

from conftest import draw_stable_params


def test_single_site_resolvent():
    m = build_dynamical_matrix(ChainParams(gamma=1.0), 1)
    g = dense_gf(m, 0.0 + 0j)
    assert g == pytest.approx(np.array([[-2.0j]]))


def test_two_site_hermitian_by_hand():
    m = build_dynamical_matrix(ChainParams(), 2)
    g = dense_gf(m, 0.0 + 0j)
    assert g == pytest.approx(np.array([[0.0, -1.0], [-1.0, 0.0]]), abs=1e-14)


def test_resolvent_identity(rng):
    for _ in range(10):
        p = draw_stable_params(rng, with_nn=True)
        n = int(rng.integers(2, 30))
        m = build_dynamical_matrix(p, n)
        w = rng.uniform(-3, 3) + 1e-6j
        g = dense_gf(m, w)
        lhs = (w * np.eye(n) - m.dense()) @ g
        assert np.max(np.abs(lhs - np.eye(n))) < 1e-11


def test_resolvent_matches_direct_inverse():
    p = hatano_nelson_params(epsilon=0.1, phi=0.45 * np.pi, gamma=3.0, pump=3.0)
    m = build_dynamical_matrix(p, 45)
    w = 0.7 + 1e-6j
    ref = np.linalg.inv(w * np.eye(45) - m.dense())
    assert np.max(np.abs(dense_gf(m, w) - ref)) < 1e-10 * np.max(np.abs(ref))


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_resolvent_singular_frequency_raises():
    m = build_dynamical_matrix(ChainParams(epsilon=0.5), 1)
    with pytest.raises(RuntimeError, match="too close to an eigenvalue"):
        dense_gf(m, 0.5 + 0j)


def test_propagate_zero_matrix_is_constant():
    zero = build_dynamical_matrix(ChainParams(t_c=0.0), 3)
    assert np.max(np.abs(zero.dense())) == 0.0
    init = np.array([0.2, -0.5j, 1.0])
    traj = propagate(zero, init, np.linspace(0, 5, 11))
    assert np.max(np.abs(traj.amplitudes - init)) < 1e-14
    assert not traj.truncated


def test_propagate_single_site_is_an_exponential():
    p = ChainParams(epsilon=0.3, gamma=0.8)
    m = build_dynamical_matrix(p, 1)
    times = np.linspace(0, 10, 21)
    traj = propagate(m, np.array([1.0 + 0j]), times)
    ref = np.exp(-1j * (0.3 - 0.4j) * times)
    assert np.max(np.abs(traj.amplitudes[:, 0] - ref)) < 1e-12


def test_propagate_preserves_norm_for_hermitian_matrix():
    m = build_dynamical_matrix(ChainParams(epsilon=0.1), 12)
    init = np.zeros(12, complex)
    init[0] = 1.0
    traj = propagate(m, init, np.linspace(0, 30, 16))
    norms = np.linalg.norm(traj.amplitudes, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-10


def test_propagate_finite_chain_echo_window():
    # a 15-site chain deviates from the long-chain result only once the
    # excitation has bounced off the far wall and returned to the seeded site
    p = ChainParams(epsilon=0.1, gamma=0.5)
    times = np.arange(0.0, 16.0 + 1e-9, 0.02)

    def seeded(n):
        m = build_dynamical_matrix(p, n)
        init = np.zeros(n, complex)
        init[0] = 1.0
        return propagate(m, init, times).amplitudes[:, 0]

    dev = np.abs(seeded(15) - seeded(60))
    onset = times[int(np.argmax(dev > 1e-4))]
    assert 9.0 < onset < 14.0


def test_propagate_truncates_on_overflow():
    p = hatano_nelson_params(phi=np.pi / 2, gamma=1.0, pump=1.4)
    m = build_dynamical_matrix(p, 10)
    init = np.zeros(10, complex)
    init[0] = 1.0
    traj = propagate(m, init, np.linspace(0.0, 4000.0, 401))
    assert traj.truncated
    assert len(traj.times) < 401
    assert len(traj.times) == traj.amplitudes.shape[0]
    assert np.all(np.isfinite(traj.amplitudes))
