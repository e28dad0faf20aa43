"""Spectral weight, winding, phase map, directional gain, added noise."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.integrate

from chaingf.model import (
    ChainParams,
    build_dynamical_matrix,
    effective_couplings,
    hatano_nelson_params,
    stability_report,
)
from chaingf.observables import (
    GapClosingError,
    added_noise,
    bulk_gf_pbc,
    gain,
    glue_dos,
    hatano_noise,
    local_dos,
    noise_row_length,
    phase_diagram,
    pump_matrix,
    topo_indicator_from_xi,
    winding_number,
    winding_number_quadrature,
)
from chaingf.surface import correlation_data, solve_surface_gf

FIG6 = hatano_nelson_params(phi=np.pi / 2, gamma=2.0, pump=4.0)
FIG10 = hatano_nelson_params(phi=np.pi / 2, gamma=4.0, pump=3.6)


def test_local_dos_single_site_lorentzian():
    for w in (-0.5, 0.1, 0.7):
        g = 1.0 / (w - (0.1 - 0.4j))
        expect = (0.4 / np.pi) / ((w - 0.1) ** 2 + 0.4**2)
        assert local_dos(g) == pytest.approx(expect)


def test_local_dos_rejects_negative_weight():
    with pytest.raises(RuntimeError, match="retarded"):
        local_dos(0.3 + 0.2j)


def test_bulk_dos_semicircle_and_band_edge():
    c = effective_couplings(ChainParams())
    assert glue_dos(c, 0.0) == pytest.approx(1.0 / (2.0 * np.pi), rel=1e-4)
    assert glue_dos(c, 1.0) == pytest.approx(1.0 / (np.pi * np.sqrt(3.0)), rel=1e-4)
    # square-root enhancement toward the band edge
    assert glue_dos(c, 1.999) > glue_dos(c, 1.9) > glue_dos(c, 0.0)


def test_bulk_dos_integrates_to_one():
    c = effective_couplings(ChainParams(epsilon=0.3))
    total, _ = scipy.integrate.quad(
        lambda w: glue_dos(c, w, eta=1e-5), 0.3 - 2.1, 0.3 + 2.1, limit=400
    )
    assert total == pytest.approx(1.0, abs=5e-3)


def test_ring_resolvent_reference_points():
    assert bulk_gf_pbc(1.0 + 0j, 1.0, 0.0, 0) == pytest.approx(-1j / np.sqrt(3.0))
    assert bulk_gf_pbc(-3.0 + 0j, 1.0, 0.0, 0) == pytest.approx(-1.0 / np.sqrt(5.0))
    assert bulk_gf_pbc(3.0 + 0j, 1.0, 0.0, 0) == pytest.approx(1.0 / np.sqrt(5.0))


def test_ring_resolvent_matches_momentum_integral():
    for w, d in ((0.0 + 0.3j, 0), (1.2 + 0.1j, 2), (-0.7 + 0.5j, 5)):
        def integrand(k, part):
            val = np.exp(1j * k * d) / (w - 0.2 - 1.6 * np.cos(k))
            return getattr(val, part)

        re, _ = scipy.integrate.quad(integrand, -np.pi, np.pi, args=("real",), limit=200)
        im, _ = scipy.integrate.quad(integrand, -np.pi, np.pi, args=("imag",), limit=200)
        ref = (re + 1j * im) / (2.0 * np.pi)
        assert bulk_gf_pbc(w, 0.8, 0.2, d) == pytest.approx(ref, rel=1e-9)


def test_ring_resolvent_decays_off_axis():
    vals = [abs(bulk_gf_pbc(1.0 + 0.1j, 1.0, 0.0, d)) for d in (0, 2, 5)]
    assert vals[0] > vals[1] > vals[2]


def test_winding_reciprocal_chain_is_trivial():
    assert winding_number(ChainParams(), 2.5) == 0
    assert winding_number_quadrature(ChainParams(), 2.5) == 0


def test_winding_inside_the_band_is_a_boundary():
    with pytest.raises(GapClosingError):
        winding_number(ChainParams(), 0.5)


def test_winding_driven_chain_reference_points():
    assert winding_number(FIG6, 0.0) == 1
    assert winding_number(FIG6, 2.5) == 0
    assert winding_number_quadrature(FIG6, 0.0) == 1
    assert winding_number_quadrature(FIG6, 2.5) == 0


def test_winding_closed_form_equals_quadrature_on_a_sweep():
    for w in np.linspace(-3.0, 3.0, 41):
        try:
            closed = winding_number(FIG6, float(w))
        except GapClosingError:
            continue
        assert closed == winding_number_quadrature(FIG6, float(w))


def test_indicator_follows_the_amplified_direction():
    c = effective_couplings(FIG6)
    s = solve_surface_gf(c, 0.0 + 1e-6j)
    assert topo_indicator_from_xi(correlation_data(s, c)) == 1
    s = solve_surface_gf(c, 2.5 + 1e-6j)
    assert topo_indicator_from_xi(correlation_data(s, c)) == 0


def test_indicator_flags_the_boundary():
    p = ChainParams(gamma=0.5, pump=0.5)
    c = effective_couplings(p)
    s = solve_surface_gf(c, 0.5 + 1e-9j)
    with pytest.raises(GapClosingError):
        topo_indicator_from_xi(correlation_data(s, c))


def test_phase_map_pinned_cells():
    grid = phase_diagram(FIG10, [1.0, 2.0], [1.4], 0.0, 15)
    assert grid.classification[1, 0] == "topological_stable"
    assert grid.classification[0, 0] == "topological_unstable"


def test_phase_map_no_drive_column_is_trivially_stable():
    grid = phase_diagram(FIG10, [0.8, 1.6, 2.4], [0.0], 0.0, 15)
    assert all(c == "trivial_stable" for c in grid.classification[:, 0])


def test_phase_map_heavy_loss_corner():
    grid = phase_diagram(FIG10, [4.0], [0.2], 0.0, 15)
    assert grid.classification[0, 0] == "trivial_stable"


def test_gain_surface_site_is_the_direct_response():
    c = effective_couplings(FIG10.mirrored())
    s = solve_surface_gf(c, 0.0 + 1e-6j)
    corr = correlation_data(s, c)
    # input and output couplings each contribute one factor of gamma
    assert gain(s, corr, 4.0, 0) == pytest.approx(16.0 * abs(s.value) ** 2)


def test_gain_grows_along_the_amplified_direction():
    c = effective_couplings(FIG10.mirrored())
    s = solve_surface_gf(c, 0.0 + 1e-6j)
    corr = correlation_data(s, c)
    g = [gain(s, corr, 4.0, j) for j in (2, 5, 9)]
    assert g[0] < g[1] < g[2]
    # each of the four extra sites multiplies the power gain by e^{2 Re xi}
    assert np.log(g[2] / g[1]) == pytest.approx(
        8.0 * corr.xi_minus.real, rel=1e-9
    )


def test_gain_decays_in_a_lossy_chain():
    p = ChainParams(epsilon=0.1, gamma=0.8, pump=0.2)
    c = effective_couplings(p)
    s = solve_surface_gf(c, 0.3 + 1e-6j)
    corr = correlation_data(s, c)
    g = [gain(s, corr, 0.8, j) for j in (1, 4, 8)]
    assert g[0] > g[1] > g[2]


def test_pump_kernel_mirrors_the_drive_pattern():
    got = pump_matrix(FIG10, 4)
    expect = 3.6 * np.eye(4) + 1.8 * (np.eye(4, k=1) + np.eye(4, k=-1))
    assert np.array_equal(got, expect)
    assert np.array_equal(got, got.T)


def test_added_noise_single_site():
    # one pumped site: the added quanta are pump over twice the loss
    w = 0.3
    g = 1.0 / (w - (0.0 - 0.3j))
    rep = added_noise(np.array([g]), np.array([[0.4]]), 1.0, omega=w + 0j, site=0)
    assert rep.n_add == pytest.approx(0.2)
    assert rep.gain == pytest.approx(abs(g) ** 2)
    assert rep.site == 0
    assert rep.omega == w + 0j


def test_noise_row_length_scales_with_the_decay():
    assert noise_row_length(5, -0.5) == 5 + 16
    assert noise_row_length(0, -2.0) == 4
    # a vanishing exponent falls back to the floor without overflowing
    assert noise_row_length(3, 0.0) > 1000


def test_driven_noise_quanta_reference():
    rep = hatano_noise(FIG10.mirrored(), 0.0 + 1e-6j, 10)
    assert rep.l_max == 15
    assert rep.n_add == pytest.approx(0.5076565672838973, abs=1e-12)
    assert 10.0 * np.log10(rep.gain) == pytest.approx(125.397300, abs=1e-3)


def test_driven_noise_approaches_the_quantum_floor():
    vals = [
        hatano_noise(FIG10.mirrored(), 0.0 + 1e-6j, j).n_add for j in (5, 10, 20)
    ]
    for v in vals:
        assert 0.5 < v < 0.75
    assert abs(vals[2] - vals[1]) < 1e-6


def test_amplifying_orientation_is_rejected():
    with pytest.raises(RuntimeError, match="diverge"):
        hatano_noise(FIG10, 0.0 + 1e-6j, 5)
