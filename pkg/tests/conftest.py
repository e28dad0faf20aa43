"""Shared fixtures and parameter-draw helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from chaingf.model import ChainParams, build_dynamical_matrix, stability_report


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)


def random_params(rng, *, with_nn: bool = False) -> ChainParams:
    """One random parameter draw, net-lossy but otherwise unconstrained."""
    gamma = rng.uniform(0.05, 3.0)
    kwargs = dict(
        epsilon=rng.uniform(-1.0, 1.0),
        t_c=rng.uniform(0.3, 1.5),
        phi=rng.uniform(0.0, 2.0 * np.pi),
        gamma=gamma,
        pump=rng.uniform(0.0, 0.95 * gamma),
    )
    if with_nn:
        kwargs["gamma_nn"] = rng.uniform(0.0, 0.2)
        kwargs["pump_nn"] = rng.uniform(0.0, 0.2)
    return ChainParams(**kwargs)


def draw_stable_params(rng, n_sites: int = 21, *, with_nn: bool = False) -> ChainParams:
    """Rejection-sample parameters whose ``n_sites`` chain is dynamically stable."""
    for _ in range(200):
        params = random_params(rng, with_nn=with_nn)
        if stability_report(build_dynamical_matrix(params, n_sites))["stable"]:
            return params
    raise AssertionError("no stable draw in 200 attempts; loosen the ranges")
