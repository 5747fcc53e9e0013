"""Re-entry kernel tests.

The closed-form CDF is checked against numerical quadrature of the density
(the quadrature knows nothing about the arctan formula), the inverse sampler
is checked as a functional inverse, and the empirical draw distribution is
checked with a Kolmogorov-Smirnov statistic.
"""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from cornerwalk import ParameterError, RngStream, reentry_cdf, reentry_density
from cornerwalk.wos_engine import _reentry_angles


@pytest.mark.parametrize("rho", [1.05, 1.5, 2.0, 8.0, 50.0])
def test_density_integrates_to_one(rho):
    total, err = scipy.integrate.quad(
        lambda t: reentry_density(t, rho), -math.pi, math.pi
    )
    assert total == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("rho", [1.1, 2.0, 8.0])
def test_cdf_matches_quadrature(rho):
    grid = np.linspace(-math.pi, math.pi, 41)
    for phi in grid:
        ref, err = scipy.integrate.quad(
            lambda t: reentry_density(t, rho), -math.pi, phi
        )
        assert reentry_cdf(phi, rho) == pytest.approx(ref, abs=1e-9)


def test_cdf_endpoints_and_median():
    for rho in (1.2, 3.0):
        assert reentry_cdf(-math.pi, rho) == 0.0
        assert reentry_cdf(math.pi, rho) == 1.0
        assert reentry_cdf(0.0, rho) == pytest.approx(0.5, abs=1e-15)


def test_density_symmetric():
    phi = np.linspace(0.0, math.pi, 50)
    for rho in (1.3, 4.0):
        np.testing.assert_allclose(
            reentry_density(phi, rho), reentry_density(-phi, rho), rtol=1e-14
        )


def test_far_walker_reenters_uniformly():
    phi = np.linspace(-3.0, 3.0, 7)
    dens = reentry_density(phi, 1e6)
    np.testing.assert_allclose(dens, 1.0 / (2.0 * math.pi), rtol=1e-5)


def test_near_walker_reenters_at_bearing():
    # rho -> 1+: the density concentrates at phi = 0
    u = np.linspace(0.05, 0.95, 19)
    phi = _reentry_angles(np.full_like(u, 1.0 + 1e-6), u)
    assert np.max(np.abs(phi)) < 1e-4


def test_inverse_sampler_inverts_cdf():
    u = np.linspace(1e-6, 1.0 - 1e-6, 501)
    for rho in (1.1, 2.0, 8.0):
        phi = _reentry_angles(np.full_like(u, rho), u)
        np.testing.assert_allclose(reentry_cdf(phi, rho), u, atol=1e-12)


@pytest.mark.parametrize("rho", [2.0, 8.0])
def test_sampler_ks_statistic(rho):
    stream = RngStream(424242, 0)
    u = np.array([stream.uniform() for _ in range(20_000)])
    phi = _reentry_angles(np.full_like(u, rho), u)
    stat = scipy.stats.kstest(phi, lambda t: reentry_cdf(t, rho)).statistic
    assert stat < 0.012


def test_exterior_reentry_lands_on_circle():
    from cornerwalk import exterior_reentry

    stream = RngStream(7, 0)
    for p in [(30.0, 0.5), (0.5, -20.0), (12.0, 12.0)]:
        q = exterior_reentry(p, 8.0, stream)
        r = math.hypot(q[0] - 0.5, q[1] - 0.5)
        assert r == pytest.approx(8.0, abs=1e-12)


def test_exterior_reentry_requires_outside_point():
    from cornerwalk import exterior_reentry

    with pytest.raises(ParameterError):
        exterior_reentry((0.5, 3.0), 8.0, RngStream(7, 0))


def test_exterior_reentry_deterministic():
    from cornerwalk import exterior_reentry

    a = exterior_reentry((30.0, 0.5), 8.0, RngStream(9, 4))
    b = exterior_reentry((30.0, 0.5), 8.0, RngStream(9, 4))
    assert a == b
