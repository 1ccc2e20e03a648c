import math

import numpy as np
import numpy.testing as nptest
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igagap.errors import DomainError, NumericalError
from igagap.reparam import make_identity, parse_phi, reflect
from igagap.symbol import (
    ep_eval,
    ep_inverse,
    ep_symbol,
    g_eval,
    gamma_slope,
    omega_eval,
    psi_prime_p1,
    psi_slope_min,
    psi_sqrt,
    psi_sqrt_p1_closed,
    rearrange,
)

THETA = np.linspace(0.0, math.pi, 2001)
MAPS = ["phi1", "phi2", "phi3:theta=0.01"]


class TestEp:
    def test_linear_closed_form(self):
        sym = ep_symbol(1)
        t = np.linspace(0.0, math.pi, 11)
        nptest.assert_allclose(sym.e(t), 6 * (1 - np.cos(t)) / (2 + np.cos(t)), atol=1e-13)
        assert sym.e_pi == pytest.approx(12.0)

    @pytest.mark.parametrize("p", range(1, 9))
    def test_zero_at_origin_and_nondecreasing(self, p):
        e = ep_eval(ep_symbol(p), THETA)
        assert e[0] == 0.0
        assert np.all(np.diff(e) >= 0.0)

    @pytest.mark.parametrize("p", range(1, 9))
    def test_g_bounds(self, p):
        g = g_eval(p, THETA)
        assert np.all(g <= 1.0 + 1e-15)
        assert np.all(g >= (4 / math.pi**2) ** (p + 1))
        assert g[0] == pytest.approx(1.0)

    def test_g_zero_is_one(self):
        nptest.assert_allclose(g_eval(0, THETA), 1.0)

    @pytest.mark.parametrize("p", range(1, 8))
    def test_stiffness_factorization(self, p):
        sym = ep_symbol(p)
        nptest.assert_allclose(sym.f(THETA), (2 - 2 * np.cos(THETA)) * g_eval(p - 1, THETA), atol=1e-14)

    def test_approaches_theta_squared(self):
        sups = [np.max(np.abs(ep_eval(ep_symbol(p), THETA) - THETA**2)) for p in range(1, 9)]
        assert all(b < a for a, b in zip(sups, sups[1:]))

    def test_small_angle_accuracy(self):
        t = np.array([1e-8, 1e-5, 1e-3])
        for p in (1, 3, 6):
            nptest.assert_allclose(ep_symbol(p).e(t), t**2, rtol=1e-5)

    @pytest.mark.parametrize("bad", [-0.1, math.pi + 1e-9, math.nan])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            ep_eval(ep_symbol(2), bad)

    def test_rejects_degree(self):
        with pytest.raises(DomainError):
            ep_symbol(0)


class TestEpInverse:
    def test_linear_value(self):
        assert ep_inverse(ep_symbol(1), 6.0) == pytest.approx(2 * math.pi / 3, abs=1e-12)

    @pytest.mark.parametrize("p", [1, 2, 4, 7])
    def test_round_trip(self, p):
        sym = ep_symbol(p)
        t = np.linspace(0.0, math.pi, 50)
        nptest.assert_allclose(ep_inverse(sym, sym.e(t)), t, atol=1e-10)

    def test_out_of_range(self):
        sym = ep_symbol(2)
        with pytest.raises(DomainError):
            ep_inverse(sym, sym.e_pi * 1.001)
        with pytest.raises(DomainError):
            ep_inverse(sym, -1.0)

    @settings(max_examples=40, deadline=None)
    @given(p=st.integers(1, 6), frac=st.floats(0.0, 1.0))
    def test_inverse_property(self, p, frac):
        sym = ep_symbol(p)
        v = frac * sym.e_pi
        assert sym.e(ep_inverse(sym, v)) == pytest.approx(v, rel=1e-9, abs=1e-12)


class TestOmega:
    def test_scaling(self):
        phi = parse_phi("phi2")
        sym = ep_symbol(2)
        assert omega_eval(phi, sym, 0.3, 1.0) == pytest.approx(sym.e(1.0) / phi.deriv1(0.3) ** 2)

    def test_domain(self):
        with pytest.raises(DomainError):
            omega_eval(parse_phi("phi1"), ep_symbol(1), 1.5, 0.2)


class TestPsi:
    @pytest.mark.parametrize("spec", MAPS)
    def test_matches_degree_one_closed_form(self, spec):
        phi = parse_phi(spec)
        rs = rearrange(phi, ep_symbol(1))
        y = np.linspace(0.0, rs.range_max, 23)
        ref = [psi_sqrt_p1_closed(phi, v) for v in y]
        nptest.assert_allclose(rs.psi(y), ref, atol=1e-9)

    @pytest.mark.parametrize("p", [1, 3])
    def test_affine_map(self, p):
        sym = ep_symbol(p)
        y = np.linspace(0.0, math.sqrt(sym.e_pi), 9)
        nptest.assert_allclose(psi_sqrt(make_identity(), sym, y), ep_inverse(sym, np.minimum(y**2, sym.e_pi)))

    @pytest.mark.parametrize("spec", MAPS + ["Phi:p=3,theta=0.01"])
    @pytest.mark.parametrize("p", [1, 2, 4])
    def test_monotone_with_full_range(self, spec, p):
        rs = rearrange(parse_phi(spec), ep_symbol(p))
        y = np.linspace(0.0, rs.range_max, 200)
        v = rs.psi(y)
        assert v[0] == 0.0
        assert v[-1] == pytest.approx(math.pi)
        assert np.all(np.diff(v) > 0.0)

    @pytest.mark.parametrize("spec", MAPS)
    def test_reflection_invariance(self, spec):
        phi = parse_phi(spec)
        sym = ep_symbol(3)
        y = np.linspace(0.1, 3.0, 7)
        nptest.assert_allclose(psi_sqrt(reflect(phi), sym, y), psi_sqrt(phi, sym, y), atol=1e-11)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            psi_sqrt(parse_phi("phi1"), ep_symbol(1), -1.0)


class TestPsiPrime:
    @pytest.mark.parametrize("spec", MAPS)
    def test_origin_is_one(self, spec):
        assert psi_prime_p1(parse_phi(spec), 0.0) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("spec", MAPS)
    @pytest.mark.parametrize("frac", [0.2, 0.5, 0.8, 0.95])
    def test_finite_difference(self, spec, frac):
        phi = parse_phi(spec)
        rs = rearrange(phi, ep_symbol(1))
        lo, hi = rs.kink, rs.range_max
        y = frac * hi
        if abs(y - lo) < 1e-3:
            y += 2e-3
        eps = 1e-5
        fd = (psi_sqrt_p1_closed(phi, y + eps) - psi_sqrt_p1_closed(phi, y - eps)) / (2 * eps)
        assert psi_prime_p1(phi, y) == pytest.approx(fd, rel=1e-6, abs=1e-8)

    def test_saturated(self):
        phi = parse_phi("phi1")
        assert psi_prime_p1(phi, rearrange(phi, ep_symbol(1)).range_max * 1.1) == 0.0

    def test_branch_point(self):
        phi = parse_phi("phi2")
        with pytest.raises(DomainError):
            psi_prime_p1(phi, rearrange(phi, ep_symbol(1)).kink)


class TestRearrangement:
    @pytest.mark.parametrize("spec", MAPS)
    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_round_trip(self, spec, p):
        rs = rearrange(parse_phi(spec), ep_symbol(p))
        x = np.linspace(0.0, 1.0, 41)
        nptest.assert_allclose(rs.psi(rs.xi_sqrt(x)) / math.pi, x, atol=1e-10)

    def test_endpoints(self):
        rs = rearrange(parse_phi("phi1"), ep_symbol(2))
        assert rs.xi_sqrt(0.0) == 0.0
        assert rs.xi_sqrt(1.0) == rs.range_max

    def test_rejects_outside(self):
        rs = rearrange(parse_phi("phi1"), ep_symbol(2))
        with pytest.raises(DomainError):
            rs.xi_sqrt(1.5)

    @pytest.mark.parametrize("spec", MAPS + ["expfam:a=3,gamma=0.5", "logfam:a=1,gamma=0.9"])
    @pytest.mark.parametrize("p", [1, 2, 3, 5])
    def test_gamma_is_pi(self, spec, p):
        assert gamma_slope(rearrange(parse_phi(spec), ep_symbol(p))) == pytest.approx(math.pi, rel=1e-6)

    @pytest.mark.parametrize("p", [2, 3])
    def test_gamma_refuses_unbounded_slope(self, p):
        rs = rearrange(parse_phi(f"Phi:p={p},theta=0.01"), ep_symbol(p))
        with pytest.raises(NumericalError):
            gamma_slope(rs)

    def test_secant_slope(self):
        rs = rearrange(parse_phi("phi2"), ep_symbol(2))
        assert rs.xi_sqrt(1e-4) / 1e-4 == pytest.approx(math.pi, rel=1e-5)

    def test_psi_slope_positive(self):
        rs = rearrange(parse_phi("phi1"), ep_symbol(2))
        assert psi_slope_min(rs, grid_size=50) > 0.0
