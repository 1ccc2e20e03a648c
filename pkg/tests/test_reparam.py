import math

import numpy as np
import numpy.testing as nptest
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igagap.errors import DomainError, ParseError
from igagap.reparam import (
    LOG_FAMILY_GAMMA_RANGE,
    make_exp_family,
    make_identity,
    make_log_family,
    make_Phi,
    make_phi1,
    make_phi2,
    make_phi3,
    parse_phi,
    reflect,
    validate,
)

ADMISSIBLE = [
    "phi1",
    "phi2",
    "phi3:theta=0.01",
    "phi3:theta=1",
    "Phi:p=2,theta=0.01",
    "Phi:p=4,theta=0.01",
    "expfam:a=0.5,gamma=0.5",
    "expfam:a=3,gamma=0.5",
    "logfam:a=1,gamma=0.9",
]


class TestFactories:
    @pytest.mark.parametrize("spec", ADMISSIBLE)
    def test_validates(self, spec):
        rep = validate(parse_phi(spec))
        assert rep.passed, [c for c in rep.checks if not c.passed]

    @pytest.mark.parametrize("spec", ADMISSIBLE)
    def test_derivatives_match_finite_differences(self, spec):
        phi = parse_phi(spec)
        x = np.array([0.1, 0.35, 0.5, 0.72, 0.9])
        eps = 1e-6
        d1 = (phi.value(x + eps) - phi.value(x - eps)) / (2 * eps)
        d2 = (phi.deriv1(x + eps) - phi.deriv1(x - eps)) / (2 * eps)
        nptest.assert_allclose(phi.deriv1(x), d1, rtol=1e-7)
        nptest.assert_allclose(phi.deriv2(x), d2, rtol=1e-5, atol=1e-6)

    def test_phi1_slopes(self):
        lo, hi = make_phi1().slope_range()
        ln2 = math.log(2.0)
        assert (lo, hi) == pytest.approx((1 / (2 * ln2), 1 / ln2))
        assert not make_phi1().is_convex

    def test_phi2_is_convex(self):
        assert make_phi2().is_convex
        assert make_phi2().slope_range() == pytest.approx((1 / (math.e - 1), math.e / (math.e - 1)))

    def test_phi3_small_x_is_finite(self):
        phi = make_phi3(0.01)
        v = phi.value(np.array([0.0, 1e-12, 1e-8]))
        assert np.all(np.isfinite(v)) and v[0] == 0.0

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_Phi_slope_blows_up_at_zero(self, p):
        phi = make_Phi(p, 0.01)
        assert phi.deriv1(1e-12) > 1e3 * phi.deriv1(0.5)

    @pytest.mark.parametrize("a", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("gamma", [0.2, 0.5, 0.9])
    def test_exp_family_end_slope(self, a, gamma):
        phi = make_exp_family(a, gamma)
        assert phi.value(0.0) == pytest.approx(0.0, abs=1e-15)
        assert phi.value(1.0) == pytest.approx(1.0, abs=1e-14)
        assert phi.deriv1(0.0) == pytest.approx(gamma, rel=1e-12)

    @pytest.mark.parametrize("gamma", [0.85, 0.9, 0.99])
    def test_log_family_end_slope(self, gamma):
        phi = make_log_family(1.0, gamma)
        assert phi.value(1.0) == pytest.approx(1.0, abs=1e-13)
        assert phi.deriv1(1.0) == pytest.approx(gamma, rel=1e-10)

    @pytest.mark.parametrize("gamma", [0.5, LOG_FAMILY_GAMMA_RANGE[0], 1.0, 1.2])
    def test_log_family_rejects_unsolvable(self, gamma):
        with pytest.raises(DomainError):
            make_log_family(1.0, gamma)

    def test_identity_reported_inadmissible(self):
        rep = validate(make_identity())
        assert not rep.passed
        assert not rep["convexity"].passed

    @settings(max_examples=30, deadline=None)
    @given(a=st.floats(0.1, 5.0), gamma=st.floats(0.05, 0.95))
    def test_exp_family_slope_inverse(self, a, gamma):
        phi = make_exp_family(a, gamma)
        x = np.linspace(0.05, 0.95, 7)
        nptest.assert_allclose(phi.deriv1_inverse(phi.deriv1(x)), x, atol=1e-9)


class TestReflect:
    def test_swaps_slopes_and_convexity(self):
        phi = make_phi1()
        r = reflect(phi)
        assert r.is_convex != phi.is_convex
        assert r.deriv1(0.0) == pytest.approx(phi.deriv1(1.0))
        assert r.value(0.3) == pytest.approx(1 - phi.value(0.7))

    def test_reflection_validates(self):
        assert validate(reflect(make_phi2())).passed


class TestParse:
    def test_round_trip_label(self):
        assert parse_phi("phi3:theta=0.01").params["theta"] == pytest.approx(0.01)

    @pytest.mark.parametrize(
        "bad", ["", "nope", "phi3", "phi3:theta", "phi3:alpha=1", "phi3:theta=x", "Phi:p=2"]
    )
    def test_parse_errors(self, bad):
        with pytest.raises(ParseError):
            parse_phi(bad)

    def test_out_of_domain_value(self):
        with pytest.raises(DomainError):
            parse_phi("phi3:theta=-1")
