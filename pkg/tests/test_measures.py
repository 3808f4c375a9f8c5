"""Tests for the nonclassicality and non-Gaussianity measures."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csqs_lab.core.csqs_model import StateParams, normalize
from csqs_lab.core.exceptions import CovarianceValidityError
from csqs_lab.core.measures import (
    CovarianceMatrix,
    MeasureReport,
    covariance,
    covariance_from_moments,
    covariance_oracle,
    evaluate_measures,
    h_entropy,
    linear_entropy_closed,
    linear_entropy_oracle,
    linear_entropy_printed_closed,
    rel_entropy_ng,
    rel_entropy_ng_oracle,
    skew_closed,
    skew_oracle,
)
from csqs_lab.core.phase_space import PhaseGrid, wln_numeric

ALPHAS = np.round(np.arange(0.1, 3.0 + 1e-9, 0.1), 10)


def _state_r(alpha, r, negative_t=False):
    return normalize(StateParams.from_r(alpha, r, negative_t))


class TestLinearEntropy:
    def test_reference_value(self, make_state):
        assert linear_entropy_closed(make_state(1.0, 0.8)) == pytest.approx(0.012039239001, abs=1e-11)

    def test_coherent_is_zero(self, make_state):
        assert linear_entropy_closed(make_state(1.3 - 0.2j, 1.0)) == pytest.approx(0.0, abs=1e-14)

    def test_single_photon(self, make_state):
        assert linear_entropy_closed(make_state(0, 0.0)) == pytest.approx(0.5)
        assert linear_entropy_oracle(make_state(0, 0.0)) == pytest.approx(0.5)

    def test_printed_form_offset(self, make_state):
        state = make_state(1.0, 0.8)
        offset = state.n_const**4 * state.r**4 * abs(state.alpha) ** 2 / 2
        diff = linear_entropy_closed(state) - linear_entropy_printed_closed(state)
        assert abs(diff) == pytest.approx(offset, rel=1e-9)

    @settings(max_examples=100, deadline=None, derandomize=True)
    @given(st.floats(0.05, 2.5), st.floats(0.0, 2 * math.pi), st.floats(-1.0, 1.0))
    def test_oracle_equivalence(self, modulus, phase, t):
        state = normalize(StateParams.from_t(cmath.rect(modulus, phase), t))
        assert abs(linear_entropy_closed(state) - linear_entropy_oracle(state)) < 1e-8

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_nondecreasing_in_r(self, alpha):
        values = [linear_entropy_closed(_state_r(alpha, r)) for r in np.linspace(0.0, 1.0, 21)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("r", [0.25, 0.5, 1.0])
    def test_nonincreasing_in_alpha(self, r):
        values = [linear_entropy_closed(_state_r(a, r)) for a in np.linspace(0.5, 3.0, 26)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_bounded_by_half(self):
        values = [linear_entropy_closed(_state_r(a, r)) for a in ALPHAS for r in (0.25, 0.5, 0.75, 1.0)]
        assert max(values) < 0.5
        assert min(values) >= -1e-14


class TestSkew:
    def test_coherent(self, make_state):
        assert skew_closed(make_state(1.1 + 0.4j, 1.0)) == pytest.approx(0.5, abs=1e-12)

    def test_single_photon_uses_oracle(self, make_state):
        assert skew_closed(make_state(0, 0.0)) == pytest.approx(1.5)

    def test_range_over_sweep(self):
        values = [skew_closed(_state_r(a, r)) for a in ALPHAS for r in (0.25, 0.5, 0.75, 1.0)]
        assert min(values) >= 0.5 - 1e-12
        assert max(values) <= 1.5 + 1e-12

    @pytest.mark.parametrize("alpha, t", [(0.3, 0.8), (1.5, -0.6), (0.8 + 0.4j, 0.0)])
    def test_against_oracle(self, make_state, alpha, t):
        state = make_state(alpha, t)
        assert abs(skew_closed(state) - skew_oracle(state)) < 1e-9


class TestCovariance:
    def test_coherent_is_identity(self, make_state):
        sigma = covariance(make_state(0.9 - 0.7j, 1.0))
        np.testing.assert_allclose(sigma.as_array(), np.eye(2), atol=1e-10)

    def test_single_photon(self, make_state):
        sigma = covariance(make_state(0, 0.0))
        np.testing.assert_allclose(sigma.as_array(), 3 * np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("alpha, t", [(0.5, 0.6), (1.2 + 0.3j, -0.4), (2.0, 0.0)])
    def test_against_oracle(self, make_state, alpha, t):
        state = make_state(alpha, t)
        closed, oracle = covariance(state), covariance_oracle(state)
        np.testing.assert_allclose(closed.as_array(), oracle.as_array(), atol=1e-9)
        assert closed.check_uncertainty() is closed

    def test_moment_assembly(self):
        sigma = covariance_from_moments(0, 0, 0.0)
        assert (sigma.s_pp, sigma.s_qq, sigma.s_pq) == (1.0, 1.0, 0.0)

    def test_uncertainty_violation(self):
        with pytest.raises(CovarianceValidityError):
            CovarianceMatrix(0.5, 1.0, 0.0).check_uncertainty()


class TestRelativeEntropy:
    def test_h_values(self):
        assert h_entropy(1.0) == 0.0
        assert h_entropy(3.0) == pytest.approx(2.0)
        assert abs(h_entropy(1 + 1e-8)) < 1e-6

    def test_coherent_is_gaussian(self, make_state):
        assert rel_entropy_ng(make_state(1.0, 1.0)) == pytest.approx(0.0, abs=1e-6)

    def test_single_photon(self, make_state):
        assert rel_entropy_ng(make_state(0, 0.0)) == pytest.approx(2.0)

    def test_against_oracle(self, make_state):
        state = make_state(0.7, 0.5)
        assert rel_entropy_ng(state) == pytest.approx(rel_entropy_ng_oracle(state), abs=1e-8)

    @pytest.mark.parametrize("negative_t", [False, True], ids=["t>0", "t<0"])
    def test_decreasing_profile(self, negative_t):
        values = [rel_entropy_ng(_state_r(a, 0.5, negative_t)) for a in ALPHAS]
        assert all(b <= a + 1e-6 for a, b in zip(values, values[1:]))
        assert values[0] > values[-1]

    def test_profile_endpoints(self):
        assert rel_entropy_ng(_state_r(0.1, 0.5)) == pytest.approx(1.857, abs=1e-3)
        assert rel_entropy_ng(_state_r(0.1, 0.5, True)) == pytest.approx(1.989, abs=1e-3)


class TestWlnProfile:
    @pytest.mark.parametrize("negative_t", [False, True], ids=["t>0", "t<0"])
    def test_decreasing_profile(self, negative_t):
        values = [wln_numeric(_state_r(a, 0.5, negative_t), workers=2) for a in ALPHAS]
        assert all(b <= a + 1e-6 for a, b in zip(values, values[1:]))
        assert values[0] > values[-1] >= -1e-3

    def test_profile_endpoints(self):
        fock_wln = math.log2(4 * math.exp(-0.5) - 1)
        assert wln_numeric(_state_r(1e-6, 0.5)) == pytest.approx(fock_wln, abs=1e-3)
        assert wln_numeric(normalize(StateParams.from_t(3.0, 1.0))) == pytest.approx(0.0, abs=1e-3)


class TestMeasureReport:
    def test_delta_filled(self):
        report = MeasureReport(name="LE", closed_value=0.25, oracle_value=0.2)
        assert report.delta == pytest.approx(0.05)

    def test_delta_left_empty(self):
        assert MeasureReport(name="WLN", closed_value=0.3).delta is None


class TestEvaluateMeasures:
    def test_rows(self, make_state):
        state = make_state(0.5, math.sqrt(0.75))
        reports = evaluate_measures(state, grid=PhaseGrid.square(6.0, 201), workers=1)
        assert [(r.name, r.variant) for r in reports] == [
            ("LE", "primary"),
            ("LE", "printed"),
            ("N_rho", "primary"),
            ("WLN", "primary"),
            ("WLN", "printed"),
            ("delta_NG", "primary"),
        ]
        assert reports[0].oracle_value is None
        assert reports[3].method == "numeric-quadrature"
        assert reports[4].closed_value is None
        assert "undefined" in reports[4].method_notes
        assert reports[4].oracle_value == reports[3].closed_value

    def test_with_oracle(self, make_state):
        state = make_state(1.2, -0.6)
        reports = evaluate_measures(state, with_oracle=True, grid=PhaseGrid.square(6.0, 201))
        primary = [r for r in reports if r.variant == "primary" and r.name != "WLN"]
        assert all(r.delta is not None and r.delta < 1e-8 for r in primary)
        assert reports[0].method == "closed-form+oracle"
