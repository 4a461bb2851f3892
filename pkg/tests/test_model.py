import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from newsca import (
    AnalyticModel,
    LogisticParams,
    eval_black,
    eval_grey,
    eval_white,
    fit_logistic,
    fit_model,
    is_unimodal,
    logistic,
    reference_model,
)

mp.mp.dps = 50


def oracle_sigmoid(t, c, tau, gamma):
    """Independent high-precision evaluation of c / (1 + e^(-gamma (t - tau)))."""
    c, tau, gamma, t = (mp.mpf(v) for v in (c, tau, gamma, t))
    return c / (1 + mp.e ** (-gamma * (t - tau)))


def oracle_grey(t):
    return oracle_sigmoid(t, "0.75", "30", "0.15")


def oracle_white(t):
    return 1 - oracle_sigmoid(t, "0.75", "20", "0.25")


def oracle_black(t):
    return oracle_sigmoid(t, "0.75", "20", "0.25") - oracle_sigmoid(t, "0.75", "30", "0.15")


params_strategy = st.builds(
    LogisticParams,
    c=st.floats(0.01, 1.0),
    tau=st.floats(-100, 100),
    gamma=st.floats(0.01, 5.0),
)


class TestLogistic:
    def test_midpoint_is_half_plateau(self):
        assert logistic(30, LogisticParams(0.75, 30, 0.15)) == 0.375

    def test_upper_asymptote(self):
        assert logistic(1e6, LogisticParams(0.75, 30, 0.15)) == pytest.approx(0.75, abs=1e-12)

    def test_origin_against_oracle(self):
        value = logistic(0, LogisticParams(0.75, 30, 0.15))
        assert value == pytest.approx(0.0082402, abs=1e-7)
        assert abs(value - float(oracle_grey(0))) <= 1e-12

    def test_saturates_without_overflow(self):
        p = LogisticParams(0.75, 0.0, 1.0)
        with np.errstate(over="raise"):
            assert logistic(-1e6, p) == 0.0
            assert logistic(1e6, p) == 0.75
            assert logistic(-700.0, p) >= 0.0
            assert logistic(700.0, p) <= 0.75

    def test_array_input(self):
        p = LogisticParams(0.5, 10, 0.3)
        t = np.array([0.0, 10.0, 20.0])
        out = logistic(t, p)
        assert out.shape == (3,)
        assert out[1] == 0.25
        assert np.all(np.diff(out) > 0)

    @given(params=params_strategy, d=st.floats(-50, 50))
    def test_point_symmetry_about_midpoint(self, params, d):
        total = logistic(params.tau + d, params) + logistic(params.tau - d, params)
        assert abs(total - params.c) <= 1e-12

    @given(params=params_strategy, data=st.data())
    def test_strictly_increasing_where_not_saturated(self, params, data):
        # keep the exponent well inside the representable range
        lo = data.draw(st.floats(-20, 19))
        hi = data.draw(st.floats(lo + 0.01, 20))
        t1 = params.tau + lo / params.gamma
        t2 = params.tau + hi / params.gamma
        v1, v2 = logistic(t1, params), logistic(t2, params)
        assert v1 < v2
        assert 0.0 < v1 and v2 < params.c

    def test_params_validation(self):
        with pytest.raises(ValueError):
            LogisticParams(0.0, 10, 0.1)
        with pytest.raises(ValueError):
            LogisticParams(1.5, 10, 0.1)
        with pytest.raises(ValueError):
            LogisticParams(0.5, 10, 0.0)
        with pytest.raises(ValueError):
            LogisticParams(0.5, math.inf, 0.1)


class TestReferenceModel:
    def test_parameter_values(self):
        model = reference_model()
        assert (model.grey.c, model.grey.tau, model.grey.gamma) == (0.75, 30.0, 0.15)
        assert (model.white.c, model.white.tau, model.white.gamma) == (0.75, 20.0, 0.25)

    @pytest.mark.parametrize("t", [0, 20, 25, 30])
    def test_curves_match_oracle(self, t):
        model = reference_model()
        assert abs(eval_grey(t, model) - float(oracle_grey(t))) <= 1e-12
        assert abs(eval_white(t, model) - float(oracle_white(t))) <= 1e-12
        assert abs(eval_black(t, model) - float(oracle_black(t))) <= 1e-12

    def test_documented_values(self):
        model = reference_model()
        assert eval_white(0, model) == pytest.approx(0.994980, abs=1e-6)
        assert eval_black(25, model) == pytest.approx(0.342358, abs=1e-6)
        # the model dips slightly negative at the origin; reported as computed
        assert eval_black(0, model) == pytest.approx(-0.0032205, abs=1e-6)
        assert eval_grey(30, model) == 0.375
        assert eval_white(20, model) == 0.625

    def test_long_run_limits(self):
        model = reference_model()
        assert eval_grey(1e6, model) == pytest.approx(0.75, abs=1e-12)
        assert eval_white(1e6, model) == pytest.approx(0.25, abs=1e-12)
        assert eval_black(1e6, model) == pytest.approx(0.0, abs=1e-12)

    def test_curve_shapes(self):
        model = reference_model()
        t = np.arange(121)
        assert np.all(np.diff(eval_grey(t, model)) > 0)
        assert np.all(np.diff(eval_white(t, model)) < 0)
        assert is_unimodal(eval_black(t, model), tol=1e-12)

    @given(
        grey=params_strategy,
        white=params_strategy,
        t=st.floats(-1000, 1000),
    )
    def test_normalization_identity(self, grey, white, t):
        model = AnalyticModel(grey=grey, white=white)
        total = eval_grey(t, model) + eval_white(t, model) + eval_black(t, model)
        assert abs(total - 1.0) <= 1e-12


class TestFitLogistic:
    def test_recovers_rising_curve(self):
        t = np.arange(121, dtype=float)
        true = LogisticParams(0.75, 30.0, 0.15)
        fit = fit_logistic(t, logistic(t, true), shape="rising")
        assert fit.converged
        for got, want in [(fit.params.c, 0.75), (fit.params.tau, 30.0), (fit.params.gamma, 0.15)]:
            assert abs(got - want) / want <= 1e-3
        assert fit.rmse <= 1e-6

    def test_recovers_falling_curve(self):
        t = np.arange(121, dtype=float)
        true = LogisticParams(0.75, 20.0, 0.25)
        fit = fit_logistic(t, 1.0 - logistic(t, true), shape="falling")
        assert fit.converged
        for got, want in [(fit.params.c, 0.75), (fit.params.tau, 20.0), (fit.params.gamma, 0.25)]:
            assert abs(got - want) / want <= 1e-3

    def test_constant_series_fails_cleanly(self):
        t = np.arange(20, dtype=float)
        fit = fit_logistic(t, np.full(20, 0.5))
        assert not fit.converged
        assert fit.params is None
        assert "constant" in fit.message

    def test_too_few_points_fails_cleanly(self):
        fit = fit_logistic([0.0, 1.0, 2.0], [0.1, 0.2, 0.3])
        assert not fit.converged
        assert fit.params is None

    def test_out_of_range_values_rejected(self):
        with pytest.raises(ValueError):
            fit_logistic([0.0, 1.0, 2.0, 3.0], [0.0, 0.5, 1.2, 1.0])

    def test_bad_shape_rejected(self):
        with pytest.raises(ValueError):
            fit_logistic([0.0, 1.0, 2.0, 3.0], [0.0, 0.1, 0.2, 0.3], shape="sideways")

    def test_fit_is_idempotent(self):
        t = np.arange(0, 90, dtype=float)
        first = fit_logistic(t, logistic(t, LogisticParams(0.6, 40.0, 0.2)))
        second = fit_logistic(t, logistic(t, first.params))
        assert abs(second.params.c - first.params.c) / first.params.c <= 1e-6
        assert abs(second.params.tau - first.params.tau) / first.params.tau <= 1e-6
        assert abs(second.params.gamma - first.params.gamma) / first.params.gamma <= 1e-6


class TestFitModel:
    def test_joint_recovery_of_reference_model(self):
        model = reference_model()
        t = np.arange(121, dtype=float)
        result = fit_model(t, eval_grey(t, model), eval_white(t, model))
        assert result.model is not None
        for got, want in [
            (result.model.grey.c, 0.75),
            (result.model.grey.tau, 30.0),
            (result.model.grey.gamma, 0.15),
            (result.model.white.c, 0.75),
            (result.model.white.tau, 20.0),
            (result.model.white.gamma, 0.25),
        ]:
            assert abs(got - want) / want <= 1e-3
        assert result.black_rmse <= 1e-6

    def test_per_curve_failure_isolation(self):
        model = reference_model()
        t = np.arange(121, dtype=float)
        result = fit_model(t, np.zeros(121), eval_white(t, model))
        assert result.model is None
        assert not result.grey.converged
        assert result.white.converged
        assert result.black_rmse is None

    def test_misaligned_series_rejected(self):
        with pytest.raises(ValueError):
            fit_model([0.0, 1.0], [0.1, 0.2], [0.1, 0.2, 0.3])
