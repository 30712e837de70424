import inspect

import numpy as np
import pytest
from scipy.special import gamma

from riss import (
    ConfigError,
    DerivativeUnavailableError,
    FractionalOrder,
    SampledFunction,
    SchemeConfig,
    eta_grid,
    eval_derivative_callable,
    eval_derivative_series,
)
from riss.core import DerivMode, QuadKind, StepperKind
from riss.evaluator import _z_increments
from riss.steppers import DriveWindow, step_z_backward_euler, step_z_trapezoidal

ORDER = FractionalOrder(0.4)


def _cfg(**kw):
    base = dict(order=ORDER, J=10, eta=eta_grid(8), h=0.05, T=1.0)
    base.update(kw)
    return SchemeConfig(**base)


def _sample(fn, cfg, fn_prime=None):
    return SampledFunction.from_callable(fn, cfg.h, cfg.T, fn_prime)


ALL_COMBOS = [
    (st, mode, quad)
    for st in StepperKind
    for mode in DerivMode
    for quad in QuadKind
]


@pytest.mark.parametrize("stepper,mode,quad", ALL_COMBOS)
def test_constant_functions_are_annihilated(stepper, mode, quad):
    cfg = _cfg(stepper_kind=stepper, deriv_mode=mode, quad_kind=quad)
    series = eval_derivative_callable(cfg, lambda t: 4.25, lambda t: 0.0)
    assert np.max(np.abs(series.values)) <= 1e-14


def test_series_shape_and_times():
    cfg = _cfg()
    series = eval_derivative_callable(cfg, lambda t: t, lambda t: 1.0)
    assert len(series) == cfg.N
    assert series.times[0] == pytest.approx(cfg.h)
    assert series.times[-1] == pytest.approx(cfg.T)


@pytest.mark.parametrize("mode", list(DerivMode))
def test_linearity(mode):
    cfg = _cfg(deriv_mode=mode, stepper_kind=StepperKind.TRAPEZOIDAL)
    y1 = _sample(lambda t: t**2, cfg, lambda t: 2 * t)
    y2 = _sample(lambda t: np.sin(t), cfg, lambda t: np.cos(t))
    a, b = 2.5, -1.25
    combo = SampledFunction(
        y=a * y1.y + b * y2.y,
        h=cfg.h,
        yp=a * y1.yp + b * y2.yp,
    )
    s_combo = eval_derivative_series(cfg, combo).values
    s_lin = a * eval_derivative_series(cfg, y1).values + b * eval_derivative_series(cfg, y2).values
    scale = np.max(np.abs(s_combo)) + 1.0
    assert np.max(np.abs(s_combo - s_lin)) <= 1e-12 * scale


@pytest.mark.parametrize("mode", list(DerivMode))
def test_shift_invariance(mode):
    cfg = _cfg(deriv_mode=mode)
    base = _sample(lambda t: t**1.5, cfg, lambda t: 1.5 * t**0.5)
    shifted = SampledFunction(y=base.y + 42.0, h=cfg.h, yp=base.yp)
    s0 = eval_derivative_series(cfg, base).values
    s1 = eval_derivative_series(cfg, shifted).values
    assert np.max(np.abs(s0 - s1)) <= 1e-12


def test_callable_matches_sampled():
    cfg = _cfg()
    direct = eval_derivative_callable(cfg, lambda t: t**2, lambda t: 2 * t)
    via = eval_derivative_series(cfg, _sample(lambda t: t**2, cfg, lambda t: 2 * t))
    assert np.array_equal(direct.values, via.values)


def test_trapezoidal_exact_mode_rejects_singular_slope_at_zero():
    cfg = _cfg(stepper_kind=StepperKind.TRAPEZOIDAL)
    with pytest.raises(DerivativeUnavailableError, match="mod"):
        eval_derivative_callable(cfg, lambda t: t**0.6, lambda t: 0.6 * t ** (-0.4))


def test_backward_euler_exact_mode_accepts_singular_slope_at_zero():
    # y'(0) = inf is never used: the first update needs y'(t_1) only
    cfg = SchemeConfig(
        order=ORDER, J=25, eta=eta_grid(10),
        stepper_kind=StepperKind.BACKWARD_EULER, h=0.01, T=1.0,
    )
    series = eval_derivative_callable(cfg, lambda t: t**0.6, lambda t: 0.6 * t ** (-0.4))
    exact = gamma(1.6) / gamma(1.2) * series.times ** 0.2
    err = np.abs(series.values - exact)
    # the value itself is ~0.39 at t = h; the one-step start-up error decays fast
    assert err[-1] < 5e-3
    assert np.max(err[series.times > 0.1]) < 5e-2


def test_exact_mode_without_derivative_samples_raises():
    cfg = _cfg()
    with pytest.raises(DerivativeUnavailableError):
        eval_derivative_series(cfg, _sample(lambda t: t, cfg))


def test_mismatched_grid_raises():
    cfg = _cfg()
    other = SampledFunction.from_callable(lambda t: t, cfg.h, cfg.T + cfg.h, lambda t: 1.0)
    with pytest.raises(ConfigError):
        eval_derivative_series(cfg, other)


def test_derivative_of_linear_function_converges():
    # D^0.5 t = t^0.5 / Gamma(1.5)
    order = FractionalOrder(0.5)
    errs = []
    for h in [0.02, 0.005]:
        cfg = SchemeConfig(order=order, J=15, eta=eta_grid(10), h=h, T=1.0)
        series = eval_derivative_callable(cfg, lambda t: t, lambda t: 1.0)
        exact = series.times**0.5 / gamma(1.5)
        errs.append(np.max(np.abs(series.values - exact)))
    assert errs[1] < errs[0]


def test_quadrature_choice_is_negligible_on_reference_config():
    pf = lambda t: t**1.6  # noqa: E731
    pfp = lambda t: 1.6 * t**0.6  # noqa: E731
    for stepper in StepperKind:
        out = {}
        for quad in QuadKind:
            cfg = SchemeConfig(
                order=ORDER, J=25, eta=eta_grid(10), quad_kind=quad,
                stepper_kind=stepper, h=1e-2, T=3.0,
            )
            out[quad] = eval_derivative_callable(cfg, pf, pfp).values
        diff = np.max(np.abs(out[QuadKind.COMPOUND_GAUSS] - out[QuadKind.COMPOUND_CC]))
        assert diff <= 1e-7, stepper


def test_state_storage_does_not_grow_with_step_count():
    # state arrays have one entry per quadrature node, and the time loop
    # appends to no history container
    src = inspect.getsource(eval_derivative_series)
    loop = src.split("for n in range(1, N + 1):")[1]
    assert ".append(" not in loop
    cfg_short, cfg_long = _cfg(T=1.0), _cfg(T=8.0)
    from riss import assemble_compound

    assert len(assemble_compound(cfg_short)) == len(assemble_compound(cfg_long)) == 80


@pytest.mark.parametrize("stepper", list(StepperKind))
@pytest.mark.parametrize("mode", list(DerivMode))
def test_precomputed_increments_match_step_functions(stepper, mode):
    """The evaluator's vectorized per-step increments must equal what the
    step-function contracts produce."""
    rng = np.random.default_rng(7)
    N = 12
    h = 0.25
    cfg = _cfg(h=h, T=N * h, stepper_kind=stepper, deriv_mode=mode)
    y = rng.normal(size=N + 1)
    yp = rng.normal(size=N + 1)
    ytil = y - y[0]
    incr = _z_increments(cfg, ytil, yp)
    lam = 0.0  # with lam = 0 the one-step update is z_prev + increment
    for n in range(1, N + 1):
        w = DriveWindow(
            n=n,
            N=N,
            y_n=ytil[n],
            y_prev=ytil[n - 1],
            y_prev2=ytil[n - 2] if n >= 2 else None,
            y_next=ytil[n + 1] if n < N else None,
            yp_n=yp[n],
            yp_prev=yp[n - 1],
        )
        if stepper is StepperKind.BACKWARD_EULER:
            got = step_z_backward_euler(lam, 0.0, h, w, mode)
        else:
            got = step_z_trapezoidal(lam, 0.0, h, w, mode)
        assert got == pytest.approx(incr[n], rel=1e-13, abs=1e-15), (n, stepper, mode)
