import math

import numpy as np
import pytest

from pygengamma.errors import DivisionByZero, DomainError, EvalError, NonConvergent
from pygengamma.exprdsl import FuncSpec
from pygengamma.quadcore import (
    EvalResult,
    QuadConfig,
    closed_form,
    initial_radius,
    integrate_01_weighted,
    integrate_0inf_weighted,
    integrate_quadrant,
    laplace_integral,
    quadrant_integral,
    product,
    quotient,
    unit_integral,
)


def _close(res, exact, rel=1e-9):
    assert res.value == pytest.approx(exact, rel=rel, abs=1e-14)


@pytest.mark.parametrize("h, alpha, beta, exact", [
    ("1", 1.0, 1.0, 1.0),
    ("1", 2.0, 3.0, 1.0 / 12.0),
    ("u", 1.0, 1.0, 0.5),
    ("1", 0.5, 0.5, math.pi),
    ("1", 0.2, 0.3, math.gamma(0.2) * math.gamma(0.3) / math.gamma(0.5)),
])
def test_integrate_01_weighted(cfg, h, alpha, beta, exact):
    res = integrate_01_weighted(FuncSpec.from_text(h, 1), alpha, beta, cfg)
    _close(res, exact)
    assert res.path == "direct1d"
    assert res.err_est <= 1e-8 * abs(exact) + 1e-15


@pytest.mark.parametrize("h, s, exact", [
    ("1", 1.0, 1.0),
    ("r", 1.0, 1.0),
    ("1", 0.5, math.sqrt(math.pi)),
    ("1", 30.0, math.gamma(30.0)),
])
def test_integrate_0inf_weighted(cfg, h, s, exact):
    res = integrate_0inf_weighted(FuncSpec.from_text(h, 1), s, cfg)
    _close(res, exact)
    assert res.truncation_point >= initial_radius(s, cfg.trunc_eps) - 1e-12


def test_laplace_rate(cfg):
    res = laplace_integral(lambda r: np.ones_like(r), 2.5, cfg, rate=3.0)
    _close(res, math.gamma(2.5) / 3.0 ** 2.5)


def test_unit_integral_complement_is_accurate(cfg):
    # int_0^1 log(1-x) dx = -1
    res = unit_integral(lambda x, xc: np.log(xc), 1.0, 1.0, cfg)
    _close(res, -1.0)


@pytest.mark.parametrize("omega, nu, om, lam, exact", [
    ("1", 1.0, 1.0, 0.0, 1.0),
    ("1", 1.0, 1.0, 1.0, 2.0),
    ("1", 0.5, 0.5, 0.0, math.pi),
    ("1", 2.0, 3.0, 0.0, 2.0),
    ("1", 1.0, 2.0, 1.0, 3.0),
    ("x+y^2", 1.0, 1.0, 0.0, 3.0),
])
def test_integrate_quadrant(cfg, omega, nu, om, lam, exact):
    res = integrate_quadrant(FuncSpec.from_text(omega, 2), nu, om, lam, cfg)
    _close(res, exact, rel=1e-8)
    assert res.path == "direct2d"


def test_quadrant_orders_agree(cfg):
    kernel = FuncSpec.from_text("exp(-(x+y)/3)*y/(x+y)+x*y", 2)
    su = integrate_quadrant(kernel, 1.5, 0.7, 0.5, cfg, order="su")
    us = integrate_quadrant(kernel, 1.5, 0.7, 0.5, cfg, order="us")
    assert abs(su.value - us.value) <= 5 * (su.err_est + us.err_est) + 1e-9 * abs(su.value)


def test_quadrant_rows_close_to_zero():
    # f(u) = 1 - u rebuilt from the ratio y/(x+y) leaves only rounding noise in the rows next to u = 1
    kernel = FuncSpec.from_text("(1-y/(x+y))*exp(-(x+y)/2)", 2)
    for order in ("su", "us"):
        res = integrate_quadrant(kernel, 1.0, 3.0, 0.0, QuadConfig(), order=order)
        _close(res, 8.0 / 27.0, rel=1e-9)


@pytest.mark.parametrize("order", ["su", "us"])
def test_quadrant_rows_cancelling(order):
    # int_0^inf s e^(-s) cos(s) ds = 0: every inner row sums to rounding noise
    res = quadrant_integral(lambda u, uc, s: np.cos(s), 1.0, 1.0, 0.0, QuadConfig(), order=order)
    assert res.value == pytest.approx(0.0, abs=1e-9)
    res = quadrant_integral(lambda u, uc, s: np.sin(s), 1.0, 1.0, 0.0, QuadConfig(), order=order)
    assert res.value == pytest.approx(0.5, rel=1e-9)


def test_more_levels_never_worse():
    h = FuncSpec.from_text("exp(u)*sqrt(1+u)", 1)
    coarse = integrate_01_weighted(h, 0.7, 1.3, QuadConfig(rel_tol=1e-6, max_levels=4))
    fine = integrate_01_weighted(h, 0.7, 1.3, QuadConfig(rel_tol=1e-6, max_levels=8))
    assert fine.err_est <= coarse.err_est


def test_domain_errors(cfg):
    one = FuncSpec.one()
    with pytest.raises(DomainError):
        integrate_01_weighted(one, 0.0, 1.0, cfg)
    with pytest.raises(DomainError):
        integrate_0inf_weighted(one, -1.0, cfg)
    with pytest.raises(DomainError):
        integrate_quadrant(FuncSpec.one(2), 1.0, 1.0, -0.5, cfg)
    with pytest.raises(DomainError):
        integrate_quadrant(FuncSpec.one(2), 1.0, 1.0, 0.0, cfg, order="xy")


def test_nonfinite_integrand_raises(cfg):
    with pytest.raises(EvalError):
        integrate_01_weighted(lambda x: np.where(x > 0.3, np.nan, 1.0), 1.0, 1.0, cfg)


def test_slow_tail_does_not_converge():
    # r^(s-1) e^(-r) h(r) decays like r^(-1/2): the tail never drops below trunc_eps
    cfg = QuadConfig(rel_tol=1e-8, trunc_eps=1e-3)
    with pytest.raises(NonConvergent):
        integrate_0inf_weighted(lambda r: np.exp(r) / np.sqrt(1.0 + r), 1.0, cfg)


def test_config_validation():
    with pytest.raises(DomainError):
        QuadConfig(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadConfig(max_levels=0)
    assert QuadConfig().tightened(4.0).rel_tol == pytest.approx(2.5e-11)


def test_product_and_quotient_propagate_errors():
    a = EvalResult(2.0, 1e-10, 10)
    b = EvalResult(3.0, 2e-10, 20)
    prod = product(a, b)
    assert prod.value == 6.0
    assert prod.path == "factorized"
    assert prod.n_evals == 30
    assert prod.err_est == pytest.approx(3.0 * 1e-10 + 2.0 * 2e-10, rel=1e-3)
    q = quotient(a, b)
    assert q.value == pytest.approx(2.0 / 3.0)
    assert q.err_est >= 1e-10 / 3.0
    with pytest.raises(DivisionByZero):
        quotient(a, EvalResult(1e-12, 1e-11, 1))


def test_closed_form_path():
    res = closed_form(0.25)
    assert res.path == "closed_form"
    assert res.err_est < 1e-15
    with pytest.raises(ValueError):
        EvalResult(1.0, 0.0, 1, path="nowhere")
