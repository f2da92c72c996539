import math

import numpy as np
import pytest

from pygengamma.damped import (
    OSCILLATION_CAP,
    DampParams,
    gamma2d_damped,
    laplace_cos_1d,
    laplace_sin_1d,
    laplace_trig_1d,
)
from pygengamma.errors import DomainError, OscillationCap
from pygengamma.genspecial import Params, beta_f
from pygengamma.quadcore import laplace_integral

UNIT = Params(1.0, 1.0, 0.0)


@pytest.mark.parametrize("s, a, b, cos, sin", [
    (1.0, 1.0, 0.0, 1.0, 0.0),
    (1.0, 1.0, 1.0, 0.5, 0.5),
    (2.0, 1.0, 1.0, 0.0, 0.5),
])
def test_laplace_closed_forms(s, a, b, cos, sin):
    assert laplace_cos_1d(s, a, b) == pytest.approx(cos, abs=1e-15)
    assert laplace_sin_1d(s, a, b) == pytest.approx(sin, abs=1e-15)


def test_closed_form_matches_quadrature(cfg):
    s, a, b = 2.7, 1.3, 2.0
    res = laplace_integral(lambda r: np.sin(b * r), s, cfg, rate=a)
    assert res.value == pytest.approx(laplace_sin_1d(s, a, b), rel=1e-9)


@pytest.mark.parametrize("s, a, b", [(1.0, 1.0, 1.0), (2.5, 0.5, 3.0), (3.7, 2.0, -1.5)])
def test_pythagorean_identity(s, a, b):
    c, sn = laplace_cos_1d(s, a, b), laplace_sin_1d(s, a, b)
    expected = math.gamma(s) ** 2 / (a * a + b * b) ** s
    assert c * c + sn * sn == pytest.approx(expected, rel=1e-12)


def test_zero_frequency_reduction():
    assert laplace_cos_1d(2.5, 2.0, 0.0) == pytest.approx(math.gamma(2.5) / 2.0 ** 2.5, rel=1e-14)
    assert laplace_sin_1d(2.5, 2.0, 0.0) == 0.0


def test_closed_form_domain():
    with pytest.raises(DomainError):
        laplace_trig_1d(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        laplace_trig_1d(1.0, -1.0, 1.0)
    with pytest.raises(DomainError):
        laplace_trig_1d(1.0, 1.0, 1.0, kind="tan")


def test_damped_examples(cfg):
    assert gamma2d_damped("1", None, UNIT, DampParams(1.0, 0.0), "cos", cfg=cfg).value == pytest.approx(1.0)
    reduced = gamma2d_damped("1", None, UNIT, DampParams(1.0, 1.0), "cos", cfg=cfg)
    direct = gamma2d_damped("1", None, UNIT, DampParams(1.0, 1.0), "cos", mode="direct", cfg=cfg)
    assert reduced.value == pytest.approx(0.0, abs=1e-15)
    assert direct.value == pytest.approx(0.0, abs=1e-9)


def test_damped_general_g(cfg):
    d = DampParams(2.0, 1.0)
    expected = 0.5 * laplace_sin_1d(3.0, 2.0, 1.0)
    reduced = gamma2d_damped("u", "r", UNIT, d, "sin", mode="reduced", cfg=cfg)
    direct = gamma2d_damped("u", "r", UNIT, d, "sin", mode="direct", cfg=cfg)
    assert reduced.value == pytest.approx(expected, rel=1e-9)
    assert direct.value == pytest.approx(expected, rel=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("b", [0.0, 0.5, 1.0, 3.0])
@pytest.mark.parametrize("kind", ["cos", "sin"])
def test_direct_equals_reduced(cfg, a, b, kind):
    p = Params(1.7, 0.5, 1.0)
    d = DampParams(a, b)
    direct = gamma2d_damped("u^2", "exp(-r/2)", p, d, kind, mode="direct", cfg=cfg)
    reduced = gamma2d_damped("u^2", "exp(-r/2)", p, d, kind, mode="reduced", cfg=cfg)
    scale = beta_f("u^2", p.alpha, p.beta, cfg).value * math.gamma(p.total) / a ** p.total
    assert abs(direct.value - reduced.value) <= 10 * (direct.err_est + reduced.err_est) + 1e-8 * scale


def test_params_from_params():
    d = DampParams.from_params(Params(1.0, 2.0, 0.5, a=2.0, b=-1.0))
    assert (d.a, d.b, d.s) == (2.0, -1.0, 3.5)
    with pytest.raises(DomainError):
        DampParams(0.0)


def test_exponent_must_match_params(cfg):
    p = Params(1.0, 2.0, 0.5, a=2.0, b=1.0)
    res = gamma2d_damped("1", None, p, DampParams.from_params(p), "sin", cfg=cfg)
    assert res.value == pytest.approx(beta_f("1", 1.0, 2.0, cfg).value * laplace_sin_1d(3.5, 2.0, 1.0), rel=1e-9)
    with pytest.raises(DomainError):
        gamma2d_damped("1", None, p, DampParams(2.0, 1.0, s=2.0), "sin", cfg=cfg)


def test_oscillation_cap(cfg):
    with pytest.raises(OscillationCap):
        gamma2d_damped("1", "1", UNIT, DampParams(1.0, OSCILLATION_CAP + 1.0), mode="direct", cfg=cfg)
    # the reduced path has no cap
    res = gamma2d_damped("1", "1", UNIT, DampParams(1.0, 20.0), mode="reduced", cfg=cfg)
    assert res.value == pytest.approx(laplace_cos_1d(2.0, 1.0, 20.0), rel=1e-9)
