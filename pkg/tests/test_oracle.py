import math

import numpy as np
import pytest

from pygengamma.damped import DampParams, gamma2d_damped, laplace_sin_1d
from pygengamma.errors import DomainError, EvalError
from pygengamma.exprdsl import FuncSpec
from pygengamma.genspecial import Params, gamma2d, gamma2d_omega, gamma2d_polar
from pygengamma.logmoments import LogMomentOrder, gamma2d_logmoment_direct
from pygengamma.oracle import KahanSum, grid2d, hyp2f1_series, mc2d, series1d
from pygengamma.quadcore import QuadConfig

UNIT = Params(1.0, 1.0, 0.0)


def test_kahan_sum():
    acc = KahanSum()
    for term in (1.0, 1e100, 1.0, -1e100):
        acc += term
    assert acc.value == 2.0


@pytest.mark.parametrize("integrand, exact, tol", [
    (lambda y, x: np.exp(-x - y), 1.0, 1e-4),
    (lambda y, x: y * np.exp(-x - y), 1.0, 1e-3),
    (lambda y, x: (x + y) * np.exp(-x - y), 2.0, 1e-3),
])
def test_grid2d(integrand, exact, tol):
    assert grid2d(integrand, 40.0, 40.0, 2000) == pytest.approx(exact, abs=tol)


def test_grid2d_validation():
    with pytest.raises(DomainError):
        grid2d(lambda y, x: x, 1.0, 1.0, 50)
    with pytest.raises(EvalError):
        grid2d(lambda y, x: np.log(x - 0.5), 1.0, 1.0, 100)


@pytest.mark.parametrize("integrand, exact", [
    (lambda y, x: np.exp(-x - y), 1.0),
    (lambda y, x: y * np.exp(-x - y), 1.0),
    (lambda y, x: x * y * np.exp(-x - y), 1.0),
])
def test_mc2d(integrand, exact):
    value, std_err = mc2d(integrand, 40.0, 40.0, 1_000_000, seed=42)
    assert abs(value - exact) <= 3 * std_err


def test_mc2d_is_reproducible():
    first = mc2d(lambda y, x: np.exp(-x - y), 40.0, 40.0, 20_000, seed=7)
    second = mc2d(lambda y, x: np.exp(-x - y), 40.0, 40.0, 20_000, seed=7)
    assert first == second
    with pytest.raises(DomainError):
        mc2d(lambda y, x: x, 1.0, 1.0, 100, seed=0)


def test_oracles_agree():
    integrand = lambda y, x: np.sqrt(x) * np.exp(-x - y) * (1 + y / (x + y))  # noqa: E731
    grid = grid2d(integrand, 40.0, 40.0, 1000)
    value, std_err = mc2d(integrand, 40.0, 40.0, 400_000, seed=3)
    assert abs(grid - value) <= 3 * (1e-3 + 3 * std_err)


def test_series1d():
    assert series1d(lambda n: 0.5 ** n, 60) == pytest.approx(2.0, abs=1e-15)
    assert series1d(lambda n: 1.0 / math.factorial(n), 25) == pytest.approx(math.e, abs=1e-15)
    with pytest.raises(DomainError):
        series1d(lambda n: 1.0, 0)


def test_pochhammer_series():
    def term(n):
        return 0.5 ** n / (n + 1)

    assert series1d(term, 60) == pytest.approx(2.0 * math.log(2.0), rel=1e-12)
    assert hyp2f1_series(1.0, 1.0, 2.0, -1.0) == pytest.approx(math.log(2.0), rel=1e-4)
    with pytest.raises(DomainError):
        hyp2f1_series(1.0, 1.0, 2.0, 1.0)


def _quadrant(kernel, p=UNIT, rate=1.0):
    """kernel(y, x) times y^(alpha-1) x^(beta-1) (x+y)^gamma e^(-rate (x+y))."""

    def integrand(y, x):
        s = x + y
        return kernel(y, x) * y ** (p.alpha - 1) * x ** (p.beta - 1) * s ** p.gamma * np.exp(-rate * s)

    return integrand


DERIVED = [
    ("omega x+y^2", lambda y, x: x + y ** 2, 1.0, 3.0,
     lambda cfg: gamma2d_omega("x+y^2", UNIT, cfg)),
    ("f=u g=r", lambda y, x: y, 1.0, 1.0,
     lambda cfg: gamma2d("u", "r", UNIT, cfg, mode="direct")),
    ("polar u^2", lambda y, x: (y / (x + y)) ** 2, 1.0, 1.0 / 3.0,
     lambda cfg: gamma2d_polar("u^2", "1", UNIT, cfg)),
    ("damped cos", lambda y, x: np.cos(x + y), 1.0, 0.0,
     lambda cfg: gamma2d_damped("1", None, UNIT, DampParams(1.0, 1.0), "cos", mode="direct", cfg=cfg)),
    ("damped sin", lambda y, x: y * np.sin(x + y), 2.0, 0.5 * laplace_sin_1d(3.0, 2.0, 1.0),
     lambda cfg: gamma2d_damped("u", "r", UNIT, DampParams(2.0, 1.0), "sin", mode="direct", cfg=cfg)),
]


@pytest.mark.parametrize("name, kernel, rate, exact, library", DERIVED, ids=[d[0] for d in DERIVED])
def test_derived_values_against_grid(cfg, name, kernel, rate, exact, library):
    assert grid2d(_quadrant(kernel, rate=rate), 40.0, 40.0, 2000) == pytest.approx(exact, abs=1e-3)
    assert library(cfg).value == pytest.approx(exact, rel=1e-8, abs=1e-9)


def test_log_moment_against_grid():
    # the midpoint rule loses about 0.3 h next to the log singularity
    grid = grid2d(_quadrant(lambda y, x: np.log(y)), 40.0, 40.0, 4000)
    assert grid == pytest.approx(-np.euler_gamma, abs=5e-3)
    res = gamma2d_logmoment_direct("1", "1", UNIT, LogMomentOrder(m=1))
    assert res.value == pytest.approx(-np.euler_gamma, rel=1e-6)


def test_derived_value_against_monte_carlo():
    value, std_err = mc2d(_quadrant(lambda y, x: x + y ** 2), 40.0, 40.0, 1_000_000, seed=11)
    assert abs(value - 3.0) <= 4 * std_err


def test_corpus_direct_path_against_grid(defaults):
    cfg = QuadConfig(rel_tol=1e-8)
    p = Params(1.0, 1.0, 0.0)
    for entry in defaults["corpus"]:
        f, g = FuncSpec.from_text(entry["f"], 1), FuncSpec.from_text(entry["g"], 1)
        reference = grid2d(_quadrant(lambda y, x: f(y / (x + y)) * g(x + y)), 40.0, 40.0, 1000)
        direct = gamma2d(f, g, p, cfg, mode="direct")
        assert direct.value == pytest.approx(reference, rel=2e-3), entry["name"]
