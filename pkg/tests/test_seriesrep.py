import numpy as np
import pytest

from pygengamma import seriesrep
from pygengamma.errors import DomainError
from pygengamma.genspecial import Params, beta_f, gamma2d
from pygengamma.seriesrep import (
    SeriesSpec,
    beta_f_series,
    gamma2d_series,
    gamma2d_series_viagamma2d,
    partial_sums,
    series_terms,
    tail_bound,
)


def test_from_text():
    sp = SeriesSpec.from_text("1@1,1@3")
    assert sp.L == 1
    assert sp.values().tolist() == [1.0, 0.0, 1.0]
    assert sp.exhausted
    with pytest.raises(DomainError):
        SeriesSpec.from_text("1,2")
    with pytest.raises(DomainError):
        SeriesSpec.from_text(" , ")


def test_spec_validation():
    with pytest.raises(DomainError):
        SeriesSpec(lambda n: 1.0, L=0)
    with pytest.raises(DomainError):
        SeriesSpec([1.0], L=-1)
    with pytest.raises(DomainError):
        SeriesSpec([])


@pytest.mark.parametrize("text, alpha, beta, exact", [
    ("1@1", 2.0, 2.0, 1.0 / 12.0),
    ("1@1,1@2", 3.0, 2.0, 1.0 / 12.0),
    ("1@0", 2.0, 3.0, 1.0 / 12.0),
])
def test_finite_series(text, alpha, beta, exact):
    res = beta_f_series(SeriesSpec.from_text(text), alpha, beta)
    assert res.value == pytest.approx(exact, rel=1e-14)
    assert res.path == "series"
    assert res.err_est < 1e-15


def test_geometric_series_matches_quadrature(cfg):
    sp = SeriesSpec.geometric(0.5, L=1, N=60)
    res = beta_f_series(sp, 2.0, 2.0)
    assert res.value == pytest.approx(beta_f("u/(2-u)", 2.0, 2.0, cfg).value, rel=1e-10)
    assert 0 < tail_bound(sp, 2.0, 2.0) < 1e-18


def test_term_decay():
    _, terms = series_terms(SeriesSpec.geometric(0.5, L=1, N=30), 2.0, 2.0)
    ratios = terms[1:] / terms[:-1]
    assert np.all(ratios[4:] <= 0.6)


def test_partial_sums_increase():
    sp = SeriesSpec.geometric(0.5, L=1, N=40)
    sums = partial_sums(sp, 2.0, 1.5)
    assert sums.shape == (40,)
    assert np.all(np.diff(sums) > 0)
    assert sums[-1] == pytest.approx(beta_f_series(sp, 2.0, 1.5).value, rel=1e-14)
    assert sums[-1] == pytest.approx(beta_f("u/(2-u)", 2.0, 1.5).value, rel=1e-9)


def test_range_check():
    with pytest.raises(DomainError):
        beta_f_series(SeriesSpec.from_text("1@1"), 1.0, 2.0)


def test_gamma2d_series(cfg):
    sp = SeriesSpec.from_text("1@1")
    res = gamma2d_series(sp, "r", Params(2.0, 2.0, 0.0), cfg)
    assert res.value == pytest.approx(2.0, rel=1e-10)


def test_series_forms_agree(cfg):
    sp = SeriesSpec.geometric(0.5, L=1, N=60)
    p = Params(2.0, 2.0, 1.0)
    first = gamma2d_series(sp, "exp(-r)", p, cfg)
    second = gamma2d_series_viagamma2d(sp, "exp(-r)", p, cfg)
    third = gamma2d("u/(2-u)", "exp(-r)", p, cfg, mode="factorized")
    assert first.value == pytest.approx(third.value, rel=1e-9)
    assert second.value == pytest.approx(third.value, rel=1e-9)


@pytest.mark.parametrize("coeffs, exact", [("1@1", 0.5), ("1@1,1@2", 0.8)])
def test_viagamma2d_finite_series(cfg, coeffs, exact):
    res = gamma2d_series_viagamma2d(SeriesSpec.from_text(coeffs), "1", Params(2.0, 2.0, 0.0), cfg)
    assert res.value == pytest.approx(exact, rel=1e-9)
    assert res.path == "series"


def test_viagamma2d_terms_do_not_reuse_gamma_g(cfg, monkeypatch):
    real = seriesrep.gamma_g

    def skewed(g, s, cfg=None):
        return real(g, s, cfg).scaled(1.0 + 0.3 * np.sin(s))

    monkeypatch.setattr(seriesrep, "gamma_g", skewed)
    sp = SeriesSpec.from_text("1@1")
    p = Params(2.0, 2.0, 0.0)
    first = gamma2d_series(sp, "1", p, cfg)
    second = gamma2d_series_viagamma2d(sp, "1", p, cfg)
    # the skew of Gamma_g(5) survives in the term: second / first = 1 / skew(5)
    assert second.value / first.value == pytest.approx(1.0 / (1.0 + 0.3 * np.sin(5.0)), rel=1e-8)


def test_as_function():
    f = SeriesSpec.from_text("1@1,1@2").as_function()
    assert f(0.5) == pytest.approx(0.75)
