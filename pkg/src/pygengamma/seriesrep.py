"""
Seriesrep
Series representations of the generalized beta function and of the
two-dimensional generalized gamma function from the Taylor coefficients of f,

    f(x) = sum_{n >= L} a_n x^n,
    B_f(alpha, beta) = Gamma(beta) sum_n a_n Gamma(alpha+n) / Gamma(alpha+beta+n).

Terms are formed from log-gamma differences and summed with numpy's
pairwise summation, so the result does not depend on how the terms were
produced.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln

from pygengamma.errors import DomainError
from pygengamma.exprdsl import FuncSpec, as_funcspec
from pygengamma.genspecial import gamma2d_direct, gamma_g
from pygengamma.quadcore import EvalResult, product, quotient

logger = logging.getLogger(__name__)

# heuristic constant of the tail bound
TAIL_FACTOR = 2.0

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SeriesSpec:
    """
    Taylor coefficients a_L, a_(L+1), ... of f.

    coeffs is either a finite sequence starting at index L, or a rule
    n -> a_n. For a finite sequence N defaults to its length and the series
    is exhausted once every supplied coefficient is used.
    """

    coeffs: Union[Sequence[float], Callable[[int], float]]
    L: int = 0
    N: Optional[int] = None

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 0:
            raise DomainError("L must be a nonnegative integer, got {}".format(self.L))
        if self.is_rule:
            if self.N is None:
                raise DomainError("N is required when the coefficients are given by a rule")
        else:
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
            if not self.coeffs:
                raise DomainError("at least one coefficient is required")
            if self.N is None:
                object.__setattr__(self, "N", len(self.coeffs))
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer, got {}".format(self.N))
        if not np.all(np.isfinite(self.values())):
            raise DomainError("coefficients must be finite")

    @classmethod
    def geometric(cls, ratio, L=1, N=60):
        """a_n = ratio^n."""
        return cls(lambda n: ratio ** n, L=L, N=N)

    @classmethod
    def from_text(cls, text, N=None):
        """
        Parse 'value@index,value@index,...', e.g. '1@1,1@2' for f(x) = x + x^2.
        Missing indices between the smallest and the largest are zero.
        """
        pairs = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                value, index = item.split("@")
                pairs[int(index)] = float(value)
            except ValueError as exc:
                raise DomainError("bad coefficient '{}', expected value@index".format(item)) from exc
        if not pairs:
            raise DomainError("no coefficients in '{}'".format(text))
        first, last = min(pairs), max(pairs)
        return cls([pairs.get(n, 0.0) for n in range(first, last + 1)], L=first, N=N)

    @property
    def is_rule(self):
        return callable(self.coeffs)

    @property
    def exhausted(self):
        """True when the truncated series is the whole (finite) series."""
        return not self.is_rule and self.N >= len(self.coeffs)

    def coefficient(self, n):
        if self.is_rule:
            return float(self.coeffs(n))
        k = n - self.L
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0.0

    def indices(self):
        return np.arange(self.L, self.L + self.N)

    def values(self):
        return np.array([self.coefficient(n) for n in self.indices()], dtype=float)

    @property
    def positive(self):
        return bool(np.all(self.values() > 0))

    def as_function(self):
        """f(x) = sum of the truncated series, as a one variable FuncSpec."""
        n = self.indices()
        a = self.values()

        def evaluate(x):
            x = np.asarray(x, dtype=float)
            return np.sum(a * x[..., None] ** n, axis=-1)

        return FuncSpec.from_callable(evaluate, 1, "series[L={}, N={}]".format(self.L, self.N))


def _check_range(alpha, beta):
    if not (alpha > 1 and beta > 1):
        raise DomainError(
            "series representations are stated for alpha > 1 and beta > 1, got alpha={}, beta={}".format(
                alpha, beta))


def series_terms(sp, alpha, beta):
    """Indices n and terms a_n Gamma(beta) Gamma(alpha+n) / Gamma(alpha+beta+n)."""
    _check_range(alpha, beta)
    n = sp.indices()
    log_ratio = gammaln(beta) + gammaln(alpha + n) - gammaln(alpha + beta + n)
    return n, sp.values() * np.exp(log_ratio)


def tail_bound(sp, alpha, beta):
    """|a_next| Gamma(beta) (alpha + next)^(-beta) C, zero for an exhausted finite series."""
    if sp.exhausted:
        return 0.0
    nxt = sp.L + sp.N
    a_next = abs(sp.coefficient(nxt))
    return TAIL_FACTOR * a_next * float(np.exp(gammaln(beta) - beta * np.log(alpha + nxt)))


def partial_sums(sp, alpha, beta):
    _, terms = series_terms(sp, alpha, beta)
    return np.cumsum(terms)


def beta_f_series(sp, alpha, beta):
    """
    Truncated series for B_f(alpha, beta). The error estimate is the tail
    bound plus a rounding floor.
    """
    _, terms = series_terms(sp, alpha, beta)
    value = float(np.sum(terms))
    err = tail_bound(sp, alpha, beta) + 4.0 * _EPS * float(np.sum(np.abs(terms)))
    return EvalResult(value=value, err_est=err, n_evals=int(sp.N), path="series")


def gamma2d_series(sp, g, p, cfg=None):
    """Gamma_g(alpha+beta+gamma) times the series for B_f."""
    series = beta_f_series(sp, p.alpha, p.beta)
    return product(series, gamma_g(g, p.total, cfg), path="series")


def gamma2d_series_viagamma2d(sp, g, p, cfg=None):
    """
    Gamma_g(k) sum_n a_n G_{1,g}(alpha+n, beta; gamma) / Gamma_g(k+n), k = alpha+beta+gamma,

    each two-dimensional term integrated directly over the quadrant with f = 1.
    """
    _check_range(p.alpha, p.beta)
    g = as_funcspec(g, 1)
    one = FuncSpec.one()
    lead = gamma_g(g, p.total, cfg)
    total = []
    err = 0.0
    n_evals = lead.n_evals
    for n, a_n in zip(sp.indices(), sp.values()):
        if a_n == 0.0:
            continue
        shifted = p.shifted(alpha=float(n))
        two_d = gamma2d_direct(one, g, shifted, cfg)
        term = quotient(two_d, gamma_g(g, shifted.total, cfg))
        total.append(a_n * term.value)
        err += abs(a_n) * term.err_est
        n_evals += term.n_evals
    value = float(np.sum(total)) if total else 0.0
    inner = EvalResult(value=value, err_est=err + tail_bound(sp, p.alpha, p.beta), n_evals=max(n_evals, 1),
                       path="series")
    return product(inner, lead, path="series")
