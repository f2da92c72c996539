"""
Oracle
Brute-force reference integrators and series sums. They share no code with
quadcore: a midpoint tensor grid, a uniform Monte Carlo estimate and
compensated summation.
"""

import logging
import math

import numpy as np

from pygengamma.errors import DomainError, EvalError, NonConvergent

logger = logging.getLogger(__name__)

MAX_SERIES_TERMS = 100_000


class KahanSum:
    """
    Compensated (Neumaier) running sum.

    Example
    -------
    >>> acc = KahanSum()
    >>> for term in (1.0, 1e100, 1.0, -1e100):
    ...     acc += term
    >>> acc.value
    2.0
    """

    def __init__(self):
        self.total = 0.0
        self.compensation = 0.0

    def add(self, term):
        term = float(term)
        t = self.total + term
        if abs(self.total) >= abs(term):
            self.compensation += (self.total - t) + term
        else:
            self.compensation += (term - t) + self.total
        self.total = t
        return self

    def __iadd__(self, term):
        return self.add(term)

    @property
    def value(self):
        return self.total + self.compensation


def _check_finite(values, what):
    if not np.all(np.isfinite(values)):
        raise EvalError("{} returned a non-finite value on the oracle grid".format(what), node=what)


def grid2d(integrand, x_max, y_max, n, rows_per_chunk=200):
    """
    Midpoint rule with n x n cells on (0, x_max) x (0, y_max).

    integrand is called as integrand(y, x) and carries every weight itself.
    """
    if n < 100:
        raise DomainError("grid2d needs n >= 100, got {}".format(n))
    hx = x_max / n
    hy = y_max / n
    x = (np.arange(n) + 0.5) * hx
    y = (np.arange(n) + 0.5) * hy
    acc = KahanSum()
    what = getattr(integrand, "__name__", repr(integrand))
    for start in range(0, n, rows_per_chunk):
        yy = y[start:start + rows_per_chunk, None]
        with np.errstate(all="ignore"):
            values = np.asarray(integrand(yy, x[None, :]), dtype=float)
        _check_finite(values, what)
        acc += np.sum(values)
    return acc.value * hx * hy


def mc2d(integrand, x_max, y_max, n_samples, seed, batch=100_000):
    """
    Uniform Monte Carlo estimate on (0, x_max) x (0, y_max).

    Returns (value, std_err). The generator is seeded explicitly, so a fixed
    seed reproduces the estimate bit for bit.
    """
    if n_samples < 10_000:
        raise DomainError("mc2d needs at least 10^4 samples, got {}".format(n_samples))
    rng = np.random.default_rng(seed)
    area = x_max * y_max
    what = getattr(integrand, "__name__", repr(integrand))
    s1 = KahanSum()
    s2 = KahanSum()
    remaining = n_samples
    while remaining > 0:
        size = min(batch, remaining)
        x = rng.uniform(0.0, x_max, size)
        y = rng.uniform(0.0, y_max, size)
        with np.errstate(all="ignore"):
            values = np.asarray(integrand(y, x), dtype=float)
        _check_finite(values, what)
        s1 += np.sum(values)
        s2 += np.sum(values * values)
        remaining -= size
    mean = s1.value / n_samples
    var = max(s2.value / n_samples - mean * mean, 0.0)
    return area * mean, area * math.sqrt(var / (n_samples - 1))


def series1d(terms, N, start=0):
    """Compensated sum of terms(n) for n = start, ..., start + N - 1."""
    if N < 1:
        raise DomainError("N must be at least 1, got {}".format(N))
    acc = KahanSum()
    for n in range(start, start + N):
        acc += terms(n)
    return acc.value


def hyp2f1_series(a, b, c, z, tol=1e-16, max_terms=MAX_SERIES_TERMS):
    """
    Pochhammer series sum (a)_n (b)_n z^n / ((c)_n n!) for |z| <= 1, z != 1.

    Stops once the term ratio is below one and the term is below tol times
    the running sum. An alternating series (z < 0) that reaches the term cap
    returns the mean of the last two partial sums.
    """
    if abs(z) > 1 or z == 1:
        raise DomainError("the series oracle needs |z| <= 1 and z != 1, got {}".format(z))
    if c <= 0 and float(c).is_integer():
        raise DomainError("c must not be a nonpositive integer, got {}".format(c))
    acc = KahanSum()
    term = 1.0
    for n in range(max_terms):
        acc += term
        if term == 0.0:
            return acc.value
        nxt = term * (a + n) * (b + n) * z / ((c + n) * (n + 1))
        if abs(nxt) <= tol * abs(acc.value) and abs(nxt) <= abs(term):
            return acc.value + nxt
        term = nxt
    if z < 0:
        logger.debug("alternating hypergeometric series averaged after %d terms", max_terms)
        return acc.value + 0.5 * term
    raise NonConvergent("hypergeometric series did not converge in {} terms".format(max_terms),
                        value=acc.value, err_est=abs(term), n_evals=max_terms)
