"""
Logmoments
Two-dimensional generalized gamma integrals with the extra weight

    (log(x+y))^l (log x)^n (log y)^m,

evaluated directly over the quadrant or as a double binomial sum of one
dimensional log-weighted integrals, plus the derivative identity of the
classical gamma and beta functions built from the same pieces.
"""

import logging
from dataclasses import dataclass
from math import comb

import numpy as np

from pygengamma.errors import DomainError
from pygengamma.exprdsl import FuncSpec, as_funcspec
from pygengamma.genspecial import beta_f, combine, gamma2d_factorized, gamma_g
from pygengamma.quadcore import EvalResult, QuadConfig, laplace_integral, product, quadrant_integral, unit_integral

logger = logging.getLogger(__name__)

MAX_TOTAL_ORDER = 6
MAX_CLASSICAL_ORDER = 3
# log singularities slow the refinement down, identities are compared at this level
REL_TOL = 1e-6
DEFAULT_CONFIG = QuadConfig(rel_tol=1e-8)


@dataclass(frozen=True)
class LogMomentOrder:
    """Powers l of log(x+y), m of log y and n of log x."""

    l: int = 0
    m: int = 0
    n: int = 0

    def __post_init__(self):
        for name in ("l", "m", "n"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise DomainError("{} must be a nonnegative integer, got {}".format(name, value))
        if self.l + self.m + self.n > MAX_TOTAL_ORDER:
            raise DomainError("l + m + n must not exceed {}, got {}".format(
                MAX_TOTAL_ORDER, self.l + self.m + self.n))

    @property
    def total(self):
        return self.l + self.m + self.n

    @property
    def is_zero(self):
        return self.total == 0

    def __str__(self):
        return "({}, {}, {})".format(self.l, self.m, self.n)


def _pow(values, k):
    return values ** k if k else 1.0


def gamma2d_logmoment_direct(f, g, p, order, cfg=None, quad_order="su"):
    """
    Quadrant integral of f(y/(x+y)) g(x+y) (log(x+y))^l (log x)^n (log y)^m
    y^(alpha-1) x^(beta-1) (x+y)^gamma e^(-x-y).

    The logs are formed per node from log s, log u and log(1-u), so that
    log x = log s + log(1-u) and log y = log s + log u stay accurate at both
    ends of the u interval.
    """
    f, g = as_funcspec(f, 1), as_funcspec(g, 1)
    cfg = cfg or DEFAULT_CONFIG

    def kernel(u, uc, s):
        log_s = np.log(s)
        log_x = log_s + np.log(uc)
        log_y = log_s + np.log(u)
        weight = _pow(log_s, order.l) * _pow(log_x, order.n) * _pow(log_y, order.m)
        return f(u) * g(s) * weight

    return quadrant_integral(kernel, p.alpha, p.beta, p.gamma, cfg, order=quad_order,
                             what="logmoment{}[{}, {}]".format(order, f, g))


def log_gamma_g(g, s, k, cfg=None):
    """int_0^inf g(r) (log r)^k r^(s-1) e^(-r) dr."""
    g = as_funcspec(g, 1)
    if k == 0:
        return gamma_g(g, s, cfg)
    return laplace_integral(lambda r: g(r) * np.log(r) ** k, s, cfg, what="log^{}[{}]".format(k, g))


def log_beta_f(f, alpha, beta, p, q, cfg=None):
    """int_0^1 f(x) (log x)^p (log(1-x))^q x^(alpha-1) (1-x)^(beta-1) dx."""
    f = as_funcspec(f, 1)
    if p == 0 and q == 0:
        return beta_f(f, alpha, beta, cfg)

    def integrand(x, xc):
        return f(x) * _pow(np.log(x), p) * _pow(np.log(xc), q)

    return unit_integral(integrand, alpha, beta, cfg, what="log^({}, {})[{}]".format(p, q, f))


def _binomial_sum(order, gamma_factor, beta_factor):
    value = 0.0
    err = 0.0
    n_evals = 0
    levels = 0
    for i in range(order.n + 1):
        for j in range(order.m + 1):
            coef = comb(order.n, i) * comb(order.m, j)
            term = product(gamma_factor(i + j + order.l), beta_factor(order.m - j, order.n - i))
            value += coef * term.value
            err += coef * term.err_est
            n_evals += term.n_evals
            levels = max(levels, term.levels)
    return EvalResult(value=value, err_est=err, n_evals=max(n_evals, 1), path="factorized", levels=levels)


def gamma2d_logmoment_factorized(f, g, p, order, cfg=None):
    """
    Double binomial sum

        sum_i sum_j C(n, i) C(m, j) G_{i+j+l} B_{m-j, n-i}

    with G_k = int g (log r)^k r^(alpha+beta+gamma-1) e^(-r) dr and
    B_{p,q} = int f (log x)^p (log(1-x))^q x^(alpha-1) (1-x)^(beta-1) dx.
    Each distinct factor is integrated once.
    """
    f, g = as_funcspec(f, 1), as_funcspec(g, 1)
    cfg = cfg or DEFAULT_CONFIG
    if order.is_zero:
        return gamma2d_factorized(f, g, p, cfg)
    gammas, betas = {}, {}

    def gamma_factor(k):
        if k not in gammas:
            gammas[k] = log_gamma_g(g, p.total, k, cfg)
        return gammas[k]

    def beta_factor(pp, qq):
        if (pp, qq) not in betas:
            betas[pp, qq] = log_beta_f(f, p.alpha, p.beta, pp, qq, cfg)
        return betas[pp, qq]

    return _binomial_sum(order, gamma_factor, beta_factor)


def gamma2d_logmoment_mirrored(f, g, p, order, cfg=None):
    """
    Log moment of the kernel f(x/(x+y)) g(x+y).

    The beta-type factors become int f(t) (log(1-t))^p (log t)^q t^(beta-1) (1-t)^(alpha-1) dt,
    that is the exponents and the two log powers exchange places.
    """
    f, g = as_funcspec(f, 1), as_funcspec(g, 1)
    cfg = cfg or DEFAULT_CONFIG
    gammas, betas = {}, {}

    def gamma_factor(k):
        if k not in gammas:
            gammas[k] = log_gamma_g(g, p.total, k, cfg)
        return gammas[k]

    def beta_factor(pp, qq):
        if (pp, qq) not in betas:
            betas[pp, qq] = log_beta_f(f, p.beta, p.alpha, qq, pp, cfg)
        return betas[pp, qq]

    return _binomial_sum(order, gamma_factor, beta_factor)


def mirrored_kernel_direct(f, g, p, order, cfg=None, quad_order="su"):
    """Direct counterpart of gamma2d_logmoment_mirrored."""
    f = as_funcspec(f, 1)
    flipped = FuncSpec.from_callable(lambda u: f(1.0 - u), 1, "{}(1-u)".format(f))
    return gamma2d_logmoment_direct(flipped, g, p, order, cfg, quad_order)


"""
Classical gamma and beta derivatives --------------------------------------------------------------
"""


def gamma_derivative(k, s, cfg=None):
    """k-th derivative of the gamma function at s > 0."""
    return log_gamma_g(FuncSpec.one(), s, k, cfg)


def beta_derivative(p, q, alpha, beta, cfg=None):
    """d^p/dbeta^p d^q/dalpha^q B(alpha, beta)."""
    return log_beta_f(FuncSpec.one(), alpha, beta, q, p, cfg)


def classical_derivative_identity(m, n, alpha, beta, cfg=None):
    """
    Residual of

        Gamma^(n)(beta) Gamma^(m)(alpha)
            = sum_j sum_i C(m, j) C(n, i) Gamma^(i+j)(alpha+beta) d^(n-i)/dbeta d^(m-j)/dalpha B(alpha, beta).
    """
    for name, value in (("m", m), ("n", n)):
        if int(value) != value or not 0 <= value <= MAX_CLASSICAL_ORDER:
            raise DomainError("{} must be an integer in [0, {}], got {}".format(name, MAX_CLASSICAL_ORDER, value))
    cfg = cfg or DEFAULT_CONFIG
    lhs = product(gamma_derivative(n, beta, cfg), gamma_derivative(m, alpha, cfg))
    derivs = {}

    def gamma_at_sum(k):
        if k not in derivs:
            derivs[k] = gamma_derivative(k, alpha + beta, cfg)
        return derivs[k]

    terms = [(1.0, lhs)]
    for j in range(m + 1):
        for i in range(n + 1):
            coef = comb(m, j) * comb(n, i)
            term = product(gamma_at_sum(i + j), beta_derivative(n - i, m - j, alpha, beta, cfg))
            terms.append((-float(coef), term))
    return combine("classical_derivative[{}, {}]".format(m, n), *terms)


def gamma_finite_difference(f, g, p, step=1e-4, cfg=None):
    """
    Central difference of the factorized gamma2d in gamma, the counterpart of
    the l = 1 log moment. Needs gamma >= step.
    """
    if p.gamma < step:
        raise DomainError("gamma must be at least the step {} for a central difference".format(step))
    hi = gamma2d_factorized(f, g, p.shifted(gamma=step), cfg)
    lo = gamma2d_factorized(f, g, p.shifted(gamma=-step), cfg)
    return (hi.value - lo.value) / (2.0 * step)


def logmoment_residual(f, g, p, order, cfg=None):
    direct = gamma2d_logmoment_direct(f, g, p, order, cfg)
    factorized = gamma2d_logmoment_factorized(f, g, p, order, cfg)
    return combine("logmoment{}".format(order), (1.0, direct), (-1.0, factorized))