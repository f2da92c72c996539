"""
Hyperg
Gauss hypergeometric function through its Euler integral, written as a
generalized beta function, and the generalized form

    F_f(a, b; c; z) = Gamma(c) / (Gamma(b) Gamma(c-b)) int_0^1 t^(b-1) (1-t)^(c-b-1) (1-tz)^(-a) f(t) dt

evaluated either as that integral or as a two-dimensional generalized gamma
function divided by the matching gamma-type factor.
"""

import logging
import math
import warnings

import numpy as np
from scipy.special import gammaln

from pygengamma.errors import DomainError, SlowConvergenceWarning
from pygengamma.exprdsl import as_funcspec
from pygengamma.genspecial import Params, gamma_g
from pygengamma.quadcore import QuadConfig, integrate_quadrant, quotient, unit_integral

logger = logging.getLogger(__name__)

HYP_PATHS = ("integral", "gamma2d", "gamma2d_unit")
SLOW_Z = 0.95
SLOW_REL_TOL = 1e-6


def _check(b, c, z):
    if not b > 0:
        raise DomainError("b must be positive, got {}".format(b))
    if not c > b:
        raise DomainError("c must exceed b, got b={}, c={}".format(b, c))
    if not z < 1:
        raise DomainError("z must be below 1, got {}".format(z))


def _config(cfg, z):
    cfg = cfg or QuadConfig()
    if z >= SLOW_Z:
        warnings.warn("z = {} is close to 1, the Euler integrand is nearly singular at t = 1; "
                      "tolerance relaxed to {}".format(z, SLOW_REL_TOL), SlowConvergenceWarning, stacklevel=3)
        cfg = cfg.replace(rel_tol=max(cfg.rel_tol, SLOW_REL_TOL))
    return cfg


def _log_prefactor(b, c):
    return gammaln(c) - gammaln(b) - gammaln(c - b)


def _euler_factor(a, z, t, tc):
    # 1 - t z written as (1 - z) + z (1 - t) keeps its accuracy next to t = 1
    return np.exp(-a * np.log((1.0 - z) + z * tc)) if z > 0 else np.exp(-a * np.log1p(-z * t))


def _euler_kernel(a, z, f, g):
    """Omega(y, x) = ((x + y(1-z)) / (x+y))^(-a) f(y/(x+y)) g(x+y)."""

    def kernel(y, x):
        s = x + y
        base = np.exp(-a * (np.log(x + y * (1.0 - z)) - np.log(s)))
        return base * f(y / s) * g(s)

    kernel.__name__ = "euler[a={}, z={}]".format(a, z)
    return kernel


def hyp2f1(a, b, c, z, cfg=None):
    """Gauss hypergeometric function for c > b > 0 and real z < 1."""
    return hyp2f1_f(None, a, b, c, z, cfg=cfg, path="integral")


def hyp2f1_gamma2d(a, b, c, z, cfg=None, order="su"):
    """
    F(a, b; c; z) = 1 / (Gamma(b) Gamma(c-b)) times the quadrant integral of
    (x + y(1-z))^(-a) (x+y)^a y^(b-1) x^(c-b-1) e^(-x-y).
    """
    _check(b, c, z)
    cfg = _config(cfg, z)
    one = as_funcspec(None, 1)
    p = Params.omega_form(b, c - b, 0.0)
    res = integrate_quadrant(_euler_kernel(a, z, one, one), p.nu, p.omega, p.lam, cfg, order=order)
    return res.scaled(math.exp(-gammaln(b) - gammaln(c - b)))


def hyp2f1_f(f, a, b, c, z, g=None, gamma=0.0, cfg=None, path="integral", order="su"):
    """
    Generalized hypergeometric function F_f(a, b; c; z), for c > b > 0 and z < 1.

    "integral" evaluates the Euler integral with f as multiplier (None gives
    the ordinary function). "gamma2d" divides the quadrant integral with f and
    g by Gamma_g(c+gamma), and "gamma2d_unit" does the same with g = 1. The
    three paths agree since g and gamma cancel.
    """
    if path not in HYP_PATHS:
        raise DomainError("path must be one of {}, got '{}'".format(HYP_PATHS, path))
    _check(b, c, z)
    if not gamma >= 0:
        raise DomainError("gamma must be nonnegative, got {}".format(gamma))
    cfg = _config(cfg, z)
    f = as_funcspec(f, 1)
    log_pre = _log_prefactor(b, c)

    if path == "integral":
        def integrand(t, tc):
            return _euler_factor(a, z, t, tc) * f(t)

        res = unit_integral(integrand, b, c - b, cfg, what="euler[{}]".format(f))
        return res.scaled(math.exp(log_pre))

    p = Params.omega_form(b, c - b, gamma)
    g = as_funcspec(None if path == "gamma2d_unit" else g, 1)
    quadrant = integrate_quadrant(_euler_kernel(a, z, f, g), p.nu, p.omega, p.lam, cfg, order=order)
    if path == "gamma2d_unit":
        return quadrant.scaled(math.exp(log_pre - gammaln(c + gamma)))
    res = quotient(quadrant, gamma_g(g, c + gamma, cfg), path="direct2d")
    return res.scaled(math.exp(log_pre))


def hyp2f1_f_paths(f, a, b, c, z, g=None, gamma=0.0, cfg=None):
    """All three evaluation paths of F_f, keyed by path name."""
    return {path: hyp2f1_f(f, a, b, c, z, g=g, gamma=gamma, cfg=cfg, path=path) for path in HYP_PATHS}
