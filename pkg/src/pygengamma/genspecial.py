"""
Genspecial
Generalized gamma and beta functions, the two-dimensional generalized gamma
function and its identities as checkable residuals.

    gamma_g(w)            = int_0^inf g(x) x^(w-1) e^(-x) dx
    beta_f(a, b)          = int_0^1 f(x) x^(a-1) (1-x)^(b-1) dx
    gamma2d(a, b; c)      = quadrant integral of f(y/(x+y)) g(x+y) y^(a-1) x^(b-1) (x+y)^c e^(-x-y)
                          = beta_f(a, b) gamma_g(a + b + c)
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from pygengamma.errors import DomainError, Inconsistent
from pygengamma.exprdsl import FuncSpec, as_funcspec, detect_separable
from pygengamma.quadcore import (
    ORDERS,
    QuadConfig,
    integrate_01_weighted,
    integrate_0inf_weighted,
    integrate_quadrant,
    laplace_batch,
    product,
    quotient,
    unit_integral,
)

logger = logging.getLogger(__name__)

MODES = ("direct", "factorized", "auto")
POLAR_VARIANTS = ("sin", "cos")
SYMMETRY_FORMS = ("mirror", "swap")
INCONSISTENT_FACTOR = 100.0

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Params:
    """
    Real parameters of the generalized functions.

    alpha and beta are the exponents attached to y and x, gamma the exponent
    of (x+y). In the Omega form the same numbers are called nu, omega and lam.
    a and b are the damping rate and frequency used by the damped integrals.
    """

    alpha: float
    beta: float
    gamma: float = 0.0
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("alpha must be positive, got {}".format(self.alpha))
        if not self.beta > 0:
            raise DomainError("beta must be positive, got {}".format(self.beta))
        if not self.gamma >= 0:
            raise DomainError("gamma must be nonnegative, got {}".format(self.gamma))
        if not self.a > 0:
            raise DomainError("a must be positive, got {}".format(self.a))
        if not np.isfinite(self.b):
            raise DomainError("b must be finite, got {}".format(self.b))

    @classmethod
    def omega_form(cls, nu, omega, lam=0.0, **kwargs):
        return cls(alpha=nu, beta=omega, gamma=lam, **kwargs)

    @property
    def nu(self):
        return self.alpha

    @property
    def omega(self):
        return self.beta

    @property
    def lam(self):
        return self.gamma

    @property
    def total(self):
        """alpha + beta + gamma, the argument of the gamma-type factor."""
        return self.alpha + self.beta + self.gamma

    def shifted(self, alpha=0.0, beta=0.0, gamma=0.0):
        return replace(self, alpha=self.alpha + alpha, beta=self.beta + beta, gamma=self.gamma + gamma)

    def swapped(self):
        return replace(self, alpha=self.beta, beta=self.alpha)

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "a": self.a, "b": self.b}


@dataclass
class Residual:
    """Signed residual of an identity together with its error budget."""

    name: str
    value: float
    err_est: float
    scale: float
    terms: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    @property
    def relative(self):
        return abs(self.value) / self.scale if self.scale > 0 else abs(self.value)

    def within_error(self, factor=10.0):
        return abs(self.value) <= factor * self.err_est

    def passes(self, rel_tol):
        return self.relative <= rel_tol or self.within_error()

    def as_dict(self):
        return {"name": self.name, "residual": self.value, "err_est": self.err_est,
                "scale": self.scale, "relative": self.relative}


def combine(name, *terms):
    """
    Residual sum(coef * result) for (coef, EvalResult) pairs.
    The error budget is the coefficient weighted sum of the term errors.
    """
    value = 0.0
    err = 0.0
    scale = 0.0
    parts = {}
    for i, (coef, res) in enumerate(terms):
        contribution = coef * res.value
        value += contribution
        err += abs(coef) * res.err_est
        scale = max(scale, abs(contribution))
        parts["t{}".format(i)] = contribution
    err += 4.0 * _EPS * sum(abs(c) for c in parts.values())
    return Residual(name=name, value=value, err_est=err, scale=scale, terms=parts)


def _funcs(f, g):
    return as_funcspec(f, 1), as_funcspec(g, 1)


def _check_mode(mode):
    if mode not in MODES:
        raise DomainError("mode must be one of {}, got '{}'".format(MODES, mode))


"""
One dimensional functions -------------------------------------------------------------------------
"""


def gamma_g(g, omega, cfg=None):
    """Generalized gamma function: int_0^inf g(x) x^(omega-1) e^(-x) dx."""
    return integrate_0inf_weighted(as_funcspec(g, 1), omega, cfg)


def beta_f(f, alpha, beta, cfg=None):
    """Generalized beta function: int_0^1 f(x) x^(alpha-1) (1-x)^(beta-1) dx."""
    return integrate_01_weighted(as_funcspec(f, 1), alpha, beta, cfg)


def beta_f_halfline(f, alpha, beta, cfg=None):
    """
    Half-line representation of the generalized beta function,

        int_0^inf f(y/(1+y)) y^(alpha-1) (1+y)^(-alpha-beta) dy,

    evaluated through y = t/(1-t), dy = dt/(1-t)^2, on (0, 1).
    """
    f = as_funcspec(f, 1)
    if not (alpha > 0 and beta > 0):
        raise DomainError("alpha and beta must be positive, got {}, {}".format(alpha, beta))

    def integrand(t, tc):
        y = t / tc
        log_y = np.log(t) - np.log(tc)
        log_1py = -np.log(tc)
        log_weight = (alpha - 1.0) * log_y - (alpha + beta) * log_1py + 2.0 * log_1py
        return f(y / (1.0 + y)) * np.exp(log_weight)

    return unit_integral(integrand, 1.0, 1.0, cfg, what="halfline[{}]".format(f))


"""
Two dimensional generalized gamma function --------------------------------------------------------
"""


def separable_kernel(f, g):
    """Omega(y, x) = f(y/(x+y)) g(x+y)."""

    def kernel(y, x):
        s = x + y
        return f(y / s) * g(s)

    kernel.__name__ = "{}*{}".format(f, g)
    return kernel


def gamma2d_direct(f, g, p, cfg=None, order="su"):
    f, g = _funcs(f, g)
    return integrate_quadrant(separable_kernel(f, g), p.alpha, p.beta, p.gamma, cfg, order=order)


def gamma2d_factorized(f, g, p, cfg=None):
    f, g = _funcs(f, g)
    return product(beta_f(f, p.alpha, p.beta, cfg), gamma_g(g, p.total, cfg), path="factorized")


def gamma2d(f, g, p, cfg=None, mode="auto", cross_check=False, order="su"):
    """
    Two-dimensional generalized gamma function of the separable kernel f(u) g(s).

    Parameters
    ----------
    f, g : FuncSpec, str or callable
        The factors of the kernel, f over (0, 1) and g over (0, inf).
    p : Params
    cfg : QuadConfig, optional
    mode : {"direct", "factorized", "auto"}
        "direct" integrates over the quadrant, "factorized" multiplies the
        generalized beta and gamma functions, "auto" picks the factorized path.
    cross_check : bool
        Evaluate both paths and raise Inconsistent when they differ by more
        than 100 times their combined error estimate.
    order : {"su", "us"}
        Iteration order of the direct path.

    Returns
    -------
    EvalResult
    """
    _check_mode(mode)
    f, g = _funcs(f, g)
    if not cross_check:
        if mode == "direct":
            return gamma2d_direct(f, g, p, cfg, order)
        return gamma2d_factorized(f, g, p, cfg)

    direct = gamma2d_direct(f, g, p, cfg, order)
    factorized = gamma2d_factorized(f, g, p, cfg)
    diff = abs(direct.value - factorized.value)
    budget = INCONSISTENT_FACTOR * (direct.err_est + factorized.err_est)
    if diff > budget:
        raise Inconsistent(
            "direct ({:.16g}) and factorized ({:.16g}) paths differ by {:.3g}, above {:.3g}".format(
                direct.value, factorized.value, diff, budget))
    return direct if mode == "direct" else factorized


def gamma2d_omega(Omega, p, cfg=None, reroute=False, order="su", sep_tol=1e-9):
    """
    Two-dimensional generalized gamma function of a general kernel Omega(y, x)
    with exponents nu, omega and lam.

    With reroute=True the kernel is first run through the separability
    detector and, when certified separable, evaluated by the factorized path
    with the extracted factors.
    """
    Omega = as_funcspec(Omega, 2)
    if reroute:
        report = detect_separable(Omega, tol=sep_tol)
        if report.separable:
            logger.debug("kernel %s certified separable (residual %.3g), using the factorized path",
                         Omega, report.max_residual)
            return gamma2d_factorized(report.f_extracted, report.g_extracted, p, cfg)
        logger.debug("kernel %s not separable (%s), integrating over the quadrant", Omega,
                     report.reason or "residual {:.3g}".format(report.max_residual))
    return integrate_quadrant(Omega, p.nu, p.omega, p.lam, cfg, order=order)


def _log_sin_half_pi(t):
    # log sin(pi t / 2) without cancellation for small t
    return math.log(0.5 * np.pi) + np.log(t) + np.log(np.sinc(0.5 * t))


def gamma2d_polar(f, g, p, cfg=None, variant="sin"):
    """
    Polar representation over phi in (0, pi/2), r in (0, inf).

    variant="sin" places y = r sin(phi), x = r cos(phi):

        int int f(sin/(sin+cos)) g(r (sin+cos)) sin^(alpha-1) cos^(beta-1) (sin+cos)^gamma
                e^(-r (sin+cos)) r^(alpha+beta+gamma-1) dr dphi

    and variant="cos" the mirrored placement y = r cos(phi), x = r sin(phi).
    The angle is mapped to t = 2 phi / pi so that the sin/cos powers become
    the algebraic weight of the (0, 1) engine.
    """
    if variant not in POLAR_VARIANTS:
        raise DomainError("variant must be one of {}, got '{}'".format(POLAR_VARIANTS, variant))
    f, g = _funcs(f, g)
    cfg = cfg or QuadConfig()
    inner_cfg = cfg.tightened(4.0)
    k = p.total
    # exponents of sin and cos in the angular weight
    e_sin, e_cos = (p.alpha, p.beta) if variant == "sin" else (p.beta, p.alpha)
    const = (e_sin + e_cos - 2.0) * math.log(0.5 * np.pi) + math.log(0.5 * np.pi)
    state = {"n": 0}

    def angular(t, tc):
        log_sin = _log_sin_half_pi(t)
        log_cos = _log_sin_half_pi(tc)
        sin, cos = np.exp(log_sin), np.exp(log_cos)
        c = sin + cos
        y_part = sin if variant == "sin" else cos
        smooth = np.exp(const + (e_sin - 1.0) * np.log(np.sinc(0.5 * t))
                        + (e_cos - 1.0) * np.log(np.sinc(0.5 * tc)) + p.gamma * np.log(c))
        outer = smooth * f(y_part / c)
        inner, inner_err, inner_l1, n = laplace_batch(lambda r: g(r * c[:, None]), k, inner_cfg, rate=c,
                                                      what="polar[{}]".format(g))
        state["n"] += n
        return outer * inner, np.abs(outer) * inner_err, np.abs(outer) * inner_l1

    res = unit_integral(angular, e_sin, e_cos, cfg, what="polar[{}]".format(f))
    return replace(res, path="direct2d", n_evals=max(state["n"], 1))


def gamma2d_two_sided(f1, f2, g, p, cfg=None, mode="factorized", order="su"):
    """
    Kernel f1(y/(x+y)) f2(x/(x+y)) g(x+y).

    Since x/(x+y) = 1 - u, the kernel is separable with f(u) = f1(u) f2(1-u)
    and the factorized path applies directly.
    """
    if mode not in ("direct", "factorized"):
        raise DomainError("mode must be 'direct' or 'factorized', got '{}'".format(mode))
    f1, f2, g = as_funcspec(f1, 1), as_funcspec(f2, 1), as_funcspec(g, 1)
    if mode == "factorized":
        f = FuncSpec.from_callable(lambda u: f1(u) * f2(1.0 - u), 1, "{}*{}(1-u)".format(f1, f2))
        return gamma2d_factorized(f, g, p, cfg)

    def kernel(y, x):
        s = x + y
        return f1(y / s) * f2(x / s) * g(s)

    kernel.__name__ = "two-sided[{}, {}, {}]".format(f1, f2, g)
    return integrate_quadrant(kernel, p.alpha, p.beta, p.gamma, cfg, order=order)


def _g2d(f, g, p, cfg, mode, order="su"):
    if mode == "direct":
        return gamma2d_direct(f, g, p, cfg, order)
    return gamma2d_factorized(f, g, p, cfg)


"""
Identities as residuals ---------------------------------------------------------------------------
"""


@dataclass
class BetaRecurrence:
    """
    Recurrences of the generalized beta function.

    sum_rule:     B_f(a, b) - B_f(a+1, b) - B_f(a, b+1)
    by_parts:     int f' x^a (1-x)^b - (-a B_f(a, b+1) + b B_f(a+1, b))
    by_parts_alt: int f' x^a (1-x)^b - ((a+b) B_f(a+1, b) - a B_f(a, b))

    The last two are only formed when f' is supplied.
    """

    sum_rule: Residual
    by_parts: Optional[Residual] = None
    by_parts_alt: Optional[Residual] = None

    def __float__(self):
        return float(self.sum_rule.value)

    def residuals(self):
        return [r for r in (self.sum_rule, self.by_parts, self.by_parts_alt) if r is not None]

    def passes(self, rel_tol):
        return all(r.passes(rel_tol) for r in self.residuals())


def residual_beta_recurrence(f, alpha, beta, cfg=None, fprime=None):
    f = as_funcspec(f, 1)
    b00 = beta_f(f, alpha, beta, cfg)
    b10 = beta_f(f, alpha + 1.0, beta, cfg)
    b01 = beta_f(f, alpha, beta + 1.0, cfg)
    out = BetaRecurrence(sum_rule=combine("beta_sum_rule", (1.0, b00), (-1.0, b10), (-1.0, b01)))
    if fprime is not None:
        lhs = beta_f(as_funcspec(fprime, 1), alpha + 1.0, beta + 1.0, cfg)
        out.by_parts = combine("beta_by_parts", (1.0, lhs), (alpha, b01), (-beta, b10))
        out.by_parts_alt = combine("beta_by_parts_alt", (1.0, lhs), (-(alpha + beta), b10), (alpha, b00))
    return out


def residual_gamma2d_recurrence(f, g, p, cfg=None, fprime=None, mode="direct", order="su"):
    """
    Returns the pair of residuals

        G(a+1, b; c) + G(a, b+1; c) - G(a, b; c+1)
        b G(a+1, b; c+1) - a G(a, b+1; c+1) - G_{f', g}(a+1, b+1; c)

    the second one being None when fprime is not given.
    """
    f, g = _funcs(f, g)
    a10 = _g2d(f, g, p.shifted(alpha=1.0), cfg, mode, order)
    a01 = _g2d(f, g, p.shifted(beta=1.0), cfg, mode, order)
    c1 = _g2d(f, g, p.shifted(gamma=1.0), cfg, mode, order)
    first = combine("gamma2d_sum_rule", (1.0, a10), (1.0, a01), (-1.0, c1))
    if fprime is None:
        return first, None
    a11 = _g2d(f, g, p.shifted(alpha=1.0, gamma=1.0), cfg, mode, order)
    b11 = _g2d(f, g, p.shifted(beta=1.0, gamma=1.0), cfg, mode, order)
    deriv = _g2d(as_funcspec(fprime, 1), g, p.shifted(alpha=1.0, beta=1.0), cfg, mode, order)
    second = combine("gamma2d_by_parts", (p.beta, a11), (-p.alpha, b11), (-1.0, deriv))
    return first, second


def residual_ratio_property(f, g, p, cfg=None, mode="direct", order="su"):
    """gamma_g(k) / gamma_g(k+1) - G(a, b; c) / G(a, b; c+1) with k = a + b + c."""
    f, g = _funcs(f, g)
    left = quotient(gamma_g(g, p.total, cfg), gamma_g(g, p.total + 1.0, cfg))
    right = quotient(_g2d(f, g, p, cfg, mode, order), _g2d(f, g, p.shifted(gamma=1.0), cfg, mode, order))
    return combine("ratio_property", (1.0, left), (-1.0, right))


def residual_gprime_recurrence(f, g, gprime, p, cfg=None, mode="direct", order="su"):
    """G(a, b; c+1) - (a+b+c) G(a, b; c) - G_{f, g'}(a, b; c+1)."""
    f, g = _funcs(f, g)
    lhs = _g2d(f, g, p.shifted(gamma=1.0), cfg, mode, order)
    base = _g2d(f, g, p, cfg, mode, order)
    deriv = _g2d(f, as_funcspec(gprime, 1), p.shifted(gamma=1.0), cfg, mode, order)
    return combine("gprime_recurrence", (1.0, lhs), (-p.total, base), (-1.0, deriv))


def gamma_g_recurrence_residual(g, gprime, s, cfg=None):
    """gamma_g(s+1) - s gamma_g(s) - gamma_{g'}(s+1)."""
    g = as_funcspec(g, 1)
    return combine("gamma_g_recurrence", (1.0, gamma_g(g, s + 1.0, cfg)), (-s, gamma_g(g, s, cfg)),
                   (-1.0, gamma_g(gprime, s + 1.0, cfg)))


def residual_symmetry(f, g, p, cfg=None, form="swap", mode="direct", order="su"):
    """
    form="swap": G_f(a, b; c) - G_{f(1-.)}(b, a; c), the kernel written with
    x/(x+y) in place of y/(x+y) and the exponents exchanged.

    form="mirror": G_f(a, b; c) - G_{f(1-.)} with the kernel written as
    f(1 - x/(x+y)), which is the same integrand reached through the
    complementary variable.
    """
    if form not in SYMMETRY_FORMS:
        raise DomainError("form must be one of {}, got '{}'".format(SYMMETRY_FORMS, form))
    f, g = _funcs(f, g)
    base = _g2d(f, g, p, cfg, mode, order)
    if form == "swap":
        flipped = FuncSpec.from_callable(lambda u: f(1.0 - u), 1, "{}(1-u)".format(f))
        other = _g2d(flipped, g, p.swapped(), cfg, mode, order)
    elif mode == "direct":
        def kernel(y, x):
            s = x + y
            return f(1.0 - x / s) * g(s)

        kernel.__name__ = "mirror[{}]".format(f)
        other = integrate_quadrant(kernel, p.alpha, p.beta, p.gamma, cfg, order=order)
    else:
        mirrored = FuncSpec.from_callable(lambda u: f(1.0 - (1.0 - u)), 1, "{}(1-(1-u))".format(f))
        other = gamma2d_factorized(mirrored, g, p, cfg)
    return combine("symmetry_" + form, (1.0, base), (-1.0, other))


def order_residual(Omega, p, cfg=None):
    """Difference between the two iteration orders of the quadrant integral."""
    Omega = as_funcspec(Omega, 2)
    results = [integrate_quadrant(Omega, p.nu, p.omega, p.lam, cfg, order=o) for o in ORDERS]
    return combine("iteration_order", (1.0, results[0]), (-1.0, results[1]))


def classical_reduction(alpha, gamma, cfg=None, mode="direct"):
    """gamma2d with f = g = 1 and alpha = beta, for comparison with the classical closed forms."""
    one = FuncSpec.one()
    return gamma2d(one, one, Params(alpha, alpha, gamma), cfg, mode=mode)
