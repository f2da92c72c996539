"""
Quadcore
Numerical integration engines every other module builds on.

- a double exponential (tanh-sinh) rule on (0, 1) with the algebraic weight
  x^(alpha-1) (1-x)^(beta-1) applied in log-space,
- a truncated rule for (0, inf) with the weight r^(s-1) e^(-rate r),
- the iterated quadrant scheme in (u, s) coordinates, x = s(1-u), y = s u.

Integrands are vectorised: they receive numpy arrays of nodes and return
arrays of the same (broadcast) shape. Integrands are never evaluated at the
end points of the open domain.
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from pygengamma.errors import DivisionByZero, DomainError, EvalError, NonConvergent

logger = logging.getLogger(__name__)

PATHS = ("direct1d", "direct2d", "factorized", "closed_form", "series")
ORDERS = ("su", "us")

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny
_ONE_MINUS = np.nextafter(1.0, 0.0)

# t-window of the tanh-sinh map and its first step
_T_LIMIT = 8.0
_H0 = 0.5
_MIN_LEVELS = 3
# dynamic range (in nats) kept below the peak of the weight
_WINDOW_NATS = 50.0
_MAX_RADIUS_DOUBLINGS = 4
# rounding floor of a row, relative to the largest row of its batch
_POOLED_EPS = 16.0 * _EPS


@dataclass(frozen=True)
class QuadConfig:
    """
    Tolerances shared by all engines.

    Parameters
    ----------
    rel_tol : float
        Relative tolerance, measured against the L1 norm of the integrand
        (equal to |value| for integrands of one sign).
    abs_tol : float
        Absolute floor of the tolerance.
    max_levels : int
        Number of step halvings allowed after the initial level, 1..20.
    trunc_eps : float
        Tail cut-off of the semi-infinite engine, relative to the integral.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 0.0
    max_levels: int = 10
    trunc_eps: float = 1e-16

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive, got {}".format(self.rel_tol))
        if not self.abs_tol >= 0:
            raise DomainError("abs_tol must be nonnegative, got {}".format(self.abs_tol))
        if int(self.max_levels) != self.max_levels or not 1 <= self.max_levels <= 20:
            raise DomainError("max_levels must be an integer in [1, 20], got {}".format(self.max_levels))
        if not self.trunc_eps > 0:
            raise DomainError("trunc_eps must be positive, got {}".format(self.trunc_eps))

    def replace(self, **changes):
        return replace(self, **changes)

    def tightened(self, factor):
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)


@dataclass(frozen=True)
class EvalResult:
    """Value of an integral with its error estimate and diagnostics."""

    value: float
    err_est: float
    n_evals: int
    truncation_point: Optional[float] = None
    path: str = "direct1d"
    levels: int = 0

    def __post_init__(self):
        if not self.err_est >= 0:
            raise ValueError("err_est must be nonnegative, got {}".format(self.err_est))
        if self.n_evals < 1:
            raise ValueError("n_evals must be at least 1, got {}".format(self.n_evals))
        if self.path not in PATHS:
            raise ValueError("unknown path '{}'".format(self.path))

    def scaled(self, factor, path=None):
        return replace(self, value=self.value * factor, err_est=self.err_est * abs(factor),
                       path=path or self.path)

    def with_path(self, path):
        return replace(self, path=path)

    def as_dict(self):
        return asdict(self)


def product(*results, path="factorized"):
    """Product of independent results with first order error propagation."""
    value = 1.0
    for res in results:
        value *= res.value
    err = 0.0
    for i, res in enumerate(results):
        others = 1.0
        for j, other in enumerate(results):
            if j != i:
                others *= abs(other.value)
        err += res.err_est * others
    err += _EPS * abs(value)
    trunc = [r.truncation_point for r in results if r.truncation_point is not None]
    return EvalResult(
        value=value,
        err_est=err,
        n_evals=sum(r.n_evals for r in results),
        truncation_point=max(trunc) if trunc else None,
        path=path,
        levels=max(r.levels for r in results),
    )


def combined_error(*results):
    return sum(r.err_est for r in results)


def quotient(num, den, path=None):
    """num / den with relative errors added; a denominator within its own error of zero is rejected."""
    if abs(den.value) <= den.err_est or den.value == 0.0:
        raise DivisionByZero("denominator {:.6g} is not distinguishable from zero (err_est {:.3g})".format(
            den.value, den.err_est))
    value = num.value / den.value
    err = (num.err_est + abs(value) * den.err_est) / abs(den.value)
    return EvalResult(
        value=value,
        err_est=err + _EPS * abs(value),
        n_evals=num.n_evals + den.n_evals,
        truncation_point=num.truncation_point,
        path=path or num.path,
        levels=max(num.levels, den.levels),
    )


def closed_form(value):
    value = float(value)
    return EvalResult(value=value, err_est=4 * _EPS * abs(value), n_evals=1, path="closed_form")


"""
Double exponential rule on (0, 1) -----------------------------------------------------------------
"""


@dataclass
class _Sweep:
    value: np.ndarray
    err: np.ndarray
    l1: np.ndarray
    n_evals: int
    levels: int
    radius: Optional[float] = None


def _nodes(t):
    v = 0.5 * np.pi * np.sinh(t)
    lx = -np.logaddexp(0.0, -2.0 * v)
    lxc = -np.logaddexp(0.0, 2.0 * v)
    ljac = np.log(np.pi * np.cosh(t)) + lx + lxc
    x = np.clip(np.exp(lx), _TINY, _ONE_MINUS)
    xc = np.clip(np.exp(lxc), _TINY, _ONE_MINUS)
    return x, xc, lx, lxc, ljac


def _window(logweight):
    """Part of the t axis where the weighted Jacobian is not negligible."""
    step = 1.0 / 16.0
    t = np.arange(-_T_LIMIT, _T_LIMIT + 0.5 * step, step)
    _, _, lx, lxc, ljac = _nodes(t)
    with np.errstate(all="ignore"):
        lw = np.asarray(ljac + logweight(lx, lxc), dtype=float)
    lw = np.where(np.isnan(lw), -np.inf, lw)
    lw = lw.reshape(-1, t.size)
    peak = lw.max(axis=1, keepdims=True)
    if not np.isfinite(peak).any():
        return -step, step
    keep = (lw > peak - _WINDOW_NATS).any(axis=0)
    idx = np.nonzero(keep)[0]
    left = max(t[idx[0]] - step, -_T_LIMIT)
    right = min(t[idx[-1]] + step, _T_LIMIT)
    return left, right


def _grid(left, right, h, odd):
    j = np.arange(math.ceil(left / h), math.floor(right / h) + 1)
    if odd:
        j = j[j % 2 != 0]
    return j * h


def _describe(func):
    return getattr(func, "__name__", None) or repr(func)


def _tanh_sinh(func, logweight, cfg, what=None):
    """
    Integrate func(x, 1-x) times exp(logweight(log x, log(1-x))) over (0, 1).

    func may return a values array, a (values, errors) pair or a
    (values, errors, l1) triple: errors are absolute error estimates of
    nested integrals and l1 their L1 norms, which then replace |values| in
    the norm of this integral. Values are summed over the last axis, so a
    (rows, n) array integrates `rows` integrands on the same nodes. Rows of
    one batch share an absolute noise floor set by the largest row.
    """
    left, right = _window(logweight)
    counts = {"n": 0}

    def contribution(t):
        x, xc, lx, lxc, ljac = _nodes(t)
        with np.errstate(all="ignore"):
            w = np.exp(ljac + logweight(lx, lxc))
        w = np.where(np.isnan(w), 0.0, w)
        out = func(x, xc)
        if not isinstance(out, tuple):
            out = (out,)
        vals, errs, l1s = out + (None,) * (3 - len(out))
        vals, w = np.broadcast_arrays(np.asarray(vals, dtype=float), w)
        counts["n"] += vals.size
        live = w > 0
        bad = live & ~np.isfinite(vals)
        if bad.any():
            where = x[np.nonzero(bad)[-1][0]]
            raise EvalError("non-finite integrand value at x = {!r} in {}".format(
                where, what or _describe(func)), node=what or _describe(func))
        with np.errstate(all="ignore"):
            terms = np.where(live, w * vals, 0.0)
        s = terms.sum(axis=-1)
        if l1s is None:
            a = np.abs(terms).sum(axis=-1)
        else:
            l1s = np.broadcast_to(np.asarray(l1s, dtype=float), vals.shape)
            a = np.where(live, w * l1s, 0.0).sum(axis=-1)
        if errs is None:
            e = np.zeros_like(s)
        else:
            errs = np.broadcast_to(np.asarray(errs, dtype=float), vals.shape)
            e = np.where(live, w * errs, 0.0).sum(axis=-1)
        return s, a, e

    h = _H0
    total, l1, inner = contribution(_grid(left, right, h, odd=False))
    previous = h * total
    for level in range(1, cfg.max_levels + 1):
        h *= 0.5
        s, a, e = contribution(_grid(left, right, h, odd=True))
        total = total + s
        l1 = l1 + a
        inner = inner + e
        value = h * total
        norm = h * l1
        diff = np.abs(value - previous) + h * inner
        floor = 4.0 * _EPS * norm
        if np.ndim(norm) and np.size(norm) > 1:
            floor = np.maximum(floor, _POOLED_EPS * np.max(norm))
        tol = np.maximum(cfg.rel_tol * norm, cfg.abs_tol)
        if level >= min(_MIN_LEVELS, cfg.max_levels) and np.all(diff <= np.maximum(tol, floor)):
            logger.debug("tanh-sinh converged at level %d with %d evaluations", level, counts["n"])
            return _Sweep(value, diff + floor, norm, counts["n"], level)
        previous = value
    worst = float(np.max(diff - tol))
    raise NonConvergent(
        "tanh-sinh rule did not converge in {} levels (error excess {:.3e})".format(cfg.max_levels, worst),
        value=value, err_est=diff + floor, n_evals=counts["n"])


"""
Semi-infinite rule --------------------------------------------------------------------------------
"""


def initial_radius(s, trunc_eps):
    """Truncation radius guess for the weight r^(s-1) e^(-r)."""
    return max(40.0, s + 20.0 * math.sqrt(s) + math.log(1.0 / trunc_eps))


def _values_only(out):
    return out[0] if isinstance(out, tuple) else out


def _laplace(func, s, cfg, rate=1.0, what=None):
    """
    Integrate func(r) r^(s-1) e^(-rate r) over (0, inf).

    rate may be an array of shape (rows,), in which case func receives
    nodes of shape (rows, n) and each row is integrated with its own rate.
    The domain is cut at rho = rate r = R and the cut is verified by sampling
    the envelope on [R, 2R]; R doubles until the envelope is negligible.
    """
    rate = np.asarray(rate, dtype=float)
    if rate.ndim:
        rate = rate.reshape(-1, 1)
    log_rate = np.log(rate)
    radius = initial_radius(s, cfg.trunc_eps)
    evals = 0
    for attempt in range(_MAX_RADIUS_DOUBLINGS + 1):
        scale = radius

        def unit(x, xc, scale=scale):
            return func(scale * x / rate)

        def logweight(lx, lxc, scale=scale):
            lrho = math.log(scale) + lx
            return (s - 1.0) * lrho - scale * np.exp(lx) + math.log(scale) - s * log_rate

        sweep = _tanh_sinh(unit, logweight, cfg, what=what)
        evals += sweep.n_evals

        rho = scale * np.linspace(1.0, 2.0, 9)
        with np.errstate(all="ignore"):
            hv = np.abs(np.asarray(_values_only(func(rho / rate)), dtype=float))
            hv = np.broadcast_to(hv, np.broadcast(rho / rate, hv).shape)
            env = hv * np.exp((s - 1.0) * np.log(rho) - rho - s * log_rate)
        evals += hv.size
        env = np.where(np.isnan(env), np.inf, env)
        tail = 2.0 * env.max(axis=-1)
        ref = np.maximum(sweep.l1, cfg.abs_tol)
        if np.all(tail <= cfg.trunc_eps * ref) or np.all(tail <= _TINY):
            sweep.err = sweep.err + tail
            sweep.n_evals = evals
            sweep.radius = scale
            return sweep
        logger.debug("tail envelope above trunc_eps at R = %.4g, doubling the radius", scale)
        radius *= 2.0
    raise NonConvergent(
        "integrand does not decay fast enough: tail still above trunc_eps at R = {:.4g}".format(radius / 2),
        value=sweep.value, err_est=sweep.err, n_evals=evals)


def _check_positive(**values):
    for name, value in values.items():
        if not value > 0:
            raise DomainError("{} must be positive, got {}".format(name, value))


def _to_result(sweep, path, truncation_point=None):
    return EvalResult(
        value=float(sweep.value),
        err_est=float(sweep.err),
        n_evals=max(int(sweep.n_evals), 1),
        truncation_point=truncation_point,
        path=path,
        levels=sweep.levels,
    )


"""
Public 1D engines ---------------------------------------------------------------------------------
"""


def unit_integral(func, alpha, beta, cfg=None, what=None):
    """
    Integral of func(x, 1-x) x^(alpha-1) (1-x)^(beta-1) over (0, 1).

    func receives both x and its complement, computed without cancellation,
    so integrands with log(1-x) stay accurate next to x = 1.
    """
    cfg = cfg or QuadConfig()
    _check_positive(alpha=alpha, beta=beta)

    def logweight(lx, lxc):
        return (alpha - 1.0) * lx + (beta - 1.0) * lxc

    return _to_result(_tanh_sinh(func, logweight, cfg, what=what), "direct1d")


def laplace_integral(func, s, cfg=None, rate=1.0, what=None):
    """Integral of func(r) r^(s-1) e^(-rate r) over (0, inf), rate > 0."""
    cfg = cfg or QuadConfig()
    _check_positive(s=s, rate=rate)
    sweep = _laplace(func, s, cfg, rate=rate, what=what)
    return _to_result(sweep, "direct1d", truncation_point=sweep.radius / rate)


def laplace_batch(func, s, cfg, rate=1.0, what=None):
    """Row-wise version of laplace_integral: returns (values, errors, l1 norms, n_evals)."""
    _check_positive(s=s)
    if np.any(np.asarray(rate) <= 0):
        raise DomainError("rate must be positive")
    sweep = _laplace(func, s, cfg, rate=rate, what=what)
    return sweep.value, sweep.err, sweep.l1, sweep.n_evals


def integrate_01_weighted(h, alpha, beta, cfg=None):
    """Integral of h(x) x^(alpha-1) (1-x)^(beta-1) over (0, 1)."""
    return unit_integral(lambda x, xc: h(x), alpha, beta, cfg, what=_describe(h))


def integrate_0inf_weighted(h, s, cfg=None):
    """
    Integral of h(x) x^(s-1) e^(-x) over (0, inf).
    The truncation radius used is reported as `truncation_point`.
    """
    return laplace_integral(h, s, cfg, what=_describe(h))


"""
Quadrant engine -----------------------------------------------------------------------------------
"""


def quadrant_integral(kernel, nu, omega, lam, cfg=None, rate=1.0, order="su", what=None):
    """
    Integral over the open quadrant in (u, s) coordinates,

        int_0^1 int_0^inf K(u, 1-u, s) u^(nu-1) (1-u)^(omega-1) s^(nu+omega+lam-1) e^(-rate s) ds du,

    which is the quadrant integral of Omega(y, x) y^(nu-1) x^(omega-1) (x+y)^lam e^(-rate(x+y))
    when K(u, 1-u, s) = Omega(s u, s (1-u)).

    order="su" integrates s inside and u outside, order="us" the reverse.
    Inner integrals run at a quarter of the tolerance so that their error
    budget leaves room for the outer refinement.
    """
    cfg = cfg or QuadConfig()
    _check_positive(nu=nu, omega=omega, rate=rate)
    if not lam >= 0:
        raise DomainError("lam must be nonnegative, got {}".format(lam))
    if order not in ORDERS:
        raise DomainError("order must be one of {}, got '{}'".format(ORDERS, order))
    inner_cfg = cfg.tightened(4.0)
    k = nu + omega + lam
    state = {"n": 0, "radius": 0.0}

    def evaluate(u, uc, s):
        vals = np.asarray(kernel(u, uc, s), dtype=float)
        return np.broadcast_to(vals, np.broadcast(u, s).shape)

    def u_logweight(lx, lxc):
        return (nu - 1.0) * lx + (omega - 1.0) * lxc

    if order == "su":
        def outer(u, uc):
            uu, uuc = u[:, None], uc[:, None]
            sweep = _laplace(lambda s: evaluate(uu, uuc, s), k, inner_cfg, rate=rate, what=what)
            state["n"] += sweep.n_evals
            state["radius"] = max(state["radius"], sweep.radius / rate)
            return sweep.value, sweep.err, sweep.l1

        sweep = _tanh_sinh(outer, u_logweight, cfg, what=what)
    else:
        def outer(s):
            ss = np.asarray(s, dtype=float)[:, None]
            sweep = _tanh_sinh(lambda x, xc: evaluate(x, xc, ss), u_logweight, inner_cfg, what=what)
            state["n"] += sweep.n_evals
            return sweep.value, sweep.err, sweep.l1

        sweep = _laplace(outer, k, cfg, rate=rate, what=what)
        state["radius"] = sweep.radius / rate
    logger.debug("quadrant integral (%s) used %d kernel evaluations", order, state["n"])
    return EvalResult(
        value=float(sweep.value),
        err_est=float(sweep.err),
        n_evals=max(state["n"], 1),
        truncation_point=state["radius"],
        path="direct2d",
        levels=sweep.levels,
    )


def integrate_quadrant(Omega, nu, omega, lam, cfg=None, order="su"):
    """
    Quadrant integral of Omega(y, x) y^(nu-1) x^(omega-1) (x+y)^lam e^(-x-y).

    Omega is a two variable FuncSpec (or callable) called as Omega(y, x).
    """

    def kernel(u, uc, s):
        return Omega(s * u, s * uc)

    return quadrant_integral(kernel, nu, omega, lam, cfg, order=order, what=_describe(Omega))
