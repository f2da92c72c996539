"""
Damped
Quadrant integrals damped by e^(-a(x+y)) cos(b(x+y)) or e^(-a(x+y)) sin(b(x+y)),
and their reduction to a generalized beta function times a one dimensional
Laplace-type integral (closed form when g = 1).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from pygengamma.errors import DomainError, OscillationCap
from pygengamma.exprdsl import as_funcspec
from pygengamma.genspecial import beta_f
from pygengamma.quadcore import closed_form, laplace_integral, product, quadrant_integral

logger = logging.getLogger(__name__)

KINDS = ("cos", "sin")
DAMPED_MODES = ("direct", "reduced")
# plain quadrature is only trusted up to this frequency
OSCILLATION_CAP = 8.0

_TRIG = {"cos": np.cos, "sin": np.sin}


@dataclass(frozen=True)
class DampParams:
    a: float
    b: float = 0.0
    s: Optional[float] = None

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("a must be positive, got {}".format(self.a))
        if not np.isfinite(self.b):
            raise DomainError("b must be finite, got {}".format(self.b))
        if self.s is not None and not self.s > 0:
            raise DomainError("s must be positive, got {}".format(self.s))

    @classmethod
    def from_params(cls, p):
        return cls(a=p.a, b=p.b, s=p.total)


def _check_kind(kind):
    if kind not in KINDS:
        raise DomainError("kind must be one of {}, got '{}'".format(KINDS, kind))


def laplace_trig_1d(s, a, b, kind="cos"):
    """
    int_0^inf r^(s-1) e^(-a r) trig(b r) dr
        = Gamma(s) (a^2 + b^2)^(-s/2) trig(s atan2(b, a)).
    """
    _check_kind(kind)
    if not s > 0:
        raise DomainError("s must be positive, got {}".format(s))
    if not a > 0:
        raise DomainError("a must be positive, got {}".format(a))
    if b == 0:
        return math.exp(gammaln(s) - s * math.log(a)) if kind == "cos" else 0.0
    magnitude = math.exp(gammaln(s) - s * math.log(math.hypot(a, b)))
    return magnitude * float(_TRIG[kind](s * math.atan2(b, a)))


def laplace_cos_1d(s, a, b):
    return laplace_trig_1d(s, a, b, "cos")


def laplace_sin_1d(s, a, b):
    return laplace_trig_1d(s, a, b, "sin")


def _damped_radial(g, d, kind, k, cfg):
    trig = _TRIG[kind]
    if g.is_one:
        return closed_form(laplace_trig_1d(k, d.a, d.b, kind))
    return laplace_integral(lambda r: g(r) * trig(d.b * r), k, cfg, rate=d.a,
                            what="{}({}r)[{}]".format(kind, d.b, g))


def gamma2d_damped(f, g, p, d=None, kind="cos", mode="reduced", cfg=None, order="su"):
    """
    Quadrant integral of f(y/(x+y)) g(x+y) y^(alpha-1) x^(beta-1) (x+y)^gamma
    e^(-a(x+y)) trig(b(x+y)).

    The damping comes from d, or from p.a and p.b when d is omitted. The
    "direct" mode integrates over the quadrant and refuses |b| above the
    oscillation cap. The "reduced" mode multiplies B_f by the radial integral.
    """
    _check_kind(kind)
    if mode not in DAMPED_MODES:
        raise DomainError("mode must be one of {}, got '{}'".format(DAMPED_MODES, mode))
    f, g = as_funcspec(f, 1), as_funcspec(g, 1)
    d = d or DampParams.from_params(p)
    if d.s is not None and not math.isclose(d.s, p.total, rel_tol=1e-12):
        raise DomainError("DampParams.s = {} does not match alpha+beta+gamma = {}".format(d.s, p.total))
    if mode == "reduced":
        return product(beta_f(f, p.alpha, p.beta, cfg), _damped_radial(g, d, kind, p.total, cfg),
                       path="factorized")

    if abs(d.b) > OSCILLATION_CAP:
        raise OscillationCap("|b| = {} exceeds the direct quadrature cap {}; use mode='reduced'".format(
            abs(d.b), OSCILLATION_CAP))
    trig = _TRIG[kind]

    def kernel(u, uc, s):
        return f(u) * g(s) * trig(d.b * s)

    return quadrant_integral(kernel, p.alpha, p.beta, p.gamma, cfg, rate=d.a, order=order,
                             what="damped-{}[{}, {}]".format(kind, f, g))
