# SPDX-FileCopyrightText: 2024-present JoseMariaGarciaMarquez <josemariagarciamarquez2.72@gmail.com>
#
# SPDX-License-Identifier: MIT
from pygengamma.__about__ import __version__
from pygengamma.errors import (
    ConfigError,
    DivisionByZero,
    DomainError,
    EvalError,
    GenGammaError,
    Inconsistent,
    NonConvergent,
    OscillationCap,
    ParseError,
    SlowConvergenceWarning,
    ZeroProbe,
)
from pygengamma.quadcore import EvalResult, QuadConfig
from pygengamma.exprdsl import FuncSpec, detect_separable, parse
from pygengamma.genspecial import (
    Params,
    beta_f,
    gamma2d,
    gamma2d_direct,
    gamma2d_factorized,
    gamma2d_omega,
    gamma_g,
)
from pygengamma.damped import gamma2d_damped
from pygengamma.hyperg import hyp2f1, hyp2f1_f
from pygengamma.seriesrep import SeriesSpec, beta_f_series, gamma2d_series
