"""
Errors
Exception hierarchy shared by every pygengamma module.
"""


class GenGammaError(Exception):
    """Base class for all pygengamma errors."""


class DomainError(GenGammaError, ValueError):
    """A parameter lies outside the range where the quantity is defined."""


class ConfigError(GenGammaError, ValueError):
    """A configuration file or command line option is invalid."""


class ParseError(GenGammaError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = "{} (at position {})".format(message, position)
        super().__init__(message)


class EvalError(GenGammaError, ArithmeticError):
    """
    Evaluation produced a non-finite value.
    `node` is the offending expression node (or a description of the callable).
    """

    def __init__(self, message, node=None):
        self.node = node
        super().__init__(message)


class NonConvergent(GenGammaError, ArithmeticError):
    """
    Refinement stopped at the level cap with the error estimate above tolerance.
    `value`, `err_est` and `n_evals` hold the last iterate.
    """

    def __init__(self, message, value=None, err_est=None, n_evals=None):
        self.value = value
        self.err_est = err_est
        self.n_evals = n_evals
        super().__init__(message)


class Inconsistent(GenGammaError, ArithmeticError):
    """Two evaluation paths of the same quantity disagree beyond their error budget."""


class DivisionByZero(GenGammaError, ZeroDivisionError):
    """A denominator is not distinguishable from zero within its error estimate."""


class ZeroProbe(GenGammaError):
    """The separability probe hit a zero of the kernel, the test is inconclusive."""


class OscillationCap(GenGammaError, ValueError):
    """The oscillation frequency is too large for plain quadrature."""


class SlowConvergenceWarning(UserWarning):
    pass
