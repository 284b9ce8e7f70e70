"""Exception taxonomy shared across the package.

The CLI maps these onto its exit codes, so library code should raise the
most specific class that applies.
"""


class FracLabError(Exception):
    """Base class for all package errors."""


class ParameterError(FracLabError, ValueError):
    """A precondition on scalar parameters is violated (s outside (0,1),
    exponent outside its admissible window, nonpositive denominators, ...)."""


class ShapeError(FracLabError, ValueError):
    """Vector/matrix dimensions are inconsistent with the grid."""


class UnsupportedKindError(FracLabError, ValueError):
    """The operation is defined only for one operator kind."""


class NumericsError(FracLabError, RuntimeError):
    """A numerical routine failed (eigensolver non-convergence, singular
    linear solve, Newton breakdown)."""


class NewtonFailure(NumericsError):
    """Newton corrector did not converge; callers typically halve the step."""

    def __init__(self, message, residual_norm=None, iterations=None, near_singular=False):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations
        self.near_singular = near_singular


class BranchSwitchFailure(NumericsError):
    """The corrector fell back to the trivial solution; retry with a smaller
    seed amplitude."""


class ConfigError(FracLabError, ValueError):
    """An experiment configuration violates a module precondition."""
