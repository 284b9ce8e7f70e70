"""Uniform interior grids on an interval and fractional-order parameters.

The convention throughout the package: the domain is an open interval
(a, b), discretized by N interior nodes

    x_i = a + i h,   i = 1..N,   h = (b - a) / (N + 1),

and every discrete function is extended by zero outside (a, b).  The
boundary points a = x_0 and b = x_[N+1] carry the value 0 and are not
unknowns.  This exterior-zero convention is part of the grid contract: the
nonlocal operator built on such a grid sees the zero exterior exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

_SPACING_RTOL = 1e-14


def normalization_constant(n: int, s: float) -> float:
    """Normalization constant of the singular-integral fractional Laplacian,

        C(n, s) = s 2^{2s} Gamma(s + n/2) / (pi^{n/2} Gamma(1 - s)).

    Strictly positive for n >= 1 and 0 < s < 1.
    """
    if not 0.0 < s < 1.0:
        raise ParameterError(f"fractional order s must lie in (0,1), got {s}")
    if n < 1 or int(n) != n:
        raise ParameterError(f"dimension n must be a positive integer, got {n}")
    return (
        s
        * 2.0 ** (2.0 * s)
        * math.gamma(s + n / 2.0)
        / (math.pi ** (n / 2.0) * math.gamma(1.0 - s))
    )


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Uniform interior grid on (a, b) with the exterior-zero convention."""

    a: float
    b: float
    N: int
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.a < self.b:
            raise ParameterError(f"need a < b, got a={self.a}, b={self.b}")
        if self.N < 2 or int(self.N) != self.N:
            raise ParameterError(f"interior node count N must be an integer >= 2, got {self.N}")
        h = (self.b - self.a) / (self.N + 1)
        nodes = self.a + h * np.arange(1, self.N + 1)
        nodes.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nodes", nodes)
        spacing = np.diff(nodes)
        if not np.all(np.abs(spacing - h) <= _SPACING_RTOL * (self.b - self.a)):
            raise ParameterError("grid spacing is not uniform to within tolerance")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class FracParams:
    """Fractional order s in (0,1) for dimension n (fixed to 1 in this package).

    `theorem_range_flag` marks the parameter window 2s < n < 4s in which the
    principal-eigenvalue bifurcation analysis applies; for n = 1 this is
    exactly 0.25 < s < 0.5.  Experiments outside the window still run but
    are labeled exploratory by callers.
    """

    s: float
    n: int = 1
    C_ns: float = None  # type: ignore[assignment]
    theorem_range_flag: bool = field(init=False)

    def __post_init__(self):
        c_exact = normalization_constant(self.n, self.s)
        if self.C_ns is None:
            object.__setattr__(self, "C_ns", c_exact)
        elif abs(self.C_ns - c_exact) > 1e-12 * abs(c_exact):
            raise ParameterError(
                f"C_ns={self.C_ns} disagrees with the closed-form value {c_exact}"
            )
        object.__setattr__(
            self, "theorem_range_flag", 2.0 * self.s < self.n < 4.0 * self.s
        )

    def critical_exponent(self) -> float:
        """Sobolev critical exponent 2n/(n - 2s); +inf when n <= 2s."""
        if self.n <= 2.0 * self.s:
            return math.inf
        return 2.0 * self.n / (self.n - 2.0 * self.s)
