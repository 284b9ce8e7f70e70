"""Discrete Picone-type inequality and its elementary scalar core.

The scalar inequality: for any a, b and c, d > 0,

    (c - d) (a^2/c - b^2/d) <= (a - b)^2,

with equality exactly when a d = b c.  Applied edgewise to the restricted
operator's nonnegative pair weights it yields the discrete inequality

    (v + eps)^T S_h (u^2/(v + eps)) <= u^T S_h u,

because S_h decomposes as sum of edge terms w_ij (e_i - e_j)(e_i - e_j)^T
plus a positive diagonal (exterior tail and boundary pieces), and the
diagonal terms contribute equally to both sides.  The inequality is exact
up to roundoff, which is why the property runs assert a tiny relative
slack floor rather than a discretization tolerance.

The spectral kind can carry sign-indefinite off-diagonal entries, for
which no such edgewise argument exists; `discrete_picone` therefore
rejects it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UnsupportedKindError
from .operators import OperatorKind, OperatorPair, energy
from .spectral import Spectrum

#: relative slack floor for the discrete inequality (roundoff in large sums)
PICONE_SLACK_RTOL = 1e-10
#: absolute-plus-relative tolerance for the scalar inequality
ELEMENTARY_TOL = 1e-12


def elementary_inequality_check(a: float, b: float, c: float, d: float):
    """Evaluate both sides of the scalar inequality; returns (lhs, rhs, holds)."""
    if not (c > 0.0 and d > 0.0):
        raise ParameterError(f"need c > 0 and d > 0, got c={c}, d={d}")
    lhs = (c - d) * (a * a / c - b * b / d)
    rhs = (a - b) ** 2
    return lhs, rhs, bool(lhs <= rhs + ELEMENTARY_TOL * (1.0 + abs(rhs)))


@dataclass(frozen=True)
class ElementaryRunReport:
    trials: int
    failures: int
    worst_excess: float      # max(lhs - rhs - tol), <= 0 when all hold
    confirmed_failures: int  # failures that survive extended precision

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "worst_excess": self.worst_excess,
            "confirmed_failures": self.confirmed_failures,
        }


def elementary_property_run(trials: int, rng: np.random.Generator,
                            ab_scale: float = 10.0,
                            cd_range=(1e-6, 1e6)) -> ElementaryRunReport:
    """Vectorized random sweep of the scalar inequality.

    a, b are uniform on [-ab_scale, ab_scale]; c, d log-uniform on cd_range.
    Tuples flagged in double precision are re-evaluated in extended
    precision before they count as failures: near the equality manifold
    a d = b c the double-precision evaluation of the pinned formulas can
    exceed the tolerance by pure roundoff.
    """
    a = rng.uniform(-ab_scale, ab_scale, trials)
    b = rng.uniform(-ab_scale, ab_scale, trials)
    lo, hi = np.log(cd_range[0]), np.log(cd_range[1])
    c = np.exp(rng.uniform(lo, hi, trials))
    d = np.exp(rng.uniform(lo, hi, trials))
    lhs = (c - d) * (a * a / c - b * b / d)
    rhs = (a - b) ** 2
    excess = lhs - rhs - ELEMENTARY_TOL * (1.0 + np.abs(rhs))
    flagged = np.flatnonzero(excess > 0.0)
    confirmed = 0
    for i in flagged:
        al, bl, cl, dl = (np.longdouble(v[i]) for v in (a, b, c, d))
        lhs_l = (cl - dl) * (al * al / cl - bl * bl / dl)
        rhs_l = (al - bl) ** 2
        if lhs_l > rhs_l + np.longdouble(ELEMENTARY_TOL) * (1 + abs(rhs_l)):
            confirmed += 1
    return ElementaryRunReport(
        trials=trials,
        failures=int(len(flagged)),
        worst_excess=float(excess.max()) if trials else float("-inf"),
        confirmed_failures=confirmed,
    )


# ---------------------------------------------------------------------------
# discrete inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PiconePair:
    """Test pair (u, v) with the positive shift eps; requires min(v) + eps > 0."""

    u: np.ndarray
    v: np.ndarray
    eps: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != v.shape or u.ndim != 1:
            raise ParameterError("u and v must be one-dimensional with equal length")
        if self.eps < 0.0:
            raise ParameterError(f"shift eps must be >= 0, got {self.eps}")
        if not np.min(v) + self.eps > 0.0:
            raise ParameterError("v + eps must be strictly positive entrywise")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def shifted_v(self) -> np.ndarray:
        return self.v + self.eps

    @property
    def quotient(self) -> np.ndarray:
        return self.u ** 2 / self.shifted_v


def discrete_picone(pair: OperatorPair, p: PiconePair):
    """Both sides of the discrete inequality on a restricted pair.

    Returns (lhs, rhs, slack) with lhs = energy(v+eps, u^2/(v+eps)),
    rhs = energy(u, u), slack = rhs - lhs >= -PICONE_SLACK_RTOL (1 + |rhs|).
    """
    if pair.kind is not OperatorKind.RESTRICTED:
        raise UnsupportedKindError(
            "the discrete inequality requires nonnegative pair weights; "
            "only the restricted kind provides them"
        )
    vv = p.shifted_v
    w = p.quotient
    lhs = energy(pair, vv, w)
    rhs = energy(pair, p.u, p.u)
    return lhs, rhs, rhs - lhs


def pairwise_slack_bruteforce(pair: OperatorPair, p: PiconePair) -> float:
    """Direct summation oracle for the slack:

        sum_{i<j} w_ij [ (u_i-u_j)^2 - (v_i-v_j)(u_i^2/v_i - u_j^2/v_j) ]

    with w_ij recovered entrywise from the operator matrix.  The diagonal
    (tail) terms cancel between the two sides and do not appear.
    """
    if pair.kind is not OperatorKind.RESTRICTED:
        raise UnsupportedKindError("pairwise decomposition needs the restricted kind")
    A = pair.operator_matrix() / pair.params.C_ns
    u, vv, w = p.u, p.shifted_v, p.quotient
    N = len(u)
    total = 0.0
    scale = pair.params.C_ns * pair.grid.h ** (1.0 - 2.0 * pair.params.s)
    for i in range(N):
        for j in range(i + 1, N):
            wij = -A[i, j] * pair.grid.h ** (2.0 * pair.params.s)
            du2 = (u[i] - u[j]) ** 2
            cross = (vv[i] - vv[j]) * (w[i] - w[j])
            total += wij * (du2 - cross)
    return scale * total * pair.grid.h ** (-2.0 * pair.params.s) * pair.grid.h ** (2.0 * pair.params.s)


@dataclass(frozen=True)
class PiconeRunReport:
    trials: int
    failures: int
    worst_slack: float

    def to_dict(self) -> dict:
        return {"trials": self.trials, "failures": self.failures,
                "worst_slack": self.worst_slack}


def picone_property_run(pair: OperatorPair, trials: int,
                        rng: np.random.Generator,
                        u_range=(-1.0, 1.0), v_range=(0.1, 1.0),
                        eps: float = 0.0) -> PiconeRunReport:
    """Batched random sweep of the discrete inequality on one pair."""
    if pair.kind is not OperatorKind.RESTRICTED:
        raise UnsupportedKindError("property run needs the restricted kind")
    N = pair.grid.N
    S = pair.S_h
    U = rng.uniform(*u_range, (trials, N))
    V = rng.uniform(*v_range, (trials, N)) + eps
    W = U ** 2 / V
    rhs = np.einsum("ij,ij->i", U @ S, U)
    lhs = np.einsum("ij,ij->i", V @ S, W)
    slack = rhs - lhs
    bad = slack < -PICONE_SLACK_RTOL * (1.0 + np.abs(rhs))
    return PiconeRunReport(trials=trials, failures=int(bad.sum()),
                           worst_slack=float(slack.min()) if trials else float("inf"))


# ---------------------------------------------------------------------------
# the isolation argument, exhibited numerically
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContradictionReport:
    """Numerical restaging of the argument that rules out a one-signed
    second mode: the energy side is nonnegative by the discrete inequality
    while the eigenvalue identity it would have to equal is negative."""

    eps_values: tuple
    picone_deficits: tuple   # D(eps) = energy(phi1,phi1) - energy(v, phi1^2/v) >= 0
    eigen_identity: float    # lambda_1 - lambda_2 < 0
    contradiction_exhibited: bool

    def to_dict(self) -> dict:
        return {
            "eps_values": list(self.eps_values),
            "picone_deficits": list(self.picone_deficits),
            "eigen_identity": self.eigen_identity,
            "contradiction_exhibited": self.contradiction_exhibited,
        }


def picone_contradiction_demo(pair: OperatorPair, spectrum: Spectrum,
                              eps_factors=(1e-2, 1e-4, 1e-6),
                              mode: int = 2) -> ContradictionReport:
    """Evaluate D(eps) = energy(phi_1, phi_1) - energy(v, phi_1^2 / v) for
    v = |phi_mode| + eps.

    D(eps) >= 0 up to roundoff on a restricted pair (discrete inequality),
    while a one-signed eigenfunction for lambda_mode would force the same
    quantity toward lambda_1 - lambda_mode < 0.
    """
    if len(spectrum) < mode:
        raise ParameterError(f"need at least {mode} eigenpairs, got {len(spectrum)}")
    phi1 = spectrum.modes[:, 0]
    phik = spectrum.modes[:, mode - 1]
    lam1 = float(spectrum.lambdas[0])
    lamk = float(spectrum.lambdas[mode - 1])
    e1 = energy(pair, phi1, phi1)
    deficits = []
    eps_values = []
    scale = float(np.abs(phik).max())
    for f in eps_factors:
        eps = f * scale
        v = np.abs(phik) + eps
        deficits.append(e1 - energy(pair, v, phi1 ** 2 / v))
        eps_values.append(eps)
    tol = PICONE_SLACK_RTOL * (1.0 + abs(e1))
    exhibited = all(d >= -tol for d in deficits) and (lam1 - lamk) < 0.0
    return ContradictionReport(
        eps_values=tuple(eps_values),
        picone_deficits=tuple(deficits),
        eigen_identity=lam1 - lamk,
        contradiction_exhibited=exhibited,
    )
