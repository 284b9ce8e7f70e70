"""Generalized eigenanalysis of the pair (S_h, T_h).

Solves S_h phi = lambda T_h phi, certifies the qualitative spectral
structure (positivity and simplicity of the principal eigenvalue, its
isolation under refinement, sign changes and nodal-measure scaling of the
higher modes), and evaluates the trivial-branch index sign(det(S - lambda T))
through matrix inertia.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericsError, ParameterError, ShapeError
from .grids import Grid1D
from .operators import OperatorKind, OperatorPair, energy, mass

#: relative coincidence tolerance used when the index degenerates to 0
INDEX_EIGENVALUE_TOL = 1e-9


@dataclass(eq=False)
class Spectrum:
    """Ordered generalized eigenpairs with mass-unit normalization.

    `modes[:, k]` is the (k+1)-th eigenvector, normalized to
    phi^T T_h phi = 1 with a deterministic sign fix: the principal mode is
    positive at the middle node, higher modes are positive at their entry
    of largest magnitude.  Immutable by contract.
    """

    lambdas: np.ndarray
    modes: np.ndarray
    kind: OperatorKind
    s: float
    normalization: str = "mass-unit"

    @property
    def pairs(self):
        return [(float(self.lambdas[k]), self.modes[:, k]) for k in range(len(self.lambdas))]

    def __len__(self):
        return len(self.lambdas)


def solve_spectrum(pair: OperatorPair, K: int) -> Spectrum:
    """Return the K smallest generalized eigenpairs of (S_h, T_h).

    The smallest eigenvalue equals the minimum of the discrete Rayleigh
    quotient u^T S_h u / u^T T_h u over u != 0.
    """
    N = pair.grid.N
    if not 1 <= K <= N:
        raise ParameterError(f"need 1 <= K <= N={N}, got K={K}")
    try:
        lam, V = scipy.linalg.eigh(pair.S_h, pair.T_h, subset_by_index=[0, K - 1])
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise NumericsError(f"generalized eigensolver failed: {exc}") from exc
    resid = np.abs(pair.S_h @ V - pair.T_h @ V * lam).max()
    scale = np.abs(pair.S_h).max()
    if not np.isfinite(resid) or resid > 1e-8 * max(scale, 1.0):
        raise NumericsError(
            f"eigensolver residual {resid:.3e} exceeds tolerance (scale {scale:.3e})"
        )
    # deterministic sign fix
    mid = int(np.ceil(N / 2)) - 1
    for k in range(K):
        v = V[:, k]
        anchor = v[mid] if (k == 0 and v[mid] != 0.0) else v[np.argmax(np.abs(v))]
        if anchor < 0:
            V[:, k] = -v
    lam.setflags(write=False)
    V.setflags(write=False)
    return Spectrum(lambdas=lam, modes=V, kind=pair.kind, s=pair.params.s)


def rayleigh(pair: OperatorPair, u: np.ndarray) -> float:
    """Discrete Rayleigh quotient u^T S_h u / u^T T_h u; always >= lambda_1."""
    u = np.asarray(u, dtype=float)
    denom = mass(pair, u, u)
    if denom == 0.0:
        raise ParameterError("Rayleigh quotient undefined for u = 0")
    return energy(pair, u, u) / denom


# ---------------------------------------------------------------------------
# isolation of the principal eigenvalue under refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsolatednessReport:
    levels: tuple            # (N, lambda1, lambda2, gap) per refinement level
    delta_hat: float         # extrapolated limit of the gap (nan if inconclusive)
    certified: bool          # no eigenvalue entered (lambda1, lambda1 + delta_hat/2)
    status: str              # "ok" | "inconclusive"
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "levels": [
                {"N": n, "lambda1": l1, "lambda2": l2, "gap": g}
                for (n, l1, l2, g) in self.levels
            ],
            "delta_hat": self.delta_hat,
            "certified": self.certified,
            "status": self.status,
            "message": self.message,
        }


def _power_fit_limit(hs, ys):
    """Fit y = y* + K h^p through three points; None when not bracketable."""
    from scipy.optimize import brentq

    h1, h2, h3 = hs
    y1, y2, y3 = ys
    d1, d2 = y1 - y2, y2 - y3
    if d1 == 0.0 or d2 == 0.0 or (d1 / d2) <= 0.0:
        return None

    def g(p):
        return (h1 ** p - h2 ** p) / (h2 ** p - h3 ** p) - d1 / d2

    try:
        p = brentq(g, 0.02, 10.0)
    except ValueError:
        return None
    ystar = y3 - d2 * h3 ** p / (h2 ** p - h3 ** p)
    return p, ystar


def richardson_extrapolate(hs, ys):
    """Three-point Richardson extrapolation; returns (order, limit).

    Raises NumericsError when the differences do not behave like a single
    power law (non-monotone refinement).
    """
    if len(hs) != 3 or len(ys) != 3:
        raise ParameterError("richardson_extrapolate needs exactly three levels")
    fit = _power_fit_limit(hs, ys)
    if fit is None:
        raise NumericsError("refinement values are not power-law monotone")
    return fit


def isolatedness_certificate(pair: OperatorPair, refinements) -> IsolatednessReport:
    """Refinement study of the gap lambda_2 - lambda_1.

    Reassembles the operator of `pair`'s kind on each refinement level,
    reports the gap per level and its extrapolated limit delta_hat, and
    certifies that no eigenvalue enters (lambda_1, lambda_1 + delta_hat/2)
    at any level.  With fewer than two levels, or non-monotone refinement
    behavior, the status is "inconclusive" (not a failure).
    """
    from .operators import assemble_restricted, assemble_spectral

    refinements = list(refinements)
    levels = []
    for n in refinements:
        grid = Grid1D(pair.grid.a, pair.grid.b, int(n))
        if pair.kind is OperatorKind.RESTRICTED:
            p = assemble_restricted(grid, pair.params)
        else:
            p = assemble_spectral(grid, pair.params)
        spec = solve_spectrum(p, 2)
        l1, l2 = float(spec.lambdas[0]), float(spec.lambdas[1])
        levels.append((int(n), l1, l2, l2 - l1))
    levels_t = tuple(levels)

    if len(levels) < 2:
        return IsolatednessReport(levels_t, float("nan"), False, "inconclusive",
                                  "need at least two refinement levels")
    gaps = [g for (_, _, _, g) in levels]
    if len(levels) >= 3:
        hs = [(pair.grid.b - pair.grid.a) / (n + 1) for (n, _, _, _) in levels[-3:]]
        fit = _power_fit_limit(hs, gaps[-3:])
        if fit is None:
            # gaps already flat to rounding: take the finest level
            spread = max(gaps) - min(gaps)
            if spread <= 1e-8 * max(abs(g) for g in gaps):
                delta_hat = gaps[-1]
            else:
                return IsolatednessReport(levels_t, float("nan"), False,
                                          "inconclusive", "non-monotone refinement")
        else:
            delta_hat = fit[1]
    else:
        # two levels: first-order extrapolation of the gap
        delta_hat = gaps[-1] + (gaps[-1] - gaps[-2])
    if delta_hat <= 0.0:
        return IsolatednessReport(levels_t, float(delta_hat), False,
                                  "inconclusive", "extrapolated gap not positive")
    certified = all(l2 > l1 + delta_hat / 2.0 for (_, l1, l2, _) in levels)
    return IsolatednessReport(levels_t, float(delta_hat), certified, "ok")


# ---------------------------------------------------------------------------
# nodal structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NodalReport:
    """Sign domains of one mode, with the measure-scaling product.

    `domains` partitions (a, b) into maximal one-sign intervals whose
    endpoints are located by linear interpolation between grid nodes;
    `bound_product` = min_measure * lambda_k^{n/(2s)} with n = 1 tracks the
    scaling content of the nodal lower bound (the embedding constant in
    front of it is not computable, so only scale-stability is testable).
    """

    k: int
    domains: tuple           # (start, end, sign)
    min_measure: float
    bound_product: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "domains": [{"start": s, "end": e, "sign": sg} for (s, e, sg) in self.domains],
            "min_measure": self.min_measure,
            "bound_product": self.bound_product,
        }


def nodal_analysis(spectrum: Spectrum, grid: Grid1D, k: int) -> NodalReport:
    """Nodal domains of mode k (1-based).  For k >= 2 the mode attains both
    signs; only the principal mode may be one-signed."""
    if not 1 <= k <= len(spectrum):
        raise ParameterError(f"mode index k={k} outside 1..{len(spectrum)}")
    v = spectrum.modes[:, k - 1]
    lam = float(spectrum.lambdas[k - 1])
    vmax = np.abs(v).max()
    if vmax == 0.0:
        raise NumericsError(f"mode {k} is identically zero")
    x = grid.nodes
    nz = np.flatnonzero(np.abs(v) > 1e-12 * vmax)
    crossings = []
    for p, q in zip(nz[:-1], nz[1:]):
        if v[p] * v[q] < 0.0:
            if q == p + 1:
                crossings.append(float(x[p] - v[p] * grid.h / (v[q] - v[p])))
            else:  # a run of (numerically) zero nodes separates the signs
                crossings.append(float(0.5 * (x[p] + x[q])))
    edges = [grid.a] + crossings + [grid.b]
    domains = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        inside = nz[(x[nz] > lo) & (x[nz] < hi)]
        sign = int(np.sign(v[inside[np.argmax(np.abs(v[inside]))]])) if len(inside) else 0
        domains.append((lo, hi, sign))
    min_measure = min(hi - lo for (lo, hi, _) in domains)
    bound_product = min_measure * lam ** (1.0 / (2.0 * spectrum.s))
    return NodalReport(k=k, domains=tuple(domains), min_measure=min_measure,
                       bound_product=bound_product)


# ---------------------------------------------------------------------------
# trivial-branch index
# ---------------------------------------------------------------------------

def _pencil_inertia(M: np.ndarray) -> int:
    """Negative-eigenvalue count of a symmetric matrix via LDL^T inertia."""
    _, D, _ = scipy.linalg.ldl(M, lower=True)
    neg = 0
    i = 0
    n = D.shape[0]
    while i < n:
        if i + 1 < n and (D[i + 1, i] != 0.0 or D[i, i + 1] != 0.0):
            block = D[i : i + 2, i : i + 2]
            neg += int(np.sum(np.linalg.eigvalsh(block) < 0.0))
            i += 2
        else:
            if D[i, i] < 0.0:
                neg += 1
            i += 1
    return neg


def trivial_branch_index(pair: OperatorPair, lam: float,
                         spectrum: Spectrum = None) -> int:
    """Sign of det(S_h - lam T_h) via matrix inertia: (-1)^m with m the
    number of eigenvalues below lam; 0 when lam coincides with an eigenvalue
    to within the inertia tolerance."""
    if lam < 0.0:
        raise ParameterError(f"index defined for lam >= 0, got {lam}")
    if spectrum is None:
        spectrum = solve_spectrum(pair, pair.grid.N)
    lams = spectrum.lambdas
    if np.any(np.abs(lams - lam) <= INDEX_EIGENVALUE_TOL * np.maximum(1.0, np.abs(lams))):
        return 0
    m = _pencil_inertia(pair.S_h - lam * pair.T_h)
    return -1 if m % 2 else 1


def locate_index_flip(pair: OperatorPair, bracket, rtol: float = 1e-10) -> float:
    """Bisect the sign change of det(S_h - lam T_h) inside `bracket`.

    Uses LU-based determinant signs, an evaluation path independent of the
    eigensolver, so agreement with the eigenvalue is a genuine cross-check.
    """
    lo, hi = map(float, bracket)

    def sgn(lam):
        sign, _ = np.linalg.slogdet(pair.S_h - lam * pair.T_h)
        return sign

    slo, shi = sgn(lo), sgn(hi)
    if slo == shi or slo == 0.0 or shi == 0.0:
        raise ParameterError("bracket does not straddle a determinant sign change")
    scale = max(abs(lo), abs(hi), 1.0)
    while hi - lo > rtol * scale:
        mid = 0.5 * (lo + hi)
        sm = sgn(mid)
        if sm == 0.0:
            return mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
