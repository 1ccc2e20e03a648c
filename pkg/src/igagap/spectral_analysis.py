"""Gap, outlier, counting-function and ordering statistics of a spectrum.

Throughout, ``s_k = sqrt(lambda_k / n**2)`` are the normalized square-root
eigenvalues, to be compared with the rearranged symbol ``sqrt(xi)``.  Gaps
are taken between unnormalized square roots, so the continuous problem has
every gap equal to pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, NumericalError
from .eigensolve import Spectrum, compute_spectrum
from .reparam import Reparametrization
from .symbol import RearrangedSymbol, ep_symbol, rearrange

__all__ = (
    "GapReport",
    "WeylReport",
    "PackReport",
    "OrderReport",
    "outlier_count_formula",
    "compute_gap",
    "approximate_gap",
    "outlier_count_observed",
    "counting_function",
    "weyl_statistic",
    "pack_counts",
    "gap_sequence",
    "slope_crossing",
    "compare_orderings",
)


def outlier_count_formula(p: int) -> int:
    """``2 * floor((p - 1) / 2)``."""
    return 2 * ((int(p) - 1) // 2)


@dataclass(frozen=True)
class GapReport:
    """Gap statistics of one spectrum.

    `m_of_n` is 1-based: the gap ``sqrt(lambda_{m+1}) - sqrt(lambda_m)``.
    `gamma` is NaN when the symbol slope could not be extrapolated.
    """

    p: int
    n: int
    phi_label: str
    delta: float
    m_of_n: int
    delta_out: float
    approx_delta: Optional[float]
    gamma: float
    out_count_formula: int
    out_count_observed: int

    @property
    def outlier_mismatch(self) -> bool:
        return self.out_count_formula != self.out_count_observed


def gap_sequence(spec: Spectrum) -> np.ndarray:
    """``sqrt(lambda_{k+1}) - sqrt(lambda_k)`` for k = 1..N-1."""
    return np.diff(spec.sqrt_eigenvalues)


def outlier_count_observed(spec: Spectrum, rs: RearrangedSymbol, tol: float = 1e-6) -> int:
    """Number of normalized square-root eigenvalues above ``range_max * (1 + tol)``."""
    if not tol >= 0.0:
        raise DomainError(f"tolerance must be nonnegative, got {tol!r}")
    return int(np.count_nonzero(spec.sqrt_normalized > rs.range_max * (1.0 + tol)))


def approximate_gap(rs: RearrangedSymbol, n: int) -> float:
    """``n * min_{1<=i<=n-2} (sqrt(xi)((i+1)/n) - sqrt(xi)(i/n))`` for degree one."""
    if rs.p != 1:
        raise DomainError(f"the approximate gap is defined for p = 1 only, got p = {rs.p}")
    if int(n) != n or n < 3:
        raise DomainError(f"need n >= 3, got {n!r}")
    n = int(n)
    vals = rs.xi_sqrt(np.arange(1, n) / n)
    return float(n * np.min(np.diff(vals)))


def compute_gap(
    spec: Spectrum,
    rs: RearrangedSymbol,
    tol: float = 1e-6,
    approx: bool = True,
) -> GapReport:
    """Minimum gap, its first minimizer, and the gap over non-outliers.

    Parameters
    ----------
    spec : Spectrum
    rs : RearrangedSymbol
        Symbol of the same (phi, p); supplies gamma and the outlier threshold.
    tol : float
        Relative outlier threshold above ``rs.range_max``.
    approx : bool
        Also evaluate the degree-one approximate gap (costs one
        rearrangement sweep of n points).
    """
    if spec.size < 2:
        raise DomainError(f"need at least two eigenvalues, got {spec.size}")
    gaps = gap_sequence(spec)
    m = int(np.argmin(gaps))
    out = outlier_count_formula(spec.p)
    kept = gaps[: spec.size - 1 - out]
    delta_out = float(kept.min()) if kept.size else math.nan
    try:
        gamma = rs.gamma
    except NumericalError:
        gamma = math.nan
    approx_delta = approximate_gap(rs, spec.n) if approx and spec.p == 1 else None
    return GapReport(
        p=spec.p,
        n=spec.n,
        phi_label=spec.phi_label,
        delta=float(gaps[m]),
        m_of_n=m + 1,
        delta_out=delta_out,
        approx_delta=approx_delta,
        gamma=gamma,
        out_count_formula=out,
        out_count_observed=outlier_count_observed(spec, rs, tol),
    )


@dataclass(frozen=True)
class WeylReport:
    """Distances between a spectrum and its symbol (all nonnegative)."""

    p: int
    n: int
    phi_label: str
    sup_G_error: float
    sampling_sup_error: float
    weighted_sup_error: float
    avg_gap_lhs: float
    avg_gap_rhs: float

    @property
    def avg_gap_error(self) -> float:
        return abs(self.avg_gap_lhs - self.avg_gap_rhs)


def counting_function(spec: Spectrum, y) -> np.ndarray:
    """``#{k : s_k <= y} / (N + 1)``, right-continuous in y."""
    s = spec.sqrt_normalized
    return np.searchsorted(s, np.asarray(y, dtype=float), side="right") / (spec.size + 1)


def _integral_psi(rs: RearrangedSymbol, panels: int = 64, nodes: int = 8) -> float:
    # int_0^range_max Psi(y) / pi dy, with the kink of Psi as a breakpoint
    x, w = np.polynomial.legendre.leggauss(nodes)
    breaks = sorted({0.0, rs.kink, rs.range_max})
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * np.diff(edges)
        pts = (edges[:-1, None] + half[:, None] * (x + 1.0)).ravel()
        wts = (half[:, None] * w).ravel()
        total += float(rs.psi(pts) @ wts)
    return total / math.pi


def weyl_statistic(spec: Spectrum, rs: RearrangedSymbol, grid_size: int = 1000) -> WeylReport:
    """Counting-function, sampling and average-gap discrepancies.

    The supremum of ``|G(y) - Psi(y)/pi|`` is taken over a uniform grid of
    ``grid_size`` points on ``[0, range_max]`` together with both one-sided
    limits at every normalized eigenvalue inside that range, where the step
    function jumps.
    """
    if int(grid_size) != grid_size or grid_size < 2:
        raise DomainError(f"grid_size must be an integer >= 2, got {grid_size!r}")
    N = spec.size
    s = spec.sqrt_normalized
    y = np.linspace(0.0, rs.range_max, int(grid_size))
    err = np.abs(counting_function(spec, y) - rs.psi(y) / math.pi)
    inside = np.flatnonzero(s <= rs.range_max)
    if inside.size:
        ps = rs.psi(s[inside]) / math.pi
        right = counting_function(spec, s[inside])
        left = np.searchsorted(s, s[inside], side="left") / (N + 1)
        err = np.concatenate([err, np.abs(right - ps), np.abs(left - ps)])
    sup_g = float(err.max())

    kmax = N - outlier_count_formula(spec.p)
    k = np.arange(1, kmax + 1)
    diff = np.abs(s[:kmax] - rs.xi_sqrt(k / (N + 1)))
    sampling = float(diff.max()) if kmax else 0.0
    weighted = float((spec.n / k * diff).max()) if kmax else 0.0

    kk = np.arange(1, N)
    lhs = float(np.sum(kk * np.diff(s)) / (N - 1)) if N > 1 else 0.0
    rhs = _integral_psi(rs)
    return WeylReport(spec.p, spec.n, spec.phi_label, sup_g, sampling, weighted, lhs, rhs)


@dataclass(frozen=True)
class PackReport:
    """Eigenvalue counts per bin; bin i is ``(edges[i], edges[i+1]]``, the first one closed."""

    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def pack_counts(spec: Spectrum, y0: float, yr: float, r: int) -> PackReport:
    """Count normalized square-root eigenvalues in r uniform bins of ``[y0, yr]``."""
    if not 0.0 <= y0 < yr:
        raise DomainError(f"need 0 <= y0 < yr, got y0={y0!r}, yr={yr!r}")
    if int(r) != r or r < 1:
        raise DomainError(f"number of bins must be a positive integer, got {r!r}")
    edges = np.linspace(y0, yr, int(r) + 1)
    s = spec.sqrt_normalized
    upto = np.searchsorted(s, edges, side="right")
    upto[0] = np.searchsorted(s, y0, side="left")
    return PackReport(edges, np.diff(upto))


def slope_crossing(phiA: Reparametrization, phiB: Reparametrization, grid: int = 4001) -> float:
    """First x in (0, 1) where ``phiA' - phiB'`` changes sign.

    Raises DomainError when the difference keeps one sign on the open grid.
    """
    x = np.linspace(0.0, 1.0, grid)[1:-1]
    d = phiA.deriv1(x) - phiB.deriv1(x)
    sign = np.sign(d)
    change = np.flatnonzero(sign[1:] * sign[:-1] < 0)
    if not change.size:
        raise DomainError(f"{phiA.label} and {phiB.label}: slopes never cross inside (0, 1)")
    lo, hi = x[change[0]], x[change[0] + 1]
    f = lambda t: float(phiA.deriv1(t) - phiB.deriv1(t))
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if (f(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class OrderReport:
    """Symbol and eigenvalue ordering of two maps on an interval of n**-2 lambda.

    Attributes
    ----------
    interval : (float, float)
    psi_margin : float
        Minimum over the y-grid of ``PsiA(sqrt(y)) - PsiB(sqrt(y))``.
    indices : numpy.ndarray
        1-based k with both normalized eigenvalues inside the interval.
    differences : numpy.ndarray
        ``n**-2 (lambdaA_k - lambdaB_k)`` for those k.
    """

    labels: tuple
    p: int
    n: int
    interval: tuple
    psi_margin: float
    indices: np.ndarray = field(repr=False)
    differences: np.ndarray = field(repr=False)

    @property
    def pairs(self) -> int:
        return int(self.indices.size)

    @property
    def vacuous(self) -> bool:
        """No pair to compare, or every pair identical."""
        return self.pairs == 0 or bool(np.all(self.differences == 0.0))

    @property
    def holds(self) -> bool:
        """Every compared pair has A strictly below B."""
        return self.pairs > 0 and bool(np.all(self.differences < 0.0))


def compare_orderings(
    phiA: Reparametrization,
    phiB: Reparametrization,
    p: int,
    n: int,
    interval,
    grid: int = 200,
    spectra: Optional[tuple] = None,
    quad=None,
) -> OrderReport:
    """Check symbol ordering and eigenvalue ordering of two maps on an interval.

    `interval` is in the scale of ``n**-2 lambda`` and must sit inside the
    symbol range of both maps.  Precomputed spectra may be passed as
    ``(specA, specB)``.
    """
    y0, y1 = (float(v) for v in interval)
    if not 0.0 <= y0 < y1:
        raise DomainError(f"interval must satisfy 0 <= y0 < y1, got ({y0}, {y1})")
    sym = ep_symbol(p)
    rsA, rsB = rearrange(phiA, sym), rearrange(phiB, sym)
    top = min(rsA.range_max, rsB.range_max) ** 2
    if y1 > top:
        raise DomainError(f"interval end {y1:.6g} exceeds the common symbol range [0, {top:.6g}]")
    y = np.linspace(y0, y1, grid)
    margin = float(np.min(rsA.psi(np.sqrt(y)) - rsB.psi(np.sqrt(y))))
    if spectra is None:
        specA = compute_spectrum(phiA, p, n, quad)
        specB = compute_spectrum(phiB, p, n, quad)
    else:
        specA, specB = spectra
    la, lb = specA.normalized, specB.normalized
    both = (la >= y0) & (la <= y1) & (lb >= y0) & (lb <= y1)
    idx = np.flatnonzero(both)
    return OrderReport(
        labels=(phiA.label, phiB.label),
        p=int(p),
        n=int(n),
        interval=(y0, y1),
        psi_margin=margin,
        indices=idx + 1,
        differences=la[idx] - lb[idx],
    )
