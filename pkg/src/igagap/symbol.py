"""Spectral symbol of the B-spline Laplacian and its monotone rearrangement.

For degree p the symbol of the uniform scheme is ``e_p = f_p / g_p`` with

    g_p(t) =  N_{2p+1}(p+1)   + 2 sum_k N_{2p+1}(p+1-k)   cos(k t),
    f_p(t) = -N''_{2p+1}(p+1) - 2 sum_k N''_{2p+1}(p+1-k) cos(k t),

N being the cardinal B-spline.  A reparametrization phi turns it into
``omega(x, t) = e_p(t) / phi'(x)**2``.  Psi(y) is the area of the set where
``sqrt(omega) <= y``; its inverse at ``pi * x`` is the rearranged symbol
``sqrt(xi)(x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import integrate

from .bspline import cardinal_deriv, cardinal_eval
from .errors import DomainError, NumericalError
from .reparam import Reparametrization, reflect

__all__ = (
    "EpSymbol",
    "ep_symbol",
    "g_eval",
    "ep_eval",
    "ep_inverse",
    "omega_eval",
    "psi_sqrt",
    "psi_sqrt_p1_closed",
    "psi_prime_p1",
    "RearrangedSymbol",
    "rearrange",
    "gamma_slope",
    "psi_slope_min",
)

_PANELS = 64
_PANEL_NODES = 8
_BISECT_CAP = 200


def _cos_sum(samples: np.ndarray, theta: np.ndarray) -> np.ndarray:
    k = np.arange(1, len(samples))
    return samples[0] + 2.0 * np.cos(np.multiply.outer(theta, k)) @ samples[1:]


def _mass_samples(p: int) -> np.ndarray:
    q = 2 * p + 1
    return np.array([cardinal_eval(q, p + 1 - k) for k in range(p + 1)])


@dataclass(frozen=True)
class EpSymbol:
    """Cardinal-spline data defining ``f_p``, ``g_p`` and ``e_p``.

    Attributes
    ----------
    p : int
    mass_samples : numpy.ndarray
        ``N_{2p+1}(p+1-k)`` for k = 0..p.
    stiff_samples : numpy.ndarray
        ``-N''_{2p+1}(p+1-k)`` for k = 0..p.
    """

    p: int
    mass_samples: np.ndarray
    stiff_samples: np.ndarray

    def g(self, theta):
        return _cos_sum(self.mass_samples, np.asarray(theta, dtype=float))

    def f(self, theta):
        # f(0) = 0, so the cosine sum equals 2 sum_k s_k (cos kt - 1); the
        # sine form avoids cancellation for small t
        t = np.asarray(theta, dtype=float)
        k = np.arange(1, self.p + 1)
        s = np.sin(0.5 * np.multiply.outer(t, k))
        return -4.0 * (s * s) @ self.stiff_samples[1:]

    def e(self, theta):
        return self.f(theta) / self.g(theta)

    @cached_property
    def e_pi(self) -> float:
        return float(self.e(math.pi))


@lru_cache(maxsize=None)
def ep_symbol(p: int) -> EpSymbol:
    """Build (and cache) the symbol data for degree `p` >= 1."""
    if int(p) != p or p < 1:
        raise DomainError(f"degree must be an integer >= 1, got {p!r}")
    p = int(p)
    q = 2 * p + 1
    mass = _mass_samples(p)
    stiff = np.array([-cardinal_deriv(q, p + 1 - k, 2) for k in range(p + 1)])
    mass.setflags(write=False)
    stiff.setflags(write=False)
    return EpSymbol(p, mass, stiff)


def g_eval(p: int, theta):
    """``g_p(theta)`` for any degree p >= 0 (g_0 is identically 1)."""
    if int(p) != p or p < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {p!r}")
    scalar = np.ndim(theta) == 0
    out = _cos_sum(_mass_samples(int(p)), np.asarray(theta, dtype=float))
    return float(out) if scalar else out


def _check_theta(theta) -> np.ndarray:
    t = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < 0.0) or np.any(t > math.pi):
        raise DomainError("theta must lie in [0, pi]")
    return t


def ep_eval(sym: EpSymbol, theta):
    """``e_p(theta) = f_p(theta) / g_p(theta)`` on [0, pi]."""
    scalar = np.ndim(theta) == 0
    out = sym.e(_check_theta(theta))
    return float(out) if scalar else out


def _ep_inverse(sym: EpSymbol, v: np.ndarray, tol: float = 0.0) -> np.ndarray:
    # bisection on the increasing e_p; tol = 0 runs until the bracket stops
    # shrinking in floating point
    v = np.asarray(v, dtype=float)
    lo = np.zeros_like(v)
    hi = np.full_like(v, math.pi)
    for _ in range(_BISECT_CAP):
        mid = 0.5 * (lo + hi)
        live = (hi - lo > tol) & (mid > lo) & (mid < hi)
        if not live.any():
            break
        below = sym.e(mid) < v
        lo = np.where(live & below, mid, lo)
        hi = np.where(live & ~below, mid, hi)
    out = 0.5 * (lo + hi)
    out = np.where(v <= 0.0, 0.0, out)
    return np.where(v >= sym.e_pi, math.pi, out)


def ep_inverse(sym: EpSymbol, v, tol: float = 1e-12):
    """The angle theta with ``e_p(theta) = v`` for v in ``[0, e_p(pi)]``."""
    scalar = np.ndim(v) == 0
    vv = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(vv)) or np.any(vv < 0.0) or np.any(vv > sym.e_pi):
        raise DomainError(f"value must lie in [0, e_p(pi)] = [0, {sym.e_pi:.17g}]")
    out = _ep_inverse(sym, vv, tol)
    return float(out) if scalar else out


def omega_eval(phi: Reparametrization, sym: EpSymbol, x, theta):
    """``omega(x, theta) = e_p(theta) / phi'(x)**2``."""
    xx = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xx)) or np.any(xx < 0.0) or np.any(xx > 1.0):
        raise DomainError("x must lie in [0, 1]")
    out = sym.e(_check_theta(theta)) / phi.deriv1(xx) ** 2
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=None)
def _panel_rule():
    x, w = np.polynomial.legendre.leggauss(_PANEL_NODES)
    return 0.5 * (x + 1.0), 0.5 * w


def _graded_nodes(t_lo: np.ndarray, t_hi: np.ndarray):
    """Composite Gauss nodes on [t_lo, t_hi] with geometrically graded panels.

    The integrand varies on the scale of t_lo near the left end, so panel
    widths grow in proportion to the distance from the origin.
    """
    u, w = _panel_rule()
    k = np.arange(_PANELS + 1) / _PANELS
    ratio = t_hi / t_lo
    edges = t_lo[:, None] * ratio[:, None] ** k
    edges[:, -1] = t_hi
    width = np.diff(edges, axis=1)
    nodes = (edges[:, :-1, None] + width[:, :, None] * u).reshape(len(t_lo), -1)
    weights = (width[:, :, None] * w).reshape(len(t_lo), -1)
    return nodes, weights


def _psi_chunk(phi, sym, y, dmin, dmax):
    # y > 0 throughout; Psi = t_lo + int_{t_lo}^{t_hi} m(t) dt with m the
    # length of {x : phi'(x) >= sqrt(e_p(t)) / y}
    y2 = y * y
    t_lo = _ep_inverse(sym, np.minimum(y2 * dmin * dmin, sym.e_pi))
    if math.isinf(dmax):
        t_hi = np.full_like(y, math.pi)
    else:
        t_hi = _ep_inverse(sym, np.minimum(y2 * dmax * dmax, sym.e_pi))
    theta, w = _graded_nodes(t_lo, t_hi)
    c = np.sqrt(sym.e(theta)) / y[:, None]
    c = np.clip(c, dmin, dmax)
    xc = np.clip(phi.deriv1_inverse(c), 0.0, 1.0)
    m = 1.0 - xc if phi.is_convex else xc
    return t_lo + np.sum(m * w, axis=1)


def psi_sqrt(phi: Reparametrization, sym: EpSymbol, y, chunk: int = 256):
    """Measure of ``{(x, t) in [0,1] x [0,pi] : sqrt(omega(x, t)) <= y}``.

    Evaluated as a single integral in t; the interval where only part of
    [0, 1] qualifies is integrated by composite Gauss-Legendre (64 graded
    panels of 8 nodes) with its ends, the kinks of the integrand, as panel
    boundaries.
    """
    scalar = np.ndim(y) == 0
    yy = np.atleast_1d(np.asarray(y, dtype=float)).ravel()
    if np.any(~(yy >= 0.0)):
        raise DomainError("y must be a nonnegative real")
    dmin, dmax = phi.slope_range()
    out = np.zeros_like(yy)
    full = yy >= math.sqrt(sym.e_pi) / dmin
    out[full] = math.pi
    todo = np.flatnonzero((yy > 0.0) & ~full)
    if phi.is_affine:
        out[todo] = _ep_inverse(sym, np.minimum((yy[todo] * dmin) ** 2, sym.e_pi))
    else:
        if phi.deriv1_inverse is None:
            raise DomainError(f"{phi.label}: measure needs the inverse of phi'")
        for s in range(0, len(todo), chunk):
            idx = todo[s : s + chunk]
            out[idx] = _psi_chunk(phi, sym, yy[idx], dmin, dmax)
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(y))


def _convex_version(phi: Reparametrization) -> Reparametrization:
    if phi.is_affine:
        raise DomainError("closed p=1 formulas need a strictly convex or concave map")
    return phi if phi.is_convex else reflect(phi)


_SQRT12 = math.sqrt(12.0)


def _p1_integrand(phi, y):
    def f(x):
        s = (y * phi.deriv1(x)) ** 2
        return math.acos(max((6.0 - 2.0 * s) / (6.0 + s), -1.0))
    return f


def psi_sqrt_p1_closed(phi: Reparametrization, y: float) -> float:
    """Degree-one measure via the explicit arccos integrand.

    Concave maps are reflected first; the measure does not change.
    """
    y = float(y)
    if not y >= 0.0:
        raise DomainError("y must be a nonnegative real")
    cphi = _convex_version(phi)
    if y == 0.0:
        return 0.0
    d0 = float(cphi.deriv1(0.0))
    d1 = float(cphi.deriv1(1.0))
    f = _p1_integrand(cphi, y)
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    if y <= _SQRT12 / d1:
        return integrate.quad(f, 0.0, 1.0, **opts)[0]
    if y >= _SQRT12 / d0:
        return math.pi
    xt = float(cphi.deriv1_inverse(_SQRT12 / y))
    return integrate.quad(f, 0.0, xt, **opts)[0] + math.pi * (1.0 - xt)


def psi_prime_p1(phi: Reparametrization, y: float) -> float:
    """Derivative of the degree-one measure.

    Below the branch point ``sqrt(12)/phi'(1)`` (convex orientation) the
    y-derivative of the arccos integrand is integrated directly.  Above it a
    change of variables moves the inverse-square-root singularity to the
    fixed endpoint z = 1.  At the branch point itself only one-sided
    derivatives exist.
    """
    y = float(y)
    if not y >= 0.0:
        raise DomainError("y must be a nonnegative real")
    cphi = _convex_version(phi)
    d = cphi.deriv1
    d0 = float(d(0.0))
    d1 = float(d(1.0))
    yb = _SQRT12 / d1
    if y >= _SQRT12 / d0:
        return 0.0
    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    if y < yb:
        def f(x):
            s = y * float(d(x))
            return float(d(x)) / math.sqrt(1.0 - s * s / 12.0) * 6.0 / (6.0 + s * s)
        return integrate.quad(f, 0.0, 1.0, **opts)[0]
    if y == yb:
        raise DomainError(f"y = {y:.17g} is the branch point; only one-sided derivatives exist")
    inv = cphi.deriv1_inverse
    d2 = cphi.deriv2
    dt = _SQRT12 / y
    z0 = float(inv(d1 * d0 / dt))

    def f2(z):
        # integrand times sqrt(1 - z); quad supplies the (1 - z)^(-1/2) weight
        dz = float(d(z))
        r = dz / d1
        back = float(inv(dt * dz / d1))
        g = float(d2(z)) / float(d2(back))
        if z >= 1.0:
            root = math.sqrt(2.0 * float(d2(1.0)) / d1)
        else:
            root = math.sqrt((1.0 - r * r) / (1.0 - z))
        return dz * g / root / (1.0 + 2.0 * r * r)

    val = integrate.quad(f2, z0, 1.0, weight="alg", wvar=(0.0, -0.5), **opts)[0]
    return (dt / d1) ** 2 * val


@dataclass(frozen=True)
class RearrangedSymbol:
    """Measure function and monotone rearrangement for one (phi, p).

    Attributes
    ----------
    phi : Reparametrization
    sym : EpSymbol
    range_max : float
        Largest value of ``sqrt(omega)``.
    kink : float
        ``sqrt(e_p(pi)) / max phi'``; above it part of [0, 1] saturates.
    """

    phi: Reparametrization
    sym: EpSymbol
    range_max: float
    kink: float

    @property
    def p(self) -> int:
        return self.sym.p

    def psi(self, y):
        return psi_sqrt(self.phi, self.sym, y)

    def xi_sqrt(self, x, tol: float = 1e-12):
        """Solve ``psi(y) = pi x`` for y by bisection on ``[0, range_max]``."""
        scalar = np.ndim(x) == 0
        xx = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        if np.any(~np.isfinite(xx)) or np.any(xx < 0.0) or np.any(xx > 1.0):
            raise DomainError("x must lie in [0, 1]")
        target = math.pi * xx
        lo = np.zeros_like(xx)
        hi = np.full_like(xx, self.range_max)
        for _ in range(_BISECT_CAP):
            live = hi - lo > tol
            if not live.any():
                break
            idx = np.flatnonzero(live)
            mid = 0.5 * (lo[idx] + hi[idx])
            below = self.psi(mid) < target[idx]
            lo[idx] = np.where(below, mid, lo[idx])
            hi[idx] = np.where(below, hi[idx], mid)
        else:
            raise NumericalError(f"rearrangement bisection exceeded {_BISECT_CAP} iterations")
        out = 0.5 * (lo + hi)
        out[xx == 0.0] = 0.0
        out[xx == 1.0] = self.range_max
        if scalar:
            return float(out[0])
        return out.reshape(np.shape(x))

    @cached_property
    def gamma(self) -> float:
        return gamma_slope(self)


def rearrange(phi: Reparametrization, sym: EpSymbol) -> RearrangedSymbol:
    """Bundle the measure function and its inverse for (phi, p)."""
    dmin, dmax = phi.slope_range()
    if not (dmin > 0.0):
        raise DomainError(f"{phi.label}: phi' must be positive")
    if not phi.is_affine and phi.deriv1_inverse is None:
        raise DomainError(f"{phi.label}: rearrangement needs the inverse of phi'")
    root = math.sqrt(sym.e_pi)
    return RearrangedSymbol(phi, sym, root / dmin, root / dmax)


_RICHARDSON_STEPS = (1e-3, 5e-4, 2.5e-4)


def gamma_slope(rs: RearrangedSymbol) -> float:
    """``pi / Psi'(0+)``, the slope of ``sqrt(xi)`` at the origin.

    Degree one uses the analytic derivative.  Otherwise ``Psi(h)/h`` is
    extrapolated over three halving steps assuming an even error expansion.
    """
    if rs.p == 1 and not rs.phi.is_affine:
        return math.pi / psi_prime_p1(rs.phi, 0.0)
    h = np.array(_RICHARDSON_STEPS)
    d = rs.psi(h) / h
    r1 = (4.0 * d[1:] - d[:-1]) / 3.0
    r2 = (16.0 * r1[1] - r1[0]) / 15.0
    if not (np.all(np.isfinite(d)) and math.isfinite(r2) and r2 > 0.0):
        raise NumericalError("Richardson extrapolation of Psi'(0) produced a non-finite value")
    # an even expansion shrinks successive differences fourfold; anything
    # else (e.g. phi' unbounded at an endpoint) makes the extrapolation lie
    d01, d12 = d[0] - d[1], d[1] - d[2]
    if abs(d01) > 1e-9 * abs(d[2]) and not 3.0 < d01 / d12 < 5.0:
        raise NumericalError(
            f"Richardson extrapolation of Psi'(0) diverges: difference ratio "
            f"{d01 / d12:.3g} where 4 is expected"
        )
    return math.pi / r2


def psi_slope_min(rs: RearrangedSymbol, grid_size: int = 500, step: float = 1e-6) -> float:
    """Smallest central-difference slope of Psi on an interior grid of its range.

    Only a numerical indication: a positive value on the grid does not prove
    the slope never vanishes.
    """
    y = np.linspace(0.0, rs.range_max, grid_size + 2)[1:-1]
    step = min(step, 0.25 * (y[1] - y[0]))
    return float(np.min((rs.psi(y + step) - rs.psi(y - step)) / (2.0 * step)))
