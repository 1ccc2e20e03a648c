"""B-spline bases on open uniform knots and cardinal B-splines.

Everything here follows the Cox-de Boor recursion literally, including the
convention that a fraction with a vanishing denominator counts as zero.
Scalar and array arguments are both accepted; the return type follows the
input (a Python float for scalar input, an ndarray otherwise).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DomainError

__all__ = (
    "KnotVector",
    "open_uniform_knots",
    "basis_eval",
    "basis_deriv",
    "span_basis",
    "cardinal_eval",
    "cardinal_deriv",
)


@dataclass(frozen=True)
class KnotVector:
    """Open uniform knot vector ``(0,...,0, 1/n, ..., (n-1)/n, 1,...,1)``.

    Attributes
    ----------
    degree : int
        Spline degree p.
    spans : int
        Number of non-degenerate knot intervals n.
    knots : numpy.ndarray
        The 2p + n + 1 knots, read-only.
    """

    degree: int
    spans: int
    knots: np.ndarray

    @property
    def num_basis(self) -> int:
        return self.degree + self.spans

    @property
    def h(self) -> float:
        return 1.0 / self.spans


def open_uniform_knots(p: int, n: int) -> KnotVector:
    """Build the open uniform knot vector of degree `p` with `n` spans."""
    if int(p) != p or p < 1:
        raise DomainError(f"degree must be an integer >= 1, got {p!r}")
    if int(n) != n or n < 2:
        raise DomainError(f"number of spans must be an integer >= 2, got {n!r}")
    p, n = int(p), int(n)
    knots = np.concatenate([np.zeros(p + 1), np.arange(1, n) / n, np.ones(p + 1)])
    knots.setflags(write=False)
    return KnotVector(p, n, knots)


def _ratio(num, den):
    # 0/0 (and x/0) terms of the recursion are taken as zero
    if den == 0.0:
        return np.zeros_like(num)
    return num / den


def _degree_zero(kv: KnotVector, t: np.ndarray) -> np.ndarray:
    """Indicators of the half-open spans, with the last span closed at 1."""
    k = kv.knots
    m = len(k) - 1
    out = np.zeros((m,) + t.shape)
    for i in range(m):
        if k[i] < k[i + 1]:
            out[i] = (t >= k[i]) & (t < k[i + 1])
    last = kv.degree + kv.spans - 1
    out[last] = np.where(t == 1.0, 1.0, out[last])
    return out


def _table(kv: KnotVector, t: np.ndarray, degree: int) -> np.ndarray:
    """All B-splines of the given degree on the knots of `kv`, shape (count, *t)."""
    k = kv.knots
    vals = _degree_zero(kv, t)
    for d in range(1, degree + 1):
        nxt = np.zeros((len(k) - 1 - d,) + t.shape)
        for j in range(len(k) - 1 - d):
            left = _ratio(t - k[j], k[j + d] - k[j]) * vals[j]
            right = _ratio(k[j + d + 1] - t, k[j + d + 1] - k[j + 1]) * vals[j + 1]
            nxt[j] = left + right
        vals = nxt
    return vals


def _check_index(kv: KnotVector, j: int) -> None:
    if j < 0 or j > kv.num_basis - 1:
        raise DomainError(f"basis index {j} outside 0..{kv.num_basis - 1}")


def _out(x, scalar):
    return float(x) if scalar else x


def basis_eval(kv: KnotVector, j: int, t):
    """Value of the B-spline ``N_j^p`` at `t`."""
    _check_index(kv, j)
    scalar = np.ndim(t) == 0
    tt = np.asarray(t, dtype=float)
    return _out(_table(kv, tt, kv.degree)[j], scalar)


def basis_deriv(kv: KnotVector, j: int, t):
    """First derivative of ``N_j^p`` at `t`.

    Uses the classical identity expressing the derivative through the two
    degree p-1 splines; at span boundaries this is the right derivative,
    except at t = 1 where the closed last span gives the left one.
    """
    _check_index(kv, j)
    scalar = np.ndim(t) == 0
    tt = np.asarray(t, dtype=float)
    p, k = kv.degree, kv.knots
    low = _table(kv, tt, p - 1)
    d = p * (_ratio(low[j], k[j + p] - k[j]) - _ratio(low[j + 1], k[j + p + 1] - k[j + 1]))
    return _out(d, scalar)


def span_basis(kv: KnotVector, span: int, t: np.ndarray):
    """Values and derivatives of the p+1 splines alive on one span.

    Parameters
    ----------
    kv : KnotVector
    span : int
        Span index s in 0..n-1, i.e. the interval ``[s/n, (s+1)/n]``.
    t : array_like
        Points inside that span (endpoints allowed).

    Returns
    -------
    vals, ders : numpy.ndarray
        Arrays of shape (p+1, len(t)); row a refers to ``N_{s+a}^p``.
    """
    p, k = kv.degree, kv.knots
    t = np.asarray(t, dtype=float)
    i = p + span
    # local triangle (Piegl-Tiller A2.2), vectorised over the points
    left = [None] + [t - k[i + 1 - r] for r in range(1, p + 1)]
    right = [None] + [k[i + r] - t for r in range(1, p + 1)]
    prev = [np.ones_like(t)]
    low = prev
    for d in range(1, p + 1):
        if d == p:
            low = prev
        cur = []
        saved = np.zeros_like(t)
        for r in range(d):
            tmp = prev[r] / (right[r + 1] + left[d - r])
            cur.append(saved + right[r + 1] * tmp)
            saved = left[d - r] * tmp
        cur.append(saved)
        prev = cur
    vals = np.array(prev)
    if p == 0:
        return vals, np.zeros_like(vals)
    # derivative from the degree p-1 row: N' = p (N^{p-1}_a / dl - N^{p-1}_{a+1} / dr)
    low = np.array(low)
    ders = np.zeros_like(vals)
    for a in range(p + 1):
        g = span + a
        if a >= 1:
            ders[a] += p * low[a - 1] / (k[g + p] - k[g])
        if a <= p - 1:
            ders[a] -= p * low[a] / (k[g + p + 1] - k[g + 1])
    return vals, ders


def cardinal_eval(p: int, x):
    """Cardinal B-spline of degree `p` (support ``[0, p+1]``).

    The degree-zero function is the indicator of ``[0, 1)``, which makes the
    integer translates a partition of unity.
    """
    if int(p) != p or p < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {p!r}")
    scalar = np.ndim(x) == 0
    xx = np.asarray(x, dtype=float)
    return _out(_cardinal(int(p), xx), scalar)


def _cardinal(p: int, x: np.ndarray) -> np.ndarray:
    if p == 0:
        return ((x >= 0.0) & (x < 1.0)).astype(float)
    return (x / p) * _cardinal(p - 1, x) + ((p + 1 - x) / p) * _cardinal(p - 1, x - 1.0)


def cardinal_deriv(p: int, x, order: int):
    """Derivative of order `order` of the cardinal B-spline of degree `p`.

    Applies ``N_p'(x) = N_{p-1}(x) - N_{p-1}(x-1)`` repeatedly; only orders
    up to p-1 are continuous and therefore accepted.
    """
    if int(order) != order or order < 0:
        raise DomainError(f"derivative order must be a nonnegative integer, got {order!r}")
    if order > 0 and order >= p:
        raise DomainError(f"derivative of order {order} of a degree-{p} cardinal spline is not continuous")
    scalar = np.ndim(x) == 0
    xx = np.asarray(x, dtype=float)
    out = np.zeros_like(xx)
    for i in range(order + 1):
        out = out + (-1) ** i * comb(order, i) * _cardinal(p - order, xx - i)
    return _out(out, scalar)
