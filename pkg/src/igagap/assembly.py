"""Mass and stiffness matrices of the reparametrized B-spline Galerkin scheme.

Entries are

    M_ij = int_0^1 |phi'(x)| N_i(x) N_j(x) dx,
    K_ij = int_0^1 N_i'(x) N_j'(x) / |phi'(x)| dx,

over the interior basis ``N_1 .. N_{n+p-2}`` (the two splines that do not
vanish at the boundary are dropped).  Integration runs span by span; basis
products are polynomial there, so the only quadrature error comes from the
smooth but non-polynomial weight.  Each span is refined by recursive
bisection until a Gauss-Legendre estimate and its two-half refinement agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .bspline import open_uniform_knots, span_basis
from .errors import DomainError, NumericalError, ParseError
from .reparam import Reparametrization

__all__ = (
    "SymmetricBandedMatrix",
    "QuadratureRule",
    "QuadratureConfig",
    "gauss_legendre",
    "assemble_mass",
    "assemble_stiffness",
    "assemble_pencil",
)


@dataclass(frozen=True)
class SymmetricBandedMatrix:
    """Symmetric matrix stored as its lower band.

    ``band[d, j]`` holds entry ``(j + d, j)`` for ``0 <= d <= bandwidth``
    (the layout LAPACK uses for lower band storage); slots past the end of
    the matrix are zero.
    """

    order: int
    bandwidth: int
    band: np.ndarray
    label: str = ""

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.order, self.order))
        for d in range(min(self.bandwidth, self.order - 1) + 1):
            diag = self.band[d, : self.order - d]
            idx = np.arange(self.order - d)
            a[idx + d, idx] = diag
            a[idx, idx + d] = diag
        return a

    def __getitem__(self, ij) -> float:
        i, j = ij
        if i < j:
            i, j = j, i
        d = i - j
        if d > self.bandwidth:
            return 0.0
        return float(self.band[d, j])

    def dumps(self) -> str:
        """Plain-text form: ``symband N bandwidth`` then ``i j value`` lines (1-based, i >= j)."""
        lines = [f"symband {self.order} {self.bandwidth}"]
        for j in range(self.order):
            for d in range(min(self.bandwidth, self.order - 1 - j) + 1):
                lines.append(f"{j + d + 1} {j + 1} {float(self.band[d, j])!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, label: str = "") -> "SymmetricBandedMatrix":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or rows[0][0] != "symband" or len(rows[0]) != 3:
            raise ParseError("missing 'symband N bandwidth' header")
        order, bw = int(rows[0][1]), int(rows[0][2])
        band = np.zeros((bw + 1, order))
        for r in rows[1:]:
            i, j, v = int(r[0]) - 1, int(r[1]) - 1, float(r[2])
            if not 0 <= i - j <= bw:
                raise ParseError(f"entry ({i + 1}, {j + 1}) outside the lower band")
            band[i - j, j] = v
        return cls(order, bw, band, label)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def mapped(self, a: float, b: float):
        half = 0.5 * (b - a)
        return a + half * (self.nodes + 1.0), half * self.weights


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    if order < 1:
        raise DomainError(f"quadrature order must be >= 1, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w, order)


@dataclass(frozen=True)
class QuadratureConfig:
    """Per-span quadrature settings.

    `nodes` defaults to p + 5.  A subinterval is accepted once its estimate
    and the sum over its two halves differ by at most ``rel_tol`` times the
    largest entry of the span block, scaled by the subinterval's share of the
    span (floored at `min_share`); refinement deeper than `max_depth`
    bisections is an error.
    """

    nodes: Optional[int] = None
    rel_tol: float = 1e-13
    max_depth: int = 64
    min_share: float = 1e-6


def _check(p: int, n: int) -> None:
    if int(p) != p or p < 1:
        raise DomainError(f"degree must be an integer >= 1, got {p!r}")
    if int(n) != n or n < p + 1:
        raise DomainError(f"need n >= p + 1 spans, got n={n!r} for p={p}")


def _local(kv, span, rule, phi, a, b):
    x, w = rule.mapped(a, b)
    vals, ders = span_basis(kv, span, x)
    d1 = phi.deriv1(x)
    mass = (vals * (w * np.abs(d1))) @ vals.T
    stiff = (ders * (w / np.abs(d1))) @ ders.T
    return mass, stiff


def _span_blocks(kv, span, rule, phi, cfg, keep):
    # `keep` selects the local rows that survive into the global matrices;
    # only those entries steer the refinement
    h = kv.h
    a0, b0 = span * h, (span + 1) * h
    m0, k0 = _local(kv, span, rule, phi, a0, b0)
    sel = np.ix_(keep, keep)
    scale_m = max(np.abs(m0[sel]).max(), np.finfo(float).tiny)
    scale_k = max(np.abs(k0[sel]).max(), np.finfo(float).tiny)
    acc_m = np.zeros_like(m0)
    acc_k = np.zeros_like(k0)
    # explicit stack: (a, b, coarse mass, coarse stiffness, depth)
    stack = [(a0, b0, m0, k0, 0)]
    while stack:
        a, b, mc, kc, depth = stack.pop()
        mid = 0.5 * (a + b)
        ml, kl = _local(kv, span, rule, phi, a, mid)
        mr, kr = _local(kv, span, rule, phi, mid, b)
        mf, kf = ml + mr, kl + kr
        share = max((b - a) / h, cfg.min_share)
        err = max(
            np.abs(mf - mc)[sel].max() / scale_m,
            np.abs(kf - kc)[sel].max() / scale_k,
        )
        if err <= cfg.rel_tol * share:
            acc_m += mf
            acc_k += kf
        elif depth >= cfg.max_depth:
            raise NumericalError(
                f"quadrature did not converge on span {span} ([{a0:.6g}, {b0:.6g}]); "
                f"relative discrepancy {err:.3g} at depth {depth}"
            )
        else:
            stack.append((mid, b, mr, kr, depth + 1))
            stack.append((a, mid, ml, kl, depth + 1))
    return acc_m, acc_k


def assemble_pencil(
    phi: Reparametrization,
    p: int,
    n: int,
    quad: Optional[QuadratureConfig] = None,
    interior: bool = True,
):
    """Assemble mass and stiffness together (they share every basis evaluation).

    With ``interior=False`` all n + p splines are kept, which is only useful
    for consistency checks such as integrating the partition of unity.  The
    boundary splines are also where a slope singularity at an endpoint bites
    hardest, so maps with unbounded phi' need the default.
    """
    _check(p, n)
    p, n = int(p), int(n)
    cfg = quad or QuadratureConfig()
    rule = gauss_legendre(cfg.nodes or p + 5)
    kv = open_uniform_knots(p, n)
    offset = 1 if interior else 0
    order = n + p - 2 if interior else n + p
    bm = np.zeros((p + 1, order))
    bk = np.zeros((p + 1, order))
    for span in range(n):
        keep = np.array([0 <= span + r - offset < order for r in range(p + 1)])
        mloc, kloc = _span_blocks(kv, span, rule, phi, cfg, keep)
        for r in range(p + 1):
            gi = span + r - offset
            if gi < 0 or gi >= order:
                continue
            for c in range(r + 1):
                gj = span + c - offset
                if gj < 0:
                    continue
                bm[gi - gj, gj] += mloc[r, c]
                bk[gi - gj, gj] += kloc[r, c]
    label = phi.label
    return (
        SymmetricBandedMatrix(order, p, bm, label),
        SymmetricBandedMatrix(order, p, bk, label),
    )


def assemble_mass(phi, p, n, quad=None, interior=True) -> SymmetricBandedMatrix:
    """Mass matrix ``M_ij = int |phi'| N_i N_j``."""
    return assemble_pencil(phi, p, n, quad, interior)[0]


def assemble_stiffness(phi, p, n, quad=None, interior=True) -> SymmetricBandedMatrix:
    """Stiffness matrix ``K_ij = int N_i' N_j' / |phi'|``."""
    return assemble_pencil(phi, p, n, quad, interior)[1]
