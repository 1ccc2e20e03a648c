"""Admissible reparametrizations of [0, 1] and the concrete families used.

A `Reparametrization` bundles vectorised callables for the map, its first
two derivatives and the inverse of the first derivative.  Maps are meant to
be C^2, strictly monotone and strictly convex or concave; the identity is
kept as an ``affine`` special case for oracle tests.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ParseError

__all__ = (
    "Reparametrization",
    "ValidationReport",
    "CheckResult",
    "make_phi1",
    "make_phi2",
    "make_phi3",
    "make_Phi",
    "make_exp_family",
    "make_log_family",
    "make_identity",
    "reflect",
    "validate",
    "parse_phi",
    "LOG_FAMILY_GAMMA_RANGE",
)

Func = Callable[[np.ndarray], np.ndarray]

CONVEX = "strictly-convex"
CONCAVE = "strictly-concave"
AFFINE = "affine"


@dataclass(frozen=True)
class Reparametrization:
    """A C^2 map of [0, 1] onto itself with its derivative data."""

    value: Func
    deriv1: Func
    deriv2: Func
    deriv1_inverse: Optional[Func]
    convexity: str
    label: str
    params: dict = field(default_factory=dict, compare=False)

    @property
    def is_affine(self) -> bool:
        return self.convexity == AFFINE

    @property
    def is_convex(self) -> bool:
        return self.convexity == CONVEX

    def slope_range(self) -> tuple[float, float]:
        """(min, max) of the first derivative; attained at the endpoints."""
        d0, d1 = (float(v) for v in self.deriv1(np.array([0.0, 1.0])))
        return min(d0, d1), max(d0, d1)


def _vec(f):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return f(x)
    return wrapped


def _bisect_decreasing(g: Func, v: np.ndarray, iters: int = 80) -> np.ndarray:
    """Solve g(x) = v on [0, 1] for decreasing g, elementwise."""
    v = np.asarray(v, dtype=float)
    lo = np.zeros_like(v)
    hi = np.ones_like(v)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = g(mid) >= v
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def make_phi1() -> Reparametrization:
    """``ln(x+1)/ln 2``, strictly concave."""
    ln2 = math.log(2.0)
    return Reparametrization(
        value=_vec(lambda x: np.log1p(x) / ln2),
        deriv1=_vec(lambda x: 1.0 / ((x + 1.0) * ln2)),
        deriv2=_vec(lambda x: -1.0 / ((x + 1.0) ** 2 * ln2)),
        deriv1_inverse=_vec(lambda v: 1.0 / (v * ln2) - 1.0),
        convexity=CONCAVE,
        label="phi1",
    )


def make_phi2() -> Reparametrization:
    """``(e^x - 1)/(e - 1)``, strictly convex."""
    em1 = math.e - 1.0
    return Reparametrization(
        value=_vec(lambda x: np.expm1(x) / em1),
        deriv1=_vec(lambda x: np.exp(x) / em1),
        deriv2=_vec(lambda x: np.exp(x) / em1),
        deriv1_inverse=_vec(lambda v: np.log(v * em1)),
        convexity=CONVEX,
        label="phi2",
    )


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not theta > 0.0 or not math.isfinite(theta):
        raise DomainError(f"theta must be a positive real, got {theta!r}")
    return theta


def make_phi3(theta: float) -> Reparametrization:
    """``sqrt((2 theta + 1) x + theta^2) - theta``, strictly concave."""
    th = _check_theta(theta)
    c = 2.0 * th + 1.0

    def root(x):
        return np.sqrt(c * x + th * th)

    return Reparametrization(
        # written without the cancellation in root(x) - theta near x = 0
        value=_vec(lambda x: c * x / (root(x) + th)),
        deriv1=_vec(lambda x: c / (2.0 * root(x))),
        deriv2=_vec(lambda x: -c * c / (4.0 * root(x) ** 3)),
        deriv1_inverse=_vec(lambda v: ((c / (2.0 * v)) ** 2 - th * th) / c),
        convexity=CONCAVE,
        label=f"phi3:theta={th:g}",
        params={"theta": th},
    )


def make_Phi(p: int, theta: float) -> Reparametrization:
    """``phi3(x) ** (1/p)``; for p > 1 its slope is unbounded at x = 0."""
    if int(p) != p or p < 1:
        raise DomainError(f"exponent p must be an integer >= 1, got {p!r}")
    base = make_phi3(theta)
    q = 1.0 / int(p)

    def d1(x):
        s = base.value(x)
        return q * s ** (q - 1.0) * base.deriv1(x)

    def d2(x):
        s = base.value(x)
        b1 = base.deriv1(x)
        return q * ((q - 1.0) * s ** (q - 2.0) * b1 * b1 + s ** (q - 1.0) * base.deriv2(x))

    d1v = _vec(d1)
    if p == 1:
        inverse = base.deriv1_inverse
    else:
        inverse = _vec(lambda v: _bisect_decreasing(d1v, v))
    return Reparametrization(
        value=_vec(lambda x: base.value(x) ** q),
        deriv1=d1v,
        deriv2=_vec(d2),
        deriv1_inverse=inverse,
        convexity=CONCAVE,
        label=f"Phi:p={int(p)},theta={base.params['theta']:g}",
        params={"p": int(p), "theta": base.params["theta"]},
    )


def make_exp_family(a: float, gamma: float) -> Reparametrization:
    """``e^{ax+b} - e^b + (gamma - a e^b) x`` with slope `gamma` at 0 (convex)."""
    a, gamma = float(a), float(gamma)
    if not a > 0.0:
        raise DomainError(f"exp family needs a > 0, got {a}")
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"exp family needs 0 < gamma < 1, got {gamma}")
    b = -math.log((math.expm1(a) - a) / (1.0 - gamma))
    eb = math.exp(b)
    lin = gamma - a * eb
    return Reparametrization(
        value=_vec(lambda x: eb * np.expm1(a * x) + lin * x),
        deriv1=_vec(lambda x: a * eb * np.exp(a * x) + lin),
        deriv2=_vec(lambda x: a * a * eb * np.exp(a * x)),
        deriv1_inverse=_vec(lambda v: np.log((v - lin) / (a * eb)) / a),
        convexity=CONVEX,
        label=f"expfam:a={a:g},gamma={gamma:g}",
        params={"a": a, "gamma": gamma, "b": b},
    )


def _log_gamma(xs):
    return 1.0 - (np.log1p(xs) - xs / (xs + 1.0))


# gamma(x*) decreases from 1 (x* -> 0) to 1.5 - ln 2 (x* -> 1)
LOG_FAMILY_GAMMA_RANGE = (1.5 - math.log(2.0), 1.0)


def make_log_family(a: float, gamma: float) -> Reparametrization:
    """``ln(ax+b) - ln b + (gamma - a/(a+b)) x`` with slope `gamma` at 1 (concave).

    ``b = a/x*`` where x* in (0, 1) solves
    ``gamma = 1 - (ln(x*+1) - x*/(x*+1))``; only gammas in
    ``LOG_FAMILY_GAMMA_RANGE`` admit such an x*.
    """
    a, gamma = float(a), float(gamma)
    if not a > 0.0:
        raise DomainError(f"log family needs a > 0, got {a}")
    lo, hi = LOG_FAMILY_GAMMA_RANGE
    if not lo < gamma < hi:
        raise DomainError(
            f"log family gamma={gamma} outside the solvable interval ({lo:.6f}, {hi:g})"
        )
    xl, xh = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (xl + xh)
        if _log_gamma(mid) > gamma:
            xl = mid
        else:
            xh = mid
        if xh - xl < 1e-15:
            break
    xstar = 0.5 * (xl + xh)
    b = a / xstar
    lin = gamma - a / (a + b)
    return Reparametrization(
        value=_vec(lambda x: np.log1p(a * x / b) + lin * x),
        deriv1=_vec(lambda x: a / (a * x + b) + lin),
        deriv2=_vec(lambda x: -(a * a) / (a * x + b) ** 2),
        deriv1_inverse=_vec(lambda v: (a / (v - lin) - b) / a),
        convexity=CONCAVE,
        label=f"logfam:a={a:g},gamma={gamma:g}",
        params={"a": a, "gamma": gamma, "b": b, "xstar": xstar},
    )


def make_identity() -> Reparametrization:
    """The identity map; affine, so outside the admissible class."""
    return Reparametrization(
        value=_vec(lambda x: x.copy()),
        deriv1=_vec(np.ones_like),
        deriv2=_vec(np.zeros_like),
        deriv1_inverse=None,
        convexity=AFFINE,
        label="identity",
    )


def reflect(phi: Reparametrization) -> Reparametrization:
    """``x -> 1 - phi(1 - x)``: swaps the endpoint slopes and flips convexity.

    The sublevel-set measures of the symbol are invariant under this map.
    """
    flipped = {CONVEX: CONCAVE, CONCAVE: CONVEX, AFFINE: AFFINE}[phi.convexity]
    inv = phi.deriv1_inverse
    return Reparametrization(
        value=_vec(lambda x: 1.0 - phi.value(1.0 - x)),
        deriv1=_vec(lambda x: phi.deriv1(1.0 - x)),
        deriv2=_vec(lambda x: -phi.deriv2(1.0 - x)),
        deriv1_inverse=None if inv is None else _vec(lambda v: 1.0 - inv(v)),
        convexity=flipped,
        label=f"reflect({phi.label})",
        params=phi.params,
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_x: float
    worst_value: float
    note: str = ""


@dataclass(frozen=True)
class ValidationReport:
    label: str
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(phi: Reparametrization, grid: int = 1001, probes: int = 100) -> ValidationReport:
    """Probe the defining conditions of an admissible map on a uniform grid.

    Never raises on a failing map; each condition is reported with its worst
    probe point.
    """
    x = np.linspace(0.0, 1.0, grid)
    checks = []

    ends = np.array([abs(float(phi.value(0.0))), abs(float(phi.value(1.0)) - 1.0)])
    k = int(np.argmax(ends))
    checks.append(CheckResult("endpoints", bool(ends.max() < 1e-12), float(k), float(ends[k])))

    d1 = phi.deriv1(x)
    k = int(np.nanargmin(d1))
    checks.append(CheckResult("positive-slope", bool(np.all(d1 > 0)), float(x[k]), float(d1[k])))

    d2 = phi.deriv2(x)
    if phi.is_affine:
        checks.append(CheckResult("convexity", False, 0.0, 0.0, "affine: outside the admissible class"))
    else:
        sign = 1.0 if phi.is_convex else -1.0
        s = sign * d2
        k = int(np.nanargmin(s))
        checks.append(CheckResult("convexity", bool(np.all(s > 0)), float(x[k]), float(d2[k]), phi.convexity))

    if phi.deriv1_inverse is not None:
        # deterministic interior probes (no randomness anywhere in the package)
        xs = (np.arange(probes) + 0.5) / probes
        err = np.abs(phi.deriv1_inverse(phi.deriv1(xs)) - xs)
        k = int(np.argmax(err))
        checks.append(CheckResult("slope-inverse", bool(err.max() < 1e-10), float(xs[k]), float(err[k])))
    return ValidationReport(phi.label, tuple(checks))


_SPEC_RE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*(?::(.*))?$")

_FACTORIES = {
    "phi1": (make_phi1, ()),
    "phi2": (make_phi2, ()),
    "identity": (make_identity, ()),
    "phi3": (make_phi3, ("theta",)),
    "Phi": (make_Phi, ("p", "theta")),
    "expfam": (make_exp_family, ("a", "gamma")),
    "logfam": (make_log_family, ("a", "gamma")),
}


def parse_phi(spec: str) -> Reparametrization:
    """Build a map from strings like ``phi3:theta=0.01`` or ``Phi:p=4,theta=1``."""
    m = _SPEC_RE.match(spec)
    if not m:
        raise ParseError(f"malformed reparametrization spec {spec!r}")
    name, rest = m.group(1), m.group(2)
    if name not in _FACTORIES:
        raise ParseError(f"unknown reparametrization {name!r} in {spec!r}")
    factory, keys = _FACTORIES[name]
    kwargs = {}
    if rest is not None and rest.strip():
        for token in rest.split(","):
            if "=" not in token:
                raise ParseError(f"expected key=value, got {token.strip()!r} in {spec!r}")
            key, val = (s.strip() for s in token.split("=", 1))
            if key not in keys:
                raise ParseError(f"unknown key {key!r} for {name!r} in {spec!r}")
            try:
                kwargs[key] = int(val) if key == "p" else float(val)
            except ValueError:
                raise ParseError(f"bad number {val!r} for key {key!r} in {spec!r}") from None
    missing = [k for k in keys if k not in kwargs]
    if missing:
        raise ParseError(f"missing {', '.join(missing)} for {name!r} in {spec!r}")
    return factory(**kwargs)
