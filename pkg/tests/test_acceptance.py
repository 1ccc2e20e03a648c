"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (also collected into the
terminal summary) before asserting.  Run with ``pytest tests/test_acceptance.py -s``.
"""
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import spectrum_of, symbol_of
from igagap.reparam import make_identity
from igagap.eigensolve import compute_spectrum
from igagap.spectral_analysis import (
    compute_gap,
    outlier_count_formula,
    outlier_count_observed,
    weyl_statistic,
)
from igagap.symbol import ep_symbol, g_eval, gamma_slope, psi_prime_p1, psi_sqrt_p1_closed

pytestmark = pytest.mark.slow

TABLE_N = [50, 99, 200, 300, 400, 500, 600, 700, 800, 900, 1600]
MAPS = ["phi1", "phi2", "phi3:theta=0.01"]


def test_c01_linear_closed_form(record):
    start = time.perf_counter()
    worst = 0.0
    for n in (8, 16, 32, 64):
        lam = compute_spectrum(make_identity(), 1, n).eigenvalues
        h = 1.0 / n
        c = np.cos(np.arange(1, n) * math.pi * h)
        ref = 6.0 / h**2 * (1 - c) / (2 + c)
        worst = max(worst, float(np.max(np.abs(lam - ref) / ref)))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 1.0
    record("C1 closed-form oracle", ok, f"max rel err {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_c02_table_one(record):
    bad = []
    for spec in MAPS:
        for n in TABLE_N:
            m = compute_gap(spectrum_of(spec, 1, n), symbol_of(spec, 1), approx=False).m_of_n
            if m != 1:
                bad.append((spec, n, m))
    ok = not bad
    record("C2 table of m(n)", ok, f"{len(MAPS) * len(TABLE_N)} cells, m(n)!=1 at {bad}")
    assert ok


def test_c03_gap_approaches_pi(record):
    rs = symbol_of("phi1", 1)
    deltas = {n: compute_gap(spectrum_of("phi1", 1, n), rs, approx=False).delta for n in TABLE_N if n >= 400}
    rel = {n: abs(d - math.pi) / math.pi for n, d in deltas.items()}
    ok = max(rel.values()) < 0.05 and rel[1600] < rel[400]
    record("C3 gap near pi", ok, f"rel dev n=400 {rel[400]:.2e}, n=1600 {rel[1600]:.2e}, max {max(rel.values()):.2e}")
    assert ok


def test_c04_gamma(record):
    fails = []
    p1_maps = MAPS + ["expfam:a=3,gamma=0.5", "logfam:a=1,gamma=0.9"]
    for spec in p1_maps:
        g = gamma_slope(symbol_of(spec, 1))
        if abs(g - math.pi) > 1e-6:
            fails.append((spec, 1, g))
    for p in range(2, 7):
        lo = math.pi * (2 / math.pi) ** ((p - 1) / 2)
        hi = math.pi * (math.pi / 2) ** ((p + 1) / 2)
        for spec in MAPS:
            g = gamma_slope(symbol_of(spec, p))
            if not lo <= g <= hi:
                fails.append((spec, p, g))
    ok = not fails
    record("C4 gamma slope", ok, f"violations {fails}")
    assert ok


def test_c05_symbol_identities(record):
    theta = np.linspace(0.0, math.pi, 2001)
    parts = {}
    parts["e(0)=0"] = all(ep_symbol(p).e(0.0) == 0.0 for p in range(1, 9))
    parts["nondecreasing"] = all(np.all(np.diff(ep_symbol(p).e(theta)) >= 0) for p in range(1, 9))
    ident = {}
    for p in range(2, 6):
        rhs = (2 - 2 * np.cos(theta)) * g_eval(p - 2, theta) / g_eval(p, theta)
        ident[p] = float(np.max(np.abs(ep_symbol(p).e(theta) - rhs)))
    parts["e_p=(2-2cos)g_(p-2)/g_p"] = max(ident.values()) <= 1e-12
    parts["g bounds"] = all(
        np.all(g_eval(p, theta) <= 1 + 1e-15) and np.all(g_eval(p, theta) >= (4 / math.pi**2) ** (p + 1))
        for p in range(1, 9)
    )
    sups = [float(np.max(np.abs(ep_symbol(p).e(theta) - theta**2))) for p in range(1, 9)]
    parts["sup|e_p-theta^2| decreasing"] = all(b < a for a, b in zip(sups, sups[1:]))
    ok = all(parts.values())
    failed = [k for k, v in parts.items() if not v]
    record("C5 symbol identities", ok, f"failed parts {failed}; identity residuals {ident}")
    assert ok


def test_c06_psi_cross_oracle(record):
    worst = 0.0
    for spec in MAPS:
        rs = symbol_of(spec, 1)
        y = np.linspace(0.0, rs.range_max, 50)
        ref = np.array([psi_sqrt_p1_closed(rs.phi, v) for v in y])
        worst = max(worst, float(np.max(np.abs(rs.psi(y) - ref))))
    slope = max(abs(psi_prime_p1(symbol_of(s, 1).phi, 0.0) - 1.0) for s in MAPS)
    ok = worst < 1e-8 and slope < 1e-6
    record("C6 measure cross-oracle", ok, f"max |diff| {worst:.2e}, |Psi'(0)-1| {slope:.2e}")
    assert ok


def test_c07_outlier_count(record):
    bad = []
    for spec in ("phi1", "phi3:theta=0.01"):
        for p in range(1, 6):
            for n in (64, 128):
                got = outlier_count_observed(spectrum_of(spec, p, n), symbol_of(spec, p), tol=1e-6)
                if got != outlier_count_formula(p):
                    bad.append((spec, p, n, got, outlier_count_formula(p)))
    ok = not bad
    record("C7 outlier count", ok, f"(phi, p, n, observed, formula) mismatches {bad}")
    assert ok


def test_c08_weyl_convergence(record):
    fails = []
    for p in (1, 2):
        rs = symbol_of("phi1", p)
        reps = [weyl_statistic(spectrum_of("phi1", p, n), rs) for n in (100, 200, 400)]
        for name in ("sup_G_error", "sampling_sup_error", "weighted_sup_error"):
            v = [getattr(r, name) for r in reps]
            if not v[0] > v[1] > v[2]:
                fails.append((p, name, v))
        if not reps[2].avg_gap_error < reps[0].avg_gap_error:
            fails.append((p, "avg_gap", reps[0].avg_gap_error, reps[2].avg_gap_error))
    ok = not fails
    record("C8 Weyl and sampling convergence", ok, f"non-decreasing {fails}")
    assert ok


def test_c09_singular_map_gap(record):
    bad, detail = [], {}
    for p in (3, 4, 5):
        spec = f"Phi:p={p},theta=0.01"
        reps = [compute_gap(spectrum_of(spec, p, n), symbol_of(spec, p), approx=False) for n in (200, 400, 800)]
        d = [r.delta for r in reps]
        detail[p] = [round(v, 4) for v in d]
        if any(r.m_of_n != 1 for r in reps) or not d[0] < d[1] < d[2]:
            bad.append(p)
    ok = not bad
    record("C9 singular map gap increases", ok, f"deltas {detail}; failing p {bad}")
    assert ok


def test_c10_negative_control(record):
    rs = symbol_of("phi1", 3)
    d = [compute_gap(spectrum_of("phi1", 3, n), rs, approx=False).delta for n in (200, 400, 800)]
    ok = d[0] > d[1] > d[2]
    record("C10 cubic gap decreases", ok, f"deltas {[round(v, 4) for v in d]}")
    assert ok


def test_c11_property_suite(record):
    here = Path(__file__).parent
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(here / "test_properties.py")],
        capture_output=True,
        text=True,
        cwd=here.parent,
    )
    elapsed = time.perf_counter() - start
    ok = proc.returncode == 0 and elapsed < 30.0
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    record("C11 property suite", ok, f"{tail} ({elapsed:.1f}s wall)")
    assert ok
