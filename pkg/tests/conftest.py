import functools

import pytest

from igagap import compute_spectrum, ep_symbol, parse_phi, rearrange

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def phi_of(spec):
    return parse_phi(spec)


@functools.lru_cache(maxsize=None)
def spectrum_of(spec, p, n):
    return compute_spectrum(phi_of(spec), p, n)


@functools.lru_cache(maxsize=None)
def symbol_of(spec, p):
    return rearrange(phi_of(spec), ep_symbol(p))


@pytest.fixture
def record():
    """Print and collect one PASS/FAIL line per acceptance criterion."""

    def _record(tag, ok, detail):
        line = f"{tag}: {'PASS' if ok else 'FAIL'} {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
