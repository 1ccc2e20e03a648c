"""Command-line front end and experiment registry.

Every subcommand writes CSV files (first line ``# schema=1``, then a header,
floats with 17 significant digits) under ``--out`` and, with ``--svg``, line
plots next to them.  Progress goes to stderr, one line per finished case.

Exit codes: 0 success, 1 usage or parse error, 2 numerical failure,
3 domain violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import plotting
from .assembly import QuadratureConfig, assemble_pencil
from .eigensolve import compute_spectrum, solve_pencil
from .errors import DomainError, IgaGapError, ParseError
from .reparam import parse_phi, validate
from .spectral_analysis import (
    compare_orderings,
    compute_gap,
    gap_sequence,
    pack_counts,
    slope_crossing,
    weyl_statistic,
)
from .symbol import ep_symbol, rearrange

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ("main", "ExperimentConfig", "REPRODUCE_TARGETS")

SCHEMA = "# schema=1"
GAP_COLUMNS = ("p", "n", "phi", "delta", "m_of_n", "delta_out", "gamma", "out_formula", "out_observed")
WEYL_COLUMNS = (
    "p", "n", "phi", "sup_G_error", "sampling_sup_error",
    "weighted_sup_error", "avg_gap_lhs", "avg_gap_rhs",
)
SYMBOL_COLUMNS = ("kind", "x_or_k", "value")
SYMBOL_POINTS = 512
# a row is flagged when the gap drops below this fraction of gamma
GAP_FLAG_FRACTION = 0.9


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path, columns, rows) -> Path:
    """Write a schema-tagged CSV with fixed float formatting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    buf.write(SCHEMA + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    path.write_text(buf.getvalue())
    return path


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() or c in ".-" else "_" for c in label)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated sweep over degrees, subdivisions and maps."""

    name: str
    p_list: tuple
    n_list: tuple
    phi_specs: tuple
    csv: bool = True
    svg: bool = False
    dump_matrices: bool = False
    quad_tol: Optional[float] = None
    outlier_tol: float = 1e-6
    logx: bool = False
    logy: bool = False
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.p_list:
            raise ParseError(f"{self.name}: empty p list")
        if not self.n_list:
            raise ParseError(f"{self.name}: empty n list")
        if not self.phi_specs:
            raise ParseError(f"{self.name}: empty phi list")
        for p in self.p_list:
            if p < 1:
                raise ParseError(f"{self.name}: degree {p} < 1")
            for n in self.n_list:
                if n < p + 1:
                    raise ParseError(f"{self.name}: n={n} needs to be at least p+1={p + 1}")
        for s in self.phi_specs:
            parse_phi(s)
        if self.outlier_tol < 0:
            raise ParseError(f"{self.name}: outlier tolerance must be nonnegative")
        if self.quad_tol is not None and not self.quad_tol > 0:
            raise ParseError(f"{self.name}: quadrature tolerance must be positive")

    @property
    def quad(self) -> Optional[QuadratureConfig]:
        return None if self.quad_tol is None else QuadratureConfig(rel_tol=self.quad_tol)

    def cases(self):
        for s in self.phi_specs:
            for p in self.p_list:
                for n in self.n_list:
                    yield p, n, s


def _int_list(v, what) -> tuple:
    if v is None:
        return ()
    if isinstance(v, (list, tuple)):
        items = v
    else:
        items = [t for t in str(v).split(",") if t.strip()]
    try:
        return tuple(int(t) for t in items)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: expected integers, got {v!r}") from exc


def _str_list(v) -> tuple:
    if v is None:
        return ()
    if isinstance(v, (list, tuple)):
        return tuple(str(t) for t in v)
    # ';' separates specs, since ',' already separates spec parameters
    return tuple(t.strip() for t in str(v).split(";") if t.strip())


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"malformed config {path}: {exc}") from exc


# ---------------------------------------------------------------- cases


def _phi_rs(spec: str, p: int):
    phi = parse_phi(spec)
    return phi, rearrange(phi, ep_symbol(p))


def _gap_case(args):
    p, n, spec, quad, tol = args
    phi, rs = _phi_rs(spec, p)
    s = compute_spectrum(phi, p, n, quad)
    return compute_gap(s, rs, tol, approx=False)


def _weyl_case(args):
    p, n, spec, quad, grid = args
    phi, rs = _phi_rs(spec, p)
    s = compute_spectrum(phi, p, n, quad)
    return weyl_statistic(s, rs, grid)


def _map(fn: Callable, items, jobs: int, label: Callable):
    items = list(items)
    out = []
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            # results come back in submission order
            for it, res in zip(items, ex.map(fn, items)):
                _progress(label(it))
                out.append(res)
    else:
        for it in items:
            out.append(fn(it))
            _progress(label(it))
    return out


def _case_label(it) -> str:
    return f"done p={it[0]} n={it[1]} phi={it[2]}"


# ---------------------------------------------------------------- commands


def cmd_gap_sweep(cfg: ExperimentConfig, out: Path) -> list:
    items = [(p, n, s, cfg.quad, cfg.outlier_tol) for p, n, s in cfg.cases()]
    reports = _map(_gap_case, items, cfg.jobs, _case_label)
    rows = [
        (r.p, r.n, spec, r.delta, r.m_of_n, r.delta_out, r.gamma, r.out_count_formula, r.out_count_observed)
        for (p, n, spec, *_), r in zip(items, reports)
    ]
    write_csv(out / "gap_sweep.csv", GAP_COLUMNS, rows)
    flags = []
    for (p, n, spec, *_), r in zip(items, reports):
        ref = r.gamma if math.isfinite(r.gamma) else math.pi
        threshold = GAP_FLAG_FRACTION * ref
        flags.append((p, n, spec, r.delta, threshold, r.delta < threshold, r.outlier_mismatch))
    write_csv(
        out / "flags.csv",
        ("p", "n", "phi", "delta", "threshold", "gap_flagged", "outlier_mismatch"),
        flags,
    )
    if cfg.svg:
        for spec in cfg.phi_specs:
            for p in cfg.p_list:
                sel = [r for (pp, nn, ss, *_), r in zip(items, reports) if pp == p and ss == spec]
                ns = [r.n for r in sel]
                tag = f"p{p}_{_slug(spec)}"
                plotting.line_plot(
                    out / f"gap_{tag}.svg",
                    [plotting.Series(ns, [r.delta for r in sel], "delta", marker="o")],
                    f"minimal gap, p={p}, {spec}", "n", "delta",
                    cfg.logx, cfg.logy, hlines=(math.pi,),
                )
                plotting.line_plot(
                    out / f"m_of_n_{tag}.svg",
                    [plotting.Series(ns, [r.m_of_n for r in sel], "m(n)", marker="o")],
                    f"gap index, p={p}, {spec}", "n", "m(n)", cfg.logx, cfg.logy,
                )
    return reports


def cmd_weyl(cfg: ExperimentConfig, out: Path) -> list:
    grid = int(cfg.extra.get("grid", 1000))
    if grid < 2:
        raise ParseError("grid must be at least 2")
    items = [(p, n, s, cfg.quad, grid) for p, n, s in cfg.cases()]
    reports = _map(_weyl_case, items, cfg.jobs, _case_label)
    rows = [
        (r.p, r.n, spec, r.sup_G_error, r.sampling_sup_error, r.weighted_sup_error, r.avg_gap_lhs, r.avg_gap_rhs)
        for (p, n, spec, *_), r in zip(items, reports)
    ]
    write_csv(out / "weyl.csv", WEYL_COLUMNS, rows)
    if cfg.svg:
        for spec in cfg.phi_specs:
            for p in cfg.p_list:
                sel = [r for (pp, nn, ss, *_), r in zip(items, reports) if pp == p and ss == spec]
                ns = [r.n for r in sel]
                plotting.line_plot(
                    out / f"weyl_p{p}_{_slug(spec)}.svg",
                    [
                        plotting.Series(ns, [r.sup_G_error for r in sel], "sup |G - Psi/pi|", "o"),
                        plotting.Series(ns, [r.sampling_sup_error for r in sel], "sampling", "s"),
                        plotting.Series(ns, [r.weighted_sup_error for r in sel], "weighted sampling", "^"),
                        plotting.Series(ns, [r.avg_gap_error for r in sel], "average gap", "v"),
                    ],
                    # errors span decades, so the y axis is always logarithmic
                    f"Weyl statistics, p={p}, {spec}", "n", "error", cfg.logx, True,
                )
    return reports


def cmd_symbol(cfg: ExperimentConfig, out: Path) -> list:
    points = int(cfg.extra.get("points", SYMBOL_POINTS))
    written = []
    for p, n, spec in cfg.cases():
        phi, rs = _phi_rs(spec, p)
        sym = rs.sym
        theta = np.linspace(0.0, math.pi, points)
        x = np.linspace(0.0, 1.0, points)
        xi = rs.xi_sqrt(x)
        s = compute_spectrum(phi, p, n, cfg.quad)
        k = np.arange(1, s.size + 1)
        pos = k / (s.size + 1)
        rows = [("e_p", t, v) for t, v in zip(theta, sym.e(theta))]
        rows += [("sqrt_xi", a, b) for a, b in zip(x, xi)]
        rows += [("sqrt_eig", a, b) for a, b in zip(pos, s.sqrt_normalized)]
        tag = f"p{p}_n{n}_{_slug(spec)}"
        written.append(write_csv(out / f"symbol_{tag}.csv", SYMBOL_COLUMNS, rows))
        if cfg.svg:
            plotting.line_plot(
                out / f"symbol_{tag}.svg",
                [
                    plotting.Series(x, xi, "rearranged symbol"),
                    plotting.Series(pos, s.sqrt_normalized, "eigenvalues", marker="."),
                ],
                f"sqrt(xi) vs sqrt(lambda/n^2), p={p}, n={n}, {spec}",
                "x", "value", cfg.logx, cfg.logy,
            )
        _progress(_case_label((p, n, spec)))
    return written


def cmd_eig(cfg: ExperimentConfig, out: Path) -> list:
    rows = []
    for p, n, spec in cfg.cases():
        phi = parse_phi(spec)
        M, K = assemble_pencil(phi, p, n, cfg.quad)
        s = solve_pencil(K, M, p, n, spec)
        if cfg.dump_matrices:
            tag = f"p{p}_n{n}_{_slug(spec)}"
            (out / f"mass_{tag}.txt").parent.mkdir(parents=True, exist_ok=True)
            (out / f"mass_{tag}.txt").write_text(M.dumps())
            (out / f"stiffness_{tag}.txt").write_text(K.dumps())
        rows += [(p, n, spec, k + 1, lam, lam / n**2) for k, lam in enumerate(s.eigenvalues)]
        _progress(_case_label((p, n, spec)))
    write_csv(out / "eig.csv", ("p", "n", "phi", "k", "lambda", "lambda_over_n2"), rows)
    return rows


def cmd_pack(cfg: ExperimentConfig, out: Path) -> list:
    ex = cfg.extra
    r = int(ex.get("r", 10))
    reports = []
    for p, n, spec in cfg.cases():
        phi, rs = _phi_rs(spec, p)
        y0 = float(ex["y0"]) if ex.get("y0") is not None else 0.0
        yr = float(ex["yr"]) if ex.get("yr") is not None else rs.range_max
        s = compute_spectrum(phi, p, n, cfg.quad)
        rep = pack_counts(s, y0, yr, r)
        gaps = gap_sequence(s)
        tag = f"p{p}_n{n}_{_slug(spec)}"
        e = rep.bin_edges
        write_csv(out / f"pack_{tag}.csv", ("bin_lo", "bin_hi", "count"),
                  zip(e[:-1], e[1:], rep.counts))
        write_csv(out / f"gaps_{tag}.csv", ("k", "gap"), zip(range(1, len(gaps) + 1), gaps))
        if cfg.svg:
            plotting.bar_plot(out / f"pack_{tag}.svg", e[:-1], np.diff(e), rep.counts,
                              f"eigenvalues per bin, p={p}, n={n}, {spec}",
                              "sqrt(lambda/n^2)", "count", cfg.logy)
            plotting.line_plot(
                out / f"gaps_{tag}.svg",
                [plotting.Series(range(1, len(gaps) + 1), gaps, "gap")],
                f"successive gaps, p={p}, n={n}, {spec}", "k", "gap",
                cfg.logx, cfg.logy, hlines=(math.pi,),
            )
        reports.append(rep)
        _progress(_case_label((p, n, spec)))
    return reports


def _parse_interval(v) -> tuple:
    if isinstance(v, (list, tuple)):
        parts = list(v)
    else:
        parts = [t for t in str(v).split(",") if t.strip()]
    try:
        y0, y1 = (float(t) for t in parts)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"interval must be 'y0,y1', got {v!r}") from exc
    if not y0 < y1:
        raise ParseError(f"interval must satisfy y0 < y1, got {v!r}")
    return y0, y1


def cmd_compare(cfg: ExperimentConfig, out: Path) -> list:
    ex = cfg.extra
    a_spec, b_spec = ex.get("phiA"), ex.get("phiB")
    if not a_spec or not b_spec:
        raise ParseError("compare needs --phiA and --phiB")
    phiA, phiB = parse_phi(a_spec), parse_phi(b_spec)
    reports = []
    for p in cfg.p_list:
        if ex.get("interval") is not None:
            interval = _parse_interval(ex["interval"])
        else:
            interval = default_order_interval(phiA, phiB, p)
        for n in cfg.n_list:
            rep = compare_orderings(phiA, phiB, p, n, interval, quad=cfg.quad)
            reports.append(rep)
            _progress(f"done p={p} n={n} {a_spec} vs {b_spec}")
    write_csv(
        out / "compare_summary.csv",
        ("p", "n", "phiA", "phiB", "y0", "y1", "psi_margin", "pairs", "holds", "vacuous"),
        [(r.p, r.n, a_spec, b_spec, *r.interval, r.psi_margin, r.pairs, r.holds, r.vacuous)
         for r in reports],
    )
    write_csv(
        out / "compare_pairs.csv",
        ("p", "n", "k", "difference"),
        [(r.p, r.n, k, d) for r in reports for k, d in zip(r.indices, r.differences)],
    )
    return reports


def default_order_interval(phiA, phiB, p: int, trim: float = 0.05) -> tuple:
    """Interval of n**-2 lambda on which phiA' >= phiB' forces the symbol ordering.

    Runs from ``e_p(pi) / phiA'(x0)**2`` to ``e_p(pi) / phiA'(0)**2`` where x0
    is the first crossing of the slopes, shrunk by `trim` of its length at
    both ends so that it is closed and strictly inside.
    """
    x0 = slope_crossing(phiA, phiB)
    e = ep_symbol(p).e_pi
    lo = e / float(phiA.deriv1(x0)) ** 2
    hi = e / float(phiA.deriv1(0.0)) ** 2
    if not lo < hi:
        raise DomainError(f"empty ordering interval for {phiA.label} vs {phiB.label}")
    pad = trim * (hi - lo)
    return lo + pad, hi - pad


def cmd_validate_phi(cfg: ExperimentConfig, out: Path) -> list:
    rows = []
    reports = []
    for spec in cfg.phi_specs:
        rep = validate(parse_phi(spec))
        reports.append(rep)
        for c in rep.checks:
            rows.append((spec, c.name, c.passed, c.worst_x, c.worst_value, c.note))
        _progress(f"validated {spec}: {'pass' if rep.passed else 'FAIL'}")
    write_csv(out / "validate.csv", ("phi", "check", "passed", "worst_x", "worst_value", "note"), rows)
    return reports


# ---------------------------------------------------------------- registry

TABLE1_N = (50, 99, 200, 300, 400, 500, 600, 700, 800, 900, 1600)
SWEEP_N = (50, 100, 200, 300, 400, 600, 800)
# exp-family pair with shared slope at 0; the smaller a bends earlier
ORDER_PAIR = ("expfam:a=0.5,gamma=0.5", "expfam:a=3,gamma=0.5")
ORDER_N = (16, 32, 64, 128, 256, 512, 1024)


def _reg(name, command, p, n, phi, **extra):
    return dict(name=name, command=command, p_list=tuple(p), n_list=tuple(n),
                phi_specs=tuple(phi), extra=extra)


REPRODUCE_TARGETS = {
    "table1": _reg("table1", "gap-sweep", [1], TABLE1_N, ["phi1", "phi2", "phi3:theta=0.01"]),
    "fig2": _reg("fig2", "gap-sweep", [1], (50, 100, 200, 400, 800, 1200, 1600), ["phi1"]),
    "fig3": _reg("fig3", "symbol", [1], (100, 400), ["phi1"]),
    "fig-gap-dist": _reg("fig-gap-dist", "pack", [1], (1000,), ["phi1"], r=20),
    "test4": _reg("test4", "gap-sweep", [2], SWEEP_N, ["phi1"]),
    "test5": _reg("test5", "gap-sweep", [2], SWEEP_N, ["phi2"]),
    "test6": _reg("test6", "gap-sweep", [2], SWEEP_N, ["phi3:theta=0.01"]),
    "test7": _reg("test7", "gap-sweep", [3], SWEEP_N, ["phi1", "phi2", "phi3:theta=0.01"]),
    "test8": _reg("test8", "gap-sweep", [3, 4, 5], (200, 400, 800), ["Phi:p={p},theta=0.01"]),
    "test9": _reg("test9", "gap-sweep", [4], SWEEP_N,
                  ["Phi:p=4,theta=0.01", "Phi:p=4,theta=0.1", "Phi:p=4,theta=1"]),
    "compare": _reg("compare", "compare", [1, 2], ORDER_N, list(ORDER_PAIR),
                    phiA=ORDER_PAIR[0], phiB=ORDER_PAIR[1]),
}

COMMANDS = {
    "symbol": cmd_symbol,
    "eig": cmd_eig,
    "gap-sweep": cmd_gap_sweep,
    "weyl": cmd_weyl,
    "pack": cmd_pack,
    "compare": cmd_compare,
    "validate-phi": cmd_validate_phi,
}


def cmd_reproduce(target: str, base: ExperimentConfig, out_root: Path):
    if target not in REPRODUCE_TARGETS:
        raise ParseError(f"unknown target {target!r}; choose from {', '.join(REPRODUCE_TARGETS)}")
    entry = REPRODUCE_TARGETS[target]
    out = out_root / target
    if entry["name"] == "test8":
        # Phi_p is tied to the degree, so each p is its own sweep
        results = []
        for p in entry["p_list"]:
            cfg = replace(base, name=target, p_list=(p,), n_list=entry["n_list"],
                          phi_specs=(entry["phi_specs"][0].format(p=p),), extra=dict(entry["extra"]))
            results += COMMANDS[entry["command"]](cfg, out / f"p{p}")
        _merge_csv(out, [out / f"p{p}" for p in entry["p_list"]], ("gap_sweep.csv", "flags.csv"))
        return results
    cfg = replace(base, name=target, p_list=entry["p_list"], n_list=entry["n_list"],
                  phi_specs=entry["phi_specs"], extra=dict(entry["extra"]))
    res = COMMANDS[entry["command"]](cfg, out)
    if target == "table1":
        _write_table1(out, res, entry)
    return res


def _merge_csv(out: Path, parts, names) -> None:
    for name in names:
        header = None
        body = []
        for d in parts:
            lines = (d / name).read_text().splitlines()
            header = lines[:2]
            body += lines[2:]
        (out / name).write_text("\n".join(header + body) + "\n")


def _write_table1(out: Path, reports, entry) -> None:
    specs = entry["phi_specs"]
    by = {(r.phi_label, r.n): r.m_of_n for r in reports}
    labels = [parse_phi(s).label for s in specs]
    rows = [(n, *[by[(lab, n)] for lab in labels]) for n in entry["n_list"]]
    write_csv(out / "table1.csv", ("n", *[f"m_of_n[{s}]" for s in specs]), rows)


# ---------------------------------------------------------------- parser


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--config", default=d, help="TOML file with [global] and per-command sections")
    g.add_argument("--out", default=d, help="output directory (default: out)")
    g.add_argument("--svg", action="store_true", default=d, help="also write SVG plots")
    g.add_argument("--dump-matrices", action="store_true", default=d,
                   help="write assembled matrices in symband text form (eig)")
    g.add_argument("--seedless", action="store_true", default=d,
                   help="accepted for provenance; nothing here is random")
    g.add_argument("--quad-tol", type=float, default=d, help="relative quadrature tolerance")
    g.add_argument("--outlier-tol", type=float, default=d, help="relative outlier threshold")
    g.add_argument("--logx", action="store_true", default=d, help="logarithmic x axis")
    g.add_argument("--logy", action="store_true", default=d, help="logarithmic y axis")
    g.add_argument("--jobs", type=int, default=d, help="worker processes for sweeps")


def _sweep_args(sp) -> None:
    sp.add_argument("--p", help="comma-separated degrees")
    sp.add_argument("--n", help="comma-separated subdivision counts")
    sp.add_argument("--phi", help="';'-separated map specs, e.g. 'phi1;phi3:theta=0.01'")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="igagap", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    helps = {
        "symbol": "tabulate e_p, the rearranged symbol and sampled eigenvalues",
        "eig": "list generalized eigenvalues",
        "gap-sweep": "minimal gap and its index over a sweep",
        "weyl": "counting-function and sampling errors",
        "pack": "eigenvalue counts per bin and the successive gaps",
        "compare": "ordering of two maps' symbols and eigenvalues",
        "validate-phi": "check a map against the admissibility conditions",
        "reproduce": "run a registered experiment into out/<target>/",
    }
    sps = {}
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        _common(sp, suppress=True)
        sps[name] = sp
    for name in ("symbol", "eig", "gap-sweep", "weyl", "pack", "compare", "validate-phi"):
        _sweep_args(sps[name])
    sps["symbol"].add_argument("--points", type=int, help="symbol samples (default 512)")
    sps["weyl"].add_argument("--grid", type=int, help="y-grid size (default 1000)")
    sps["pack"].add_argument("--y0", type=float, help="left end of the binned range")
    sps["pack"].add_argument("--yr", type=float, help="right end (default: symbol range maximum)")
    sps["pack"].add_argument("--r", type=int, help="number of bins (default 10)")
    sps["compare"].add_argument("--phiA", help="first map spec")
    sps["compare"].add_argument("--phiB", help="second map spec")
    sps["compare"].add_argument("--interval", help="'y0,y1' in units of lambda/n^2")
    sps["reproduce"].add_argument("target", help="one of: " + ", ".join(REPRODUCE_TARGETS))
    return parser


_DEFAULTS = dict(out="out", svg=False, dump_matrices=False, quad_tol=None,
                 outlier_tol=1e-6, logx=False, logy=False, jobs=1)
_EXTRA_KEYS = ("points", "grid", "y0", "yr", "r", "phiA", "phiB", "interval")


def _resolve(ns: argparse.Namespace):
    file_cfg = load_config(ns.config) if getattr(ns, "config", None) else {}
    g = dict(file_cfg.get("global", {}))
    section = dict(file_cfg.get(ns.command, {}))

    def pick(key, default=None):
        cli = getattr(ns, key, None)
        if cli is not None:
            return cli
        if key in section:
            return section[key]
        if key in g:
            return g[key]
        return default

    opts = {k: pick(k, v) for k, v in _DEFAULTS.items()}
    extra = {k: pick(k) for k in _EXTRA_KEYS}
    lists = dict(
        p_list=_int_list(pick("p"), "p"),
        n_list=_int_list(pick("n"), "n"),
        phi_specs=_str_list(pick("phi")),
    )
    return opts, extra, lists


def main(argv=None) -> int:
    try:
        parser = build_parser()
        ns = parser.parse_args(argv)
        if ns.command is None:
            parser.print_help(sys.stderr)
            return 1
        opts, extra, lists = _resolve(ns)
        out = Path(opts.pop("out"))
        try:
            opts["jobs"] = max(1, int(opts["jobs"]))
            if opts["quad_tol"] is not None:
                opts["quad_tol"] = float(opts["quad_tol"])
            opts["outlier_tol"] = float(opts["outlier_tol"])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad option value: {exc}") from exc
        if ns.command == "reproduce":
            base = ExperimentConfig("base", (1,), (2,), ("phi1",), **opts)
            cmd_reproduce(ns.target, base, out)
            return 0
        if ns.command == "validate-phi":
            lists["p_list"] = lists["p_list"] or (1,)
            lists["n_list"] = lists["n_list"] or (2,)
        if ns.command == "compare" and not lists["phi_specs"]:
            lists["phi_specs"] = tuple(s for s in (extra["phiA"], extra["phiB"]) if s)
        cfg = ExperimentConfig(ns.command, **lists, **opts, extra=extra)
        COMMANDS[ns.command](cfg, out)
        return 0
    except IgaGapError as exc:
        print(f"igagap: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
