"""Command-line interface: ``klbridge {spectrum,compare,verify,sample}``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import export
from .base_asymptotics import base_eigenvalues, base_value_at_one
from .bridge_asymptotics import bridge_eigenvalues
from .errors import (BracketError, ConvergenceError, DegenerateKernelError, DomainError, PoleError,
                     SizeError, TruncationWarning)
from .identities import DEFAULT_H_GRID, run_identity_suite
from .kernels import KernelSpec, critical_q
from .oracle import ASYMPTOTIC, ORACLE, TRANSFER, cached_spectrum
from .sampler import sample_paths
from .special import compute_constants
from .transfer import SecularFunction, bridge_roots, rank_one_root, synthesize_bridge_eigenfunction

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
PROCESSES = ("fbm", "bridge", "rank_one")
METHODS = (ORACLE, ASYMPTOTIC, TRANSFER)
GOLDEN_RTOL = 1e-10
# bridge endpoint values are zero up to roundoff; only they need an absolute floor
GOLDEN_ATOL = 1e-13
TRANSFER_TRUNCATION = 200


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    h: Optional[float]
    process: str = "fbm"
    q: Optional[float] = None
    method: Tuple[str, ...] = (ORACLE,)
    n_eigs: int = 10
    grid_nodes: int = 2000
    truncation: Optional[int] = None
    output_path: Optional[str] = None
    output_format: str = export.CSV
    seed: int = 0
    paths: int = 1
    points: int = 101
    write_golden: Optional[str] = None
    golden: Optional[str] = None
    tol_scale: float = 1.0
    xi_one: bool = False
    extras: dict = field(default_factory=dict)

    @property
    def kernel(self) -> KernelSpec:
        base = KernelSpec.fbm(self.h)
        if self.process == "bridge":
            return KernelSpec.bridge_of(base)
        if self.process == "rank_one":
            return KernelSpec.rank_one(base, self.q)
        return base

    @property
    def is_bridge(self) -> bool:
        return self.process == "bridge" or (self.process == "rank_one" and self.kernel.is_bridge)


# ---------------------------------------------------------------------------
# parsing and validation
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="klbridge", description="KL spectra of fBm, its bridge and rank-one perturbations")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_h=True):
        p.add_argument("--h", type=float, required=need_h, help="Hurst exponent in (0, 1)")
        p.add_argument("--process", choices=PROCESSES, default="fbm")
        p.add_argument("--q", type=float, default=None, help="rank-one strength (rank_one only)")
        p.add_argument("--n", type=int, default=10, help="number of eigenvalues")
        p.add_argument("--grid", type=int, default=2000, help="Nystrom nodes for the oracle")
        p.add_argument("--truncation", type=int, default=None)
        p.add_argument("--out", default=None, help="output file (stdout when absent)")
        p.add_argument("--format", choices=export.FORMATS, default=export.CSV)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("spectrum", help="tabulate n, lambda, nu, phi(1)")
    common(p)
    p.add_argument("--method", default=ORACLE, choices=METHODS)
    p.add_argument("--write-golden", default=None, metavar="PATH", help="store the table as a golden JSON file")
    p.add_argument("--golden", default=None, metavar="PATH", help="compare against a golden JSON file")

    p = sub.add_parser("compare", help="relative errors between two methods")
    common(p)
    p.add_argument("--method", default=f"{ORACLE},{ASYMPTOTIC}", help="two methods, comma separated")

    p = sub.add_parser("verify", help="run the identity checks")
    common(p, need_h=False)
    p.add_argument("--tol-scale", type=float, default=1.0, help=argparse.SUPPRESS)

    p = sub.add_parser("sample", help="KL sample paths")
    common(p)
    p.add_argument("--method", default=ORACLE, choices=(ORACLE,))
    p.add_argument("--paths", type=int, default=1)
    p.add_argument("--points", type=int, default=101, help="uniform t grid size on [0, 1]")
    p.add_argument("--xi-one", action="store_true", help=argparse.SUPPRESS)
    return parser


def make_config(ns: argparse.Namespace) -> RunConfig:
    if ns.h is not None and not 0.0 < ns.h < 1.0:
        raise UsageError(f"--h must lie in (0, 1), got {ns.h}")
    if ns.process == "rank_one" and ns.q is None:
        raise UsageError("--process rank_one requires --q")
    if ns.process != "rank_one" and ns.q is not None:
        raise UsageError("--q only applies to --process rank_one")
    if ns.n < 1:
        raise UsageError("--n must be >= 1")
    if ns.grid < 2:
        raise UsageError("--grid must be >= 2")
    if ns.truncation is not None and ns.truncation < 1:
        raise UsageError("--truncation must be >= 1")
    if ns.seed < 0:
        raise UsageError("--seed must be >= 0")
    methods = tuple(m.strip() for m in str(getattr(ns, "method", ORACLE)).split(","))
    if any(m not in METHODS for m in methods):
        raise UsageError(f"unknown method in {ns.method!r}; choose from {', '.join(METHODS)}")
    if ns.command == "compare" and len(methods) != 2:
        raise UsageError("compare needs exactly two methods, e.g. --method oracle,asymptotic")
    cfg = RunConfig(
        command=ns.command, h=ns.h, process=ns.process, q=ns.q, method=methods, n_eigs=ns.n,
        grid_nodes=ns.grid, truncation=ns.truncation, output_path=ns.out, output_format=ns.format,
        seed=ns.seed, paths=getattr(ns, "paths", 1), points=getattr(ns, "points", 101),
        write_golden=getattr(ns, "write_golden", None), golden=getattr(ns, "golden", None),
        tol_scale=getattr(ns, "tol_scale", 1.0), xi_one=getattr(ns, "xi_one", False),
    )
    if cfg.process == "rank_one" and cfg.q < critical_q(KernelSpec.fbm(cfg.h)) * (1.0 + 1e-12):
        raise UsageError("--q must not lie below the critical value -1/K(1,1) = -1")
    for m in methods:
        _check_method(cfg, m)
    if cfg.command == "sample":
        if cfg.paths < 1:
            raise UsageError("--paths must be >= 1")
        if cfg.points < 2:
            raise UsageError("--points must be >= 2")
    if cfg.output_format == export.SVG and cfg.command == "verify":
        raise UsageError("verify writes csv or json only")
    return cfg


def _check_method(cfg: RunConfig, method: str) -> None:
    if method == ASYMPTOTIC and cfg.process == "rank_one" and not cfg.is_bridge:
        raise UsageError("no closed-form asymptotics for a non-critical rank_one kernel; use oracle or transfer")
    if method == TRANSFER and cfg.process == "fbm":
        raise UsageError("transfer applies to bridge or rank_one processes")


# ---------------------------------------------------------------------------
# spectra by method
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumTable:
    method: str
    values: np.ndarray
    value_at_one: np.ndarray

    def nu(self, h) -> np.ndarray:
        c = compute_constants(h)
        return (c.lambda_scale / self.values) ** (1.0 / (2.0 * c.h + 1.0))


def compute_table(cfg: RunConfig, method: str) -> SpectrumTable:
    n = cfg.n_eigs
    h = cfg.h
    if method == ORACLE:
        sp = cached_spectrum(cfg.kernel, cfg.grid_nodes)
        if len(sp) < n:
            raise SizeError(f"oracle resolved only {len(sp)} eigenvalues")
        return SpectrumTable(method, sp.values[:n].copy(), sp.value_at_one[:n].copy())
    if method == ASYMPTOTIC:
        if cfg.is_bridge:
            return SpectrumTable(method, bridge_eigenvalues(h, n), np.zeros(n))
        return SpectrumTable(method, base_eigenvalues(h, n),
                             np.array([base_value_at_one(h, k) for k in range(1, n + 1)]))
    base = cached_spectrum(KernelSpec.fbm(h), cfg.grid_nodes)
    k = min(len(base), cfg.truncation or max(TRANSFER_TRUNCATION, n + 50))
    sf = SecularFunction.from_spectrum(base, k)
    if cfg.is_bridge:
        mu = bridge_roots(sf, n)
    else:
        mu = np.array([rank_one_root(sf, cfg.q, j) for j in range(1, n + 1)])
    values = sf.eigenvalue(mu)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        at_one = np.array([float(synthesize_bridge_eigenfunction(base, lam, [1.0], k)[0]) for lam in values])
    return SpectrumTable(method, values, at_one)


def frequency_offset(cfg: RunConfig) -> float:
    c = compute_constants(cfg.h)
    return c.gamma_bridge if cfg.is_bridge else c.gamma


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _emit(cfg: RunConfig, text: str, out=None) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        (out or sys.stdout).write(text)


def _meta(cfg: RunConfig, **more) -> dict:
    meta = {"command": cfg.command, "h": cfg.h, "process": cfg.process, "q": cfg.q,
            "method": ",".join(cfg.method), "n": cfg.n_eigs, "grid": cfg.grid_nodes}
    meta.update(more)
    return meta


SPECTRUM_COLUMNS = ["n", "lambda", "nu", "value_at_one"]


def spectrum_rows(cfg: RunConfig, table: SpectrumTable) -> List[list]:
    nu = table.nu(cfg.h)
    return [[i + 1, float(table.values[i]), float(nu[i]), float(table.value_at_one[i])]
            for i in range(len(table.values))]


def check_golden(path: str, rows: Sequence[Sequence], rtol: float = GOLDEN_RTOL) -> List[str]:
    """Mismatch messages between ``rows`` and a stored golden table (empty when equal)."""
    _, data = export.read_json_table(path)
    problems = []
    if len(data) != len(rows):
        return [f"golden has {len(data)} rows, run produced {len(rows)}"]
    for rec, row in zip(data, rows):
        for col, val in zip(SPECTRUM_COLUMNS, row):
            ref = rec[col]
            if not math.isclose(float(val), float(ref), rel_tol=rtol, abs_tol=GOLDEN_ATOL):
                problems.append(f"n={row[0]} {col}: {val!r} vs golden {ref!r}")
    return problems


def cmd_spectrum(cfg: RunConfig, out=None) -> int:
    method = cfg.method[0]
    table = compute_table(cfg, method)
    rows = spectrum_rows(cfg, table)
    meta = _meta(cfg)
    if cfg.write_golden:
        with open(cfg.write_golden, "w") as fh:
            fh.write(export.table_to_json(SPECTRUM_COLUMNS, rows, meta))
    n = [r[0] for r in rows]
    plot = ({f"log10 lambda ({method})": (n, [math.log10(r[1]) for r in rows])},
            f"{cfg.process} spectrum, H={cfg.h:g}", "n", "log10 lambda_n")
    _emit(cfg, export.render(cfg.output_format, SPECTRUM_COLUMNS, rows, meta, plot), out)
    if cfg.golden:
        problems = check_golden(cfg.golden, rows)
        for msg in problems:
            print(f"golden mismatch: {msg}", file=sys.stderr)
        if problems:
            return EXIT_FAIL
    return EXIT_OK


COMPARE_COLUMNS = ["n", "lambda_a", "lambda_b", "rel_err", "nu_offset_a", "nu_offset_b"]


def cmd_compare(cfg: RunConfig, out=None) -> int:
    ma, mb = cfg.method
    a, b = compute_table(cfg, ma), compute_table(cfg, mb)
    off = frequency_offset(cfg)
    n = np.arange(1, cfg.n_eigs + 1)
    base_nu = math.pi * (n + off)
    rel = np.abs(a.values - b.values) / np.abs(b.values)
    da, db = a.nu(cfg.h) - base_nu, b.nu(cfg.h) - base_nu
    rows = [[int(n[i]), float(a.values[i]), float(b.values[i]), float(rel[i]), float(da[i]), float(db[i])]
            for i in range(len(n))]
    floor = 1e-17
    plot = ({f"log10 rel err {ma} vs {mb}": (n, np.log10(np.maximum(rel, floor)))},
            f"{cfg.process} H={cfg.h:g}: {ma} vs {mb}", "n", "log10 relative error")
    meta = _meta(cfg, method_a=ma, method_b=mb, frequency_offset=off)
    _emit(cfg, export.render(cfg.output_format, COMPARE_COLUMNS, rows, meta, plot), out)
    return EXIT_OK


VERIFY_COLUMNS = ["identity", "lhs", "rhs", "diff", "tol", "status"]


def cmd_verify(cfg: RunConfig, out=None) -> int:
    h_values = DEFAULT_H_GRID if cfg.h is None else (cfg.h,)
    results = run_identity_suite(h_values, tol_scale=cfg.tol_scale)
    rows = [[r.name, r.lhs, r.rhs, r.diff, r.tol, "PASS" if r.passed else "FAIL"] for r in results]
    stream = out or sys.stdout
    if cfg.output_path:
        _emit(cfg, export.render(cfg.output_format, VERIFY_COLUMNS, rows, _meta(cfg)))
    for r in rows:
        stream.write(f"{r[0]:<52s} lhs={r[1]: .12e} rhs={r[2]: .12e} |diff|={r[3]:.3e} {r[5]}\n")
    ok = all(r.passed for r in results)
    stream.write(f"{sum(r.passed for r in results)}/{len(results)} identities passed\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sample(cfg: RunConfig, out=None) -> int:
    sp = cached_spectrum(cfg.kernel, cfg.grid_nodes)
    M = min(cfg.truncation or 200, len(sp))
    t = np.linspace(0.0, 1.0, cfg.points)
    xi = np.ones((cfg.paths, M)) if cfg.xi_one else None
    paths = sample_paths(sp, t, M, cfg.paths, cfg.seed, xi=xi)
    columns, rows = export.paths_table(paths)
    plot = ({f"path {p.path_index}": (t, p.values) for p in paths},
            f"{cfg.process} sample paths, H={cfg.h:g}, M={M}", "t", "X(t)")
    meta = _meta(cfg, seed=cfg.seed, truncation=M, paths=cfg.paths, spectrum=paths[0].source_spectrum_tag)
    _emit(cfg, export.render(cfg.output_format, columns, rows, meta, plot), out)
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "compare": cmd_compare, "verify": cmd_verify, "sample": cmd_sample}


def _thread_limit():
    raw = os.environ.get("KLB_THREADS")
    if raw is None or raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"KLB_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"KLB_THREADS must be a positive integer, got {raw!r}")
    return value


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = make_config(ns)
        limit = _thread_limit()
    except (UsageError, DomainError, DegenerateKernelError) as exc:
        print(f"klbridge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if limit is None:
            return COMMANDS[cfg.command](cfg, out)
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=limit):
            return COMMANDS[cfg.command](cfg, out)
    except (ConvergenceError, BracketError, PoleError, SizeError, np.linalg.LinAlgError) as exc:
        print(f"klbridge: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"klbridge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
