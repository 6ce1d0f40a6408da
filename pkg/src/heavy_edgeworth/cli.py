"""Command line front end.

    heavy-edgeworth expand  SPEC --n 20 --grid -3:3:121 [--orders K] [--out FILE]
    heavy-edgeworth oracle  SPEC --n 20 --grid -2:2:41 --engine inversion|mc|conv
    heavy-edgeworth compare SPEC --n 20 --grid -2:2:41
    heavy-edgeworth replay  FILE.csv [--out FILE]

SPEC files use the key=value grammar in :mod:`heavy_edgeworth.config`.
CSV output starts with ``#`` manifest lines that are enough for ``replay``
to regenerate the same data rows.  Exit codes: 0 ok, 2 bad config or
arguments, 3 domain error, 4 quadrature failure.  HEAVY_EDGEWORTH_WORKERS
caps the worker count.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields, replace

import numpy as np

from . import __version__
from .config import ConfigError, SpecConfig, load_config, parse_config
from .density_model import DensitySpec, largest_moment_order
from .edgeworth_correction import corrected_density, moderate_region_bound, tail_equivalent
from .errors import DomainError, InsufficientCumulants, MomentDiverges, QuadratureNonConvergence
from .oracles import (
    OracleConfig,
    density_by_convolution,
    density_by_inversion,
    mc_density,
    sample_sum,
    worker_count,
)

EXIT_CONFIG, EXIT_DOMAIN, EXIT_QUAD = 2, 3, 4


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(v)
    return f"{float(v):.16e}"


def parse_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, count = text.split(":")
        lo_f, hi_f, c = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise ConfigError(f"grid must be min:max:count, got {text!r}") from exc
    if c < 1 or (c > 1 and not hi_f > lo_f):
        raise ConfigError(f"grid needs count >= 1 and max > min, got {text!r}")
    return lo_f, hi_f, c


def grid_points(grid: tuple[float, float, int]) -> np.ndarray:
    lo, hi, c = grid
    return np.linspace(lo, hi, c) if c > 1 else np.array([lo])


def parse_ns(text: str) -> list[int]:
    try:
        ns = [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--n expects integers, got {text!r}") from exc
    if any(n < 1 for n in ns):
        raise ConfigError("n must be positive")
    return ns


def region(x: float, alpha: float, n: int) -> str:
    bound = moderate_region_bound(alpha, n) if n >= 2 else 0.0
    ax = abs(x)
    if ax <= min(1.0, bound):
        return "central"
    return "moderate" if ax <= bound else "large"


def _pmap(fn, items, workers: int):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))  # preserves grid order


# --------------------------------------------------------------------------
# commands; each returns (header columns, rows)


def run_expand(spec: DensitySpec, ns, xs, orders: int | None, workers: int):
    top = largest_moment_order(spec.alpha)
    if orders is not None:
        top = min(top, orders + 2)
    js = [j for j in range(3, top + 1) if not (spec.symmetric and j % 2)]
    cols = ["x", "n", "gaussian"] + [f"edgeworth_{j}" for j in js] + ["correction", "total", "case_tag"]
    rows = []
    for n in ns:
        res = _pmap(lambda x: corrected_density(spec, x, n, orders), xs, workers)
        for r in res:
            terms = dict(r.edgeworth_terms)
            rows.append([r.x, n, r.gaussian] + [terms[j] for j in js] + [r.correction, r.total, r.case_tag])
    return cols, rows


def run_oracle(spec: DensitySpec, ns, xs, engine: str, ocfg: OracleConfig):
    cols = ["x", "n", "density", "engine"] + (["stderr"] if engine == "mc" else [])
    rows = []
    for n in ns:
        if engine == "inversion":
            dens = density_by_inversion(spec, xs, n, ocfg)
            rows += [[x, n, d, engine] for x, d in zip(xs, dens)]
        elif engine == "conv":
            dens = density_by_convolution(spec, xs, n)
            rows += [[x, n, d, engine] for x, d in zip(xs, dens)]
        else:
            est = mc_density(sample_sum(spec, n, ocfg), xs, ocfg)
            rows += [[x, n, d, engine, s] for x, d, s in zip(xs, est.density, est.stderr)]
    return cols, rows


def _tail_eq(spec: DensitySpec, x: float, n: int) -> float:
    try:
        if x > 0:
            return tail_equivalent(spec, x, n)
        if x < 0:
            return tail_equivalent(spec.mirrored(), -x, n)
    except DomainError:
        pass
    return math.nan


def run_compare(spec: DensitySpec, ns, xs, ocfg: OracleConfig, workers: int):
    cols = ["x", "n", "oracle", "gaussian_err", "edgeworth_err", "corrected_err", "tail_equivalent", "region"]
    rows = []
    for n in ns:
        oracle = density_by_inversion(spec, xs, n, ocfg)
        res = _pmap(lambda x: corrected_density(spec, x, n), xs, workers)
        for x, o, r in zip(xs, oracle, res):
            rows.append([x, n, o, r.gaussian - o, r.edgeworth_only - o, r.total - o,
                         _tail_eq(spec, x, n), region(x, spec.alpha, n)])
    return cols, rows


# --------------------------------------------------------------------------
# CSV and manifest


def manifest_lines(command: str, cfg: SpecConfig, args: dict, out: str | None, wall: float,
                   ocfg: OracleConfig | None = None) -> list[str]:
    lines = [f"# tool: heavy-edgeworth {__version__}", f"# command: {command}"]
    lines += [f"# spec.{k}: {v}" for k, v in cfg.items()]
    lines += [f"# arg.{k}: {v}" for k, v in args.items()]
    if ocfg is not None:  # informational; replay rebuilds it from the arg lines
        lines += [f"# oracle.{f.name}: {getattr(ocfg, f.name)}" for f in fields(ocfg)]
    lines += [f"# output: {out or '-'}", f"# wall_clock_s: {wall:.3f}"]
    return lines


def write_csv(stream, manifest: list[str], cols, rows) -> None:
    for line in manifest:
        stream.write(line + "\n")
    stream.write(",".join(cols) + "\n")
    for r in rows:
        stream.write(",".join(fmt(v) for v in r) + "\n")


def read_manifest(path: str) -> tuple[str, SpecConfig, dict]:
    command, spec_lines, args = None, [], {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, val = line[1:].strip().partition(": ")
            if key == "command":
                command = val
            elif key.startswith("spec."):
                spec_lines.append(f"{key[5:]}={val}")
            elif key.startswith("arg."):
                args[key[4:]] = val
    if command is None:
        raise ConfigError(f"{path} has no manifest header")
    return command, parse_config("\n".join(spec_lines)), args


def _execute(command: str, cfg: SpecConfig, args: dict, out: str | None) -> float:
    """Run one command from normalized string arguments; returns max |corrected_err| for compare."""
    t0 = time.perf_counter()
    spec = cfg.build()
    ns = parse_ns(args["n"])
    xs = grid_points(parse_grid(args["grid"]))
    workers = worker_count()
    ocfg = OracleConfig()
    if "seed" in args:
        ocfg = replace(ocfg, mc_seed=int(args["seed"]), mc_samples=int(args["samples"]),
                       histogram_bins=float(args["bin_width"]))
    summary = math.nan
    if command == "expand":
        orders = None if args.get("orders", "all") == "all" else int(args["orders"])
        cols, rows = run_expand(spec, ns, xs, orders, workers)
    elif command == "oracle":
        cols, rows = run_oracle(spec, ns, xs, args["engine"], ocfg)
    elif command == "compare":
        cols, rows = run_compare(spec, ns, xs, ocfg, workers)
        summary = max(abs(r[5]) for r in rows)
    else:
        raise ConfigError(f"unknown command {command!r}")
    manifest = manifest_lines(command, cfg, args, out, time.perf_counter() - t0,
                              ocfg if command != "expand" else None)
    if out and out != "-":
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            write_csv(fh, manifest, cols, rows)
    else:
        buf = io.StringIO()
        write_csv(buf, manifest, cols, rows)
        sys.stdout.write(buf.getvalue())
    return summary


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heavy-edgeworth", description="Corrected Edgeworth densities for heavy-tailed sums.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("spec", help="key=value spec file")
        p.add_argument("--n", required=True, help="sample size(s), comma separated")
        p.add_argument("--grid", required=True, help="min:max:count")
        p.add_argument("--out", default=None, help="CSV path (default stdout)")

    p = sub.add_parser("expand", help="evaluate the corrected expansion on a grid")
    common(p)
    p.add_argument("--orders", type=int, default=None, help="keep G_3..G_{K+2}; default all finite")
    p = sub.add_parser("oracle", help="reference density on a grid")
    common(p)
    p.add_argument("--engine", choices=("inversion", "mc", "conv"), default="inversion")
    p.add_argument("--seed", type=int, default=OracleConfig.mc_seed)
    p.add_argument("--samples", type=int, default=OracleConfig.mc_samples)
    p.add_argument("--bin-width", type=float, default=OracleConfig.histogram_bins)
    p = sub.add_parser("compare", help="expansion errors against the inversion oracle")
    common(p)
    p = sub.add_parser("replay", help="re-run the command recorded in a CSV manifest")
    p.add_argument("csv")
    p.add_argument("--out", default=None)
    return ap


def _join_grid(argv: list[str]) -> list[str]:
    # "--grid -3:3:121" would read as an option; glue it to the flag
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--grid":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--grid={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = build_parser().parse_args(_join_grid(argv))
    try:
        if ns.command == "replay":
            command, cfg, args = read_manifest(ns.csv)
            _execute(command, cfg, args, ns.out)
            return 0
        cfg = load_config(ns.spec)
        args = {"n": ns.n, "grid": ns.grid}
        if ns.command == "expand":
            args["orders"] = "all" if ns.orders is None else str(ns.orders)
        if ns.command == "oracle":
            args["engine"] = ns.engine
            if ns.engine == "mc":
                args.update(seed=str(ns.seed), samples=str(ns.samples), bin_width=repr(ns.bin_width))
        summary = _execute(ns.command, cfg, args, ns.out)
        if ns.command == "compare":
            print(f"max|corrected_err| = {summary:.6e}", file=sys.stderr)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, MomentDiverges, InsufficientCumulants) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except QuadratureNonConvergence as exc:
        print(f"quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_QUAD


if __name__ == "__main__":
    sys.exit(main())
