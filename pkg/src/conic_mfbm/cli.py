"""Command-line front end: ``price``, ``sweep`` and ``check``.

Exit codes: 0 success, 1 invalid input or configuration (including I/O),
2 numerical failure (non-convergence, or a failed Monte Carlo check).
Diagnostics go to stderr prefixed with ``error:`` or ``warn:``.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

from .distortion import DistortionSpec
from .errors import ConvergenceError, RegimeWarning
from .mc import McConfig, mc_quote
from .numerics import Tolerance
from .pricing import OptionSpec, quote
from .terminal_law import DriftConvention, JumpParams, ModelParams, build_law

CSV_COLUMNS = ("gamma", "hurst", "sigma", "epsilon", "lambda", "mu1", "sigma1_sq", "s0",
               "strike", "r", "maturity", "drift", "kind", "bid", "ask", "mid", "spread")

REQUIRED = ("s0", "r", "sigma", "epsilon", "hurst", "maturity", "strike", "kind")
DEFAULTS = {"lambda": 0.0, "mu1": 0.0, "sigma1_sq": 0.0, "gamma": 0.0,
            "drift": "compensated", "tail_tol": 1e-12, "quad_tol": 1e-8}
NUMERIC = ("s0", "r", "sigma", "epsilon", "hurst", "maturity", "lambda", "mu1",
           "sigma1_sq", "strike", "gamma", "tail_tol", "quad_tol")
VARYABLE = ("gamma", "hurst", "sigma", "epsilon", "lambda", "mu1", "sigma1_sq", "s0",
            "strike", "r", "maturity")


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 1."""


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    jumps: JumpParams
    option: OptionSpec
    gamma: float = 0.0
    drift: DriftConvention = DriftConvention.COMPENSATED
    tail_tol: float = 1e-12
    quad_tol: float = 1e-8

    def as_flat(self) -> dict:
        m, j = self.model, self.jumps
        return {"s0": m.s0, "r": m.r, "sigma": m.sigma, "epsilon": m.epsilon,
                "hurst": m.hurst, "maturity": m.maturity, "lambda": j.lam, "mu1": j.mu1,
                "sigma1_sq": j.sigma1_sq, "strike": self.option.strike,
                "kind": self.option.kind.value, "gamma": self.gamma,
                "drift": self.drift.value, "tail_tol": self.tail_tol,
                "quad_tol": self.quad_tol}


def config_from_dict(raw: dict, source: str = "config") -> RunConfig:
    """Validate a flat parameter mapping and build a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    unknown = sorted(set(raw) - set(REQUIRED) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"{source}: unknown field(s): {', '.join(unknown)}")
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"{source}: missing required field(s): {', '.join(missing)}")
    values = {**DEFAULTS, **raw}
    for key in NUMERIC:
        v = values[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{source}.{key}: expected a finite number, got {v!r}")
        values[key] = float(v)
    for key, allowed in (("kind", ("call", "put")), ("drift", ("compensated", "uncompensated"))):
        v = values[key]
        if not isinstance(v, str) or v.lower() not in allowed:
            raise ConfigError(f"{source}.{key}: expected one of {allowed}, got {v!r}")
        values[key] = v.lower()
    h = values["hurst"]
    if not 0.75 < h <= 1.0:
        raise ConfigError(f"{source}.hurst: {h} outside the arbitrage-free range (0.75, 1]")
    for key in ("tail_tol",):
        if not 0.0 < values[key] < 1.0:
            raise ConfigError(f"{source}.{key}: must lie in (0, 1)")
    if not values["quad_tol"] > 0:
        raise ConfigError(f"{source}.quad_tol: must be positive")
    try:
        return RunConfig(
            model=ModelParams(values["s0"], values["r"], values["sigma"], values["epsilon"],
                              values["hurst"], values["maturity"]),
            jumps=JumpParams(values["lambda"], values["mu1"], values["sigma1_sq"]),
            option=OptionSpec(values["strike"], values["kind"]),
            gamma=values["gamma"],
            drift=DriftConvention(values["drift"]),
            tail_tol=values["tail_tol"],
            quad_tol=values["quad_tol"],
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror or exc})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(raw, str(path))


def with_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    flat = cfg.as_flat()
    flat.update(overrides)
    return config_from_dict(flat, "override")


def price_point(cfg: RunConfig, method: str = "quadrature", n_grid: int = 100_000) -> dict:
    """Quote one configuration; returns a row keyed by :data:`CSV_COLUMNS`."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        law = build_law(cfg.model, cfg.jumps, cfg.drift, cfg.tail_tol)
    q = quote(cfg.option, law, DistortionSpec.wang(cfg.gamma), Tolerance(cfg.quad_tol),
              method=method, n_grid=n_grid)
    flat = cfg.as_flat()
    row = {k: flat[k] for k in CSV_COLUMNS[:13]}
    row.update(bid=q.bid, ask=q.ask, mid=q.mid, spread=q.spread)
    return row


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return f"{value:.10g}"


def _write_rows(fh, rows) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def write_csv(rows, path) -> None:
    """Write quote rows with 10 significant digits and LF line endings."""
    with open(path, "w", newline="") as fh:
        _write_rows(fh, rows)


def parse_vary(spec: str) -> tuple[str, list[float]]:
    """``NAME=LO:HI:STEP`` to an inclusive grid (decimal arithmetic, no drift)."""
    try:
        name, rng = spec.split("=", 1)
        lo, hi, step = (Decimal(p) for p in rng.split(":"))
    except (ValueError, ArithmeticError) as exc:
        raise ConfigError(f"--vary {spec!r}: expected NAME=LO:HI:STEP") from exc
    name = name.strip()
    if name not in VARYABLE:
        raise ConfigError(f"--vary {spec!r}: cannot vary {name!r}; choose from {VARYABLE}")
    if step <= 0 or hi < lo:
        raise ConfigError(f"--vary {spec!r}: need STEP > 0 and HI >= LO")
    count = int((hi - lo) / step) + 1
    return name, [float(lo + i * step) for i in range(count)]


def sweep_configs(cfg: RunConfig, varies: list[str]) -> list[RunConfig]:
    grids = [parse_vary(v) for v in varies]
    names = [n for n, _ in grids]
    if len(set(names)) != len(names):
        raise ConfigError("--vary: each parameter may be varied only once")
    return [with_overrides(cfg, **dict(zip(names, combo)))
            for combo in itertools.product(*(g for _, g in grids))]


def _price_star(args):
    return price_point(*args)


def run_sweep(configs: list[RunConfig], method: str, n_grid: int, jobs: int = 1) -> list[dict]:
    tasks = [(c, method, n_grid) for c in configs]
    if jobs > 1 and len(tasks) > 1:
        # map() preserves grid order regardless of completion order
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_price_star, tasks))
    return [price_point(*t) for t in tasks]


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON parameter file")
    common.add_argument("--gamma", type=float, help="override the stress level")
    common.add_argument("--strike", type=float, help="override the strike")
    common.add_argument("--method", choices=("quadrature", "stieltjes"), default="quadrature")
    common.add_argument("--grid", type=int, default=100_000,
                        help="grid cells for --method stieltjes")

    parser = argparse.ArgumentParser(prog="conic-mfbm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("price", parents=[common], help="quote one option as JSON")
    p.add_argument("--out", help="write the JSON here instead of stdout")
    s = sub.add_parser("sweep", parents=[common], help="grid of quotes as CSV")
    s.add_argument("--vary", action="append", default=[], metavar="NAME=LO:HI:STEP")
    s.add_argument("--out", help="CSV path (default stdout)")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    c = sub.add_parser("check", parents=[common], help="compare against Monte Carlo")
    c.add_argument("--samples", type=int, default=1_000_000)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--out", help="write the JSON report here instead of stdout")
    return parser


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _zscore(diff: float, se: float) -> float:
    if se > 0:
        return abs(diff) / se
    return 0.0 if diff == 0 else math.inf


def _check(cfg: RunConfig, samples: int, seed: int) -> tuple[dict, bool]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        law = build_law(cfg.model, cfg.jumps, cfg.drift, cfg.tail_tol)
    d = DistortionSpec.wang(cfg.gamma)
    q = quote(cfg.option, law, d, Tolerance(cfg.quad_tol))
    mq = mc_quote(cfg.option, cfg.model, cfg.jumps, cfg.drift, d, McConfig(samples, seed))
    z_bid = _zscore(mq.bid - q.bid, mq.se_bid)
    z_ask = _zscore(mq.ask - q.ask, mq.se_ask)
    ok = z_bid <= 3.0 and z_ask <= 3.0
    report = {"bid": q.bid, "ask": q.ask, "mc_bid": mq.bid, "mc_ask": mq.ask,
              "se_bid": mq.se_bid, "se_ask": mq.se_ask, "z_bid": z_bid, "z_ask": z_ask,
              "samples": samples, "seed": seed, "pass": ok}
    return report, ok


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        cfg = parse_config(args.config)
        overrides = {k: getattr(args, k) for k in ("gamma", "strike") if getattr(args, k) is not None}
        if overrides:
            cfg = with_overrides(cfg, **overrides)
        configs = sweep_configs(cfg, args.vary) if args.command == "sweep" else [cfg]
        if any(not 0.0 <= c.gamma <= 1.0 for c in configs):
            print("warn: gamma outside [0,1]", file=sys.stderr)
        if args.command == "price":
            row = price_point(cfg, args.method, args.grid)
            _emit(json.dumps(row) + "\n", args.out)
        elif args.command == "sweep":
            rows = run_sweep(configs, args.method, args.grid, max(1, args.jobs))
            if args.out:
                write_csv(rows, args.out)
            else:
                _write_rows(sys.stdout, rows)
        else:
            if args.samples < 2:
                raise ConfigError("--samples must be at least 2")
            if not 0 <= args.seed < 2 ** 64:
                raise ConfigError("--seed must be a 64-bit unsigned integer")
            report, ok = _check(cfg, args.samples, args.seed)
            _emit(json.dumps(report) + "\n", args.out)
            if not ok:
                print("error: Monte Carlo check failed (|z| > 3)", file=sys.stderr)
                return 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
