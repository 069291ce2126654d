"""Command-line front end.

Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import KEYS, convert, dump_config, load_config
from .demodulator import FiringDeficit, IllConditioned, demodulate_block
from .experiments import (
    ConfigError,
    ExperimentConfig,
    plot_sep_svg,
    results_to_csv,
    run_experiment,
    setup_trial,
    write_atomic,
)
from .iftem_sampler import NonPositiveDrive, sample
from .signal_model import make_constellation

OUTDIR_ENV = "IFTEM_OUTDIR"
EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", "-c", help="key = value config file")
    g = p.add_argument_group("config overrides (win over the file)")
    for key in KEYS:
        names = [f"--{key}"]
        if "_" in key:
            names.append(f"--{key.replace('_', '-')}")
        g.add_argument(*names, dest=f"cfg_{key}", metavar="VALUE")


def _config_from_args(args) -> ExperimentConfig:
    overrides = {}
    for key in KEYS:
        raw = getattr(args, f"cfg_{key}")
        if raw is not None:
            overrides[key] = convert(key, raw)
    return load_config(args.config, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iftem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="Monte Carlo SEP sweep; writes CSV and SVG")
    _add_config_flags(run)
    run.add_argument("--outdir", "-o", default=None,
                     help=f"output directory (default ${OUTDIR_ENV} or ./results)")
    run.add_argument("--workers", "-j", type=int, default=1)
    run.add_argument("--no-plot", action="store_true")

    tr = sub.add_parser("trace", help="run one block and dump every intermediate as JSON")
    _add_config_flags(tr)
    tr.add_argument("--trial", type=int, default=0)
    tr.add_argument("--b-index", type=int, default=0, help="index into the bandwidth grid")
    tr.add_argument("--ebn0-index", type=int, default=0, help="index into the Eb/N0 grid")
    tr.add_argument("--out", default=None, help="write JSON here instead of stdout")

    val = sub.add_parser("validate-config", help="parse and check a config, print it normalized")
    _add_config_flags(val)

    sub.add_parser("version", help="print the package version")
    return parser


def _summary(results) -> str:
    head = f"{'B3dB*T':>8} {'Eb/N0':>7} {'symbols':>9} {'errors':>7} {'SEP':>11} {'95% CI':>25} {'fail':>5}"
    rows = [head]
    for r in results:
        ci = f"[{r.ci95_lo:.3e}, {r.ci95_hi:.3e}]"
        rows.append(f"{r.b3db_tsym:8.3g} {r.ebn0_db:7.2f} {r.symbols:9d} {r.errors:7d} "
                    f"{r.sep:11.4e} {ci:>25} {r.deficit_count + r.illcond_count:5d}")
    return "\n".join(rows)


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    outdir = Path(args.outdir or os.environ.get(OUTDIR_ENV) or "results")
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        print(f"iftem: cannot create output directory {outdir}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    results = run_experiment(cfg, workers=args.workers)
    csv_path = outdir / "sep.csv"
    write_atomic(str(csv_path), results_to_csv(results))
    written = [csv_path]
    if not args.no_plot:
        svg_path = outdir / "sep_vs_ebn0.svg"
        title = f"{cfg.M}-PAM, L={cfg.L}, IF-TEM receiver"
        write_atomic(str(svg_path), plot_sep_svg(results, title))
        written.append(svg_path)
    print(_summary(results))
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


def trace_block(cfg: ExperimentConfig, trial: int = 0, ib: int = 0, ie: int = 0) -> dict:
    """Every intermediate of one transmission, as plain JSON-ready data."""
    if not (0 <= ib < len(cfg.b3db_tsym) and 0 <= ie < len(cfg.ebn0_db)):
        raise ConfigError("grid index out of range")
    ts = setup_trial(cfg, ib, ie, trial)
    const = make_constellation(cfg.M)
    p = ts.params
    out = {
        "trial": trial,
        "b3db_tsym": cfg.b3db_tsym[ib],
        "ebn0_db": cfg.ebn0_db[ie],
        "N0": ts.noise.N0,
        "params": {"b": p.b, "kappa": p.kappa, "delta": p.delta, "dt": p.dt, "c_max": p.c_max},
        "symbols": ts.block.symbols.tolist(),
        "symbol_indices": ts.indices.tolist(),
    }
    rec = sample(ts.block, ts.noise, p)
    out["firings"] = rec.firings.tolist()
    out["encodings"] = rec.encodings.tolist()
    dem = demodulate_block(rec, p, ts.block.pulse, cfg.L, const)
    obs = dem.observation
    out.update(
        counts=obs.counts.tolist(),
        t_min=obs.t_min.tolist(),
        t_max=obs.t_max.tolist(),
        y=obs.y.tolist(),
        y_minus_b=(obs.y - p.b).tolist(),
        P=obs.P.tolist(),
        P_times_s=(obs.P @ ts.block.symbols).tolist(),
        condition=dem.condition,
        soft=dem.soft.tolist(),
        hard=dem.indices.tolist(),
        symbol_errors=int(np.count_nonzero(dem.indices != ts.indices)),
    )
    return out


def cmd_trace(args) -> int:
    cfg = _config_from_args(args)
    try:
        data = trace_block(cfg, args.trial, args.b_index, args.ebn0_index)
    except (FiringDeficit, IllConditioned, NonPositiveDrive) as e:
        print(f"iftem: trace failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    text = json.dumps(data, indent=1) + "\n"
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _config_from_args(args)
    sys.stdout.write(dump_config(cfg))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(f"iftem {__version__}")
        return EXIT_OK
    handler = {"run": cmd_run, "trace": cmd_trace, "validate-config": cmd_validate}[args.command]
    try:
        return handler(args)
    except ConfigError as e:
        print(f"iftem: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"iftem: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
