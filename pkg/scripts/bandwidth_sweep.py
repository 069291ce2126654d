"""SEP-vs-Eb/N0 curves for several pulse bandwidths.

    python scripts/bandwidth_sweep.py [scripts/sweep.cfg] [outdir]
"""

import os
import sys
import time
from pathlib import Path

from iftem.config import load_config
from iftem.experiments import plot_sep_svg, results_to_csv, run_experiment, write_atomic

HERE = Path(__file__).parent

if __name__ == "__main__":
    cfg_path = sys.argv[1] if len(sys.argv) > 1 else HERE / "sweep.cfg"
    outdir = Path(sys.argv[2] if len(sys.argv) > 2 else "results/bandwidth_sweep")
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = load_config(cfg_path)

    t = time.perf_counter()
    results = run_experiment(cfg, workers=os.cpu_count() or 1)
    print(f"{len(results)} grid points in {time.perf_counter() - t:.0f} s")
    for r in results:
        print(f"B*T={r.b3db_tsym:<4g} Eb/N0={r.ebn0_db:5.1f} dB  SEP={r.sep:.3e}  "
              f"[{r.ci95_lo:.2e}, {r.ci95_hi:.2e}]  failed blocks={r.deficit_count + r.illcond_count}")

    write_atomic(str(outdir / "sep.csv"), results_to_csv(results))
    write_atomic(str(outdir / "sep_vs_ebn0.svg"), plot_sep_svg(results, f"{cfg.M}-PAM, L={cfg.L}"))
