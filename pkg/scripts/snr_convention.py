"""Bandwidth comparison under both SNR conventions.

With ``symbol`` the noise level is the same for every bandwidth, so only ISI
and noise enhancement differ. With ``pulse`` the wider (narrower-band) pulse
carries less energy and is simulated against proportionally less noise,
which can reverse the ordering.

    python scripts/snr_convention.py [trials]
"""

import os
import sys
from dataclasses import replace

from iftem.experiments import ExperimentConfig, run_experiment

if __name__ == "__main__":
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else 300
    base = ExperimentConfig(M=2, L=32, b3db_tsym=(0.3, 1.0), ebn0_db=(4.0, 7.0), trials=trials)
    for conv in ("symbol", "pulse"):
        res = run_experiment(replace(base, snr_convention=conv), workers=os.cpu_count() or 1)
        print(f"convention={conv}")
        for r in res:
            print(f"  B*T={r.b3db_tsym:<4g} Eb/N0={r.ebn0_db:4.1f} dB  SEP={r.sep:.3e} "
                  f"[{r.ci95_lo:.2e}, {r.ci95_hi:.2e}]")
