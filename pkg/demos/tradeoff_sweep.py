"""Queue and energy against the arrival rate, greedy vs random benchmark.

Sweeps the arrival rate well past the benchmark's breaking point, writes the
CSV (same schema as `twtsim sweep`), and plots the two figure-of-merit
curves: total epoch-sampled backlog and energy per epoch.  The benchmark's
backlog blows up first; the greedy keeps the network stable to much higher
load while spending less energy.
"""

import dataclasses
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from twtsim import SweepSpec, default_sim_config, rows_to_csv, run_sweep

base = dataclasses.replace(default_sim_config(), num_epochs=200)
spec = SweepSpec(
    base=base,
    lambda_grid=(0.2, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0),
    v_grid=(1000.0,),
    t_grid_s=(1.0,),
    algorithms=("jtwsa", "random"),
    seeds=(1,),
)
rows = run_sweep(spec, parallel=4)

csv_path = Path(__file__).with_name("tradeoff_sweep.csv")
csv_path.write_text(rows_to_csv(rows))
print(f"wrote {len(rows)} rows to {csv_path}")

by_alg = {"jtwsa": [], "random": []}
for row in rows:
    by_alg[row["algorithm"]].append(row)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
for alg, marker in (("jtwsa", "o"), ("random", "s")):
    pts = sorted(by_alg[alg], key=lambda r: r["lambda_files_per_s"])
    lam = [r["lambda_files_per_s"] for r in pts]
    q = [r["avg_queue_epoch_sampled_bits"] / 8e6 for r in pts]
    e = [r["avg_energy_J_per_epoch"] for r in pts]
    stable_marks = ["filled" if r["stable"] else "open" for r in pts]
    ax1.plot(lam, q, marker=marker, label=alg)
    ax2.plot(lam, e, marker=marker, label=alg)
    for r in pts:
        if not r["stable"]:
            ax1.annotate("unstable", (r["lambda_files_per_s"],
                                      r["avg_queue_epoch_sampled_bits"] / 8e6),
                         textcoords="offset points", xytext=(4, 4), fontsize=7)

ax1.set_xlabel("arrival rate (files/s per station)")
ax1.set_ylabel("avg total backlog at epoch starts (MB)")
ax1.set_yscale("log")
ax1.legend()
ax2.set_xlabel("arrival rate (files/s per station)")
ax2.set_ylabel("avg energy per epoch (J)")
ax2.legend()
fig.tight_layout()
out = Path(__file__).with_name("tradeoff_sweep.png")
fig.savefig(out, dpi=120)
print(f"figure saved to {out}")

for row in rows:
    flag = "stable" if row["stable"] else "UNSTABLE"
    print(f"{row['algorithm']:6s} lambda={row['lambda_files_per_s']:<4} "
          f"E={row['avg_energy_J_per_epoch']:.3f} J  "
          f"Q={row['avg_queue_epoch_sampled_bits'] / 8e6:8.2f} MB  {flag}")
