"""Trading coordination effort for regret with the alpha and beta knobs.

alpha is the per-round coordination probability; beta scales the allowed
projection gap delta^t = c_beta (1-beta)^2 sqrt(K/t) S^2. Lowering alpha
saves coordination rounds; lowering beta lets each projection stop earlier.
The sweeps show the regime the trade-off rewards: infrequent but reasonably
accurate coordination keeps almost all of the benefit at a fraction of the
projection work, while very sloppy projections are worse than not
coordinating at all.
"""

import numpy as np
from dataclasses import replace

from coolsim import RunConfig, run_algorithms

base = RunConfig(
    structure="hemimetric", n=10, r=9.0, loss="absolute", order="random",
    T=500, alpha=1.0, beta=1.0, seed=42, runs=10,
)
iol = np.mean([o.final_regret for o in run_algorithms(base, ("iol",))["iol"]])
print(f"independent baseline regret: {iol:.1f}\n")

print("alpha sweep (beta = 1, exact projections when they happen)")
for alpha in (1.0, 0.5, 0.1, 0.05, 0.0):
    outs = run_algorithms(replace(base, alpha=alpha), ("cool",))["cool"]
    regret = np.mean([o.final_regret for o in outs])
    rounds = np.mean([o.xi.sum() for o in outs])
    print(f"  alpha={alpha:<5} regret {regret:7.1f} ({regret / iol:.2f} of iol), "
          f"{rounds:5.1f} coordination rounds")

print("\nbeta sweep (alpha = 1, approximate projections every round)")
for beta in (1.0, 0.95, 0.9, 0.85, 0.75, 0.65, 0.5, 0.3):
    outs = run_algorithms(replace(base, beta=beta), ("cool",))["cool"]
    regret = np.mean([o.final_regret for o in outs])
    sweeps = np.mean([o.total_sweeps for o in outs])
    secs = np.mean([o.total_proj_time_us for o in outs]) / 1e6
    print(f"  beta={beta:<5} regret {regret:7.1f} ({regret / iol:.2f} of iol), "
          f"{sweeps:7.0f} sweeps, {secs:.3f}s projecting")
