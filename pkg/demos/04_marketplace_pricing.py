"""Posted-price preference elicitation on a two-group marketplace.

Each round a user with a preferred high-review item i is offered a discount
p to switch to a low-review item j; they accept iff p covers their private
cost. The platform earns u - p per accepted switch. One learner prices each
ordered pair; the coordinated run couples them through the u-bounded
hemimetric cone. Rewards use the convex pricing surrogate's gradients, so
only the accept/reject bit feeds the learners.
"""

import numpy as np

from coolsim import AirbnbConfig, airbnb_experiment, cumulative_mean_reward

cfg = AirbnbConfig(T=323, n_items=20, u=40.0, delta_slope=20.0,
                   na_rate=0.20, seed=7, runs=10)
outs = airbnb_experiment(cfg)

curves = {
    algo: np.mean([cumulative_mean_reward(o) for o in outs[algo]], axis=0)
    for algo in ("iol", "cool")
}
print(f"{cfg.runs} paired synthetic streams, T={cfg.T}, "
      f"K={cfg.n_items * (cfg.n_items - 1)} pair tasks\n")
print("cumulative mean reward per accepted-switch round:")
print("     t    iol    cool")
for t in (10, 25, 50, 100, 200, 323):
    print(f"  {t:4d} {curves['iol'][t - 1]:6.2f} {curves['cool'][t - 1]:6.2f}")

final_iol = np.array([cumulative_mean_reward(o)[-1] for o in outs["iol"]])
final_cool = np.array([cumulative_mean_reward(o)[-1] for o in outs["cool"]])
print(f"\nfinal mean reward: iol {final_iol.mean():.3f}, cool {final_cool.mean():.3f}")
print("per-run improvement:", np.round(final_cool - final_iol, 2))
