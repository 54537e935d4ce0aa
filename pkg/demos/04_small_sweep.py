# %% [markdown]
# # Possibilistic vs probabilistic agent when the sensor model is wrong
#
# Both agents plan with the same optimistic sensor model. In the simulated
# world, far from both targets, each target is misread with probability
# p_bad instead.

# %%
from pimomdp.grid import BenchAgents, GridConfig, format_number, sweep_initial_belief, sweep_pbad

cfg = GridConfig(g=10)
agents = BenchAgents.solve(cfg)
runs, seed = 1000, 1

# %%
for row in sweep_pbad(cfg, [0.0, 0.5, 0.8], runs, seed, agents):
    print(f"p_bad={row['sweep_parameter']:<4} possibilistic {format_number(row['poss_mean_reward']):>8}"
          f"   probabilistic {format_number(row['prob_mean_reward']):>8}")

# %%
# both start out leaning towards the wrong target
for row in sweep_initial_belief(cfg, [0.5, 0.9, 0.95], runs, seed, agents):
    print(f"w={row['sweep_parameter']:<5} possibilistic {format_number(row['poss_mean_reward']):>8}"
          f"   probabilistic {format_number(row['prob_mean_reward']):>8}")
