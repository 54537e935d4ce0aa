# %% [markdown]
# # Solving the target grid
#
# The robot starts in the corner (1, 1). One of the two targets, (1, g) or
# (g, 1), is the one it must reach. Its sensors misjudge a target with a
# possibility that grows with distance.

# %%
import numpy as np

from pimomdp import MixedBelief, mixed_belief_update, momdp_value_iteration
from pimomdp.grid import ACTION_NAMES, OBSERVATION_NAMES, GridConfig, build_possibilistic_grid, compose_observation

cfg = GridConfig(g=5)
model = build_possibilistic_grid(cfg)
sol = momdp_value_iteration(model)
print(f"{len(sol.hidden_beliefs)} hidden beliefs x {model.num_visible} cells, {sol.iterations} sweeps")

# %%
# policy map under total ignorance ((1, 1) is the bottom-left corner)
geo = cfg.geometry
arrows = {"stay": ".", "up": "^", "down": "v", "right": ">", "left": "<"}
ignorance = (model.scale.top, model.scale.top)
for y in range(cfg.g, 0, -1):
    row = [arrows[ACTION_NAMES[sol.action(MixedBelief(geo.cell(x, y), ignorance))]] for x in range(1, cfg.g + 1)]
    print(" ".join(row))

# %%
# a noise-free walk when target 1 is the right one
belief, hidden = model.initial, 0
goal = geo.target_cells[hidden]
while belief.visible != goal:
    a = sol.action(belief)
    cell = int(geo.move[belief.visible, a])
    o = compose_observation(True, True) if hidden == 0 else compose_observation(False, False)
    belief = mixed_belief_update(model, belief, a, cell, o)
    print(f"{ACTION_NAMES[a]:>5} -> {geo.position(cell)}  saw {OBSERVATION_NAMES[o]}  belief {np.round(model.scale.to_labels(belief.hidden), 3)}")
