# %% [markdown]
# # Why value iteration needs the strict-improvement guard
#
# Two states, s1 and s2. Only s2 is satisfactory. The stay action keeps the
# robot where it is, action b moves it to s2.

# %%
import numpy as np

from pimomdp import PiMdpModel, make_scale, value_iteration

scale = make_scale([0, 1])
T = np.zeros((2, 2, 2), dtype=np.int64)
T[0, 0, 0] = T[1, 0, 1] = 1  # stay
T[0, 1, 1] = T[1, 1, 1] = 1  # b
model = PiMdpModel(scale, T, [0, 1], stay_action=0, state_names=("s1", "s2"), action_names=("stay", "b"))

# %%
# with the guard the policy of s1 is only replaced when its value strictly rises
sol = value_iteration(model)
print("guarded:  ", [model.action_names[a] for a in sol.policy], "u* =", scale.to_labels(sol.values))

# %%
# without it, s1 re-selects stay once s2 is worth 1, since stay now ties with b
bad = value_iteration(model, improvement_guard=False)
print("unguarded:", [model.action_names[a] for a in bad.policy], "u* =", scale.to_labels(bad.values))
# the values agree, but the unguarded stationary policy never leaves s1
