# %% [markdown]
# # How big is a qualitative belief space?
#
# A belief is a normalized possibility distribution, so with L levels and S
# states there are L**S - (L-1)**S of them. Splitting the state into a
# visible and a hidden part keeps only distributions over the hidden part.

# %%
from pimomdp import belief_cardinality, enumerate_belief_space, mixed_cardinality, uniform_scale
from pimomdp.grid import GridConfig, build_possibilistic_grid

# %%
beliefs = enumerate_belief_space(2, uniform_scale(2))
print("all 5 beliefs over 2 states with levels {0, 1/2, 1}:")
print(beliefs)

# %%
for L in (3, 5, 8):
    print(f"L={L}: flat over 18 states {belief_cardinality(18, L):>22}   mixed 9 x 2 {mixed_cardinality(9, 2, L)}")

# %%
# the 3x3 target grid, with the levels its geometry actually produces
grid = build_possibilistic_grid(GridConfig(g=3))
L = grid.scale.size
print("grid levels:", [round(x, 3) for x in grid.scale.labels])
print("mixed:", mixed_cardinality(grid.num_visible, grid.num_hidden, L),
      " flat:", belief_cardinality(grid.num_visible * grid.num_hidden, L))
