"""Grouping constructions: hierarchical clustering, nearest-neighbour
breakpoints and the margin translation of a real-valued class."""

# %%
import numpy as np

from collearn.concepts import AllFunctionsClass, Domain, LabeledSample, err_class_sample, make_rng
from collearn.growth import tau_of_set
from collearn.groupings import (
    HierarchicalClustering,
    err_gamma_class,
    fat_shattering_zero_witness,
    forbidden_collection,
    hc_collection,
    lipschitz_grid,
    nn_spec,
    r_net,
    r_packing,
    translated_class,
    vc_at_distance,
)

rng = make_rng(7)

# %% [markdown]
# Hierarchical clustering: one class per level, all labellings constant on
# the clusters of that level. On any set S the number of distinct classes
# stays at most |S|.

# %%
coords = rng.normal(size=(8, 2))
hc = HierarchicalClustering.from_points(coords)
col = hc_collection(AllFunctionsClass(8), hc)
for U in [(0, 1), (0, 3, 5), tuple(range(8))]:
    print(U, "tau =", tau_of_set(col, U))

# %% [markdown]
# Nearest-neighbour constraints: pairs closer than r must share a label.
# The thresholds r that matter are the pairwise distances, so the family
# has one class per breakpoint.

# %%
dom = Domain.from_coordinates(rng.uniform(0, 4, size=(6, 2)))
U = (0, 1, 2, 3, 4)
fam = forbidden_collection(AllFunctionsClass(6), nn_spec(dom), U)
print(len(fam), "breakpoint classes, tau on U =", tau_of_set(fam, U))
for r in (0.5, 1.0, 2.0):
    print(f"r={r}: vc at distance {vc_at_distance(AllFunctionsClass(6), dom, r)}, "
          f"packing {len(r_packing(dom, r))}, net {len(r_net(dom, r))}")

# %% [markdown]
# Margin translation. A grid of Lipschitz functions on four points of a
# line, thresholded at zero after removing labels that sit inside the
# margin.

# %%
line = Domain.from_coordinates(np.arange(4, dtype=float))
F = lipschitz_grid(line, L=1.0, levels=np.arange(-2, 3, dtype=float))
gamma = 1.0
T = translated_class(F, 1.0, gamma, line)
S = LabeledSample.from_pairs([(0, 0), (1, 0), (2, 1), (3, 1)])
print("translated error", err_class_sample(T, S), "margin error", err_gamma_class(F, S, gamma))
print("fat-shattering at gamma", fat_shattering_zero_witness(F, gamma))
