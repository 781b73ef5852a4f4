"""One-inclusion graph prediction on thresholds and on a small cube.

Run with ``python demos/oig_walkthrough.py`` or cell by cell in an editor
that understands ``# %%`` markers.
"""

# %%
from collearn.concepts import AllFunctionsClass, LabeledSample, vc_of_restriction
from collearn.experiments import thresholds
from collearn.oig import build_graph, density_lower_bound, loo_error, oig_predict, oriented_graph

# %% [markdown]
# Thresholds on 5 points. Restricted to all 5 points the class has 6
# behaviours and the graph is a path, so an orientation with out-degree 1
# exists.

# %%
H = thresholds(5)
g = oriented_graph(H, range(5))
print(g.n_nodes, "nodes,", g.n_edges, "edges, max out-degree", g.max_out_degree())
print(g.to_text())

# %%
S = LabeledSample.from_pairs([(0, 0), (4, 1)])
print([oig_predict(H, S, x) for x in range(5)])

# %% [markdown]
# Leave-one-out error never exceeds vc / n on realizable data.

# %%
S = LabeledSample.from_pairs([(i, int(i >= 3)) for i in range(5)])
res = loo_error(H, S)
print("loo", res.error, "bound", res.bound, "vc", vc_of_restriction(H, S.domain()))

# %% [markdown]
# The full cube on 3 points: 8 nodes, 12 edges. Density 12/8 forces
# out-degree at least 2 and the path-reversal orientation reaches it.

# %%
cube = AllFunctionsClass(3)
G = build_graph(cube, range(3))
print("lower bound", density_lower_bound(G), "achieved", oriented_graph(cube, range(3)).max_out_degree())
