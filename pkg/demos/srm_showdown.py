"""SRM against the collection learner on the block-cube construction.

SRM charges each class a penalty from its a-priori weight and ends up on a
hypothesis that errs on about half of D. The collection learner groups the
classes by how they look on the sample and finds the target.
"""

# %%
import statistics

from collearn.concepts import err_dist
from collearn.experiments import showdown_trial
from collearn.learner import collection_learn
from collearn.srm import adversarial_instance, srm_learn

# %%
m = 64
inst = adversarial_instance(m, delta=0.1)
print(f"w0={inst.w0}  m0={inst.m0}  domain size={inst.domain_size}  support={len(inst.support)} points")

# %%
S = inst.D.sample(m, 0)
p_srm, rows, best = srm_learn(inst.weighted, S, 0.1)
print("SRM picks", rows[best].class_name, "error on D", err_dist(p_srm, inst.D))

p_col, ledger = collection_learn(inst.collection, S, 0.1, seed=0)
print("collection learner picks", p_col.provenance["class"], "error on D", err_dist(p_col, inst.D),
      "tau_hat", ledger.tau_hat)

# %% [markdown]
# Repeat over a few seeds and sample sizes.

# %%
for mm in (64, 256):
    inst = adversarial_instance(mm, 0.1)
    trials = [showdown_trial(inst, mm, s) for s in range(5)]
    print(mm, "srm", statistics.median(t[0] for t in trials), "collection", statistics.median(t[1] for t in trials))
