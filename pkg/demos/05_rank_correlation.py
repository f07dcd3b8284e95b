"""
Does training error predict test error?
=======================================

Repeated CMA-ES runs on one 2x16 XOR PUF end at different training errors.
Spearman's rho over the runs tells whether the ordering carries over to
held-out challenges.
"""
import numpy as np

from pufattack import Budget, PufProblem, default_config, evaluate_test, generate_crp_set, optimize
from pufattack import sample_puf_instance, spearman

inst = sample_puf_instance(16, 2, seed=31)
learn = generate_crp_set(inst, 3000, "learning", seed=32)
test = generate_crp_set(inst, 1000, "test", seed=33, forbidden=learn)

train, held = [], []
for seed in range(12):
    rec = optimize(PufProblem(learn), default_config("cmaes"), Budget(8000), seed=seed)
    train.append(rec.best_fitness)
    held.append(evaluate_test(rec.best_genes, test).errors)

for a, b in sorted(zip(train, held)):
    print(f"train {a:5d}   test {b:4d}")
print(f"spearman rho = {spearman(train, held):.3f}")

# ranks are unchanged by any increasing map, so rho is too
print(f"after log1p    {spearman(np.log1p(train), held):.3f}")
