"""
Modeling attack on one PUF
==========================

Learn a 1x32 arbiter PUF from 5000 challenge-response pairs with CMA-ES
and score the model on held-out challenges.
"""
import numpy as np

from pufattack import (
    Budget,
    PufProblem,
    default_config,
    evaluate_test,
    generate_crp_set,
    optimize,
    sample_puf_instance,
)

inst = sample_puf_instance(32, 1, seed=11)
learn = generate_crp_set(inst, 5000, "learning", seed=12)
test = generate_crp_set(inst, 1000, "test", seed=13, forbidden=learn)

rec = optimize(PufProblem(learn), default_config("cmaes"), Budget(20000), seed=14)
print(f"evaluations used: {rec.evaluations}")
print(f"training errors : {rec.best_fitness} of {len(learn)}")
print(evaluate_test(rec.best_genes, test))

# the improvement trace lists (evaluations, best error) whenever the best improved
for evals, err in rec.trace[:: max(1, len(rec.trace) // 8)]:
    print(f"  {evals:6d}  {err}")

# the model only matters up to a positive scale, so compare directions
w, m = inst.chains[0], rec.best_genes
cos = float(w @ m / (np.linalg.norm(w) * np.linalg.norm(m)))
print(f"cosine to the true delays: {cos:.4f}")
