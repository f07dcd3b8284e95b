"""
Six optimizers on the same problem
==================================

Every algorithm gets the same learning set, test set and evaluation budget.
"""
from pufattack import ALGORITHMS, Budget, PufProblem, default_config, evaluate_test, generate_crp_set, optimize
from pufattack import sample_puf_instance

inst = sample_puf_instance(16, 1, seed=21)
learn = generate_crp_set(inst, 2000, "learning", seed=22)
test = generate_crp_set(inst, 1000, "test", seed=23, forbidden=learn)

print(f"{'alg':8s} {'train':>6s} {'test':>6s}  success")
for tag in ALGORITHMS:
    cfg = default_config(tag)
    rec = optimize(PufProblem(learn), cfg, Budget(20000), seed=24)
    rep = evaluate_test(rec.best_genes, test)
    print(f"{tag:8s} {rec.best_fitness:6d} {rep.errors:6d}  {rep.success}")

# the parameters of one algorithm, as used above
print()
print(default_config("clonalg").describe())
