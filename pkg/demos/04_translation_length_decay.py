"""
Exponential scarcity of non-Anosov products
===========================================

Multiply random generators of SL(2,Z) and classify the product by trace:
the chance of landing on anything but an Anosov element decays
exponentially with the number of factors.  The trace classifier is exact,
so this experiment has no estimation error beyond the sampling itself.
"""

from hypwalk import get_model, translation_decay
from hypwalk.walk import StepDistribution

farey = get_model("farey")
gens = [farey.parse(t) for t in
        ("[[1,1],[0,1]]", "[[1,0],[1,1]]", "[[1,-1],[0,1]]", "[[1,0],[-1,1]]")]
uniform = StepDistribution(gens, [0.25] * 4)

# %% Frequency of |trace| <= 2 along the walk.
res = translation_decay(farey, uniform, B=0.0, n_grid=list(range(10, 81, 10)),
                        samples=5000, seed=31)
print("n    P(non-Anosov)   95% CI")
for x, p, lo, hi in res.series.rows():
    print(f"{int(x):<4} {p:<13.4f} [{lo:.4f}, {hi:.4f}]")

fit = res.fit
print(f"\nlog-linear fit: P ~ {fit.K:.3f} * {fit.c:.4f}^n   (R^2 = {fit.r_squared:.4f})")

# %% The same machinery on the tree measures the return probability:
# on F2 the translation length vanishes only at the identity.
free = get_model("free")
from hypwalk.models.free import FreeWord

W = FreeWord.from_str
tree_uniform = StepDistribution([W("a"), W("A"), W("b"), W("B")], [0.25] * 4)
res2 = translation_decay(free, tree_uniform, B=0.0, n_grid=[2, 4, 8, 12, 16],
                         samples=20_000, seed=32)
print("\ntree return probabilities:", [round(p, 5) for p in res2.series.probabilities])
