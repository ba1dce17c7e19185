"""
Random walks on the free group
==============================

Sample seeded walks on F2, watch the distance from the origin grow at the
classical speed 1/2, and estimate how rarely a walk makes progress below a
chosen linear rate.
"""

from hypwalk import FreeGroupModel, StepDistribution, drift, linear_progress_decay, sample_walk
from hypwalk.models.free import FreeWord

free = FreeGroupModel()
W = FreeWord.from_str
uniform = StepDistribution([W("a"), W("A"), W("b"), W("B")], [0.25] * 4)

# %% One trajectory: the word grows, with occasional backtracking.
walk = sample_walk(free, uniform, 30, seed=7)
for i in (5, 10, 20, 30):
    print(f"w_{i:<3} = {walk.locations[i].to_str():<24} d(1, w_{i}) = {int(walk.distances[i])}")

# %% The same seed always gives the same walk; a different stream is fresh.
again = sample_walk(free, uniform, 30, seed=7)
other = sample_walk(free, uniform, 30, seed=7, stream=1)
print("\nreproducible:", walk.steps == again.steps, "| new stream differs:", walk.steps != other.steps)

# %% Speed: the simple random walk on the 4-regular tree escapes at rate 1/2.
est = drift(free, uniform, n=2000, samples=500, seed=11)
print(f"\ndrift estimate: {est.rate:.4f}  (CI {est.ci_low:.4f}..{est.ci_high:.4f}, true value 0.5)")

# %% Slow walks are exponentially rare: P(d(1, w_n) <= n/4) decays in n.
res = linear_progress_decay(free, uniform, L=0.25, n_grid=[50, 100, 150, 200],
                            samples=30_000, seed=12)
for x, p, lo, hi in res.series.rows():
    print(f"n = {int(x):>3}:  P(d <= n/4) = {p:.5f}   CI [{lo:.5f}, {hi:.5f}]")
if res.fit:
    print(f"fitted decay: p ~ {res.fit.K:.3f} * {res.fit.c:.4f}^n  (R^2 = {res.fit.r_squared:.3f})")
