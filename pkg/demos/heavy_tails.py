"""The shape UMVUE has infinite variance below n = 6; watch the sample variance fail to settle.

For n = 4 and 5 the running variance keeps jumping as replications grow;
at n = 8 it settles. Nothing here is asserted: it is a visual check.

Run: python3 demos/heavy_tails.py
"""

from umvue import mc

blocks = (10**3, 10**4, 10**5)
for n in (4, 5, 8):
    spec = mc.ExperimentSpec("umvue_alpha", alpha=1.0, n=n, reps=blocks[-1], seed=7, lam=1.0)
    v = mc.block_variances(spec, blocks)
    print(f"n={n}: " + ", ".join(f"var over first {m:>6}: {v[m]:10.3f}" for m in blocks))
