"""Fit a small Gamma sample with every estimator and compare their spread.

Run: python3 demos/gamma_estimators.py
"""

import warnings

import numpy as np

from umvue import GammaParams, fit_gamma, gamma_est, mc

truth = GammaParams(alpha=2.0, lam=1.5)
sample = mc.sample_gamma(truth, 8, seed=1)
print(f"sample of n={sample.n} from Gamma(alpha={truth.alpha}, rate={truth.lam})")
print(np.round(sample.data, 4))

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    fit = fit_gamma(sample)
for key, value in fit.as_dict().items():
    if isinstance(value, float):
        print(f"  {key:<18} {value:.6f}")
for w in caught:
    print(f"  note: {w.message}")

# sampling distribution of two unbiased estimators of 1/lambda at n = 8
reps = 20_000
x = mc.gamma_draws(truth, (reps, 8), mc.substream(2))
X, logY = gamma_est.suff_stat_batch(x)
u3 = gamma_est.umvue_batch(8, X, logY)["u3"]
yc = gamma_est.yechen_inv_lambda(x)
print(f"\n1/lambda = {1 / truth.lam:.4f}; {reps} replications at n = 8")
print(f"  UMVUE          mean {u3.mean():.4f}  variance {u3.var():.5f}")
print(f"  pair U-stat    mean {yc.mean():.4f}  variance {yc.var():.5f}")
print(f"  asymptotic efficiency of the U-statistic: {gamma_est.are_inv_lambda(truth.alpha):.4f}")
