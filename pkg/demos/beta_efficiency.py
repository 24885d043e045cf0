"""Closed-form Beta estimators: a fit, the efficiency surface and its minima over alpha.

Run: python3 demos/beta_efficiency.py
"""

import numpy as np

from umvue import BetaParams, beta_est, mc

truth = BetaParams(2.0, 3.0)
fit = beta_est.fit_beta(mc.sample_beta(truth, 500, seed=3))
print(f"n=500 from Beta(2, 3): alpha_hat {fit.alpha_hat:.4f} +/- {fit.se_alpha:.4f}, "
      f"beta_hat {fit.beta_hat:.4f} +/- {fit.se_beta:.4f}")

print("\nefficiency of alpha_hat relative to maximum likelihood")
alphas = [0.05, 0.3, 1.0, 5.0, 50.0]
print("beta \\ alpha " + "".join(f"{a:>9g}" for a in alphas))
for b in (0.5, 1.0, 5.0):
    row = [beta_est.rho1(BetaParams(a, b)) for a in alphas]
    print(f"{b:>12g} " + "".join(f"{r:9.4f}" for r in row))

print("\nleast efficiency over alpha for a few beta values")
print(beta_est.table1_csv(beta_est.table1([0.05, 0.5, 1.0, 2.5, 5.0, 10.0])), end="")

rep = mc.run_beta_clt(truth, n=2000, reps=1000, seed=4)
print("\nempirical covariance of sqrt(n)(estimate - truth) vs asymptotic Delta:")
print(np.round(rep.empirical_cov, 3))
print(np.round(beta_est.delta_matrix(truth), 3))
