"""
Online MCA and GHA learning
===========================

Single neurons trained on a stationary stream find the minor (MCA) or
principal (GHA) eigenvector of the input covariance. The step size trades
speed for stability.
"""
import numpy as np

from subspace_doa import (
    DivergenceError,
    LearningConfig,
    UpdateRule,
    correlated_snapshots,
    covariance_with_spectrum,
    eigendecompose,
    train,
)

R = covariance_with_spectrum([0.05, 0.3, 0.6, 1.0], seed=3)
X = correlated_snapshots(R, 5000, seed=4)
oracle = eigendecompose(R)

###############################################################################
# Convergence of each rule
# ------------------------
# direction_error is 1 - |<w/|w|, v>| against the oracle eigenvector.

for rule in UpdateRule:
    cfg = LearningConfig(eta=0.01, max_epochs=1, early_stop=False)
    W, trace = train(X, rule, cfg, oracle)
    print(
        f"{rule.value:15s} error < 0.02 after {trace.first_below(0.02)} presentations; "
        f"final |w| = {np.linalg.norm(W[0]):.3f}"
    )

# MCA_SINGLE finds the direction but lets the norm decay; the beta penalty in
# MCA_STABILIZED holds |w| near 1.

###############################################################################
# Learning rate
# -------------

for eta in (0.01, 0.1):
    _, trace = train(X, UpdateRule.MCA_STABILIZED, LearningConfig(eta=eta, max_epochs=1, convergence_tol=0.1), oracle)
    print(f"eta={eta}: error < 0.1 after {trace.first_below(0.1)} presentations")

###############################################################################
# Divergence
# ----------
# A stream with lambda_max = 4 and eta = 0.9 blows up within a few steps.

R_hot = covariance_with_spectrum([0.5, 1.0, 2.0, 4.0], seed=7)
X_hot = correlated_snapshots(R_hot, 2000, seed=8)
try:
    train(X_hot, UpdateRule.MCA_STABILIZED, LearningConfig(eta=0.9, max_epochs=1), eigendecompose(R_hot))
except DivergenceError as exc:
    print("diverged:", exc)
