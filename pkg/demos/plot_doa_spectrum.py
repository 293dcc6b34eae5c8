"""
MCA and PCA pseudo-spectra
==========================

Train six MCA neurons on five noisy snapshots, turn the weights into a
noise-subspace estimate and scan the pseudo-spectrum for the two sources.
"""
import numpy as np

from subspace_doa import (
    ArrayGeometry,
    GridSpec,
    LearningConfig,
    NoiseSpec,
    NoiseSubspace,
    SourceSpec,
    UpdateRule,
    angle_rmse,
    eigendecompose,
    find_peaks,
    mca_spectrum,
    noise_subspace_from_weights,
    orthonormal_rows,
    pca_spectrum,
    sample_covariance,
    synthesize_snapshots,
    train,
)

geom = ArrayGeometry(8, 0.5)
truth = [60.0, 100.0]
X = synthesize_snapshots(geom, [SourceSpec(60.0, 0.35), SourceSpec(100.0, 0.36)], 5, NoiseSpec(0.009, seed=2))
oracle = eigendecompose(sample_covariance(X))
noise_basis = oracle.eigenvectors[:, :6]

###############################################################################
# Learned noise subspace
# ----------------------

cfg = LearningConfig(eta=0.03, max_epochs=5000, early_stop=False, seed=1)
W, trace = train(X, UpdateRule.MCA_MULTI, cfg, oracle, num_neurons=6, reference=noise_basis, trace_every=1000)
print("direction errors:", np.round(trace.direction_error[-1], 6))

grid = GridSpec(0, 180, 0.5)
learned = mca_spectrum(geom, noise_subspace_from_weights(W), grid)
exact = mca_spectrum(geom, NoiseSubspace(noise_basis), grid)

###############################################################################
# Peaks
# -----
# Four peaks are kept: each source also appears at its mirror angle
# 180 - theta.

for name, spec in (("learned MCA", learned), ("oracle MCA", exact)):
    peaks = find_peaks(spec, 4)
    print(f"{name:12s} peaks {peaks.angles_deg}  rmse {angle_rmse(peaks, truth):.3f} deg")

W_s, _ = train(X, UpdateRule.GHA, cfg, oracle, num_neurons=2, reference=oracle.eigenvectors[:, 6:], trace_every=5000)
pca = pca_spectrum(geom, orthonormal_rows(W_s), grid)
print(f"{'learned PCA':12s} peaks {find_peaks(pca, 4).angles_deg}")

###############################################################################
# A coarse text rendering of the learned MCA spectrum (dB)
# ---------------------------------------------------------

db = 10 * np.log10(learned.values)
lo, hi = db.min(), db.max()
for theta in range(40, 141, 4):
    v = db[int(theta / 0.5)]
    print(f"{theta:4d} {v:6.1f} dB {'#' * int(50 * (v - lo) / (hi - lo))}")
