"""
Jacobi eigen-oracle
===================

All convergence checks are scored against a small, dependency-free cyclic
Jacobi eigensolver for Hermitian matrices. Here it is compared with LAPACK.
"""
import time

import numpy as np

from subspace_doa import eigendecompose, minor_component, principal_component

rng = np.random.default_rng(0)

###############################################################################
# A complex 2x2 example
# ---------------------
# [[2, j], [-j, 2]] has characteristic polynomial l^2 - 4 l + 3.

R = np.array([[2, 1j], [-1j, 2]])
eig = eigendecompose(R)
print("eigenvalues:", eig.eigenvalues)
print("eigenvectors (largest entry real-positive):\n", np.round(eig.eigenvectors, 4))

###############################################################################
# Random PSD matrices
# -------------------

worst = 0.0
t0 = time.perf_counter()
for _ in range(200):
    m = int(rng.integers(2, 9))
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    R = Z @ Z.conj().T
    e = eigendecompose(R)
    worst = max(worst, np.max(np.abs(e.eigenvalues - np.linalg.eigvalsh(R))))
print(f"200 matrices in {time.perf_counter() - t0:.2f}s; max |lambda - eigvalsh| = {worst:.2e}")

###############################################################################
# Minor and principal components
# ------------------------------

R = np.diag([5.0, 0.1])
print("minor:", minor_component(R))
print("principal:", principal_component(R))
