"""
Cyclic Jacobi eigensolver for small Hermitian matrices.

Used as ground truth for the learning rules and as the batch route for the
subspace spectra. Results are deterministic: rotations follow a fixed
row-cyclic order, eigenpairs are sorted ascending with a stable sort, and each
eigenvector is rotated so that its largest-modulus entry (lowest index on
ties) is real and positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConvergenceError(RuntimeError):
    """Jacobi sweeps did not annihilate the off-diagonal within the sweep budget."""


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues in ascending order; column ``k`` of ``eigenvectors`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def _as_hermitian(R, tol):
    A = np.array(R, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    asym = float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0
    if asym > tol * scale:
        raise ValueError(f"matrix is not Hermitian (max |A - A^H| = {asym:.3g})")
    return 0.5 * (A + A.conj().T)


def _rotate(A, V, p, q):
    """Annihilate A[p, q] with a complex Givens rotation applied in place."""
    apq = A[p, q]
    r = abs(apq)
    app, aqq = A[p, p].real, A[q, q].real
    # phase factor turns the 2x2 block real-symmetric, then a real rotation
    e = apq / r
    theta = (aqq - app) / (2.0 * r)
    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    U = np.array([[c, s], [-s * np.conj(e), c * np.conj(e)]])
    idx = [p, q]
    A[:, idx] = A[:, idx] @ U
    A[idx, :] = U.conj().T @ A[idx, :]
    A[p, q] = A[q, p] = 0.0
    A[p, p] = A[p, p].real
    A[q, q] = A[q, q].real
    V[:, idx] = V[:, idx] @ U


def _canonical_phase(V):
    mod = np.abs(V)
    for k in range(V.shape[1]):
        col = mod[:, k]
        # first index within rounding of the column maximum
        i = int(np.flatnonzero(col >= col.max() * (1 - 1e-12))[0])
        V[:, k] *= np.conj(V[i, k]) / mod[i, k]
        V[i, k] = V[i, k].real
    return V


def eigendecompose(R, *, hermitian_tol: float = 1e-10, max_sweeps: int = 100) -> EigenDecomposition:
    """
    Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    R : array_like, shape (m, m)
        Hermitian matrix. Asymmetry larger than ``hermitian_tol`` (relative to
        ``max(1, max|R|)``) raises ``ValueError``.
    max_sweeps : int
        Sweep budget; ``ConvergenceError`` is raised if exceeded.

    Returns
    -------
    EigenDecomposition
    """
    A = _as_hermitian(R, hermitian_tol)
    m = A.shape[0]
    V = np.eye(m, dtype=complex)
    fro = np.linalg.norm(A)
    eps = np.finfo(float).eps
    floor = eps * fro / max(m, 1) * 1e-2

    sweeps = 0
    while True:
        rotated = False
        for p in range(m - 1):
            for q in range(p + 1, m):
                r = abs(A[p, q])
                if r > max(eps * np.sqrt(abs(A[p, p].real * A[q, q].real)), floor):
                    if sweeps >= max_sweeps:
                        raise ConvergenceError(
                            f"Jacobi iteration did not converge within {max_sweeps} sweeps"
                        )
                    _rotate(A, V, p, q)
                    rotated = True
        if not rotated:
            break
        sweeps += 1

    lam = np.diag(A).real.copy()
    order = np.argsort(lam, kind="stable")
    V = _canonical_phase(V[:, order])
    return EigenDecomposition(lam[order], V, sweeps)


def minor_component(R, **kwargs) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and its unit eigenvector."""
    eig = eigendecompose(R, **kwargs)
    return float(eig.eigenvalues[0]), eig.eigenvectors[:, 0].copy()


def principal_component(R, **kwargs) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and its unit eigenvector."""
    eig = eigendecompose(R, **kwargs)
    return float(eig.eigenvalues[-1]), eig.eigenvectors[:, -1].copy()


def eigenspace(eig: EigenDecomposition, index: int, rel_tol: float = 1e-8) -> np.ndarray:
    """
    Orthonormal basis of the eigenspace containing eigenpair ``index``.

    Eigenvalues within ``rel_tol * max|lambda|`` of ``eigenvalues[index]`` are
    treated as one degenerate cluster, so the basis has one column for a simple
    eigenvalue and several for a repeated one.
    """
    lam = eig.eigenvalues
    scale = float(np.max(np.abs(lam))) if lam.size else 0.0
    mask = np.abs(lam - lam[index]) <= rel_tol * scale
    return eig.eigenvectors[:, mask]
