"""
Subspace pseudo-spectra, peak picking and angle scoring.

The MCA spectrum is ``1 / ||W_N^H c(theta)||^2`` for an orthonormal noise
subspace basis ``W_N``; the PCA spectrum is ``1 / c^H (I - W_S W_S^H) c`` for an
orthonormal signal subspace basis ``W_S``. Both denominators are clamped at
``EPS_CLAMP`` so exact orthogonality yields a large finite peak.

Note that a ULA with ``sin``-based phase cannot tell ``theta`` from
``180 - theta``: every spectrum on [0, 180] is mirror-symmetric about 90.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .array_signal import ArrayGeometry, steering_matrix

EPS_CLAMP = 1e-12
MISS_PENALTY_DEG = 90.0


@dataclass(frozen=True)
class GridSpec:
    """Angle grid ``start_deg, start_deg + step_deg, ...`` up to ``stop_deg`` inclusive."""

    start_deg: float = 0.0
    stop_deg: float = 180.0
    step_deg: float = 0.5

    def __post_init__(self):
        if not self.step_deg > 0:
            raise ValueError(f"step_deg must be > 0, got {self.step_deg!r}")
        if not self.start_deg < self.stop_deg:
            raise ValueError("start_deg must be < stop_deg")
        if self.start_deg < 0 or self.stop_deg > 180:
            raise ValueError("grid must lie within [0, 180] degrees")

    @property
    def size(self) -> int:
        # small slack so that e.g. (180 - 0) / 0.5 is not floored to 359
        return int(np.floor((self.stop_deg - self.start_deg) / self.step_deg + 1e-9)) + 1

    def angles(self) -> np.ndarray:
        return self.start_deg + self.step_deg * np.arange(self.size)


@dataclass(frozen=True, eq=False)
class SpectrumGrid:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} spectrum values, got shape {v.shape}")
        if not np.all(np.isfinite(v) & (v > 0)):
            raise ValueError("spectrum values must be finite and positive")
        object.__setattr__(self, "values", v)

    @property
    def angles_deg(self) -> np.ndarray:
        return self.grid.angles()

    def scaled(self, factor: float) -> "SpectrumGrid":
        return SpectrumGrid(self.grid, self.values * factor)


@dataclass(frozen=True, eq=False)
class NoiseSubspace:
    """Orthonormal columns spanning an estimated noise subspace, shape ``(m, k)``."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=complex)
        if B.ndim != 2:
            raise ValueError("noise subspace basis must be 2-D")
        if not np.allclose(np.linalg.norm(B, axis=0), 1.0, atol=1e-8):
            raise ValueError("noise subspace columns must have unit norm")
        object.__setattr__(self, "basis", B)


@dataclass(frozen=True, eq=False)
class PeakSet:
    angles_deg: np.ndarray
    values: np.ndarray

    def __len__(self):
        return self.angles_deg.size


def orthonormal_rows(W, tol: float = 1e-10) -> np.ndarray:
    """
    Modified Gram-Schmidt on the rows of ``W``; returns them as orthonormal columns.

    Each row is normalized first, then orthogonalized against the earlier
    ones in order, so column 0 is the normalized first row. Raises
    ``ValueError`` when a row (or its residual) has norm below ``tol``.
    """
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    cols = []
    for j, row in enumerate(W):
        n = np.linalg.norm(row)
        if n < tol:
            raise ValueError(f"weight row {j} has norm {n:.3g}; rank deficient")
        v = row / n
        for q in cols:
            v = v - q * np.vdot(q, v)
        n = np.linalg.norm(v)
        if n < tol:
            raise ValueError(f"weight row {j} is linearly dependent on earlier rows")
        cols.append(v / n)
    return np.stack(cols, axis=1)


def noise_subspace_from_weights(W) -> NoiseSubspace:
    """Package trained MCA weight rows as an orthonormal noise-subspace basis."""
    return NoiseSubspace(orthonormal_rows(W))


def projection_power(geom: ArrayGeometry, basis, angles_deg, complement: bool = False) -> np.ndarray:
    """
    ``||B^H c(theta)||^2`` at each angle, or ``||c||^2 - ||B^H c||^2`` when
    ``complement`` is set (``B`` orthonormal). Unclamped.
    """
    B = np.asarray(basis, dtype=complex)
    if B.ndim != 2 or B.shape[0] != geom.num_sensors:
        raise ValueError(f"basis must have {geom.num_sensors} rows, got shape {B.shape}")
    C = steering_matrix(geom, angles_deg)
    inside = np.sum(np.abs(B.conj().T @ C) ** 2, axis=0)
    if complement:
        return np.sum(np.abs(C) ** 2, axis=0) - inside
    return inside


def mca_spectrum(geom: ArrayGeometry, ns: NoiseSubspace, grid: GridSpec = GridSpec()) -> SpectrumGrid:
    """Noise-subspace pseudo-spectrum ``1 / max(||W_N^H c||^2, EPS_CLAMP)``."""
    basis = ns.basis if isinstance(ns, NoiseSubspace) else NoiseSubspace(ns).basis
    den = projection_power(geom, basis, grid.angles())
    return SpectrumGrid(grid, 1.0 / np.maximum(den, EPS_CLAMP))


def pca_spectrum(geom: ArrayGeometry, ss, grid: GridSpec = GridSpec()) -> SpectrumGrid:
    """
    Signal-subspace pseudo-spectrum ``1 / max(c^H (I - W_S W_S^H) c, EPS_CLAMP)``.

    ``ss`` must have orthonormal columns and fewer columns than sensors.
    """
    B = np.atleast_2d(np.asarray(ss, dtype=complex))
    m = geom.num_sensors
    if B.shape[0] != m:
        raise ValueError(f"signal basis must have {m} rows, got shape {B.shape}")
    if B.shape[1] >= m:
        raise ValueError("signal subspace must have fewer columns than sensors")
    if np.linalg.norm(B.conj().T @ B - np.eye(B.shape[1])) > 1e-8:
        raise ValueError("signal subspace basis must be orthonormal")
    den = projection_power(geom, B, grid.angles(), complement=True)
    return SpectrumGrid(grid, 1.0 / np.maximum(den, EPS_CLAMP))


def find_peaks(spec: SpectrumGrid, k: int) -> PeakSet:
    """
    Up to ``k`` highest local maxima, reported in ascending angle order.

    Interior points strictly above both neighbours are peaks; a flat top that
    rises and then falls counts once, at its first index. Endpoints never
    qualify. Height ties go to the lower angle.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    v = spec.values
    idx = []
    i = 1
    while i < v.size - 1:
        if v[i] > v[i - 1]:
            j = i
            while j + 1 < v.size and v[j + 1] == v[i]:
                j += 1
            if j + 1 < v.size and v[j + 1] < v[i]:
                idx.append(i)
            i = j + 1
        else:
            i += 1
    idx.sort(key=lambda n: (-v[n], n))
    keep = np.array(sorted(idx[:k]), dtype=int)
    return PeakSet(spec.angles_deg[keep], v[keep])


def angle_rmse(estimated, truth: Sequence[float], miss_penalty: float = MISS_PENALTY_DEG) -> float:
    """
    RMS angle error after greedy matching.

    True angles are taken in the given order, each matched to the nearest
    still-unused estimate (lower angle on ties); true angles left without an
    estimate contribute ``miss_penalty`` degrees.
    """
    truth = [float(t) for t in truth]
    if not truth:
        raise ValueError("truth must contain at least one angle")
    est = estimated.angles_deg if isinstance(estimated, PeakSet) else estimated
    pool = sorted(float(a) for a in np.atleast_1d(est))
    sq = 0.0
    for t in truth:
        if not pool:
            sq += miss_penalty**2
            continue
        j = min(range(len(pool)), key=lambda n: abs(pool[n] - t))
        sq += (pool.pop(j) - t) ** 2
    return float(np.sqrt(sq / len(truth)))
