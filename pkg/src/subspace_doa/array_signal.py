"""
Uniform linear array signal model
=================================

Narrowband far-field sources impinging on a uniform linear array (ULA),
additive circular white Gaussian noise, and the sample covariance of the
resulting snapshots.

Angles are in degrees on [0, 180]; endfire at 0/180, broadside at 90.
Sensor spacing is expressed in carrier wavelengths, so the steering phase of
sensor ``i`` (0-based) is ``-2*pi*spacing*i*sin(theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .eigen_oracle import eigendecompose


@dataclass(frozen=True)
class ArrayGeometry:
    """ULA with ``num_sensors`` elements spaced ``spacing_wavelengths`` apart."""

    num_sensors: int = 8
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if int(self.num_sensors) != self.num_sensors or self.num_sensors < 2:
            raise ValueError(f"num_sensors must be an integer >= 2, got {self.num_sensors!r}")
        if not np.isfinite(self.spacing_wavelengths) or self.spacing_wavelengths <= 0:
            raise ValueError(f"spacing_wavelengths must be > 0, got {self.spacing_wavelengths!r}")


@dataclass(frozen=True)
class SourceSpec:
    """A narrowband source: arrival angle, normalized envelope frequency, amplitude."""

    doa_deg: float
    normalized_freq: float
    amplitude: float = 1.0

    def __post_init__(self):
        _check_angle(self.doa_deg)
        if not 0 < self.normalized_freq <= 0.5:
            raise ValueError(f"normalized_freq must lie in (0, 0.5], got {self.normalized_freq!r}")
        if not np.isfinite(self.amplitude) or self.amplitude <= 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude!r}")


@dataclass(frozen=True)
class NoiseSpec:
    """Circular white Gaussian noise; ``sigma`` is the std of each real/imag part."""

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma!r}")


@dataclass(frozen=True, eq=False)
class SnapshotMatrix:
    """Complex array output, one row per sensor and one column per snapshot."""

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[1] < 1:
            raise ValueError(f"snapshot data must be a 2-D (sensors, snapshots) array, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("snapshot data contains non-finite entries")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def num_sensors(self) -> int:
        return self.data.shape[0]

    @property
    def num_snapshots(self) -> int:
        return self.data.shape[1]


def _check_angle(doa_deg):
    a = np.asarray(doa_deg, dtype=float)
    if not np.all((a >= 0) & (a <= 180)):
        raise ValueError(f"arrival angle must lie in [0, 180] degrees, got {doa_deg!r}")


def steering_vector(geom: ArrayGeometry, doa_deg: float) -> np.ndarray:
    """
    Array response to a unit plane wave from ``doa_deg``.

    Parameters
    ----------
    geom : ArrayGeometry
    doa_deg : float
        Arrival angle in degrees, within [0, 180].

    Returns
    -------
    np.ndarray
        Complex vector of length ``geom.num_sensors``; element ``i`` is
        ``exp(-1j * 2*pi * spacing * i * sin(theta))``.
    """
    _check_angle(doa_deg)
    phase = 2 * np.pi * geom.spacing_wavelengths * np.sin(np.deg2rad(doa_deg))
    return np.exp(-1j * phase * np.arange(geom.num_sensors))


def steering_matrix(geom: ArrayGeometry, angles_deg: Sequence[float]) -> np.ndarray:
    """Steering vectors for several angles stacked as columns, shape (m, len(angles))."""
    angles = np.atleast_1d(np.asarray(angles_deg, dtype=float))
    _check_angle(angles)
    phase = 2 * np.pi * geom.spacing_wavelengths * np.sin(np.deg2rad(angles))
    return np.exp(-1j * np.outer(np.arange(geom.num_sensors), phase))


def synthesize_snapshots(
    geom: ArrayGeometry,
    sources: Sequence[SourceSpec],
    num_snapshots: int,
    noise: NoiseSpec = NoiseSpec(),
) -> SnapshotMatrix:
    """
    Simulate ``num_snapshots`` array outputs ``x(n) = C s(n) + N(n)``.

    Each source contributes the real envelope ``amplitude * cos(2*pi*f*n)``
    times its steering vector. Noise is i.i.d. circular Gaussian with
    standard deviation ``noise.sigma`` in each of the real and imaginary
    parts, drawn from ``numpy.random.default_rng(noise.seed)``.
    """
    sources = list(sources)
    if not sources:
        raise ValueError("at least one source is required")
    if len(sources) >= geom.num_sensors:
        raise ValueError(
            f"need fewer sources than sensors, got {len(sources)} sources for {geom.num_sensors} sensors"
        )
    if int(num_snapshots) != num_snapshots or num_snapshots < 1:
        raise ValueError(f"num_snapshots must be an integer >= 1, got {num_snapshots!r}")

    n = np.arange(num_snapshots)
    C = steering_matrix(geom, [s.doa_deg for s in sources])
    S = np.array([s.amplitude * np.cos(2 * np.pi * s.normalized_freq * n) for s in sources])
    rng = np.random.default_rng(noise.seed)
    shape = (geom.num_sensors, num_snapshots)
    N = noise.sigma * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return SnapshotMatrix(C @ S + N)


def sample_covariance(X: SnapshotMatrix) -> np.ndarray:
    """Sample covariance ``(1/L) * sum_n x(n) x(n)^H`` (maximum-likelihood scaling)."""
    data = X.data if isinstance(X, SnapshotMatrix) else SnapshotMatrix(X).data
    R = data @ data.conj().T / data.shape[1]
    # exact Hermitian symmetry; the product is Hermitian only up to rounding
    return 0.5 * (R + R.conj().T)


def random_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``m x m`` unitary matrix."""
    Z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    Q, Rq = np.linalg.qr(Z)
    d = np.diag(Rq)
    return Q * (d / np.abs(d))


def covariance_with_spectrum(eigenvalues: Sequence[float], seed: int) -> np.ndarray:
    """Hermitian PSD matrix ``Q diag(eigenvalues) Q^H`` with a seeded random unitary ``Q``."""
    lam = np.asarray(eigenvalues, dtype=float)
    if np.any(lam < 0):
        raise ValueError("eigenvalues must be nonnegative")
    Q = random_unitary(lam.size, np.random.default_rng(seed))
    R = (Q * lam) @ Q.conj().T
    return 0.5 * (R + R.conj().T)


def correlated_snapshots(covariance: np.ndarray, num_snapshots: int, seed: int) -> SnapshotMatrix:
    """
    Stationary zero-mean circular Gaussian stream with the given covariance.

    Columns are ``A z`` with ``A A^H = covariance`` and ``z`` standard circular
    complex Gaussian, so ``E[x x^H] = covariance``.
    """
    eig = eigendecompose(covariance)
    A = eig.eigenvectors * np.sqrt(np.clip(eig.eigenvalues, 0, None))
    rng = np.random.default_rng(seed)
    shape = (A.shape[0], num_snapshots)
    Z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    return SnapshotMatrix(A @ Z)
