"""
Online Hebbian / anti-Hebbian subspace learning rules.

A layer of ``l`` linear neurons with complex weights ``W`` (shape ``(l, m)``,
row ``j`` is neuron ``j``) responds to an input snapshot ``x`` with outputs
``y_j = w_j^H x``. The rules below update ``W`` one presentation at a time:

========================  =====================================================
``GHA``                   w_j += eta * conj(y_j) * (x - sum_{k<=j} w_k y_k)
``MCA_SINGLE``            w   -= eta * conj(y) * (x + y w)
``MCA_STABILIZED``        w   -= eta * (conj(y) x - |y|^2 w) + eta*beta*(|w|^2 - 1) w
``MCA_MULTI``             w_j -= eta * conj(y_j) * (x + sum_{k<=j} w_k y_k)
========================  =====================================================

On real data these reduce to the usual real-valued rules. GHA tracks the
principal subspace; the MCA rules drive weights toward the minor
eigen-directions of the input covariance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .array_signal import SnapshotMatrix
from .eigen_oracle import EigenDecomposition, eigenspace


class DivergenceError(RuntimeError):
    """A neuron's weight norm exceeded the divergence cap (learning rate too large)."""

    def __init__(self, message, iteration=None, trace=None):
        super().__init__(message)
        self.iteration = iteration
        self.trace = trace


class UpdateRule(enum.Enum):
    GHA = "gha"
    MCA_SINGLE = "mca_single"
    MCA_STABILIZED = "mca_stabilized"
    MCA_MULTI = "mca_multi"

    @property
    def is_minor(self) -> bool:
        return self is not UpdateRule.GHA


@dataclass(frozen=True)
class LearningConfig:
    """
    Hyperparameters for :func:`train`.

    With ``early_stop=False`` training always uses the full epoch budget and
    ``convergence_tol`` only decides the reported convergence.
    """

    eta: float = 0.01
    beta: float = 1.0
    max_epochs: int = 5000
    convergence_tol: float = 0.02
    seed: int = 0
    divergence_norm_cap: float = 1e3
    early_stop: bool = True

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta!r}")
        if not np.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta!r}")
        if int(self.max_epochs) != self.max_epochs or self.max_epochs < 0:
            raise ValueError(f"max_epochs must be an integer >= 0, got {self.max_epochs!r}")
        if not self.convergence_tol > 0:
            raise ValueError(f"convergence_tol must be > 0, got {self.convergence_tol!r}")
        if not self.divergence_norm_cap > 1:
            raise ValueError(f"divergence_norm_cap must be > 1, got {self.divergence_norm_cap!r}")


@dataclass(frozen=True, eq=False)
class ConvergenceTrace:
    """
    Per-presentation convergence record.

    ``direction_error[t, j]`` is ``1 - |<w_j/|w_j|, v>|`` against neuron ``j``'s
    reference direction (or ``1 - ||P w_j/|w_j|||`` for a reference subspace
    ``P``); ``norm_dev[t, j]`` is ``| |w_j| - 1 |``.
    """

    iterations: np.ndarray
    direction_error: np.ndarray
    norm_dev: np.ndarray

    def __len__(self):
        return self.iterations.size

    def first_below(self, threshold: float) -> int | None:
        """First iteration at which every neuron's direction error is below ``threshold``."""
        hit = np.flatnonzero(np.all(self.direction_error < threshold, axis=1))
        return int(self.iterations[hit[0]]) if hit.size else None


def _check_layer(W, x):
    W = np.asarray(W)
    x = np.asarray(x)
    if W.ndim != 2 or x.ndim != 1 or W.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: weights {W.shape} vs input {x.shape}")
    return W, x


def _check_vector(w, x):
    w = np.asarray(w)
    x = np.asarray(x)
    if w.ndim != 1 or w.shape != x.shape:
        raise ValueError(f"dimension mismatch: weight {w.shape} vs input {x.shape}")
    return w, x


def _outputs(W, x):
    # elementwise product + sum keeps the single- and multi-neuron paths bitwise equal
    return (W.conj() * x).sum(axis=-1)


def _gha(W, x, eta):
    y = _outputs(W, x)
    feedback = np.cumsum(W * y[:, None], axis=0)
    return W + (eta * np.conj(y))[:, None] * (x[None, :] - feedback)


def _mca_multi(W, x, eta):
    y = _outputs(W, x)
    feedback = np.cumsum(W * y[:, None], axis=0)
    return W - (eta * np.conj(y))[:, None] * (x[None, :] + feedback)


def gha_update(W, x, eta: float) -> np.ndarray:
    """One generalized Hebbian (Sanger) step on the layer ``W``."""
    W, x = _check_layer(W, x)
    return _gha(W, x, eta)


def mca_update_single(w, x, eta: float) -> np.ndarray:
    """One first-order linear MCA step for a single neuron."""
    w, x = _check_vector(w, x)
    y = _outputs(w, x)
    return w - (eta * np.conj(y)) * (x + w * y)


def mca_update_stabilized(w, x, eta: float, beta: float) -> np.ndarray:
    """One MCA step with the norm penalty ``beta * (|w|^2 - 1) * w``."""
    w, x = _check_vector(w, x)
    y = _outputs(w, x)
    sq = (w.real**2 + w.imag**2).sum(axis=-1)
    return w - eta * (np.conj(y) * x - (y.real**2 + y.imag**2) * w) - (eta * beta * (sq - 1)) * w


def mca_update_multi(W, x, eta: float) -> np.ndarray:
    """One multi-neuron MCA step with the lower-triangular competitive term."""
    W, x = _check_layer(W, x)
    return _mca_multi(W, x, eta)


def _stabilized_layer(W, x, eta, beta):
    y = _outputs(W, x)
    sq = (W.real**2 + W.imag**2).sum(axis=-1)
    power = y.real**2 + y.imag**2
    return W - eta * (np.conj(y)[:, None] * x[None, :] - power[:, None] * W) - (eta * beta * (sq - 1))[:, None] * W


def _single_layer(W, x, eta):
    y = _outputs(W, x)
    return W - (eta * np.conj(y))[:, None] * (x[None, :] + W * y[:, None])


def initial_weights(num_neurons: int, dim: int, seed: int) -> np.ndarray:
    """Seeded complex Gaussian rows normalized to unit norm (all-zero draws are redrawn)."""
    rng = np.random.default_rng(seed)
    while True:
        W = rng.standard_normal((num_neurons, dim)) + 1j * rng.standard_normal((num_neurons, dim))
        norms = np.linalg.norm(W, axis=1)
        if np.all(norms > 1e-12):
            return W / norms[:, None]


def reference_projectors(
    oracle: EigenDecomposition, rule: UpdateRule, num_neurons: int, reference=None
) -> np.ndarray:
    """
    Orthogonal projectors used to score each neuron, shape ``(l, m, m)``.

    With ``reference=None`` neuron ``j`` is scored against the eigenspace of the
    ``j``-th smallest (MCA rules) or ``j``-th largest (GHA) eigenvalue; a
    degenerate eigenvalue contributes its whole eigenspace. Passing an
    ``(m, k)`` orthonormal ``reference`` scores every neuron against that
    subspace instead.
    """
    m = oracle.dim
    if reference is not None:
        B = np.asarray(reference, dtype=complex)
        if B.ndim != 2 or B.shape[0] != m:
            raise ValueError(f"reference basis must have {m} rows, got shape {B.shape}")
        P = B @ B.conj().T
        return np.broadcast_to(P, (num_neurons, m, m))
    out = np.empty((num_neurons, m, m), dtype=complex)
    for j in range(num_neurons):
        k = j if rule.is_minor else m - 1 - j
        B = eigenspace(oracle, k)
        out[j] = B @ B.conj().T
    return out


def direction_errors(W, projectors, norms=None) -> np.ndarray:
    """``1 - ||P_j w_j|| / ||w_j||`` per neuron, clipped to [0, 1] (1 for a zero row)."""
    W = np.asarray(W)
    if norms is None:
        norms = np.sqrt((W.real**2 + W.imag**2).sum(axis=1))
    captured = np.einsum("ja,jab,jb->j", W.conj(), projectors, W).real
    return _errors_from(captured, norms)


def _errors_from(captured, norms):
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.sqrt(np.maximum(captured, 0.0)) / norms
    frac[~np.isfinite(frac)] = 0.0
    return np.minimum(np.maximum(1.0 - frac, 0.0), 1.0)


def train(
    X: SnapshotMatrix,
    rule: UpdateRule,
    config: LearningConfig,
    oracle: EigenDecomposition,
    num_neurons: int = 1,
    reference=None,
    trace_every: int = 1,
) -> tuple[np.ndarray, ConvergenceTrace]:
    """
    Run an online rule over the snapshot columns for up to ``config.max_epochs`` epochs.

    Weights start from :func:`initial_weights` with ``config.seed``. Columns
    are presented in order, epoch after epoch. Unless ``config.early_stop`` is
    off, training stops once every neuron's direction error (against
    ``oracle``, see :func:`reference_projectors`) is below
    ``config.convergence_tol``.

    Parameters
    ----------
    X : SnapshotMatrix
    rule : UpdateRule
    config : LearningConfig
    oracle : EigenDecomposition
        Ground truth used only for the trace metrics and the stopping test.
    num_neurons : int
        Rows of the weight matrix; at most the input dimension.
    reference : array_like, optional
        ``(m, k)`` orthonormal basis every neuron is scored against.
    trace_every : int
        Keep one trace record every ``trace_every`` presentations (the final
        presentation is always kept).

    Returns
    -------
    W : np.ndarray
        Final (unnormalized) weights, shape ``(num_neurons, m)``.
    trace : ConvergenceTrace

    Raises
    ------
    DivergenceError
        If any weight norm exceeds ``config.divergence_norm_cap`` or becomes
        non-finite. The partial trace is attached to the exception.
    """
    if not isinstance(X, SnapshotMatrix):
        X = SnapshotMatrix(X)
    rule = UpdateRule(rule)
    m = X.num_sensors
    if oracle.dim != m:
        raise ValueError(f"oracle dimension {oracle.dim} does not match {m} sensors")
    if not 1 <= num_neurons <= m:
        raise ValueError(f"num_neurons must lie in [1, {m}], got {num_neurons}")
    if trace_every < 1:
        raise ValueError("trace_every must be >= 1")

    W = initial_weights(num_neurons, m, config.seed)
    if reference is not None:
        B = np.asarray(reference, dtype=complex)
        P = reference_projectors(oracle, rule, num_neurons, B)

        def score(W, norms):
            return _errors_from((np.abs(W.conj() @ B) ** 2).sum(axis=1), norms)

    else:
        P = reference_projectors(oracle, rule, num_neurons)

        def score(W, norms):
            return direction_errors(W, P, norms)

    eta, beta, cap = config.eta, config.beta, config.divergence_norm_cap

    if rule is UpdateRule.GHA:
        step = lambda W, x: _gha(W, x, eta)  # noqa: E731
    elif rule is UpdateRule.MCA_MULTI:
        step = lambda W, x: _mca_multi(W, x, eta)  # noqa: E731
    elif rule is UpdateRule.MCA_STABILIZED:
        step = lambda W, x: _stabilized_layer(W, x, eta, beta)  # noqa: E731
    else:
        step = lambda W, x: _single_layer(W, x, eta)  # noqa: E731

    columns = [np.ascontiguousarray(c) for c in X.data.T]
    total = config.max_epochs * len(columns)
    n_rec = total // trace_every + 1
    iters = np.empty(n_rec, dtype=np.int64)
    derr = np.empty((n_rec, num_neurons))
    ndev = np.empty((n_rec, num_neurons))
    rec = 0

    def snapshot_trace():
        return ConvergenceTrace(iters[:rec].copy(), derr[:rec].copy(), ndev[:rec].copy())

    it = 0
    done = False
    for _ in range(config.max_epochs):
        for x in columns:
            W = step(W, x)
            it += 1
            norms = np.sqrt((W.real**2 + W.imag**2).sum(axis=1))
            if not (norms <= cap).all():
                raise DivergenceError(
                    f"weight norm {np.nanmax(norms):.3g} exceeded cap {cap:g} at iteration {it}"
                    f" (eta={eta:g}, rule={rule.value})",
                    iteration=it,
                    trace=snapshot_trace(),
                )
            keep = it % trace_every == 0 or it == total
            if not (keep or config.early_stop):
                continue
            err = score(W, norms)
            done = config.early_stop and bool((err < config.convergence_tol).all())
            if keep or done:
                iters[rec] = it
                derr[rec] = err
                ndev[rec] = np.abs(norms - 1.0)
                rec += 1
            if done:
                break
        if done:
            break

    return W, snapshot_trace()
