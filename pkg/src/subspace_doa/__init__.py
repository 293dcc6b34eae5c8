"""
Neural minor/principal component learning rules for adaptive subspace
estimation, applied to direction-of-arrival estimation on a uniform linear
array.
"""

from .array_signal import (
    ArrayGeometry,
    NoiseSpec,
    SnapshotMatrix,
    SourceSpec,
    correlated_snapshots,
    covariance_with_spectrum,
    sample_covariance,
    steering_matrix,
    steering_vector,
    synthesize_snapshots,
)
from .doa_spectrum import (
    GridSpec,
    NoiseSubspace,
    PeakSet,
    SpectrumGrid,
    angle_rmse,
    find_peaks,
    mca_spectrum,
    noise_subspace_from_weights,
    orthonormal_rows,
    pca_spectrum,
)
from .eigen_oracle import ConvergenceError, EigenDecomposition, eigendecompose, minor_component, principal_component
from .experiment import ExperimentConfig, ExperimentReport, Variant, emit_outputs, preset, run_experiment
from .subspace_learning import (
    ConvergenceTrace,
    DivergenceError,
    LearningConfig,
    UpdateRule,
    gha_update,
    mca_update_multi,
    mca_update_single,
    mca_update_stabilized,
    train,
)

__version__ = "0.1.0"
