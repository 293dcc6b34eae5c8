"""
Seeded Monte Carlo harness: snapshots -> online learning -> pseudo-spectrum -> score.

A config describes one base run plus optional *variants* (small sets of
overrides such as the learning rate or snapshot count). Every variant runs
``num_trials`` trials. Trial ``t`` of every variant uses the same child seed
``derive_seed(config.seed, t)``, so variants are compared on identical data
and initial weights, and adding trials never changes earlier ones.

Outputs (see :func:`emit_outputs`): ``spectrum.csv``, ``trace.csv``,
``report.json`` and ``config.json``.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np

from .array_signal import ArrayGeometry, NoiseSpec, SourceSpec, sample_covariance, synthesize_snapshots
from .doa_spectrum import (
    GridSpec,
    SpectrumGrid,
    angle_rmse,
    find_peaks,
    mca_spectrum,
    noise_subspace_from_weights,
    orthonormal_rows,
    pca_spectrum,
)
from .eigen_oracle import eigendecompose
from .subspace_learning import ConvergenceTrace, DivergenceError, LearningConfig, UpdateRule, train

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
SPECTRUM_COLUMNS = ("theta_deg", "power", "method", "trial")
TRACE_COLUMNS = ("iter", "neuron", "direction_error", "norm_dev", "trial")
VARIANT_KEYS = (
    "eta",
    "beta",
    "max_epochs",
    "convergence_tol",
    "rule",
    "num_snapshots",
    "noise_sigma",
    "num_neurons",
)
_LEARNING_KEYS = ("eta", "beta", "max_epochs", "convergence_tol")


def splitmix64(x: int) -> int:
    """One SplitMix64 output for state ``x`` (64-bit wraparound arithmetic)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(parent: int, index: int) -> int:
    """Child seed ``splitmix64(splitmix64(parent) + index)``; depends only on (parent, index)."""
    return splitmix64((splitmix64(int(parent) & MASK64) + int(index)) & MASK64)


@dataclass(frozen=True)
class Variant:
    label: str
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        bad = set(self.overrides) - set(VARIANT_KEYS)
        if bad:
            raise ValueError(f"variant {self.label!r} overrides unsupported keys {sorted(bad)}")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything needed to reproduce an experiment.

    ``num_neurons`` defaults to ``m - l`` for the MCA rules (a noise-subspace
    estimate) and ``l`` for GHA (a signal-subspace estimate), where ``l`` is
    the number of sources. ``num_peaks`` defaults to ``2 l`` because the
    array response is mirror-symmetric about broadside. ``learning.seed`` is
    ignored; seeds come from ``seed`` via :func:`derive_seed`.
    """

    name: str = "custom"
    geometry: ArrayGeometry = ArrayGeometry()
    sources: tuple[SourceSpec, ...] = (SourceSpec(60.0, 0.35), SourceSpec(100.0, 0.36))
    num_snapshots: int = 5
    noise_sigma: float = 0.009
    seed: int = 0
    rule: UpdateRule = UpdateRule.MCA_MULTI
    learning: LearningConfig = LearningConfig()
    grid: GridSpec = GridSpec()
    num_trials: int = 1
    num_neurons: int | None = None
    num_peaks: int | None = None
    trace_every: int = 1
    variants: tuple[Variant, ...] = ()
    output_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rule", UpdateRule(self.rule))
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "variants", tuple(self.variants))
        if not self.sources:
            raise ValueError("at least one source is required")
        if len(self.sources) >= self.geometry.num_sensors:
            raise ValueError("need fewer sources than sensors")
        if int(self.num_snapshots) != self.num_snapshots or self.num_snapshots < 1:
            raise ValueError("num_snapshots must be an integer >= 1")
        NoiseSpec(self.noise_sigma, 0)
        if int(self.num_trials) != self.num_trials or self.num_trials < 1:
            raise ValueError("num_trials must be an integer >= 1")
        if self.num_neurons is not None and not 1 <= self.num_neurons <= self.geometry.num_sensors:
            raise ValueError("num_neurons must lie in [1, num_sensors]")
        if self.num_peaks is not None and self.num_peaks < 1:
            raise ValueError("num_peaks must be >= 1")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")
        labels = [v.label for v in self.variants]
        if len(set(labels)) != len(labels):
            raise ValueError("variant labels must be unique")
        self.resolved()  # validates variant overrides

    @property
    def truth_deg(self) -> list[float]:
        return [s.doa_deg for s in self.sources]

    def neurons(self) -> int:
        if self.num_neurons is not None:
            return self.num_neurons
        l = len(self.sources)
        return self.geometry.num_sensors - l if self.rule.is_minor else l

    def peaks(self) -> int:
        return self.num_peaks if self.num_peaks is not None else 2 * len(self.sources)

    def resolved(self) -> list[tuple[str, "ExperimentConfig"]]:
        """(label, flat config) per variant; a config without variants yields one ``"base"`` entry."""
        if not self.variants:
            return [("base", self)]
        out = []
        for v in self.variants:
            learn = {k: v.overrides[k] for k in _LEARNING_KEYS if k in v.overrides}
            top = {k: val for k, val in v.overrides.items() if k not in _LEARNING_KEYS}
            if "rule" in top:
                top["rule"] = UpdateRule(top["rule"])
            cfg = replace(self, variants=(), learning=replace(self.learning, **learn), **top)
            out.append((v.label, cfg))
        return out

    def to_dict(self) -> dict:
        learning = asdict(self.learning)
        learning.pop("seed")
        return {
            "name": self.name,
            "geometry": asdict(self.geometry),
            "sources": [asdict(s) for s in self.sources],
            "num_snapshots": self.num_snapshots,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
            "rule": self.rule.value,
            "learning": learning,
            "grid": asdict(self.grid),
            "num_trials": self.num_trials,
            "num_neurons": self.num_neurons,
            "num_peaks": self.num_peaks,
            "trace_every": self.trace_every,
            "variants": [
                {"label": v.label, **{k: (val.value if isinstance(val, UpdateRule) else val) for k, val in v.overrides.items()}}
                for v in self.variants
            ],
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields {sorted(unknown)}")
        if "geometry" in d:
            d["geometry"] = ArrayGeometry(**d["geometry"])
        if "sources" in d:
            d["sources"] = tuple(SourceSpec(**s) for s in d["sources"])
        if "learning" in d:
            d["learning"] = LearningConfig(**d["learning"])
        if "grid" in d:
            d["grid"] = GridSpec(**d["grid"])
        if "variants" in d:
            vs = []
            for v in d["variants"]:
                v = dict(v)
                vs.append(Variant(str(v.pop("label")), v))
            d["variants"] = tuple(vs)
        try:
            return cls(**d)
        except TypeError as exc:
            raise ValueError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class TrialRecord:
    trial: int
    variant: str
    index: int
    seed: int
    status: str
    converged: bool
    iterations: int
    final_direction_errors: list
    peak_angles: list
    angle_rmse: float
    method: str
    spectrum: SpectrumGrid | None = None
    trace: ConvergenceTrace | None = None

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "variant": self.variant,
            "index": self.index,
            "seed": self.seed,
            "status": self.status,
            "converged": self.converged,
            "iterations": self.iterations,
            "final_direction_errors": self.final_direction_errors,
            "peak_angles": self.peak_angles,
            "angle_rmse": self.angle_rmse,
            "method": self.method,
        }


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list[TrialRecord]
    aggregates: list[dict] = field(default_factory=list)
    files: list[str] = field(default_factory=list)

    def aggregate(self, variant: str) -> dict:
        for a in self.aggregates:
            if a["variant"] == variant:
                return a
        raise KeyError(variant)

    def to_dict(self) -> dict:
        return {
            "name": self.config.name,
            "records": [r.to_dict() for r in self.records],
            "aggregates": self.aggregates,
            "files": self.files,
        }

    def summary_table(self) -> str:
        head = f"{'variant':<16}{'method':<8}{'trials':>7}{'median_rmse':>13}{'mean_rmse':>11}{'converged':>11}{'diverged':>10}"
        lines = [head]
        for a in self.aggregates:
            lines.append(
                f"{a['variant']:<16}{a['method']:<8}{a['num_trials']:>7}{a['median_rmse']:>13.4f}"
                f"{a['mean_rmse']:>11.4f}{a['convergence_rate']:>11.2f}{a['num_diverged']:>10}"
            )
        return "\n".join(lines)


def compute_aggregates(records: list[TrialRecord]) -> list[dict]:
    """Per-variant statistics, in first-appearance order of the variants."""
    order = list(dict.fromkeys(r.variant for r in records))
    out = []
    for label in order:
        rs = [r for r in records if r.variant == label]
        rmse = np.array([r.angle_rmse for r in rs])
        out.append(
            {
                "variant": label,
                "method": rs[0].method,
                "num_trials": len(rs),
                "median_rmse": float(np.median(rmse)),
                "mean_rmse": float(np.mean(rmse)),
                "convergence_rate": sum(r.converged for r in rs) / len(rs),
                "num_diverged": sum(r.status == "diverged" for r in rs),
            }
        )
    return out


def _method(rule: UpdateRule) -> str:
    return "mca" if rule.is_minor else "pca"


def run_trial(cfg: ExperimentConfig, index: int, trial_id: int, label: str = "base") -> TrialRecord:
    """One trial of a flat (variant-free) config."""
    child = derive_seed(cfg.seed, index)
    geom = cfg.geometry
    l = len(cfg.sources)
    X = synthesize_snapshots(geom, cfg.sources, cfg.num_snapshots, NoiseSpec(cfg.noise_sigma, derive_seed(child, 0)))
    oracle = eigendecompose(sample_covariance(X))
    m = geom.num_sensors
    # score neurons against the whole noise (MCA) or signal (GHA) subspace
    reference = oracle.eigenvectors[:, : m - l] if cfg.rule.is_minor else oracle.eigenvectors[:, m - l :]
    learning = replace(cfg.learning, seed=derive_seed(child, 1))
    method = _method(cfg.rule)
    base = dict(trial=trial_id, variant=label, index=index, seed=child, method=method)

    try:
        W, trace = train(X, cfg.rule, learning, oracle, cfg.neurons(), reference, cfg.trace_every)
    except DivergenceError as exc:
        log.info("trial %d (%s) diverged at iteration %s", trial_id, label, exc.iteration)
        trace = exc.trace
        last = trace.direction_error[-1].tolist() if len(trace) else []
        return TrialRecord(
            status="diverged", converged=False, iterations=int(exc.iteration), final_direction_errors=last,
            peak_angles=[], angle_rmse=angle_rmse([], cfg.truth_deg), trace=trace, **base,
        )

    final = trace.direction_error[-1].tolist() if len(trace) else []
    converged = bool(final) and max(final) < learning.convergence_tol
    iterations = int(trace.iterations[-1]) if len(trace) else 0
    try:
        if cfg.rule.is_minor:
            spectrum = mca_spectrum(geom, noise_subspace_from_weights(W), cfg.grid)
        else:
            spectrum = pca_spectrum(geom, orthonormal_rows(W), cfg.grid)
    except ValueError as exc:
        log.info("trial %d (%s): degenerate weights (%s)", trial_id, label, exc)
        return TrialRecord(
            status="degenerate", converged=converged, iterations=iterations, final_direction_errors=final,
            peak_angles=[], angle_rmse=angle_rmse([], cfg.truth_deg), trace=trace, **base,
        )
    peaks = find_peaks(spectrum, cfg.peaks())
    return TrialRecord(
        status="ok", converged=converged, iterations=iterations, final_direction_errors=final,
        peak_angles=peaks.angles_deg.tolist(), angle_rmse=angle_rmse(peaks, cfg.truth_deg),
        spectrum=spectrum, trace=trace, **base,
    )


def run_experiment(config: ExperimentConfig, out_dir=None) -> ExperimentReport:
    """
    Run every trial of every variant and, if an output directory is given
    (argument or ``config.output_dir``), write the artifacts there.

    A diverged trial is recorded with status ``"diverged"`` and the full miss
    penalty as its angle error; it does not abort the experiment.
    """
    records = []
    for v, (label, cfg) in enumerate(config.resolved()):
        for t in range(config.num_trials):
            records.append(run_trial(cfg, t, v * config.num_trials + t, label))
    report = ExperimentReport(config, records, compute_aggregates(records))
    target = out_dir if out_dir is not None else config.output_dir
    if target is not None:
        emit_outputs(report, target)
    return report


def _fmt(x) -> str:
    return format(float(x), ".17g")


def emit_outputs(report: ExperimentReport, dir) -> list[Path]:
    """
    Write ``spectrum.csv``, ``trace.csv``, ``report.json`` and ``config.json``.

    CSV floats use 17 significant digits; JSON floats use Python's shortest
    round-trip representation. ``report.files`` lists the file names
    (relative to ``dir``) so reports do not depend on where they were written.
    """
    if not report.records:
        raise ValueError("report has no trials")
    out = Path(dir)
    out.mkdir(parents=True, exist_ok=True)
    names = ["spectrum.csv", "trace.csv", "report.json", "config.json"]
    report.files = list(names)
    paths = [out / n for n in names]

    with open(paths[0], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SPECTRUM_COLUMNS)
        for r in report.records:
            if r.spectrum is None:
                continue
            for theta, p in zip(r.spectrum.angles_deg, r.spectrum.values):
                w.writerow((_fmt(theta), _fmt(p), r.method, r.trial))

    with open(paths[1], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in report.records:
            tr = r.trace
            if tr is None:
                continue
            for i, it in enumerate(tr.iterations):
                for j in range(tr.direction_error.shape[1]):
                    w.writerow((int(it), j, _fmt(tr.direction_error[i, j]), _fmt(tr.norm_dev[i, j]), r.trial))

    _write_json(paths[2], report.to_dict())
    _write_json(paths[3], report.config.to_dict())
    return paths


def _write_json(path: Path, obj: Any):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, allow_nan=False)
        fh.write("\n")


def _paper_setup(**kw) -> ExperimentConfig:
    base = dict(
        geometry=ArrayGeometry(8, 0.5),
        sources=(SourceSpec(60.0, 0.35), SourceSpec(100.0, 0.36)),
        num_snapshots=5,
        noise_sigma=0.009,
        learning=LearningConfig(eta=0.03, beta=1.0, max_epochs=5000, convergence_tol=1e-3, early_stop=False),
        num_trials=20,
        trace_every=100,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def _snapshot_sweep(name, rule):
    return _paper_setup(
        name=name, rule=rule,
        variants=(Variant("L=2", {"num_snapshots": 2}), Variant("L=5", {"num_snapshots": 5})),
    )


def _presets() -> dict:
    fig2 = _paper_setup(
        name="fig2-lr-sweep",
        # unit amplitude puts eta=0.1 past the stability limit of the rule
        sources=(SourceSpec(60.0, 0.35, 0.5), SourceSpec(100.0, 0.36, 0.5)),
        rule=UpdateRule.MCA_MULTI,
        learning=LearningConfig(eta=0.01, max_epochs=2000, convergence_tol=0.02),
        num_trials=1,
        trace_every=1,
        variants=(Variant("eta=0.01", {"eta": 0.01}), Variant("eta=0.1", {"eta": 0.1})),
    )
    fig45 = _snapshot_sweep("fig4-5-mca-snapshots", UpdateRule.MCA_MULTI)
    fig67 = _snapshot_sweep("fig6-7-pca-snapshots", UpdateRule.GHA)
    fig89 = _paper_setup(
        name="fig8-9-noise-compare",
        rule=UpdateRule.MCA_MULTI,
        variants=(Variant("pca", {"rule": "gha"}), Variant("mca", {"rule": "mca_multi"})),
    )
    single = {
        "fig4": _paper_setup(name="fig4", rule=UpdateRule.MCA_MULTI, num_snapshots=2),
        "fig5": _paper_setup(name="fig5", rule=UpdateRule.MCA_MULTI, num_snapshots=5),
        "fig6": _paper_setup(name="fig6", rule=UpdateRule.GHA, num_snapshots=2),
        "fig7": _paper_setup(name="fig7", rule=UpdateRule.GHA, num_snapshots=5),
        "fig8": _paper_setup(name="fig8", rule=UpdateRule.GHA),
        "fig9": _paper_setup(name="fig9", rule=UpdateRule.MCA_MULTI),
    }
    return {
        "fig2-lr-sweep": fig2,
        "fig2": replace(fig2, name="fig2"),
        "fig4-5-mca-snapshots": fig45,
        "fig6-7-pca-snapshots": fig67,
        "fig8-9-noise-compare": fig89,
        **single,
    }


PRESET_NAMES = tuple(_presets())


def preset(name: str) -> ExperimentConfig:
    """
    Configuration reproducing one of the reference experiments.

    All presets use an 8-sensor half-wavelength ULA with sources at 60 deg
    (f=0.35) and 100 deg (f=0.36). The sweep presets (``fig2-lr-sweep``,
    ``fig4-5-mca-snapshots``, ``fig6-7-pca-snapshots``,
    ``fig8-9-noise-compare``) carry their sweep as variants; ``fig2`` and
    ``fig4`` ... ``fig9`` name the individual panels.
    """
    table = _presets()
    if name not in table:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(table)}")
    return table[name]
