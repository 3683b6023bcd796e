"""Sequential likelihood-free inference driver.

Each iteration samples parameters (uniform on the initial support at
iteration 0, low-variance posterior sampling afterwards), simulates a batch,
appends the successes to the cumulative dataset, retrains the density
network on everything collected so far, conditions it on the observed
summary and, when configured, adapts the sampling support before the next
iteration. The proposal-prior ratio is omitted: dataset densification makes
the learnt conditional density the posterior directly.
"""

import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Callable, List, Optional

import numpy as np

from . import heuristics, mdn, simulators, summaries
from .heuristics import AdaptationTrace, EdgeConfig, ModeConfig
from .mog import FeasibleDomain, MixtureOfGaussians, SupportBounds, sample_low_variance
from .seeding import derive_seed


class Simulator(Enum):
    LOTKA_VOLTERRA = "lotka_volterra"
    MG1 = "mg1"


class Heuristic(Enum):
    NONE = "none"
    EDGE = "edge"
    MODE = "mode"
    CENTRE = "centre"


@dataclass(frozen=True)
class InferenceConfig:
    simulator: Simulator
    initial_support: SupportBounds
    feasible_domain: FeasibleDomain
    observed_summary: np.ndarray
    n_iterations: int = 10
    successes_per_iter: int = 100
    max_attempts_per_iter: int = 125
    heuristic: Heuristic = Heuristic.NONE
    edge_config: EdgeConfig = EdgeConfig()
    mode_config: ModeConfig = ModeConfig()
    mdn_arch: Optional[mdn.MDNArchitecture] = None  # input/param dims filled in
    mdn_train: mdn.TrainConfig = mdn.TrainConfig()
    ground_truth: Optional[np.ndarray] = None  # evaluation only, never read here
    master_seed: int = 0
    lv_config: simulators.LotkaVolterraConfig = simulators.LotkaVolterraConfig()
    mg1_config: simulators.MG1Config = simulators.MG1Config()
    lv_summary_mode: summaries.LVSummaryMode = summaries.LVSummaryMode.FLAT_SUBSAMPLED

    def __post_init__(self):
        if not self.feasible_domain.contains(self.initial_support):
            raise ValueError("initial_support must lie inside feasible_domain")
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be >= 1")


@dataclass
class IterationRecord:
    iteration: int
    support_before: SupportBounds
    support_after: SupportBounds
    adaptation: Optional[AdaptationTrace]
    attempts: int
    failures: int
    new_successes: int
    dataset_size: int
    posterior: MixtureOfGaussians
    new_thetas: Optional[np.ndarray] = None
    train_report: Optional[mdn.TrainingReport] = None
    mdn_snapshot: Optional[str] = None
    metrics: Optional[dict] = None

    @property
    def success_rate(self) -> float:
        return (self.attempts - self.failures) / self.attempts if self.attempts else 0.0

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "support_before": self.support_before.to_dict(),
            "support_after": self.support_after.to_dict(),
            "adaptation": self.adaptation.to_dict() if self.adaptation else None,
            "attempts": self.attempts,
            "failures": self.failures,
            "success_rate": self.success_rate,
            "new_successes": self.new_successes,
            "dataset_size": self.dataset_size,
            "posterior": self.posterior.to_dict(),
            "new_thetas": None if self.new_thetas is None else np.asarray(self.new_thetas).tolist(),
            "mdn_snapshot": self.mdn_snapshot,
            "metrics": self.metrics,
        }


class InferenceAborted(RuntimeError):
    """A run stopped early; completed iteration records are preserved."""

    def __init__(self, message: str, records: List[IterationRecord]):
        super().__init__(message)
        self.records = records


def simulator_fn(cfg: InferenceConfig) -> Callable[[np.ndarray, int], simulators.SimulationOutcome]:
    if cfg.simulator is Simulator.LOTKA_VOLTERRA:
        return partial(simulators.simulate_lotka_volterra, cfg=cfg.lv_config)
    return partial(simulators.simulate_mg1, cfg=cfg.mg1_config)


def summary_fn(cfg: InferenceConfig) -> Callable[[np.ndarray], summaries.SummaryVector]:
    if cfg.simulator is Simulator.LOTKA_VOLTERRA:
        return partial(summaries.summarize_lv, mode=cfg.lv_summary_mode)
    return summaries.summarize_mg1


def uniform_box_sampler(bounds: SupportBounds) -> Callable[[int, int], np.ndarray]:
    def sample(n: int, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return rng.uniform(bounds.lower, bounds.upper, size=(n, bounds.dim))
    return sample


def posterior_sampler(posterior: MixtureOfGaussians) -> Callable[[int, int], np.ndarray]:
    def sample(n: int, seed: int) -> np.ndarray:
        return sample_low_variance(posterior, n, seed)
    return sample


def make_observation(cfg: InferenceConfig, seed: int):
    """Simulate the reference system at the ground truth with a dedicated
    seed; returns (summary vector, raw reference trajectory)."""
    if cfg.ground_truth is None:
        raise ValueError("config has no ground truth to observe")
    outcome = simulator_fn(cfg)(np.asarray(cfg.ground_truth, dtype=float), seed=seed)
    if not outcome.ok:
        raise RuntimeError("reference simulation was infeasible")
    return summary_fn(cfg)(outcome.trajectory).values, outcome.trajectory


def run_inference(cfg: InferenceConfig,
                  snapshot_dir: Optional[str] = None) -> List[IterationRecord]:
    simulate = simulator_fn(cfg)
    summarize = summary_fn(cfg)
    support = cfg.initial_support
    d = support.dim

    records: List[IterationRecord] = []
    thetas: List[np.ndarray] = []
    raw_summaries: List[np.ndarray] = []
    scaler: Optional[mdn.InputScaler] = None
    net: Optional[mdn.MDN] = None
    previous_posterior: Optional[MixtureOfGaussians] = None

    if cfg.heuristic is Heuristic.MODE and not cfg.mdn_train.warm_start:
        heuristics.warn_cold_restart_mode()

    for i in range(cfg.n_iterations):
        support_before = support
        if previous_posterior is None:
            sampler = uniform_box_sampler(support)
        else:
            sampler = posterior_sampler(previous_posterior)
        batch, stats = simulators.run_batch(
            sampler, simulate, cfg.successes_per_iter,
            cfg.max_attempts_per_iter, derive_seed(cfg.master_seed, "batch", i))
        new = 0
        new_thetas = []
        for rec in batch:
            if rec.outcome.ok:
                theta = np.asarray(rec.theta, dtype=float)
                thetas.append(theta)
                new_thetas.append(theta)
                raw_summaries.append(summarize(rec.outcome.trajectory).values)
                new += 1
        if new == 0:
            raise InferenceAborted(
                f"iteration {i}: no feasible simulations in {stats.attempts} attempts",
                records)

        if scaler is None:
            scaler = mdn.InputScaler.fit(np.array(raw_summaries))
        xs = scaler.transform(np.array(raw_summaries))
        theta_arr = np.array(thetas)

        if net is None or not cfg.mdn_train.warm_start:
            arch = cfg.mdn_arch or mdn.MDNArchitecture(
                input_dim=xs.shape[1], param_dim=d)
            if arch.input_dim != xs.shape[1] or arch.param_dim != d:
                arch = mdn.MDNArchitecture(
                    input_dim=xs.shape[1], param_dim=d,
                    hidden_layers=arch.hidden_layers,
                    n_components=arch.n_components, activation=arch.activation)
            net = mdn.MDN(arch, seed=derive_seed(cfg.master_seed, "init"))
        train_cfg = mdn.TrainConfig(
            learning_rate=cfg.mdn_train.learning_rate,
            batch_size=cfg.mdn_train.batch_size,
            max_epochs=cfg.mdn_train.max_epochs,
            patience=cfg.mdn_train.patience,
            seed=derive_seed(cfg.master_seed, "train", i),
            warm_start=cfg.mdn_train.warm_start)
        report = mdn.train(net, theta_arr, xs, support, train_cfg)
        if report.diverged:
            raise InferenceAborted(f"iteration {i}: MDN training diverged", records)

        posterior = mdn.forward(net, scaler.transform(cfg.observed_summary),
                                support)

        trace = None
        if cfg.heuristic is Heuristic.EDGE:
            support, trace = heuristics.edge_adapt(
                posterior, support, cfg.feasible_domain, cfg.edge_config)
        elif cfg.heuristic is Heuristic.MODE:
            support, trace = heuristics.mode_adapt(
                posterior, previous_posterior, support, cfg.feasible_domain,
                cfg.mode_config, i)
        elif cfg.heuristic is Heuristic.CENTRE:
            support, trace = heuristics.centre_adapt(
                posterior, support, cfg.feasible_domain)
        posterior = posterior.with_support(support)

        snapshot = None
        if snapshot_dir is not None:
            snapshot = f"{snapshot_dir}/mdn_iter_{i}.npz"
            mdn.save_weights(net, snapshot)

        records.append(IterationRecord(
            iteration=i, support_before=support_before, support_after=support,
            adaptation=trace, attempts=stats.attempts, failures=stats.failures,
            new_successes=new, dataset_size=len(thetas), posterior=posterior,
            new_thetas=np.array(new_thetas), train_report=report,
            mdn_snapshot=snapshot))
        previous_posterior = posterior
    return records
