"""Stochastic benchmark simulators: Lotka-Volterra MJP and the M/G/1 queue.

Both simulators are pure functions of (parameters, config, seed) and report
infeasible parameterisations explicitly instead of raising, so batch drivers
can count failures without aborting.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .seeding import derive_seed


class InfeasibleReason(Enum):
    EVENT_CAP_EXCEEDED = "event_cap_exceeded"
    NUMERIC_OVERFLOW = "numeric_overflow"
    INVALID_PARAMS = "invalid_params"


@dataclass(frozen=True)
class SimulationOutcome:
    """Either a recorded trajectory or an infeasibility flag."""

    trajectory: Optional[np.ndarray] = None
    reason: Optional[InfeasibleReason] = None

    @property
    def ok(self) -> bool:
        return self.trajectory is not None

    @staticmethod
    def success(trajectory: np.ndarray) -> "SimulationOutcome":
        return SimulationOutcome(trajectory=np.asarray(trajectory, dtype=float))

    @staticmethod
    def infeasible(reason: InfeasibleReason) -> "SimulationOutcome":
        return SimulationOutcome(reason=reason)


@dataclass(frozen=True)
class LotkaVolterraConfig:
    init_predators: int = 50
    init_prey: int = 100
    duration: float = 30.0
    record_dt: float = 0.2
    max_events: int = 10_000

    def __post_init__(self):
        if self.init_predators < 0 or self.init_prey < 0:
            raise ValueError("initial populations must be non-negative")
        if self.duration <= 0 or self.record_dt <= 0 or self.max_events <= 0:
            raise ValueError("duration, record_dt and max_events must be positive")

    @property
    def n_frames(self) -> int:
        return int(np.floor(self.duration / self.record_dt)) + 1


@dataclass(frozen=True)
class MG1Config:
    num_jobs: int = 50

    def __post_init__(self):
        if self.num_jobs < 2:
            raise ValueError("num_jobs must be >= 2")


# Reaction table: (dX, dY) for predator born, predator dies, prey born, prey dies.
_LV_CHANGES = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _lv_rates(theta, x, y):
    return (theta[0] * x * y, theta[1] * x, theta[2] * y, theta[3] * x * y)


def _gillespie(theta, cfg: LotkaVolterraConfig, rng: np.random.Generator,
               freeze_state: bool = False, event_times: Optional[list] = None):
    """Core Gillespie loop with zero-order-hold recording on the dt grid.

    freeze_state keeps populations constant after each event (test hook for
    the exponential-clock property); event_times, when a list is passed,
    collects the absolute time of every fired event.
    """
    x, y = float(cfg.init_predators), float(cfg.init_prey)
    n_frames = cfg.n_frames
    dt = cfg.record_dt
    traj = np.empty((n_frames, 2))
    t = 0.0
    next_frame = 0
    events = 0
    while True:
        rates = _lv_rates(theta, x, y)
        total = rates[0] + rates[1] + rates[2] + rates[3]
        if total > 0.0:
            t_next = t + rng.exponential(1.0 / total)
        else:
            t_next = np.inf  # system frozen until duration
        while next_frame < n_frames and next_frame * dt < t_next:
            traj[next_frame] = (x, y)
            next_frame += 1
        if next_frame >= n_frames or t_next > cfg.duration:
            return SimulationOutcome.success(traj)
        events += 1
        if events > cfg.max_events:
            return SimulationOutcome.infeasible(InfeasibleReason.EVENT_CAP_EXCEEDED)
        u = rng.random() * total
        acc = 0.0
        reaction = 3
        for j in range(4):
            acc += rates[j]
            if u <= acc:
                reaction = j
                break
        if not freeze_state:
            x += _LV_CHANGES[reaction][0]
            y += _LV_CHANGES[reaction][1]
        if event_times is not None:
            event_times.append(t_next)
        t = t_next


def simulate_lotka_volterra(theta_log: np.ndarray, cfg: LotkaVolterraConfig,
                            seed: int) -> SimulationOutcome:
    """Simulate the predator-prey Markov jump process.

    theta_log holds log-rates; the four reactions fire with rates
    (th1*X*Y, th2*X, th3*Y, th4*X*Y) where th = exp(theta_log).
    Returns a (frames x 2) trajectory of (X, Y) counts recorded on the
    record_dt grid, or an infeasibility flag when more than max_events
    reactions fire before `duration` elapses.
    """
    theta_log = np.asarray(theta_log, dtype=float)
    if theta_log.shape != (4,):
        raise ValueError("theta_log must be 4-dimensional")
    theta = np.exp(theta_log)
    if not np.all(np.isfinite(theta)):
        return SimulationOutcome.infeasible(InfeasibleReason.INVALID_PARAMS)
    rng = np.random.default_rng(seed)
    return _gillespie(tuple(theta), cfg, rng)


def simulate_mg1(theta: np.ndarray, cfg: MG1Config, seed: int) -> SimulationOutcome:
    """Simulate the single-server queue and return its interdeparture times.

    Service times are U(min(th1, th2), max(th1, th2)), interarrival times
    Exponential(rate=th3). Departures follow
    d_i = d_{i-1} + s_i + max(0, u_i - d_{i-1}); the trajectory is the
    vector of num_jobs - 1 interdeparture times.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (3,):
        raise ValueError("theta must be 3-dimensional")
    if not np.all(np.isfinite(theta)) or theta[2] <= 0:
        return SimulationOutcome.infeasible(InfeasibleReason.INVALID_PARAMS)
    lo, hi = min(theta[0], theta[1]), max(theta[0], theta[1])
    rng = np.random.default_rng(seed)
    n = cfg.num_jobs
    s = rng.uniform(lo, hi, n)
    u = np.cumsum(rng.exponential(1.0 / theta[2], n))
    d = np.empty(n)
    d_prev = 0.0
    for i in range(n):
        d_prev = d_prev + s[i] + max(0.0, u[i] - d_prev)
        d[i] = d_prev
    return SimulationOutcome.success(np.diff(d))


@dataclass(frozen=True)
class SimulationRecord:
    theta: np.ndarray
    outcome: SimulationOutcome


@dataclass(frozen=True)
class BatchStats:
    attempts: int
    successes: int
    failures: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.attempts if self.attempts else 0.0


def run_batch(sample_thetas: Callable[[int, int], np.ndarray],
              simulate: Callable[[np.ndarray, int], SimulationOutcome],
              target_successes: int, max_attempts: int, seed: int):
    """Draw parameters, simulate until target_successes or max_attempts.

    sample_thetas(n, seed) -> (n, D) array; all max_attempts candidates are
    drawn up front so stratified samplers keep their low-variance structure.
    Attempt i runs with seed derive_seed(seed, i), so results are identical
    whether attempts execute sequentially or in parallel.
    """
    if target_successes > max_attempts:
        raise ValueError("target_successes must not exceed max_attempts")
    thetas = np.asarray(sample_thetas(max_attempts, derive_seed(seed, "thetas")))
    records = []
    successes = 0
    attempts = 0
    for i in range(max_attempts):
        if successes >= target_successes:
            break
        outcome = simulate(thetas[i], seed=derive_seed(seed, i))
        attempts += 1
        records.append(SimulationRecord(theta=thetas[i], outcome=outcome))
        if outcome.ok:
            successes += 1
    stats = BatchStats(attempts=attempts, successes=successes,
                       failures=attempts - successes)
    return records, stats
