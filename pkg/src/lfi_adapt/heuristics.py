"""Support-adaptation policies: edge-mass expansion, mode-shift expansion and
weighted-mean recentring. All three are pure functions from (posterior,
bounds, feasible domain, config) to new bounds plus an audit trail."""

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .mog import FeasibleDomain, MixtureOfGaussians, SupportBounds, \
    marginal_interval_mass, weighted_mean


def _as_vector(value, dim: int, name: str) -> np.ndarray:
    v = np.asarray(value, dtype=float)
    if v.ndim == 0:
        return np.full(dim, float(v))
    if v.shape != (dim,):
        raise ValueError(f"{name} must be a scalar or a length-{dim} vector")
    return v


@dataclass(frozen=True)
class EdgeConfig:
    edge_zone_fraction: float = 0.1   # delta
    mass_threshold: object = 0.005    # tau, scalar or per-dimension vector
    expansion_factor: float = 0.2     # eta

    def __post_init__(self):
        if not 0 < self.edge_zone_fraction < 0.5:
            raise ValueError("edge_zone_fraction must be in (0, 0.5)")
        if np.any(np.asarray(self.mass_threshold, dtype=float) <= 0):
            raise ValueError("mass_threshold must be positive")
        if self.expansion_factor <= 0:
            raise ValueError("expansion_factor must be positive")


@dataclass(frozen=True)
class ModeConfig:
    shift_threshold: float = 0.01      # nu_TH
    proximity_threshold: float = 0.4   # rho
    weight_sum_threshold: object = 0.05  # tau
    expansion_factor: float = 0.2      # eta

    def __post_init__(self):
        if self.shift_threshold <= 0 or self.expansion_factor <= 0:
            raise ValueError("thresholds and expansion factor must be positive")
        if not 0 < self.proximity_threshold < 1:
            raise ValueError("proximity_threshold must be in (0, 1)")
        if np.any(np.asarray(self.weight_sum_threshold, dtype=float) <= 0):
            raise ValueError("weight_sum_threshold must be positive")


@dataclass
class AdaptationTrace:
    """Per-dimension audit of one adaptation step."""

    heuristic: str
    old_lower: np.ndarray
    old_upper: np.ndarray
    new_lower: np.ndarray
    new_upper: np.ndarray
    triggered_left: np.ndarray
    triggered_right: np.ndarray
    statistics: dict = field(default_factory=dict)
    clipped_left: np.ndarray = None
    clipped_right: np.ndarray = None

    def to_dict(self) -> dict:
        return {
            "heuristic": self.heuristic,
            "old_lower": np.asarray(self.old_lower).tolist(),
            "old_upper": np.asarray(self.old_upper).tolist(),
            "new_lower": np.asarray(self.new_lower).tolist(),
            "new_upper": np.asarray(self.new_upper).tolist(),
            "triggered_left": np.asarray(self.triggered_left).tolist(),
            "triggered_right": np.asarray(self.triggered_right).tolist(),
            "statistics": {k: np.asarray(v).tolist() for k, v in self.statistics.items()},
            "clipped_left": np.asarray(self.clipped_left).tolist(),
            "clipped_right": np.asarray(self.clipped_right).tolist(),
        }


def _check_domains(theta: SupportBounds, phi: FeasibleDomain):
    if not phi.contains(theta):
        raise ValueError("support must lie inside the feasible domain")


def edge_adapt(posterior: MixtureOfGaussians, theta: SupportBounds,
               phi: FeasibleDomain, cfg: EdgeConfig):
    """Expand any bound whose adjacent edge zone holds more mass than tau.

    Edge zones span a delta fraction of the current range on each side; an
    expansion moves the bound outward by eta * range, clipped to phi.
    Bounds never contract.
    """
    _check_domains(theta, phi)
    d = theta.dim
    tau = _as_vector(cfg.mass_threshold, d, "mass_threshold")
    lower, upper = theta.lower.copy(), theta.upper.copy()
    r = theta.range
    m_left = np.empty(d)
    m_right = np.empty(d)
    trig_l = np.zeros(d, bool)
    trig_r = np.zeros(d, bool)
    clip_l = np.zeros(d, bool)
    clip_r = np.zeros(d, bool)
    for i in range(d):
        m_left[i] = marginal_interval_mass(
            posterior, i, lower[i], lower[i] + cfg.edge_zone_fraction * r[i])
        m_right[i] = marginal_interval_mass(
            posterior, i, upper[i] - cfg.edge_zone_fraction * r[i], upper[i])
        if m_left[i] > tau[i]:
            trig_l[i] = True
            candidate = lower[i] - cfg.expansion_factor * r[i]
            if candidate < phi.lower[i]:
                candidate = phi.lower[i]
                clip_l[i] = True
            lower[i] = candidate
        if m_right[i] > tau[i]:
            trig_r[i] = True
            candidate = upper[i] + cfg.expansion_factor * r[i]
            if candidate > phi.upper[i]:
                candidate = phi.upper[i]
                clip_r[i] = True
            upper[i] = candidate
    new = SupportBounds(lower, upper)
    trace = AdaptationTrace(
        "edge", theta.lower, theta.upper, lower, upper, trig_l, trig_r,
        statistics={"left_mass": m_left, "right_mass": m_right},
        clipped_left=clip_l, clipped_right=clip_r)
    return new, trace


def mode_adapt(current: MixtureOfGaussians, previous: Optional[MixtureOfGaussians],
               theta: SupportBounds, phi: FeasibleDomain, cfg: ModeConfig,
               iteration: int):
    """Expand a bound when enough mixture weight shifts towards it.

    Per component k (matched across iterations by output-head index), the
    shift nu = mu_i,k - mu_{i-1,k} and the normalised position
    z = (mu_i,k - lower) / range feed the accumulation rules; no adaptation
    happens at iteration 0.
    """
    _check_domains(theta, phi)
    d = theta.dim
    trace = AdaptationTrace(
        "mode", theta.lower, theta.upper, theta.lower.copy(), theta.upper.copy(),
        np.zeros(d, bool), np.zeros(d, bool),
        statistics={"left_weight": np.zeros(d), "right_weight": np.zeros(d)},
        clipped_left=np.zeros(d, bool), clipped_right=np.zeros(d, bool))
    if iteration == 0 or previous is None:
        return theta, trace
    if current.n_components != previous.n_components or current.dim != previous.dim:
        raise ValueError("current and previous mixtures must share K and D")
    tau = _as_vector(cfg.weight_sum_threshold, d, "weight_sum_threshold")
    lower, upper = theta.lower.copy(), theta.upper.copy()
    r = theta.range
    for i in range(d):
        w_left = 0.0
        w_right = 0.0
        for k in range(current.n_components):
            nu = current.means[k, i] - previous.means[k, i]
            z = (current.means[k, i] - lower[i]) / r[i]
            if nu < -cfg.shift_threshold and abs(z) < cfg.proximity_threshold:
                w_left += current.weights[k]
            elif nu > cfg.shift_threshold and abs(1.0 - z) < cfg.proximity_threshold:
                w_right += current.weights[k]
        trace.statistics["left_weight"][i] = w_left
        trace.statistics["right_weight"][i] = w_right
        if w_left > tau[i]:
            trace.triggered_left[i] = True
            candidate = lower[i] - cfg.expansion_factor * r[i]
            if candidate < phi.lower[i]:
                candidate = phi.lower[i]
                trace.clipped_left[i] = True
            lower[i] = candidate
        if w_right > tau[i]:
            trace.triggered_right[i] = True
            candidate = upper[i] + cfg.expansion_factor * r[i]
            if candidate > phi.upper[i]:
                candidate = phi.upper[i]
                trace.clipped_right[i] = True
            upper[i] = candidate
    new = SupportBounds(lower, upper)
    trace.new_lower, trace.new_upper = lower, upper
    return new, trace


def centre_adapt(posterior: MixtureOfGaussians, theta: SupportBounds,
                 phi: FeasibleDomain):
    """Slide the support (range preserved) so its centre is the mixture mean.

    If a candidate bound leaves phi, the whole window slides back inside:
    the lower bound is checked first, then the upper.
    """
    _check_domains(theta, phi)
    if np.any(theta.range > phi.range):
        raise ValueError("support range must not exceed the feasible range")
    r = theta.range
    mu = weighted_mean(posterior)
    lower = mu - r / 2.0
    upper = mu + r / 2.0
    clip_l = lower < phi.lower
    clip_r = np.zeros_like(clip_l)
    # lower check first, then upper (each re-anchors the other end)
    lower = np.where(clip_l, phi.lower, lower)
    upper = np.where(clip_l, lower + r, upper)
    clip_r = upper > phi.upper
    upper = np.where(clip_r, phi.upper, upper)
    lower = np.where(clip_r, upper - r, lower)
    new = SupportBounds(lower, upper)
    trace = AdaptationTrace(
        "centre", theta.lower, theta.upper, lower, upper,
        triggered_left=clip_l, triggered_right=clip_r,
        statistics={"weighted_mean": mu},
        clipped_left=clip_l, clipped_right=clip_r)
    return new, trace


def warn_cold_restart_mode():
    """Component matching across iterations assumes warm-started training."""
    warnings.warn(
        "mode-based adaptation with cold-restarted training: component "
        "index correspondence across iterations is not meaningful",
        RuntimeWarning, stacklevel=2)
