"""Fixed-length summary statistics computed from raw simulator trajectories."""

from dataclasses import dataclass
from enum import Enum

import numpy as np


@dataclass(frozen=True)
class SummaryVector:
    values: np.ndarray
    schema_id: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise ValueError("summary values must be finite")


class LVSummaryMode(Enum):
    FLAT_SUBSAMPLED = "flat_subsampled"
    MOMENTS = "moments"


_MAX_FLAT_FRAMES = 64  # per species


def _autocorr(v: np.ndarray, lag: int) -> float:
    # Defined as 0 for constant input so summaries stay finite.
    var = np.var(v)
    if var == 0.0 or len(v) <= lag:
        return 0.0
    c = np.mean((v[:-lag] - v.mean()) * (v[lag:] - v.mean()))
    return float(c / var)


def summarize_lv(trajectory: np.ndarray,
                 mode: LVSummaryMode = LVSummaryMode.FLAT_SUBSAMPLED) -> SummaryVector:
    """Summarise a (frames x 2) predator/prey trajectory.

    FLAT_SUBSAMPLED keeps every k-th frame (k minimal with <= 64 frames per
    species), scaled by the initial populations. MOMENTS gives per-species
    mean, log-variance, lag-1/2 autocorrelation plus the X/Y cross-correlation.
    """
    traj = np.asarray(trajectory, dtype=float)
    if traj.ndim != 2 or traj.shape[1] != 2 or traj.shape[0] == 0:
        raise ValueError("trajectory must be a nonempty (frames x 2) matrix")
    if not np.all(np.isfinite(traj)):
        raise ValueError("trajectory contains non-finite values")

    if mode is LVSummaryMode.FLAT_SUBSAMPLED:
        frames = traj.shape[0]
        k = max(1, int(np.ceil(frames / _MAX_FLAT_FRAMES)))
        sub = traj[::k]
        init = np.maximum(traj[0], 1.0)
        values = (sub / init).T.ravel()
        return SummaryVector(values, f"lv_flat_k{k}")

    x, y = traj[:, 0], traj[:, 1]
    values = []
    for v in (x, y):
        var = np.var(v)
        logvar = np.log(var) if var > 0 else 0.0
        values += [v.mean(), logvar, _autocorr(v, 1), _autocorr(v, 2)]
    sx, sy = np.std(x), np.std(y)
    if sx > 0 and sy > 0:
        xcorr = float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))
    else:
        xcorr = 0.0
    values.append(xcorr)
    return SummaryVector(np.array(values), "lv_moments9")


def summarize_mg1(idts: np.ndarray) -> SummaryVector:
    """5 equally spaced percentiles (0, 25, 50, 75, 100) of interdeparture times."""
    idts = np.asarray(idts, dtype=float)
    if idts.ndim != 1 or len(idts) < 2:
        raise ValueError("idts must be a vector of length >= 2")
    if not np.all(np.isfinite(idts)):
        raise ValueError("idts contain non-finite values")
    pct = np.percentile(idts, [0, 25, 50, 75, 100])
    return SummaryVector(pct, "mg1_pct5")


def cross_correlation_stats(states: np.ndarray, actions: np.ndarray) -> SummaryVector:
    """Dot products of all state/action column pairs, plus state means/variances.

    Output length is D_s * D_a + 2 * D_s; variances use the population
    (divide-by-T) convention.
    """
    s = np.atleast_2d(np.asarray(states, dtype=float))
    a = np.atleast_2d(np.asarray(actions, dtype=float))
    if s.shape[0] != a.shape[0] or s.shape[0] < 1:
        raise ValueError("states and actions must share T >= 1 rows")
    dots = (s.T @ a).ravel()
    values = np.concatenate([dots, s.mean(axis=0), s.var(axis=0)])
    return SummaryVector(values, "xcorr")
