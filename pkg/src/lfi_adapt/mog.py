"""Mixture-of-Gaussians posterior with support-aware sampling and the
per-dimension geometric queries used by the support-adaptation heuristics."""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, ndtr

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class SupportBounds:
    """Axis-aligned sampling box [lower, upper] per dimension."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower/upper must be matching vectors")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("bounds must be finite")
        if not np.all(lower < upper):
            raise ValueError("lower must be strictly below upper")

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def range(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, other: "SupportBounds") -> bool:
        return bool(np.all(self.lower <= other.lower) and np.all(other.upper <= self.upper))

    def contains_point(self, theta: np.ndarray) -> bool:
        theta = np.asarray(theta, dtype=float)
        return bool(np.all(self.lower <= theta) and np.all(theta <= self.upper))

    def clip(self, thetas: np.ndarray) -> np.ndarray:
        return np.clip(thetas, self.lower, self.upper)

    def to_dict(self) -> dict:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "SupportBounds":
        return SupportBounds(np.array(d["lower"]), np.array(d["upper"]))


# The feasible domain is a box with identical semantics; the distinction is
# purely about role (it bounds every support adaptation).
FeasibleDomain = SupportBounds


@dataclass(frozen=True)
class MixtureOfGaussians:
    """K-component diagonal-covariance mixture paired with its sampling support.

    The support truncates by clipping samples; densities and interval masses
    refer to the untruncated mixture.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    support: SupportBounds

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.atleast_2d(np.asarray(self.means, dtype=float))
        v = np.atleast_2d(np.asarray(self.variances, dtype=float))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)
        if w.ndim != 1 or len(w) < 1:
            raise ValueError("weights must be a nonempty vector")
        if m.shape != (len(w), self.support.dim) or v.shape != m.shape:
            raise ValueError("means/variances must be (K x D)")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")
        if np.any(v <= 0):
            raise ValueError("variances must be positive")

    @property
    def n_components(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def with_support(self, support: SupportBounds) -> "MixtureOfGaussians":
        return MixtureOfGaussians(self.weights, self.means, self.variances, support)

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "support": self.support.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "MixtureOfGaussians":
        return MixtureOfGaussians(
            np.array(d["weights"]), np.array(d["means"]), np.array(d["variances"]),
            SupportBounds.from_dict(d["support"]))


def log_pdf(mog: MixtureOfGaussians, theta: np.ndarray) -> float:
    """Log density of the untruncated mixture at theta, via log-sum-exp."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (mog.dim,):
        raise ValueError(f"theta must have dimension {mog.dim}")
    z2 = (theta - mog.means) ** 2 / mog.variances
    comp_log = -0.5 * (z2 + np.log(mog.variances) + _LOG_2PI).sum(axis=1)
    return float(logsumexp(comp_log, b=mog.weights))


def sample_low_variance(mog: MixtureOfGaussians, n: int, seed: int) -> np.ndarray:
    """Systematic (stratified) component selection, one Gaussian draw each.

    Thresholds u + j/n with u ~ U(0, 1/n) are walked against the cumulative
    weights, so each component receives a sample count within 1 of n * w_k.
    Every sample is clipped elementwise into the mixture's support.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0 / n)
    thresholds = u + np.arange(n) / n
    cum = np.cumsum(mog.weights)
    cum[-1] = 1.0  # guard against round-off in the final bin
    comps = np.searchsorted(cum, thresholds, side="right")
    comps = np.minimum(comps, mog.n_components - 1)
    noise = rng.standard_normal((n, mog.dim))
    samples = mog.means[comps] + noise * np.sqrt(mog.variances[comps])
    return mog.support.clip(samples)


def marginal_interval_mass(mog: MixtureOfGaussians, dim: int, a: float, b: float) -> float:
    """Untruncated 1-D marginal mass of [a, b] along `dim`, via the Gaussian CDF."""
    if a > b:
        raise ValueError("interval must have a <= b")
    mu = mog.means[:, dim]
    sd = np.sqrt(mog.variances[:, dim])
    mass = mog.weights * (ndtr((b - mu) / sd) - ndtr((a - mu) / sd))
    return float(mass.sum())


def weighted_mean(mog: MixtureOfGaussians) -> np.ndarray:
    """Mixture mean: sum of w_k * mu_k per dimension."""
    return mog.weights @ mog.means
