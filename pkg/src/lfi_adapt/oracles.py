"""Independent brute-force reference computations.

These back the derived expected values in the test suite and are exposed via
the `oracle` CLI subcommand. Each one deliberately takes a different route
than the main implementation it checks.
"""

import numpy as np

from .seeding import derive_seed
from .simulators import LotkaVolterraConfig, simulate_lotka_volterra

LV_GROUND_TRUTH_LOG = np.log([0.01, 0.5, 1.0, 0.01])
MG1_GROUND_TRUTH = np.array([1.0, 5.0, 0.2])


def count_prey_peaks(trajectory: np.ndarray, record_dt: float = 0.2,
                     min_separation: float = 5.0) -> int:
    """Local prey maxima after light smoothing, at least min_separation apart."""
    y = np.asarray(trajectory)[:, 1]
    w = 5  # ~1 time unit at dt=0.2
    kernel = np.ones(w) / w
    smooth = np.convolve(y, kernel, mode="same")
    level = smooth.mean()
    peaks = []
    order = max(1, int(round(1.0 / record_dt)))
    for i in range(order, len(smooth) - order):
        window = smooth[i - order:i + order + 1]
        if smooth[i] >= window.max() and smooth[i] > level:
            t = i * record_dt
            if not peaks or t - peaks[-1] >= min_separation:
                peaks.append(t)
    return len(peaks)


def lv_oscillation_fraction(n_seeds: int = 100, seed: int = 90210) -> float:
    """Fraction of ground-truth runs with >= 2 well-separated prey peaks."""
    cfg = LotkaVolterraConfig()
    hits = 0
    for j in range(n_seeds):
        out = simulate_lotka_volterra(LV_GROUND_TRUTH_LOG, cfg,
                                      derive_seed(seed, j))
        if out.ok and count_prey_peaks(out.trajectory, cfg.record_dt) >= 2:
            hits += 1
    return hits / n_seeds


def mg1_median_idt(theta=(1.0, 5.0, 0.2), n_jobs: int = 100_000,
                   n_seeds: int = 100, seed: int = 7345) -> float:
    """Mean over seeds of the median interdeparture time, via the closed-form
    prefix-max form of the departure recursion (not the sequential loop)."""
    th1, th2, th3 = theta
    lo, hi = min(th1, th2), max(th1, th2)
    medians = []
    for j in range(n_seeds):
        rng = np.random.default_rng(derive_seed(seed, j))
        s = rng.uniform(lo, hi, n_jobs)
        u = np.cumsum(rng.exponential(1.0 / th3, n_jobs))
        cs = np.cumsum(s)
        # d_i = S_i + max_{j<=i}(u_j - S_{j-1})
        d = cs + np.maximum.accumulate(u - np.concatenate([[0.0], cs[:-1]]))
        medians.append(np.median(np.diff(d)))
    return float(np.mean(medians))


def mog_mass_monte_carlo(weights, means, variances, dim: int, a: float,
                         b: float, n: int = 1_000_000, seed: int = 0) -> float:
    """Monte-Carlo estimate of the untruncated 1-D marginal interval mass."""
    rng = np.random.default_rng(seed)
    weights = np.asarray(weights, dtype=float)
    means = np.atleast_2d(means)
    variances = np.atleast_2d(variances)
    comps = rng.choice(len(weights), size=n, p=weights / weights.sum())
    draws = rng.normal(means[comps, dim], np.sqrt(variances[comps, dim]))
    return float(np.mean((draws >= a) & (draws <= b)))


def mog_log_pdf_direct(weights, means, variances, theta) -> float:
    """Direct-sum mixture density evaluation (no log-sum-exp)."""
    weights = np.asarray(weights, dtype=float)
    means = np.atleast_2d(means)
    variances = np.atleast_2d(variances)
    theta = np.asarray(theta, dtype=float)
    total = 0.0
    for k in range(len(weights)):
        dens = 1.0
        for d in range(len(theta)):
            var = variances[k, d]
            dens *= np.exp(-0.5 * (theta[d] - means[k, d]) ** 2 / var) \
                / np.sqrt(2.0 * np.pi * var)
        total += weights[k] * dens
    return float(np.log(total))


def xcorr_double_loop(states, actions):
    """Brute-force version of the cross-correlation summary statistic."""
    s = np.atleast_2d(np.asarray(states, dtype=float))
    a = np.atleast_2d(np.asarray(actions, dtype=float))
    t, ds = s.shape
    da = a.shape[1]
    dots = []
    for i in range(ds):
        for j in range(da):
            acc = 0.0
            for row in range(t):
                acc += s[row, i] * a[row, j]
            dots.append(acc)
    means = [sum(s[row, i] for row in range(t)) / t for i in range(ds)]
    variances = [sum((s[row, i] - means[i]) ** 2 for row in range(t)) / t
                 for i in range(ds)]
    return np.array(dots + means + variances)
