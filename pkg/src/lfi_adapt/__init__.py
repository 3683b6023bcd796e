"""Sequential likelihood-free inference with adaptive sampling support.

A mixture density network is trained on (parameter, summary) pairs from a
stochastic simulator and conditioned on an observed summary to yield a
mixture-of-Gaussians posterior. Between iterations the sampling support can
be expanded or recentred by edge-mass, mode-shift or recentring policies,
which recovers ground truths that lie outside the initial search box.
"""

from .evaluation import MetricReport, score_posterior
from .heuristics import (
    AdaptationTrace,
    EdgeConfig,
    ModeConfig,
    centre_adapt,
    edge_adapt,
    mode_adapt,
)
from .inference import (
    Heuristic,
    InferenceAborted,
    InferenceConfig,
    IterationRecord,
    Simulator,
    make_observation,
    run_inference,
)
from .mog import (
    FeasibleDomain,
    MixtureOfGaussians,
    SupportBounds,
    marginal_interval_mass,
    sample_low_variance,
    weighted_mean,
)
from .simulators import (
    InfeasibleReason,
    LotkaVolterraConfig,
    MG1Config,
    SimulationOutcome,
    run_batch,
    simulate_lotka_volterra,
    simulate_mg1,
)
from .summaries import SummaryVector, summarize_lv, summarize_mg1

__version__ = "0.1.0"
