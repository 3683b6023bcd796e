"""Mixture density network mapping summary vectors to mixture-of-Gaussians
posteriors over simulator parameters, trained by negative log-likelihood.

Targets are standardised per dimension by the support midpoint/half-range
before training and de-standardised on output, so the emitted mixtures live
in natural parameter units. All tensors are float64 for reproducibility and
for the finite-difference gradient checks in the test suite.
"""

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import torch
from torch import nn

from .mog import MixtureOfGaussians, SupportBounds

VARIANCE_FLOOR = 1e-6
_HALF_LOG_2PI = 0.5 * float(np.log(2.0 * np.pi))


class TrainingDivergence(RuntimeError):
    """Raised when training (or a forward pass) produces non-finite values."""


@dataclass(frozen=True)
class MDNArchitecture:
    input_dim: int
    param_dim: int
    hidden_layers: Tuple[int, ...] = (1024, 1024, 1024)
    n_components: int = 4
    activation: str = "relu"

    def head_sizes(self):
        k, d = self.n_components, self.param_dim
        return k, k * d, k * d


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-5
    batch_size: int = 100
    max_epochs: int = 500
    patience: int = 20
    seed: int = 0
    warm_start: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1:
            raise ValueError("learning_rate must be > 0 and batch_size >= 1")


@dataclass
class TrainingReport:
    train_losses: list = field(default_factory=list)
    val_losses: list = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = float("inf")
    diverged: bool = False


_ACTIVATIONS = {"relu": nn.ReLU, "tanh": nn.Tanh}


class MDN(nn.Module):
    """Feed-forward trunk with weight-logit, mean and log-variance heads."""

    def __init__(self, arch: MDNArchitecture, seed: int = 0):
        super().__init__()
        self.arch = arch
        torch.manual_seed(seed)
        act = _ACTIVATIONS[arch.activation]
        layers = []
        prev = arch.input_dim
        for width in arch.hidden_layers:
            layers += [nn.Linear(prev, width), act()]
            prev = width
        self.trunk = nn.Sequential(*layers)
        k, kd, _ = arch.head_sizes()
        self.logit_head = nn.Linear(prev, k)
        self.mean_head = nn.Linear(prev, kd)
        self.logvar_head = nn.Linear(prev, kd)
        # zero-init the weight-logit head for a uniform initial mixture
        nn.init.zeros_(self.logit_head.weight)
        nn.init.zeros_(self.logit_head.bias)
        self.double()

    def mixture_params(self, x: torch.Tensor):
        """Returns (log_weights, means, variances) in standardised units."""
        h = self.trunk(x)
        k, d = self.arch.n_components, self.arch.param_dim
        log_w = torch.log_softmax(self.logit_head(h), dim=-1)
        means = self.mean_head(h).reshape(-1, k, d)
        variances = torch.exp(self.logvar_head(h)).reshape(-1, k, d)
        return log_w, means, variances


def _support_scale(support: SupportBounds):
    mid = torch.as_tensor(support.midpoint, dtype=torch.float64)
    half = torch.as_tensor(support.range / 2.0, dtype=torch.float64)
    return mid, half


def forward(net: MDN, x: np.ndarray, support: SupportBounds) -> MixtureOfGaussians:
    """Evaluate the network at one summary vector and de-standardise the
    mixture into natural parameter units, attaching `support`."""
    x_t = torch.as_tensor(np.asarray(x, dtype=float), dtype=torch.float64).reshape(1, -1)
    if x_t.shape[1] != net.arch.input_dim:
        raise ValueError(f"input must have dimension {net.arch.input_dim}")
    with torch.no_grad():
        log_w, means, variances = net.mixture_params(x_t)
    if not (torch.isfinite(log_w).all() and torch.isfinite(means).all()
            and torch.isfinite(variances).all()):
        raise TrainingDivergence("network produced non-finite mixture parameters")
    mid, half = _support_scale(support)
    w = torch.exp(log_w[0]).numpy()
    w = w / w.sum()
    mu = (mid + half * means[0]).numpy()
    var = (half**2 * variances[0] + VARIANCE_FLOOR).numpy()
    return MixtureOfGaussians(w, mu, var, support)


def _nll_tensor(net: MDN, theta_std: torch.Tensor, x: torch.Tensor,
                log_half_sum: torch.Tensor) -> torch.Tensor:
    """Mean NLL in natural units: standardised-space mixture NLL plus the
    log-Jacobian of the affine de-standardisation."""
    log_w, means, variances = net.mixture_params(x)
    z2 = (theta_std.unsqueeze(1) - means) ** 2 / variances
    comp_log = log_w - 0.5 * z2.sum(-1) - 0.5 * torch.log(variances).sum(-1) \
        - net.arch.param_dim * _HALF_LOG_2PI
    log_density = torch.logsumexp(comp_log, dim=-1) - log_half_sum
    return -log_density.mean()


def nll(net: MDN, thetas: np.ndarray, xs: np.ndarray, support: SupportBounds) -> float:
    """Mean negative log-likelihood of (theta, x) pairs in natural units."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if len(thetas) == 0:
        raise ValueError("batch must be nonempty")
    mid, half = _support_scale(support)
    theta_std = (torch.as_tensor(thetas, dtype=torch.float64) - mid) / half
    with torch.no_grad():
        value = _nll_tensor(net, theta_std,
                            torch.as_tensor(xs, dtype=torch.float64),
                            torch.log(half).sum())
    return float(value)


def train(net: MDN, thetas: np.ndarray, xs: np.ndarray, support: SupportBounds,
          cfg: TrainConfig) -> TrainingReport:
    """Minibatch Adam on the NLL with a 10% holdout and early stopping.

    Keeps the best-validation weights; a non-finite loss aborts with the last
    finite snapshot restored and the report flagged as diverged.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    n = len(thetas)
    if n < 2:
        raise ValueError("need at least 2 training pairs")
    mid, half = _support_scale(support)
    theta_std = (torch.as_tensor(thetas, dtype=torch.float64) - mid) / half
    x_t = torch.as_tensor(xs, dtype=torch.float64)
    log_half_sum = torch.log(half).sum()

    gen = torch.Generator().manual_seed(cfg.seed)
    perm = torch.randperm(n, generator=gen)
    n_val = max(1, n // 10)
    val_idx, train_idx = perm[:n_val], perm[n_val:]
    batch_size = min(cfg.batch_size, len(train_idx))

    opt = torch.optim.Adam(net.parameters(), lr=cfg.learning_rate)
    report = TrainingReport()
    best_state = {k: v.detach().clone() for k, v in net.state_dict().items()}
    last_finite_state = best_state
    epochs_since_best = 0
    for epoch in range(cfg.max_epochs):
        order = torch.randperm(len(train_idx), generator=gen)
        epoch_loss = 0.0
        n_batches = 0
        diverged = False
        for start in range(0, len(train_idx), batch_size):
            idx = train_idx[order[start:start + batch_size]]
            opt.zero_grad()
            loss = _nll_tensor(net, theta_std[idx], x_t[idx], log_half_sum)
            if not torch.isfinite(loss):
                diverged = True
                break
            loss.backward()
            opt.step()
            epoch_loss += float(loss.detach())
            n_batches += 1
        if diverged:
            report.diverged = True
            net.load_state_dict(last_finite_state)
            break
        last_finite_state = {k: v.detach().clone() for k, v in net.state_dict().items()}
        report.train_losses.append(epoch_loss / max(1, n_batches))
        with torch.no_grad():
            val_loss = float(_nll_tensor(net, theta_std[val_idx], x_t[val_idx],
                                         log_half_sum))
        report.val_losses.append(val_loss)
        if val_loss < report.best_val_loss:
            report.best_val_loss = val_loss
            report.best_epoch = epoch
            best_state = {k: v.detach().clone() for k, v in net.state_dict().items()}
            epochs_since_best = 0
        else:
            epochs_since_best += 1
            if epochs_since_best > cfg.patience:
                break
    if not report.diverged:
        net.load_state_dict(best_state)
    if report.diverged and not report.train_losses:
        raise TrainingDivergence("training diverged on the first epoch")
    return report


class InputScaler:
    """Fixed affine standardisation of summary vectors, frozen after fit.

    Dimensions that are constant in the fitted batch get unit scale instead
    of a tiny floor, and transformed values are clipped to +-100 so that an
    out-of-distribution observation cannot overflow the network."""

    _CLIP = 100.0

    def __init__(self, mean: np.ndarray, std: np.ndarray):
        self.mean = np.asarray(mean, dtype=float)
        std = np.asarray(std, dtype=float)
        self.std = np.where(std < 1e-8, 1.0, std)

    @classmethod
    def fit(cls, xs: np.ndarray) -> "InputScaler":
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        return cls(xs.mean(axis=0), xs.std(axis=0))

    @classmethod
    def identity(cls, dim: int) -> "InputScaler":
        return cls(np.zeros(dim), np.ones(dim))

    def transform(self, xs: np.ndarray) -> np.ndarray:
        z = (np.asarray(xs, dtype=float) - self.mean) / self.std
        return np.clip(z, -self._CLIP, self._CLIP)

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "InputScaler":
        return InputScaler(np.array(d["mean"]), np.array(d["std"]))


def save_weights(net: MDN, path: str):
    """Snapshot to .npz: a JSON architecture header plus row-major float64
    weight matrices."""
    arrays = {k: v.detach().numpy().astype(np.float64)
              for k, v in net.state_dict().items()}
    header = json.dumps({
        "input_dim": net.arch.input_dim,
        "param_dim": net.arch.param_dim,
        "hidden_layers": list(net.arch.hidden_layers),
        "n_components": net.arch.n_components,
        "activation": net.arch.activation,
    })
    np.savez(path, __header__=np.frombuffer(header.encode(), dtype=np.uint8), **arrays)


def load_weights(path: str) -> MDN:
    data = np.load(path)
    header = json.loads(bytes(data["__header__"]).decode())
    arch = MDNArchitecture(
        input_dim=header["input_dim"], param_dim=header["param_dim"],
        hidden_layers=tuple(header["hidden_layers"]),
        n_components=header["n_components"], activation=header["activation"])
    net = MDN(arch)
    state = {k: torch.as_tensor(data[k]) for k in data.files if k != "__header__"}
    net.load_state_dict(state)
    return net
