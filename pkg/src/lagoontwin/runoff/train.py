"""Training loop: adaptive moment estimation with global gradient-norm
clipping at 1.0, deterministic under the config seed (single-threaded,
fixed accumulation order). Returns the parameter snapshot with the best
validation MAE plus the per-epoch loss curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from lagoontwin.errors import TrainingError, UsageError
from lagoontwin.runoff.dataset import RunoffDataset
from lagoontwin.runoff.lstm import LstmNetwork, lstm_backward, lstm_forward

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0
    clip_norm: float = 1.0


@dataclass
class TrainResult:
    net: LstmNetwork
    train_loss: list[float] = field(default_factory=list)   # per epoch, scaled units
    val_mae: list[float] = field(default_factory=list)      # per epoch, original units
    best_epoch: int = -1


class _Adam:
    def __init__(self, params: dict[str, np.ndarray], lr: float):
        self.lr = lr
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, grads: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        self.t += 1
        delta = {}
        for k, g in grads.items():
            self.m[k] = ADAM_BETA1 * self.m[k] + (1 - ADAM_BETA1) * g
            self.v[k] = ADAM_BETA2 * self.v[k] + (1 - ADAM_BETA2) * g * g
            m_hat = self.m[k] / (1 - ADAM_BETA1**self.t)
            v_hat = self.v[k] / (1 - ADAM_BETA2**self.t)
            delta[k] = -self.lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        return delta


def _clip(grads: dict[str, np.ndarray], max_norm: float) -> dict[str, np.ndarray]:
    total = math.sqrt(sum(float((g * g).sum()) for g in grads.values()))
    if total <= max_norm or total == 0.0:
        return grads
    factor = max_norm / total
    return {k: g * factor for k, g in grads.items()}


def _epoch_mae(net: LstmNetwork, dataset: RunoffDataset, indices: np.ndarray) -> float:
    errors = []
    for idx in indices:
        output, _ = lstm_forward(net, dataset.sequences[idx])
        predicted = dataset.inverse_target(output)
        actual = dataset.inverse_target(dataset.targets_scaled[idx])
        errors.append(abs(predicted - actual))
    return float(np.mean(errors))


def train(net: LstmNetwork, dataset: RunoffDataset, config: TrainConfig) -> TrainResult:
    """Mini-batch training on the chronological train split; the snapshot
    with the best validation MAE is returned."""
    if config.epochs < 0:
        raise UsageError("epochs must be nonnegative")
    result = TrainResult(net=net.copy())
    if config.epochs == 0:
        return result

    rng = np.random.default_rng(config.seed)
    optimizer = _Adam(net.params, config.learning_rate)
    train_idx = dataset.train_indices
    if len(train_idx) == 0:
        raise UsageError("empty training split")
    best_val = math.inf
    best_params = None
    for epoch in range(config.epochs):
        order = rng.permutation(train_idx)
        epoch_losses = []
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            grads = {k: np.zeros_like(v) for k, v in net.params.items()}
            batch_loss = 0.0
            for idx in batch:
                output, cache = lstm_forward(net, dataset.sequences[idx])
                error = output - dataset.targets_scaled[idx]
                if not math.isfinite(error):
                    raise TrainingError(f"training diverged (NaN loss) at epoch {epoch}")
                batch_loss += error * error
                sample_grads = lstm_backward(net, cache, 2.0 * error / len(batch))
                for k in grads:
                    grads[k] += sample_grads[k]
            batch_loss /= len(batch)
            if not math.isfinite(batch_loss):
                raise TrainingError(f"training diverged (NaN loss) at epoch {epoch}")
            epoch_losses.append(batch_loss)
            net.apply_update(optimizer.step(_clip(grads, config.clip_norm)))
        result.train_loss.append(float(np.mean(epoch_losses)))
        val = _epoch_mae(net, dataset, dataset.val_indices)
        result.val_mae.append(val)
        if val < best_val:
            best_val = val
            best_params = {k: v.copy() for k, v in net.params.items()}
            result.best_epoch = epoch
    if best_params is not None:
        result.net = LstmNetwork(
            input_width=net.input_width,
            hidden=net.hidden,
            params=best_params,
            version=net.version,
        )
    return result
