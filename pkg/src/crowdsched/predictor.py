"""Feed-forward failure predictor.

Maps (task duration, prize, open-task count, average similarity) to a failure
probability.  Hidden layers are rectified-linear, the output is squashed with
a sigmoid so predictions stay strictly inside (0, 1), and training is plain
mini-batch gradient descent on mean squared error with early stopping and
K-fold cross-validation.  Everything is seeded and bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, ModelFormatError, TrainingDivergedError
from .model import Task, TaskCatalog
from .platform import PlatformState, historical_state
from .similarity import SimilarityMatrix, similarity_matrix

DEFAULT_DIMS = (4, 32, 16, 8, 4, 2, 1)
MODEL_FORMAT_HEADER = "crowdsched-model v1"
N_INPUT_FEATURES = 4

# Pre-activation clip keeping sigmoid output strictly inside (0, 1) in float64.
_Z_CLIP = 30.0


@dataclass(frozen=True)
class TrainingSample:
    """One supervised example: raw features plus a failure target in [0, 1]."""

    duration: float
    prize: float
    open_tasks: float
    avg_similarity: float
    label: float

    def __post_init__(self):
        values = (self.duration, self.prize, self.open_tasks, self.avg_similarity, self.label)
        if not all(np.isfinite(values)):
            raise ValueError("sample features and label must be finite")
        if not 0.0 <= self.label <= 1.0:
            raise ValueError("label must lie in [0, 1]")

    @property
    def features(self) -> tuple[float, float, float, float]:
        return (self.duration, self.prize, self.open_tasks, self.avg_similarity)


@dataclass(frozen=True)
class TrainConfig:
    folds: int = 10
    max_epochs: int = 500
    patience: int = 10
    learning_rate: float = 0.01
    batch_size: int = 32
    seed: int = 0

    def validate(self) -> None:
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.patience < 1:
            raise ConfigError("patience must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning rate must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch size must be >= 1")
        if self.max_epochs < 1:
            raise ConfigError("max epochs must be >= 1")


@dataclass(frozen=True)
class PredictorModel:
    """Network weights plus the feature scaling fitted alongside them."""

    dims: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    feature_min: np.ndarray
    feature_max: np.ndarray
    prize_feature: str = "mp"
    epochs_trained: int = 0
    validation_loss: float = float("nan")

    def __post_init__(self):
        if self.dims[-1] != 1:
            raise ValueError("output layer must have width 1")
        if np.any(self.feature_min > self.feature_max):
            raise ValueError("feature_min must be <= feature_max")
        if self.prize_feature not in ("mp", "tmp"):
            raise ValueError("prize_feature must be 'mp' or 'tmp'")

    def task_prize(self, task: Task) -> float:
        return task.prize if self.prize_feature == "mp" else task.total_prize


def init_model(
    dims: Sequence[int] = DEFAULT_DIMS,
    rng: np.random.Generator | None = None,
    feature_min: Sequence[float] | None = None,
    feature_max: Sequence[float] | None = None,
    prize_feature: str = "mp",
) -> PredictorModel:
    """Fresh model with scaled uniform weight init (seeded via ``rng``)."""
    rng = rng or np.random.default_rng(0)
    weights, biases = _init_layers(dims, rng)
    n_in = dims[0]
    fmin = np.zeros(n_in) if feature_min is None else np.asarray(feature_min, dtype=float)
    fmax = np.ones(n_in) if feature_max is None else np.asarray(feature_max, dtype=float)
    return PredictorModel(
        dims=tuple(int(d) for d in dims),
        weights=tuple(weights),
        biases=tuple(biases),
        feature_min=fmin,
        feature_max=fmax,
        prize_feature=prize_feature,
    )


def _init_layers(dims: Sequence[int], rng: np.random.Generator):
    weights, biases = [], []
    for layer, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        # Small positive bias keeps narrow rectified layers from starting dead.
        bias = 0.1 if layer < len(dims) - 2 else 0.0
        biases.append(np.full(fan_out, bias))
    return weights, biases


def normalize_features(
    features: np.ndarray, feature_min: np.ndarray, feature_max: np.ndarray
) -> np.ndarray:
    """Min-max scale into [0, 1], clamping out-of-range values.

    A constant feature (min == max) maps to 0.5.
    """
    features = np.atleast_2d(np.asarray(features, dtype=float))
    span = feature_max - feature_min
    safe = np.where(span > 0, span, 1.0)
    scaled = np.clip((features - feature_min) / safe, 0.0, 1.0)
    return np.where(span > 0, scaled, 0.5)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, -_Z_CLIP, _Z_CLIP)
    return 1.0 / (1.0 + np.exp(-z))


def _forward_layers(weights, biases, x: np.ndarray):
    """Returns pre-activations and activations for every layer."""
    pre, acts = [], [x]
    a = x
    last = len(weights) - 1
    for layer, (w, b) in enumerate(zip(weights, biases)):
        z = a @ w.T + b
        pre.append(z)
        a = _sigmoid(z) if layer == last else np.maximum(z, 0.0)
        acts.append(a)
    return pre, acts


def forward_batch(model: PredictorModel, features: np.ndarray) -> np.ndarray:
    """Predicted failure probabilities for raw (unnormalized) feature rows."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if not np.all(np.isfinite(features)):
        raise ValueError("features must be finite")
    x = normalize_features(features, model.feature_min, model.feature_max)
    _, acts = _forward_layers(model.weights, model.biases, x)
    return acts[-1][:, 0]


def forward(model: PredictorModel, features: Sequence[float]) -> float:
    """Single-row convenience wrapper around :func:`forward_batch`."""
    return float(forward_batch(model, np.asarray(features, dtype=float))[0])


def network_loss_and_gradients(weights, biases, x: np.ndarray, y: np.ndarray):
    """Mean-squared-error loss and its backpropagated gradients.

    ``x`` must already be normalized.  Returns (loss, weight grads, bias
    grads) with gradients shaped like the corresponding parameters.
    """
    batch = x.shape[0]
    pre, acts = _forward_layers(weights, biases, x)
    out = acts[-1][:, 0]
    err = out - y
    loss = float(np.mean(err * err))

    grad_w = [np.empty_like(w) for w in weights]
    grad_b = [np.empty_like(b) for b in biases]
    # dL/dz at the sigmoid output.
    delta = ((2.0 / batch) * err * out * (1.0 - out))[:, None]
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = delta.T @ acts[layer]
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weights[layer]) * (pre[layer - 1] > 0)
    return loss, grad_w, grad_b


@dataclass(frozen=True)
class TrainResult:
    model: PredictorModel
    fold_losses: tuple[float, ...]
    fold_epochs: tuple[int, ...]

    @property
    def mean_loss(self) -> float:
        return float(np.mean(self.fold_losses))

    @property
    def std_loss(self) -> float:
        return float(np.std(self.fold_losses))


def _mse(weights, biases, x, y) -> float:
    _, acts = _forward_layers(weights, biases, x)
    err = acts[-1][:, 0] - y
    return float(np.mean(err * err))


def kfold_indices(n_samples: int, folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Shuffled disjoint validation folds covering every sample exactly once."""
    assignment = rng.permutation(n_samples)
    return np.array_split(assignment, folds)


def _run_epochs(weights, biases, x, y, config, rng, *, epochs, val=None):
    """Gradient-descent epochs with optional early stopping.

    With ``val`` given, returns the best-validation snapshot and its epoch;
    without it, runs the full epoch budget and returns the final parameters.
    """
    best_loss = float("inf")
    best_epoch = 0
    best = None
    since_improvement = 0
    for epoch in range(1, epochs + 1):
        order = rng.permutation(len(x))
        for lo in range(0, len(order), config.batch_size):
            idx = order[lo: lo + config.batch_size]
            loss, grad_w, grad_b = network_loss_and_gradients(weights, biases, x[idx], y[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch)
            for w, g in zip(weights, grad_w):
                w -= config.learning_rate * g
            for b, g in zip(biases, grad_b):
                b -= config.learning_rate * g
        if val is None:
            continue
        val_loss = _mse(weights, biases, *val)
        if not np.isfinite(val_loss):
            raise TrainingDivergedError(epoch)
        if val_loss < best_loss:
            best_loss = val_loss
            best_epoch = epoch
            best = ([w.copy() for w in weights], [b.copy() for b in biases])
            since_improvement = 0
        else:
            since_improvement += 1
            if since_improvement >= config.patience:
                break
    if val is None:
        return weights, biases, float("nan"), epochs
    return best[0], best[1], best_loss, best_epoch


def _fit_with_restarts(x, y, val, dims, config, rng, max_attempts: int = 3):
    """Train with early stopping, restarting on a dead-network plateau.

    Narrow rectified layers occasionally die under plain gradient descent and
    leave the loss pinned at the predict-the-mean baseline; a fresh init from
    the same seed stream almost always escapes.  Deterministic because the
    generator advances across attempts.
    """
    val_x, val_y = val
    baseline = float(np.var(val_y))
    good_enough = max(0.5 * baseline, 1e-4)
    best = None
    for _ in range(max_attempts):
        weights, biases = _init_layers(dims, rng)
        weights, biases, loss, epoch = _run_epochs(
            weights, biases, x, y, config, rng, epochs=config.max_epochs, val=val
        )
        if best is None or loss < best[2]:
            best = (weights, biases, loss, epoch)
        if loss < good_enough:
            break
    return best


def train(
    samples: Sequence[TrainingSample],
    config: TrainConfig = TrainConfig(),
    dims: Sequence[int] = DEFAULT_DIMS,
    prize_feature: str = "mp",
) -> TrainResult:
    """K-fold cross-validated training.

    Each fold trains with early stopping against its held-out split and
    contributes one validation MSE.  The returned model is retrained on all
    samples for the mean early-stopped epoch budget.
    """
    config.validate()
    if len(samples) < config.folds:
        raise ConfigError(
            f"need at least {config.folds} samples for {config.folds}-fold training, "
            f"got {len(samples)}"
        )

    x_raw = np.array([s.features for s in samples], dtype=float)
    y = np.array([s.label for s in samples], dtype=float)
    feature_min = x_raw.min(axis=0)
    feature_max = x_raw.max(axis=0)
    x = normalize_features(x_raw, feature_min, feature_max)

    seed_seq = np.random.SeedSequence(config.seed)
    child_seeds = seed_seq.spawn(config.folds + 2)
    fold_rng = np.random.default_rng(child_seeds[0])
    folds = kfold_indices(len(samples), config.folds, fold_rng)
    everyone = np.arange(len(samples))

    fold_losses, fold_epochs = [], []
    for k, val_idx in enumerate(folds):
        train_idx = np.setdiff1d(everyone, val_idx, assume_unique=True)
        rng = np.random.default_rng(child_seeds[k + 1])
        _, _, val_loss, best_epoch = _fit_with_restarts(
            x[train_idx], y[train_idx], (x[val_idx], y[val_idx]), dims, config, rng
        )
        fold_losses.append(val_loss)
        fold_epochs.append(best_epoch)

    final_epochs = max(1, round(float(np.mean(fold_epochs))))
    final_config = replace(config, max_epochs=final_epochs, patience=final_epochs)
    rng = np.random.default_rng(child_seeds[-1])
    # The full-data retrain validates against its own training set purely to
    # trigger the same plateau-restart behavior; epochs stay budgeted.
    weights, biases, _, _ = _fit_with_restarts(
        x, y, (x, y), dims, final_config, rng
    )

    model = PredictorModel(
        dims=tuple(int(d) for d in dims),
        weights=tuple(weights),
        biases=tuple(biases),
        feature_min=feature_min,
        feature_max=feature_max,
        prize_feature=prize_feature,
        epochs_trained=final_epochs,
        validation_loss=float(np.mean(fold_losses)),
    )
    return TrainResult(model, tuple(fold_losses), tuple(fold_epochs))


def samples_from_history(
    catalog: TaskCatalog,
    similarity: SimilarityMatrix | None = None,
    prize_feature: str = "mp",
    binary_labels: bool = False,
) -> list[TrainingSample]:
    """One sample per task, replayed at its historical arrival day.

    The default label is the day-level empirical failure ratio of the open
    set the task arrived into; ``binary_labels`` switches to the task's own
    outcome (failed = 1).
    """
    sim = similarity if similarity is not None else similarity_matrix(catalog.tasks, catalog.norms)
    state = historical_state(catalog, sim)
    samples = []
    for task in catalog.tasks:
        day = task.registration_start
        prize = task.prize if prize_feature == "mp" else task.total_prize
        if binary_labels:
            label = 1.0 if task.status == "failed" else 0.0
        else:
            label = state.empirical_failure_ratio(day, exclude=task.task_id)
        samples.append(
            TrainingSample(
                duration=float(task.duration),
                prize=float(prize),
                open_tasks=float(state.open_task_count(day, exclude=task.task_id)),
                avg_similarity=state.avg_similarity(day, task.task_id),
                label=label,
            )
        )
    return samples


# -- per-day prediction -------------------------------------------------------


def features_for_day(
    model: PredictorModel, task: Task, day: int, state: PlatformState, lookahead: int = 0
) -> np.ndarray:
    """Raw feature vector for ``task`` probing ``day + lookahead``.

    Lookahead 0 reads the open-task count and probe-relative mean similarity
    directly; positive lookaheads use the arrival-rate projections.
    """
    if not 0 <= day <= state.horizon:
        raise ValueError(f"day {day} outside platform horizon [0, {state.horizon}]")
    if lookahead < 0 or day + lookahead > state.horizon:
        raise ValueError(f"lookahead day {day + lookahead} outside horizon")
    probe = task.task_id
    open_count = state.future_open_tasks(day, lookahead, exclude=probe)
    avg_sim = state.future_avg_similarity(day, lookahead, probe_id=probe)
    return np.array([float(task.duration), model.task_prize(task), open_count, avg_sim])


def predict_for_day(
    model: PredictorModel, task: Task, day: int, state: PlatformState, lookahead: int = 0
) -> float:
    """Failure probability for starting ``task`` at ``day + lookahead``."""
    return float(forward_batch(model, features_for_day(model, task, day, state, lookahead))[0])


def best_start_day(
    model: PredictorModel, task: Task, day: int, state: PlatformState
) -> tuple[int, float]:
    """Lowest-failure day among the arrival day and the two after it.

    The candidate window truncates at the horizon; ties go to the earliest
    day.
    """
    best_day, best_prob = day, predict_for_day(model, task, day, state, 0)
    for delta in (1, 2):
        if day + delta > state.horizon:
            break
        prob = predict_for_day(model, task, day, state, delta)
        if prob < best_prob:
            best_day, best_prob = day + delta, prob
    return best_day, best_prob


# -- persistence ---------------------------------------------------------------


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def save_model(model: PredictorModel, target: str | Path) -> None:
    """Write the versioned flat-text model file (round-trip exact)."""
    lines = [MODEL_FORMAT_HEADER]
    lines.append("layers " + " ".join(str(d) for d in model.dims))
    lines.append(f"prize_feature {model.prize_feature}")
    lines.append(f"epochs {model.epochs_trained}")
    lines.append(f"val_loss {_fmt(model.validation_loss)}")
    lines.append("feature_min " + " ".join(_fmt(v) for v in model.feature_min))
    lines.append("feature_max " + " ".join(_fmt(v) for v in model.feature_max))
    for w, b in zip(model.weights, model.biases):
        lines.append(f"weights {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(" ".join(_fmt(v) for v in row))
        lines.append(f"bias {b.shape[0]}")
        lines.append(" ".join(_fmt(v) for v in b))
    lines.append("end")
    Path(target).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(source: str | Path) -> PredictorModel:
    """Parse a model file; raises ModelFormatError on version/shape problems."""
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file: {exc}") from exc
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != MODEL_FORMAT_HEADER:
        raise ModelFormatError(
            f"bad model header; expected {MODEL_FORMAT_HEADER!r}, "
            f"got {lines[0][:40]!r}" if lines else "empty model file"
        )
    try:
        cursor = 1

        def take(prefix: str) -> list[str]:
            nonlocal cursor
            parts = lines[cursor].split()
            if parts[0] != prefix:
                raise ModelFormatError(f"expected {prefix!r} at line {cursor + 1}")
            cursor += 1
            return parts[1:]

        dims = tuple(int(v) for v in take("layers"))
        prize_feature = take("prize_feature")[0]
        epochs = int(take("epochs")[0])
        val_loss = float(take("val_loss")[0])
        feature_min = np.array([float(v) for v in take("feature_min")])
        feature_max = np.array([float(v) for v in take("feature_max")])

        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            rows, cols = (int(v) for v in take("weights"))
            if (rows, cols) != (fan_out, fan_in):
                raise ModelFormatError(
                    f"weight shape {(rows, cols)} does not match layers {(fan_out, fan_in)}"
                )
            block = []
            for _ in range(rows):
                block.append([float(v) for v in lines[cursor].split()])
                cursor += 1
            w = np.array(block)
            if w.shape != (rows, cols):
                raise ModelFormatError("weight row width mismatch")
            weights.append(w)
            (width,) = (int(v) for v in take("bias"))
            if width != fan_out:
                raise ModelFormatError("bias width mismatch")
            biases.append(np.array([float(v) for v in lines[cursor].split()]))
            if biases[-1].shape != (width,):
                raise ModelFormatError("bias row width mismatch")
            cursor += 1
        if lines[cursor] != "end":
            raise ModelFormatError("missing end marker")
    except ModelFormatError:
        raise
    except (IndexError, ValueError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from exc

    return PredictorModel(
        dims=dims,
        weights=tuple(weights),
        biases=tuple(biases),
        feature_min=feature_min,
        feature_max=feature_max,
        prize_feature=prize_feature,
        epochs_trained=epochs,
        validation_loss=val_loss,
    )
