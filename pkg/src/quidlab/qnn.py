"""Hybrid quantum classifier: encode -> PQC -> per-qubit <Z> -> linear head.

Quantum parameters train with SPSA two-point gradient estimates; the linear
head trains with exact softmax cross-entropy gradients. Both parameter groups
update with Adam. Forward passes are batched over stacked density matrices,
and encoded states are cached per run when the register is small enough,
since the encoder does not depend on the trainable parameters.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset
from .encode import EncoderConfig, encode_batch
from .errors import DataFormatError
from .noise import NoiseModel
from .pqc import PqcTemplate, apply_pqc_stack
from .simcore import expect_z_stack

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

PROB_FLOOR = 1e-12

# registers up to this size get their encoded states cached for a whole run
CACHE_MAX_QUBITS = 6


@dataclass
class QnnModel:
    encoder: EncoderConfig
    template: PqcTemplate
    theta: np.ndarray
    head_weights: np.ndarray  # (n_classes, n_qubits)
    head_bias: np.ndarray  # (n_classes,)
    n_classes: int

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.head_weights = np.asarray(self.head_weights, dtype=float)
        self.head_bias = np.asarray(self.head_bias, dtype=float)
        if self.theta.shape != (self.template.param_count,):
            raise ValueError(
                f"theta has shape {self.theta.shape}, template wants "
                f"({self.template.param_count},)"
            )
        if self.head_weights.shape != (self.n_classes, self.encoder.n_qubits):
            raise ValueError(
                f"head weights {self.head_weights.shape} != "
                f"({self.n_classes}, {self.encoder.n_qubits})"
            )
        if self.head_bias.shape != (self.n_classes,):
            raise ValueError(f"head bias {self.head_bias.shape} != ({self.n_classes},)")
        if self.encoder.n_qubits != self.template.n_qubits:
            raise ValueError("encoder and template disagree on register size")

    def copy(self) -> "QnnModel":
        return QnnModel(
            self.encoder,
            self.template,
            self.theta.copy(),
            self.head_weights.copy(),
            self.head_bias.copy(),
            self.n_classes,
        )


def init_model(
    encoder: EncoderConfig, template: PqcTemplate, n_classes: int, seed: int = 0
) -> QnnModel:
    """Random quantum parameters in [-pi, pi); zeroed head for a uniform cold start."""
    rng = np.random.Generator(np.random.PCG64(seed))
    theta = rng.uniform(-np.pi, np.pi, size=template.param_count)
    return QnnModel(
        encoder=encoder,
        template=template,
        theta=theta,
        head_weights=np.zeros((n_classes, encoder.n_qubits)),
        head_bias=np.zeros(n_classes),
        n_classes=n_classes,
    )


@dataclass
class TrainConfig:
    epochs: int = 30
    learning_rate: float = 0.01
    batch_size: int = 32
    spsa_c: float = 0.01
    spsa_repeats: int = 1
    seed: int = 0
    noise: NoiseModel | None = None
    shots: int = 0  # 0: analytic expectations
    train_theta: bool = True

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.learning_rate <= 0 or self.batch_size < 1 or self.spsa_c <= 0:
            raise ValueError("learning_rate, batch_size, spsa_c must be positive")
        if self.spsa_repeats < 1:
            raise ValueError("spsa_repeats must be >= 1")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")


@dataclass
class TrainReport:
    train_loss: list[float]
    test_loss: list[float]
    test_accuracy: list[float]
    model: QnnModel
    seed: int
    wall_seconds: float


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, label: int) -> float:
    """-log probs[label], clamped at PROB_FLOOR."""
    probs = np.asarray(probs, dtype=float)
    if not 0 <= label < probs.shape[-1]:
        raise IndexError(f"label {label} out of range for {probs.shape[-1]} classes")
    return float(-np.log(max(float(probs[label]), PROB_FLOOR)))


def _z_features(
    states: np.ndarray,
    n_qubits: int,
    shots: int = 0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    z = np.column_stack([expect_z_stack(states, q, n_qubits) for q in range(n_qubits)])
    if shots:
        if rng is None:
            raise ValueError("shot sampling needs a generator")
        p_plus = np.clip((1.0 + z) / 2.0, 0.0, 1.0)
        z = 2.0 * rng.binomial(shots, p_plus) / shots - 1.0
    return z


def _forward_from_states(
    model: QnnModel,
    states: np.ndarray,
    theta: np.ndarray,
    noise: NoiseModel | None,
    shots: int,
    rng: np.random.Generator | None,
) -> tuple[np.ndarray, np.ndarray]:
    """(probs, z) for a stack of already-encoded states under parameters theta."""
    out = apply_pqc_stack(states, model.template, theta, noise)
    z = _z_features(out, model.encoder.n_qubits, shots, rng)
    logits = z @ model.head_weights.T + model.head_bias
    return softmax(logits), z


def forward(
    model: QnnModel,
    x: np.ndarray,
    noise: NoiseModel | None = None,
    shots: int = 0,
    seed: int = 0,
) -> np.ndarray:
    """Class probabilities for one (already scaled) feature vector."""
    states = encode_batch(np.asarray(x, dtype=float).reshape(1, -1), model.encoder, noise)
    rng = np.random.Generator(np.random.PCG64(seed)) if shots else None
    probs, _ = _forward_from_states(model, states, model.theta, noise, shots, rng)
    return probs[0]


def _batch_ce(probs: np.ndarray, labels: np.ndarray) -> float:
    picked = probs[np.arange(len(labels)), labels]
    return float(-np.log(np.maximum(picked, PROB_FLOOR)).mean())


def spsa_estimate(
    loss_fn,
    theta: np.ndarray,
    c: float,
    rng: np.random.Generator,
    repeats: int = 1,
) -> np.ndarray:
    """Two-point simultaneous-perturbation gradient estimate.

    Each repeat draws a Rademacher direction delta and forms
    [loss(theta + c*delta) - loss(theta - c*delta)] / (2c) * delta
    (the elementwise inverse of a sign vector is itself).
    """
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    for _ in range(repeats):
        delta = rng.integers(0, 2, size=theta.shape) * 2.0 - 1.0
        diff = loss_fn(theta + c * delta) - loss_fn(theta - c * delta)
        grad += diff / (2.0 * c) * delta
    return grad / repeats


def spsa_gradient(
    model: QnnModel,
    X: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """SPSA estimate of the batch-mean loss gradient w.r.t. the quantum parameters."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("empty batch")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(config.seed))
    states = encode_batch(X, model.encoder, config.noise)

    def loss_fn(theta):
        shot_rng = rng if config.shots else None
        probs, _ = _forward_from_states(
            model, states, theta, config.noise, config.shots, shot_rng
        )
        return _batch_ce(probs, y)

    return spsa_estimate(loss_fn, model.theta, config.spsa_c, rng, config.spsa_repeats)


def head_gradient(
    model: QnnModel,
    X: np.ndarray,
    y: np.ndarray,
    noise: NoiseModel | None = None,
    shots: int = 0,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact softmax cross-entropy gradients (dW, db) at the current parameters."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("empty batch")
    states = encode_batch(X, model.encoder, noise)
    probs, z = _forward_from_states(model, states, model.theta, noise, shots, rng)
    return _head_grads_from(probs, z, y, model.n_classes)


def _head_grads_from(
    probs: np.ndarray, z: np.ndarray, y: np.ndarray, n_classes: int
) -> tuple[np.ndarray, np.ndarray]:
    dlogits = probs.copy()
    dlogits[np.arange(len(y)), y] -= 1.0
    dlogits /= len(y)
    return dlogits.T @ z, dlogits.sum(axis=0)


class _Adam:
    def __init__(self, shape, lr: float):
        self.lr = lr
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0

    def step(self, param: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = ADAM_BETA1 * self.m + (1 - ADAM_BETA1) * grad
        self.v = ADAM_BETA2 * self.v + (1 - ADAM_BETA2) * grad**2
        m_hat = self.m / (1 - ADAM_BETA1**self.t)
        v_hat = self.v / (1 - ADAM_BETA2**self.t)
        return param - self.lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)


class _StateCache:
    """Per-run encoded-state cache; falls back to re-encoding on big registers."""

    def __init__(self, features: np.ndarray, encoder: EncoderConfig, noise):
        self.features = features
        self.encoder = encoder
        self.noise = noise
        self.stack = (
            encode_batch(features, encoder, noise)
            if encoder.n_qubits <= CACHE_MAX_QUBITS and len(features)
            else None
        )

    def take(self, idx: np.ndarray) -> np.ndarray:
        if self.stack is not None:
            return self.stack[idx]
        return encode_batch(self.features[idx], self.encoder, self.noise)

    def all(self) -> np.ndarray:
        if self.stack is not None:
            return self.stack
        return encode_batch(self.features, self.encoder, self.noise)


def train(
    model: QnnModel,
    train_set: LabeledDataset,
    test_set: LabeledDataset,
    config: TrainConfig,
) -> TrainReport:
    """Mini-batch training: SPSA/Adam for theta, exact/Adam for the head.

    Both gradients are evaluated at the pre-update parameters of each batch,
    then both groups step. Fully deterministic given config.seed.
    """
    if len(train_set) == 0 or len(test_set) == 0:
        raise ValueError("train and test sets must be non-empty")
    if train_set.n_classes > model.n_classes or test_set.n_classes > model.n_classes:
        raise ValueError("dataset classes exceed the model head")
    started = time.perf_counter()
    model = model.copy()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    tr_cache = _StateCache(train_set.features, model.encoder, config.noise)
    te_cache = _StateCache(test_set.features, model.encoder, config.noise)

    adam_theta = _Adam(model.theta.shape, config.learning_rate)
    adam_w = _Adam(model.head_weights.shape, config.learning_rate)
    adam_b = _Adam(model.head_bias.shape, config.learning_rate)

    train_loss: list[float] = []
    test_loss: list[float] = []
    test_accuracy: list[float] = []
    n = len(train_set)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        batch_losses = []
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            states = tr_cache.take(idx)
            labels = train_set.labels[idx]

            def loss_fn(theta):
                shot_rng = rng if config.shots else None
                probs, _ = _forward_from_states(
                    model, states, theta, config.noise, config.shots, shot_rng
                )
                return _batch_ce(probs, labels)

            shot_rng = rng if config.shots else None
            probs, z = _forward_from_states(
                model, states, model.theta, config.noise, config.shots, shot_rng
            )
            batch_losses.append(_batch_ce(probs, labels))
            grad_w, grad_b = _head_grads_from(probs, z, labels, model.n_classes)
            if config.train_theta:
                grad_theta = spsa_estimate(
                    loss_fn, model.theta, config.spsa_c, rng, config.spsa_repeats
                )
                model.theta = adam_theta.step(model.theta, grad_theta)
            model.head_weights = adam_w.step(model.head_weights, grad_w)
            model.head_bias = adam_b.step(model.head_bias, grad_b)
        train_loss.append(float(np.mean(batch_losses)))
        acc, loss = _evaluate_states(model, te_cache.all(), test_set.labels, config, rng)
        test_loss.append(loss)
        test_accuracy.append(acc)
    return TrainReport(
        train_loss=train_loss,
        test_loss=test_loss,
        test_accuracy=test_accuracy,
        model=model,
        seed=config.seed,
        wall_seconds=time.perf_counter() - started,
    )


def _evaluate_states(model, states, labels, config, rng) -> tuple[float, float]:
    shot_rng = rng if config.shots else None
    probs, _ = _forward_from_states(
        model, states, model.theta, config.noise, config.shots, shot_rng
    )
    predicted = np.argmax(probs, axis=1)  # ties resolve to the smallest class
    return float(np.mean(predicted == labels)), _batch_ce(probs, labels)


def evaluate(
    model: QnnModel,
    dataset: LabeledDataset,
    noise: NoiseModel | None = None,
    shots: int = 0,
    seed: int = 0,
) -> tuple[float, float]:
    """(accuracy, mean cross-entropy) over a dataset."""
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    states = encode_batch(dataset.features, model.encoder, noise)
    rng = np.random.Generator(np.random.PCG64(seed)) if shots else None
    probs, _ = _forward_from_states(model, states, model.theta, noise, shots, rng)
    predicted = np.argmax(probs, axis=1)
    return float(np.mean(predicted == dataset.labels)), _batch_ce(probs, dataset.labels)


# ---------------------------------------------------------------------------
# checkpoints

CHECKPOINT_VERSION = 1


def save_model(model: QnnModel, path, seed: int | None = None) -> None:
    payload = {
        "format_version": CHECKPOINT_VERSION,
        "encoder": {
            "kind": model.encoder.kind,
            "n_qubits": model.encoder.n_qubits,
            "features_per_qubit": model.encoder.features_per_qubit,
            "scale_range": list(model.encoder.scale_range),
        },
        "template": model.template.to_json(),
        "theta": model.theta.tolist(),
        "head_weights": model.head_weights.tolist(),
        "head_bias": model.head_bias.tolist(),
        "n_classes": model.n_classes,
        "seed": seed,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_model(path) -> QnnModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON ({exc})") from exc
    if raw.get("format_version") != CHECKPOINT_VERSION:
        raise DataFormatError(
            f"{path}: unsupported checkpoint version {raw.get('format_version')!r}"
        )
    enc = raw["encoder"]
    encoder = EncoderConfig(
        kind=enc["kind"],
        n_qubits=int(enc["n_qubits"]),
        features_per_qubit=int(enc["features_per_qubit"]),
        scale_range=tuple(enc["scale_range"]),
    )
    return QnnModel(
        encoder=encoder,
        template=PqcTemplate.from_json(raw["template"]),
        theta=np.array(raw["theta"], dtype=float),
        head_weights=np.array(raw["head_weights"], dtype=float),
        head_bias=np.array(raw["head_bias"], dtype=float),
        n_classes=int(raw["n_classes"]),
    )
