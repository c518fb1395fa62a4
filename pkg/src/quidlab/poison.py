"""Training-set attacks: max-distance label flipping and baselines.

The max-distance attack relabels each poisoned sample with the class whose
clean encoded states are on average farthest from it in the chosen matrix
distance. Baselines: uniform random label flipping, and bi-level random
poisoning (random features, then max-distance labels for those features).
The training set size never changes and clean samples stay bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset
from .encode import EncoderConfig, encode_batch
from .errors import AttackInfeasibleError
from .ess import canonical_metric, class_mean_distances
from .noise import NoiseModel

MODES = ("quid", "random_flip", "bilevel_random")


@dataclass(frozen=True)
class PoisonSpec:
    epsilon: float
    mode: str = "quid"
    metric: str = "frobenius"
    seed: int = 0
    noise: NoiseModel | None = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        canonical_metric(self.metric)


@dataclass
class PoisonOutcome:
    dataset: LabeledDataset
    poisoned_indices: np.ndarray = field(repr=False)
    old_labels: np.ndarray = field(repr=False)
    new_labels: np.ndarray = field(repr=False)

    def flip_count(self) -> int:
        return int(np.sum(self.old_labels != self.new_labels))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_poison_set(
    dataset: LabeledDataset, epsilon: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint covering (clean, poison) index sets; |poison| = round(eps * n)."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    n = len(dataset)
    m = _round_half_up(epsilon * n)
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(n)
    return np.sort(perm[m:]), np.sort(perm[:m])


def _max_distance_labels(
    clean_features: np.ndarray,
    clean_labels: np.ndarray,
    poison_features: np.ndarray,
    cfg: EncoderConfig,
    metric: str,
    model: NoiseModel | None,
) -> np.ndarray:
    """Per poisoned sample: the clean class with the largest mean state distance."""
    if np.unique(clean_labels).size < 2:
        raise AttackInfeasibleError(
            "clean set holds a single class; max-distance relabeling is meaningless"
        )
    clean_states = encode_batch(clean_features, cfg, model)
    poison_states = encode_batch(poison_features, cfg, model)
    means, classes = class_mean_distances(poison_states, clean_states, clean_labels, metric)
    return classes[np.argmax(means, axis=1)]  # first max: ties go to the smallest id


def quid_poison(
    dataset: LabeledDataset, spec: PoisonSpec, cfg: EncoderConfig
) -> PoisonOutcome:
    """Max-distance label flipping on a random epsilon fraction of the dataset."""
    clean_idx, poison_idx = split_poison_set(dataset, spec.epsilon, spec.seed)
    out = dataset.replace()
    old = dataset.labels[poison_idx].copy()
    if poison_idx.size == 0:
        return PoisonOutcome(out, poison_idx, old, old.copy())
    new = _max_distance_labels(
        dataset.features[clean_idx],
        dataset.labels[clean_idx],
        dataset.features[poison_idx],
        cfg,
        spec.metric,
        spec.noise,
    )
    out.labels[poison_idx] = new
    return PoisonOutcome(out, poison_idx, old, new)


def random_flip(dataset: LabeledDataset, spec: PoisonSpec) -> PoisonOutcome:
    """Uniform random relabeling (never the original label) of the poison set."""
    if dataset.n_classes < 2:
        raise AttackInfeasibleError("random flipping needs at least 2 classes")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n = len(dataset)
    m = _round_half_up(spec.epsilon * n)
    perm = rng.permutation(n)
    poison_idx = np.sort(perm[:m])
    out = dataset.replace()
    old = dataset.labels[poison_idx].copy()
    if m == 0:
        return PoisonOutcome(out, poison_idx, old, old.copy())
    draws = rng.integers(0, dataset.n_classes - 1, size=m)
    new = draws + (draws >= old)  # skip the original label
    out.labels[poison_idx] = new
    return PoisonOutcome(out, poison_idx, old, new)


def bilevel_random(
    dataset: LabeledDataset, spec: PoisonSpec, cfg: EncoderConfig
) -> PoisonOutcome:
    """Replace poisoned features with uniform draws, then relabel by max distance."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n = len(dataset)
    m = _round_half_up(spec.epsilon * n)
    perm = rng.permutation(n)
    poison_idx = np.sort(perm[:m])
    clean_idx = np.sort(perm[m:])
    out = dataset.replace()
    old = dataset.labels[poison_idx].copy()
    if m == 0:
        return PoisonOutcome(out, poison_idx, old, old.copy())
    lo, hi = cfg.scale_range
    out.features[poison_idx] = rng.uniform(lo, hi, size=(m, dataset.dim))
    new = _max_distance_labels(
        dataset.features[clean_idx],
        dataset.labels[clean_idx],
        out.features[poison_idx],
        cfg,
        spec.metric,
        spec.noise,
    )
    out.labels[poison_idx] = new
    return PoisonOutcome(out, poison_idx, old, new)


def apply_poison(
    dataset: LabeledDataset, spec: PoisonSpec, cfg: EncoderConfig
) -> PoisonOutcome:
    if spec.mode == "quid":
        return quid_poison(dataset, spec, cfg)
    if spec.mode == "random_flip":
        return random_flip(dataset, spec)
    return bilevel_random(dataset, spec, cfg)


def write_outcome_csv(outcome: PoisonOutcome, path) -> None:
    """One row per sample: index, old_label, new_label, was_poisoned."""
    poisoned = set(int(i) for i in outcome.poisoned_indices)
    new_by_idx = {
        int(i): int(v) for i, v in zip(outcome.poisoned_indices, outcome.new_labels)
    }
    old_by_idx = {
        int(i): int(v) for i, v in zip(outcome.poisoned_indices, outcome.old_labels)
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("index,old_label,new_label,was_poisoned\n")
        for i, label in enumerate(outcome.dataset.labels):
            if i in poisoned:
                fh.write(f"{i},{old_by_idx[i]},{new_by_idx[i]},1\n")
            else:
                fh.write(f"{i},{int(label)},{int(label)},0\n")
