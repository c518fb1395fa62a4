"""Noise channels and per-gate noise models.

A NoiseModel maps lowercase gate names to a list of (channel kind, parameter)
entries; gates without an entry fall back to the model default. noisy_apply
runs the gate and then feeds every touched qubit through the listed channels
in order, which mirrors a simulator that injects noise after each gate.
Two-qubit gates get independent single-qubit noise on each touched qubit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DataFormatError
from .simcore import DensityMatrix, GateOp, KrausChannel, apply_channel_stack, apply_gate_stack

CHANNEL_KINDS = ("amplitude_damping", "depolarizing")


def amplitude_damping(gamma: float) -> KrausChannel:
    """Decay channel: K0 = diag(1, sqrt(1-gamma)), K1 = sqrt(gamma)|0><1|."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    k0 = [[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]]
    k1 = [[0.0, math.sqrt(gamma)], [0.0, 0.0]]
    return KrausChannel([k0, k1])


def depolarizing(p: float) -> KrausChannel:
    """rho -> (1-p) rho + p I/2 via the Kraus set {I, X, Y, Z} weighted by p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    wi, wp = math.sqrt(1.0 - 3.0 * p / 4.0), math.sqrt(p / 4.0)
    ki = [[wi, 0.0], [0.0, wi]]
    kx = [[0.0, wp], [wp, 0.0]]
    ky = [[0.0, -1j * wp], [1j * wp, 0.0]]
    kz = [[wp, 0.0], [0.0, -wp]]
    return KrausChannel([ki, kx, ky, kz])


def build_channel(kind: str, param: float) -> KrausChannel:
    if kind == "amplitude_damping":
        return amplitude_damping(param)
    if kind == "depolarizing":
        return depolarizing(param)
    raise ValueError(f"unknown channel kind {kind!r}; expected one of {CHANNEL_KINDS}")


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate noise: lowercase gate name -> [(kind, parameter), ...]."""

    per_gate: dict[str, tuple[tuple[str, float], ...]] = field(default_factory=dict)
    default: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        for entries in list(self.per_gate.values()) + [self.default]:
            for kind, param in entries:
                if kind not in CHANNEL_KINDS:
                    raise ValueError(f"unknown channel kind {kind!r}")
                if not 0.0 <= param <= 1.0:
                    raise ValueError(f"{kind} parameter {param} out of [0, 1]")

    @classmethod
    def from_error_rate(cls, p: float) -> "NoiseModel":
        """Amplitude damping then depolarizing after every gate, both at p."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"error rate must be in [0, 1], got {p}")
        return cls(default=(("amplitude_damping", p), ("depolarizing", p)))

    def entries_for(self, gate_name: str) -> tuple[tuple[str, float], ...]:
        return self.per_gate.get(gate_name.lower(), self.default)

    def channels_for(self, gate_name: str) -> list[KrausChannel]:
        """Built channels for a gate, skipping zero-strength entries."""
        return [
            build_channel(kind, param)
            for kind, param in self.entries_for(gate_name)
            if param > 0.0
        ]


def noisy_apply_stack(stack, gate: GateOp, model: NoiseModel, n_qubits: int):
    out = apply_gate_stack(stack, gate, n_qubits)
    channels = model.channels_for(gate.name)
    for qubit in gate.targets:
        for ch in channels:
            out = apply_channel_stack(out, ch, (qubit,), n_qubits)
    return out


def noisy_apply(rho: DensityMatrix, gate: GateOp, model: NoiseModel) -> DensityMatrix:
    """Apply the gate, then the model's channels on each touched qubit in order."""
    out = noisy_apply_stack(rho.data[None], gate, model, rho.n_qubits)
    return DensityMatrix(rho.n_qubits, out[0])


_VALID_KEYS = {"h", "rx", "rz", "crx", "crz", "cnot", "stateprep", "default"}


def load_noise_model(path) -> NoiseModel:
    """Read the JSON noise-model file format (see README)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise DataFormatError(f"{path}: top level must be a JSON object")
    per_gate: dict[str, tuple[tuple[str, float], ...]] = {}
    default: tuple[tuple[str, float], ...] = ()
    for key, value in raw.items():
        if key not in _VALID_KEYS:
            raise DataFormatError(
                f"{path}: unknown key {key!r}; expected gate names {sorted(_VALID_KEYS)}"
            )
        if not isinstance(value, list):
            raise DataFormatError(f"{path}: entry {key!r} must be an array of pairs")
        entries = []
        for item in value:
            if not (isinstance(item, list) and len(item) == 2):
                raise DataFormatError(
                    f"{path}: entry {key!r} holds {item!r}, expected [channel, parameter]"
                )
            kind, param = item
            if kind not in CHANNEL_KINDS:
                raise DataFormatError(
                    f"{path}: entry {key!r} names unknown channel {kind!r}"
                )
            if not isinstance(param, (int, float)) or not 0.0 <= float(param) <= 1.0:
                raise DataFormatError(
                    f"{path}: entry {key!r} parameter {param!r} out of [0, 1]"
                )
            entries.append((kind, float(param)))
        if key == "default":
            default = tuple(entries)
        else:
            per_gate[key] = tuple(entries)
    return NoiseModel(per_gate=per_gate, default=default)


def save_noise_model(model: NoiseModel, path) -> None:
    raw = {name: [list(e) for e in entries] for name, entries in sorted(model.per_gate.items())}
    raw["default"] = [list(e) for e in model.default]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(raw, fh, indent=2, sort_keys=True)
        fh.write("\n")
