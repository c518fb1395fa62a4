import numpy as np
import pytest

from conftest import random_pure_state
from quidlab.noise import NoiseModel
from quidlab.pqc import (
    PqcTemplate,
    TemplateGate,
    apply_pqc,
    build_template,
    load_template,
    save_template,
)
from quidlab.simcore import DensityMatrix, ground_state


@pytest.mark.parametrize(
    "name,n,layers,expected",
    [
        ("pqc1", 4, 1, 8),  # 2n rotations
        ("pqc1", 8, 2, 32),  # 2nL
        ("pqc6", 4, 1, 28),  # 4n + n(n-1): two rotation blocks + all-to-all CRX
        ("pqc6", 4, 2, 56),
        ("pqc8", 4, 1, 19),  # 4n + (n-1): two rotation blocks + paired CRX
        ("pqc8", 5, 1, 24),
    ],
)
def test_preset_param_counts(name, n, layers, expected):
    tpl = build_template(name, n, layers)
    assert tpl.param_count == expected
    assert sum(1 for g in tpl.gates if g.slot is not None) == expected


def test_pqc6_entangler_is_all_to_all():
    tpl = build_template("pqc6", 4, 1)
    crx = [g.targets for g in tpl.gates if g.gate == "CRX"]
    assert len(crx) == 12
    assert len(set(crx)) == 12  # every ordered pair once
    assert all(c != t for c, t in crx)


def test_unknown_or_too_small():
    with pytest.raises(ValueError):
        build_template("pqc9", 4, 1)
    with pytest.raises(ValueError):
        build_template("pqc6", 1, 1)
    with pytest.raises(ValueError):
        build_template("pqc1", 4, 0)


@pytest.mark.parametrize("name", ["pqc1", "pqc6", "pqc8"])
def test_zero_angles_are_identity(name, rng):
    tpl = build_template(name, 3, 2)
    rho = DensityMatrix(3, random_pure_state(rng, 3))
    out = apply_pqc(rho, tpl, np.zeros(tpl.param_count))
    assert np.max(np.abs(out.data - rho.data)) <= 1e-10


@pytest.mark.parametrize("name", ["pqc1", "pqc6", "pqc8"])
def test_purity_preserved_without_noise(name, rng):
    tpl = build_template(name, 3, 1)
    rho = DensityMatrix(3, random_pure_state(rng, 3))
    theta = rng.uniform(-np.pi, np.pi, tpl.param_count)
    out = apply_pqc(rho, tpl, theta)
    assert out.purity() == pytest.approx(rho.purity(), abs=1e-9)
    out.validate()


def test_noise_strictly_reduces_purity_on_pure_input(rng):
    tpl = build_template("pqc1", 2, 1)
    rho = DensityMatrix(2, random_pure_state(rng, 2))
    theta = rng.uniform(-np.pi, np.pi, tpl.param_count)
    out = apply_pqc(rho, tpl, theta, NoiseModel.from_error_rate(0.05))
    assert out.purity() < rho.purity()
    out.validate()


def test_parameter_length_mismatch():
    tpl = build_template("pqc1", 2, 1)
    with pytest.raises(ValueError):
        apply_pqc(ground_state(2), tpl, np.zeros(tpl.param_count + 1))


def test_registry_roundtrip(tmp_path):
    for name in ("pqc1", "pqc6", "pqc8"):
        tpl = build_template(name, 4, 2)
        path = tmp_path / f"{name}.json"
        save_template(tpl, path)
        loaded = load_template(path)
        assert loaded == tpl
        assert loaded.gates == tpl.gates


def test_layers_use_fresh_slots():
    tpl = build_template("pqc8", 4, 3)
    slots = [g.slot for g in tpl.gates if g.slot is not None]
    assert sorted(slots) == list(range(tpl.param_count))
    assert tpl.param_count == 3 * 19


def test_slot_invariant_enforced():
    gates = (
        TemplateGate("RX", (0,), slot=0),
        TemplateGate("RZ", (0,), slot=0),  # duplicate slot
    )
    with pytest.raises(ValueError):
        PqcTemplate("bad", 1, 1, gates, 2)
    with pytest.raises(ValueError):
        TemplateGate("RX", (0,), slot=1, angle=0.5)


def test_fixed_angle_entries_apply():
    gates = (
        TemplateGate("RX", (0,), slot=0),
        TemplateGate("RX", (0,), angle=np.pi / 2),
    )
    tpl = PqcTemplate("custom", 1, 1, gates, 1)
    out = apply_pqc(ground_state(1), tpl, np.array([np.pi / 2]))
    # two quarter-turns = RX(pi): |0> -> |1>
    assert np.allclose(np.diag(out.data).real, [0.0, 1.0], atol=1e-12)
