import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qpr.families import d3_q0_range
from qpr.ontic_sim import (
    GAMMA_GATE,
    PI_GATE,
    OnticPermutation,
    SpaceMismatchError,
    UnknownLabelError,
    build_model,
    clifford_group,
    d3_model,
    epsilon_flip,
    find_permutation,
    not_gate_is_unitary,
    pushforward,
    run_circuit,
    stabilizer_model,
    supervenes,
    universal_not_check,
)
from qpr.operator_core import same_up_to_phase
from qpr.quasirep import OnticDistribution, OnticSpace
from qpr.verify import random_circuit
from strategies import seeds

STAB = stabilizer_model()
CLIFFORDS = clifford_group()
D3_LIMIT = math.asin(math.sqrt(8 / 9))

def test_clifford_group_has_24_distinct_elements():
    assert len(CLIFFORDS) == 24
    for i, u in enumerate(CLIFFORDS):
        assert not any(same_up_to_phase(u, v) for v in CLIFFORDS[:i])

def test_every_clifford_supervenes_on_a_permutation():
    for u in CLIFFORDS:
        perm = find_permutation(u, STAB)
        assert perm is not None
        assert supervenes(perm, u, STAB)

def test_non_clifford_has_no_permutation():
    t_gate = np.diag([1, np.exp(1j * math.pi / 4)])
    assert find_permutation(t_gate, STAB) is None

@given(st.integers(0, 23), st.integers(0, 23))
def test_supervenience_composes(i, j):
    u, v = CLIFFORDS[i], CLIFFORDS[j]
    pu, pv = find_permutation(u, STAB), find_permutation(v, STAB)
    assert supervenes(pv.compose(pu), v @ u, STAB)

@given(st.permutations(list(range(8))), seeds)
def test_pushforward_preserves_zero_q_structure(images, seed):
    space = STAB.rep.space
    perm = OnticPermutation(space, {lam: space.points[k] for lam, k in zip(space, images)})
    rng = np.random.default_rng(seed)
    q = 0.25
    dist = OnticDistribution(space, tuple(q if b else 0.0 for b in rng.integers(0, 2, size=8)))
    pushed = pushforward(dist, perm)
    assert sorted(pushed.values) == sorted(dist.values)
    assert abs(pushed.total() - dist.total()) < 1e-15
    assert pushforward(pushed, perm.inverse()) == dist

def test_permutation_must_be_bijection():
    space = OnticSpace((0, 1))
    with pytest.raises(ValueError):
        OnticPermutation(space, {0: 0, 1: 0})

def test_space_mismatch():
    a = OnticPermutation.identity(OnticSpace((0, 1)))
    b = OnticPermutation.identity(OnticSpace((0, 2)))
    with pytest.raises(SpaceMismatchError):
        a.compose(b)

def test_epsilon_flip_is_universal_not_but_not_unitary():
    assert universal_not_check(STAB)
    assert epsilon_flip(STAB.rep.space).compose(epsilon_flip(STAB.rep.space)).is_identity()
    assert not not_gate_is_unitary(STAB)

@given(st.floats(0.1, D3_LIMIT - 1e-3))
def test_gamma_supervenes_for_generic_theta(theta):
    sym = d3_model(theta)
    perm = find_permutation(GAMMA_GATE, sym)
    assert perm is not None
    lo, hi = d3_q0_range(theta)
    general = d3_model(theta, q0=lo + 0.3 * (hi - lo))
    assert supervenes(perm, GAMMA_GATE, general)

@given(st.floats(0.1, D3_LIMIT - 1e-3), st.floats(0.05, 0.95))
def test_pi_supervenes_only_symmetrically(theta, t):
    assert find_permutation(PI_GATE, d3_model(theta)) is not None
    lo, hi = d3_q0_range(theta)
    q0 = lo + t * (hi - lo)
    sym_q0 = 1 - 9 / 8 * math.sin(theta) ** 2
    if abs(q0 - sym_q0) > 1e-6:
        assert find_permutation(PI_GATE, d3_model(theta, q0=q0)) is None

def test_circuit_examples():
    r = run_circuit(STAB, "z+", "H", "x")
    assert np.allclose(r.ontic, (1, 0)) and r.agree
    r = run_circuit(STAB, "z+", "H P H", "z")
    assert r.agree
    r = run_circuit(STAB, "x−", "P", "y")
    assert np.allclose(r.ontic, (0, 1))

def test_gate_order_is_time_order():
    a = run_circuit(STAB, "z+", "H P", "y")
    b = run_circuit(STAB, "z+", "P H", "y")
    assert np.allclose(a.quantum, (1, 0)) and np.allclose(b.quantum, (0.5, 0.5))
    assert a.agree and b.agree

def test_unknown_labels():
    with pytest.raises(UnknownLabelError):
        run_circuit(STAB, "w+", "H", "x")
    with pytest.raises(UnknownLabelError):
        run_circuit(STAB, "z+", "T", "x")

@given(seeds)
def test_random_circuits_agree(seed):
    rng = np.random.default_rng(seed)
    for model in (STAB, build_model("d3", 0.8), build_model("cuboid", 0.6, 0.9)):
        states, bases = sorted(model.states), sorted(model.bases)
        r = run_circuit(model, states[int(rng.integers(len(states)))], random_circuit(rng, model.gates),
                        bases[int(rng.integers(len(bases)))])
        assert r.max_deviation <= 1e-10

def test_registered_gates():
    assert set(STAB.gates) == {"I", "X", "Y", "Z", "H", "P"}
    assert "PI" in d3_model(0.8).gates and "GAMMA" in d3_model(0.8).gates
    cube = build_model("cuboid", math.acos(1 / math.sqrt(3)), math.pi / 4)
    assert {"H", "P"} <= set(cube.gates)
