import math

import numpy as np
import pytest

from sffsim import (
    CircuitSpec,
    EnsembleSpec,
    RealizationSeed,
    apply_step,
    build_step_operator,
    circuit_trace_powers,
    sample_factorized_pair,
    sample_haar_unitary,
    sample_impurity,
    two_body_trace_oracle,
    unitarity_defect,
)
from sffsim.circuit import (
    _two_body_sum,
    basis_permutation,
    permutation_cycle_trace,
    toy_trace,
)
from sffsim.errors import BudgetError, CapacityError, DimensionError

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def haar_circuit(q, L):
    return CircuitSpec(q=q, L=L, impurity=EnsembleSpec(q=q, kind="haar"))


def test_l1_step_is_the_gate():
    spec = haar_circuit(2, 1)
    gate = sample_impurity(spec.impurity, RealizationSeed(1, 0))
    assert np.allclose(build_step_operator(spec, gate), gate)


def test_swap_impurity_gives_permutation_matrix():
    spec = haar_circuit(2, 3)
    step = build_step_operator(spec, SWAP)
    assert np.all(np.isin(step.real, (0.0, 1.0))) and np.all(step.imag == 0.0)
    assert np.all(np.abs(step).sum(axis=0) == 1.0)
    assert np.all(np.abs(step).sum(axis=1) == 1.0)


def test_step_unitarity():
    spec = haar_circuit(2, 4)
    gate = sample_impurity(spec.impurity, RealizationSeed(2, 0))
    assert unitarity_defect(build_step_operator(spec, gate)) < 1e-12


def test_column_sparsity():
    for q, L in ((2, 3), (3, 2)):
        spec = haar_circuit(q, L)
        gate = sample_impurity(spec.impurity, RealizationSeed(3, 0))
        step = build_step_operator(spec, gate)
        nnz = np.count_nonzero(np.abs(step) > 1e-14, axis=0)
        assert np.all(nnz == q * q)
    # permutation impurity: exactly one nonzero per column
    step = build_step_operator(haar_circuit(2, 3), SWAP)
    assert np.all(np.count_nonzero(np.abs(step) > 1e-14, axis=0) == 1)


def test_apply_step_matches_dense():
    spec = haar_circuit(2, 3)
    gate = sample_impurity(spec.impurity, RealizationSeed(4, 0))
    step = build_step_operator(spec, gate)
    rng = np.random.default_rng(0)
    psi = rng.standard_normal(spec.dim) + 1j * rng.standard_normal(spec.dim)
    assert np.max(np.abs(apply_step(spec, gate, psi) - step @ psi)) < 1e-12


def test_apply_step_preserves_norm():
    rng = np.random.default_rng(1)
    for q, L in ((2, 5), (3, 3)):
        spec = haar_circuit(q, L)
        gate = sample_impurity(spec.impurity, RealizationSeed(5, L))
        psi = rng.standard_normal(spec.dim) + 1j * rng.standard_normal(spec.dim)
        out = apply_step(spec, gate, psi)
        assert abs(np.linalg.norm(out) / np.linalg.norm(psi) - 1.0) < 1e-12


def test_apply_step_basis_state_through_swaps():
    spec = haar_circuit(2, 4)
    e0 = np.zeros(spec.dim, dtype=complex)
    e0[5] = 1.0
    out = apply_step(spec, np.eye(4, dtype=complex), e0)
    assert np.count_nonzero(out) == 1
    assert np.isclose(np.abs(out).max(), 1.0)


def test_apply_step_length_check():
    spec = haar_circuit(2, 2)
    gate = np.eye(4, dtype=complex)
    with pytest.raises(DimensionError):
        apply_step(spec, gate, np.zeros(7, dtype=complex))


def test_trace_t1_equals_diagonal_sum():
    spec = haar_circuit(2, 3)
    gate = sample_impurity(spec.impurity, RealizationSeed(6, 0))
    step = build_step_operator(spec, gate)
    traces = circuit_trace_powers(spec, gate, 1)
    assert abs(traces[0] - np.trace(step)) < 1e-10


def test_identity_impurity_traces_are_cycle_counts():
    spec = haar_circuit(2, 2)
    traces = circuit_trace_powers(spec, np.eye(4, dtype=complex), 6)
    perm = basis_permutation(spec)
    for t in range(1, 7):
        want = permutation_cycle_trace(perm, t)
        assert abs(traces[t - 1] - want) < 1e-9
        assert abs(traces[t - 1].imag) < 1e-9


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
def test_toy_factorization_per_realization(q, L):
    spec = CircuitSpec(q=q, L=L, impurity=EnsembleSpec(q=q, kind="factorized"))
    u, v = sample_factorized_pair(q, RealizationSeed(7, L))
    traces = circuit_trace_powers(spec, np.kron(u, v), 12)
    for t in range(1, 13):
        assert abs(traces[t - 1] - toy_trace(u, v, t, L)) < 1e-9 * spec.dim


def test_capacity_error():
    spec = haar_circuit(2, 3)
    gate = sample_impurity(spec.impurity, RealizationSeed(8, 0))
    with pytest.raises(CapacityError):
        build_step_operator(spec, gate, dim_cap=8)


def test_two_body_sum_t1_is_gate_trace():
    gate = sample_haar_unitary(4, RealizationSeed(9, 0))
    assert abs(two_body_trace_oracle(gate, 2, 3, 1) - np.trace(gate)) < 1e-12


@pytest.mark.parametrize("kind", ["haar", "tdual", "factorized"])
@pytest.mark.parametrize("L", [1, 2, 3, 4])
@pytest.mark.parametrize("t", [1, 2, 3, 4, 5])
def test_two_body_sum_matches_circuit(kind, L, t):
    ens = EnsembleSpec(q=2, kind=kind, j=3.1)
    spec = CircuitSpec(q=2, L=L, impurity=ens)
    gate = sample_impurity(ens, RealizationSeed(10, 100 * L + t))
    direct = circuit_trace_powers(spec, gate, t)[t - 1]
    assert abs(two_body_trace_oracle(gate, 2, L, t) - direct) < 1e-9


def test_two_body_shift_direction_calibration():
    # Freezes the forward (+L) shift: the mirrored (-L) sum does not match.
    ens = EnsembleSpec(q=2, kind="haar")
    spec = CircuitSpec(q=2, L=2, impurity=ens)
    gate = sample_impurity(ens, RealizationSeed(11, 0))
    direct = circuit_trace_powers(spec, gate, 3)[2]
    forward = _two_body_sum(gate, 2, 2, 3, shift=2)
    mirrored = _two_body_sum(gate, 2, 2, 3, shift=-2)
    assert abs(forward - direct) < 1e-9
    assert abs(mirrored - direct) > 1e-3


def test_two_body_budget():
    gate = sample_haar_unitary(4, RealizationSeed(12, 0))
    with pytest.raises(BudgetError):
        two_body_trace_oracle(gate, 2, 2, 11, budget=2**20)


@pytest.mark.parametrize("q,L,t", [(2, 2, 3), (2, 3, 2), (2, 1, 4)])
def test_l_periodicity_fixed_gate(q, L, t):
    gate = sample_haar_unitary(q * q, RealizationSeed(13, L))
    ens_small = EnsembleSpec(q=q, kind="fixed", gate=gate)
    tr_small = circuit_trace_powers(CircuitSpec(q=q, L=L, impurity=ens_small), gate, t)[t - 1]
    tr_large = circuit_trace_powers(CircuitSpec(q=q, L=L + t, impurity=ens_small), gate, t)[t - 1]
    n_large = q ** (L + t + 1)
    assert abs(tr_small - tr_large) < 1e-9 * n_large


def test_circuit_spec_validation():
    with pytest.raises(ValueError):
        CircuitSpec(q=2, L=0, impurity=EnsembleSpec(q=2, kind="haar"))
    with pytest.raises(ValueError):
        CircuitSpec(q=3, L=2, impurity=EnsembleSpec(q=2, kind="haar"))
    spec = haar_circuit(3, 3)
    assert spec.dim == 81
    assert spec.heisenberg_time == 81


def test_degenerate_q1_smoke():
    spec = CircuitSpec(q=1, L=3, impurity=EnsembleSpec(q=1, kind="factorized"))
    gate = sample_impurity(spec.impurity, RealizationSeed(14, 0))
    traces = circuit_trace_powers(spec, gate, 5)
    assert np.allclose(np.abs(traces), 1.0)


def test_toy_resonance_value():
    # gcd(6, 4) = 2: the bulk factor is squared at reduced time 3.
    u, v = sample_factorized_pair(2, RealizationSeed(15, 0))
    got = toy_trace(u, v, 6, 4)
    want = np.trace(np.linalg.matrix_power(u, 6)) * np.trace(np.linalg.matrix_power(v, 3)) ** 2
    assert got == pytest.approx(want)
    assert math.gcd(6, 4) == 2
