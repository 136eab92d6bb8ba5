"""Brickwork one-step operator: swap layers plus a single boundary impurity.

The chain has L+1 qudits, sites 0..L, with site 0 the most significant base-q
digit of the basis index |i_0 i_1 ... i_L>. One step is

    step = U_{0,1} . prod_{i>=1} P_{2i,2i+1} . prod_{i>=1} P_{2i-1,2i}

i.e. the odd-bond swap layer, then the even-bond swap layer, then the
impurity on sites (0, 1). Swap layers are pure axis permutations of the
state tensor, so the dense operator has at most q^2 nonzeros per column.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleSpec
from .errors import BudgetError, CapacityError, DimensionError
from .linalg import (
    DEFAULT_DIM_CAP,
    EigenphaseSpectrum,
    as_square_matrix,
    eigenphases,
    trace_powers,
)

# Brute-force term budget for the two-body trace sum (q^{2t} terms).
DEFAULT_TRACE_SUM_BUDGET = 2**20


@dataclass(frozen=True)
class CircuitSpec:
    """Chain geometry and impurity ensemble; N = q^(L+1), t_H = N.

    q = 1 is allowed only as a degenerate smoke case (N = 1).
    """

    q: int
    L: int
    impurity: EnsembleSpec

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.impurity.q != self.q:
            raise ValueError("impurity ensemble q differs from circuit q")

    @property
    def n_sites(self) -> int:
        return self.L + 1

    @property
    def dim(self) -> int:
        return self.q ** (self.L + 1)

    @property
    def heisenberg_time(self) -> int:
        return self.dim


def _check_gate(spec: CircuitSpec, gate) -> np.ndarray:
    g = as_square_matrix(gate)
    if g.shape[0] != spec.q * spec.q:
        raise DimensionError(f"impurity dim {g.shape[0]} is not q^2 for q={spec.q}")
    return g


def _swap_layer_axes(n_axes: int, first_bond: int, n_sites: int) -> list[int]:
    axes = list(range(n_axes))
    for a in range(first_bond, n_sites - 1, 2):
        axes[a], axes[a + 1] = axes[a + 1], axes[a]
    return axes


def apply_step(spec: CircuitSpec, gate, state: np.ndarray) -> np.ndarray:
    """Apply the one-step operator to a state vector (or to columns of a matrix).

    Matrix-free: two axis permutations and one q^2 x q^2 matmul, O(N q^2).
    """
    g = _check_gate(spec, gate)
    psi = np.asarray(state, dtype=np.complex128)
    if psi.shape[0] != spec.dim:
        raise DimensionError(f"state length {psi.shape[0]} != N = {spec.dim}")
    q, n_sites = spec.q, spec.n_sites
    batch = psi.shape[1:]
    w = psi.reshape((q,) * n_sites + batch)
    n_axes = n_sites + len(batch)
    w = w.transpose(_swap_layer_axes(n_axes, 1, n_sites))  # bonds (1,2),(3,4),...
    w = w.transpose(_swap_layer_axes(n_axes, 2, n_sites))  # bonds (2,3),(4,5),...
    w = g @ w.reshape(q * q, -1)
    return w.reshape(psi.shape)


def build_step_operator(spec: CircuitSpec, gate, *, dim_cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Materialize the N x N one-step operator, column by column."""
    if spec.dim > dim_cap:
        raise CapacityError(f"N = {spec.dim} exceeds dense cap {dim_cap}")
    return apply_step(spec, gate, np.eye(spec.dim, dtype=np.complex128))


def step_eigenphases(spec: CircuitSpec, gate, *, dim_cap: int = DEFAULT_DIM_CAP) -> EigenphaseSpectrum:
    """Eigenphase spectrum of the dense one-step operator."""
    return eigenphases(build_step_operator(spec, gate, dim_cap=dim_cap), dim_cap=dim_cap)


def circuit_trace_powers(
    spec: CircuitSpec, gate, t_max: int, *, dim_cap: int = DEFAULT_DIM_CAP
) -> np.ndarray:
    """tr(step^t) for t = 1..t_max from one eigendecomposition."""
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    phases = step_eigenphases(spec, gate, dim_cap=dim_cap)
    return trace_powers(phases, np.arange(1, t_max + 1))


def _two_body_sum(gate: np.ndarray, q: int, L: int, t: int, shift: int) -> complex:
    """Sum over index sequences of prod_s <i_s j_s|U|i_{s+1} j_{s+shift}>, mod t."""
    g = gate.reshape(q, q, q, q)
    total = 0.0 + 0.0j
    succ = [(s + 1) % t for s in range(t)]
    lag = [(s + shift) % t for s in range(t)]
    for iseq in itertools.product(range(q), repeat=t):
        i_next = tuple(iseq[s] for s in succ)
        for jseq in itertools.product(range(q), repeat=t):
            term = 1.0 + 0.0j
            for s in range(t):
                term *= g[iseq[s], jseq[s], i_next[s], jseq[lag[s]]]
            total += term
    return total


def two_body_trace_oracle(
    gate, q: int, L: int, t: int, *, budget: int = DEFAULT_TRACE_SUM_BUDGET
) -> complex:
    """tr(step^t) computed from the impurity gate alone, as a 2t-fold index sum.

    The bulk swaps are integrated out: the right output leg at time s feeds the
    right input leg at time s+L (mod t). Brute force over q^{2t} sequences;
    independent of the circuit code path by construction.
    """
    g = as_square_matrix(gate)
    if g.shape[0] != q * q:
        raise DimensionError(f"gate dim {g.shape[0]} is not q^2 for q={q}")
    if t < 1 or L < 1:
        raise ValueError("need t >= 1 and L >= 1")
    if q ** (2 * t) > budget:
        raise BudgetError(f"q^(2t) = {q ** (2 * t)} exceeds budget {budget}")
    # Forward shift frozen by the calibration test against the dense circuit.
    return _two_body_sum(g, q, L, t, shift=L)


def basis_permutation(spec: CircuitSpec) -> np.ndarray:
    """Basis-index permutation implemented by the two swap layers alone.

    Returns pi with swap_layers(e_k) = e_{pi(k)}; used for cycle-count checks.
    """
    idx = np.arange(spec.dim)
    q, n_sites = spec.q, spec.n_sites
    w = idx.reshape((q,) * n_sites)
    w = w.transpose(_swap_layer_axes(n_sites, 1, n_sites))
    w = w.transpose(_swap_layer_axes(n_sites, 2, n_sites))
    # The transposed index tensor holds source indices per target slot, i.e.
    # the inverse map; argsort inverts it back to target-per-source.
    return np.argsort(w.reshape(spec.dim))


def permutation_cycle_trace(perm: np.ndarray, t: int) -> int:
    """Number of fixed points of perm^t; equals tr(P^t) for a permutation matrix P."""
    p = np.asarray(perm)
    cur = np.arange(p.size)
    for _ in range(t):
        cur = p[cur]
    return int(np.count_nonzero(cur == np.arange(p.size)))


def toy_trace(u: np.ndarray, v: np.ndarray, t: int, L: int) -> complex:
    """Factorized trace tr(u^t) [tr(v^{t/n})]^n with n = gcd(t, L)."""
    n = math.gcd(t, L)
    tu = np.trace(np.linalg.matrix_power(u, t))
    tv = np.trace(np.linalg.matrix_power(v, t // n))
    return complex(tu * tv**n)
