"""Impurity-gate ensembles and their reproducible samplers.

Every sampler draws from a counter-based stream keyed by
(master_seed, realization_index, slot), so realizations can be computed in
any order, on any number of workers, with bitwise-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, UnitarityError
from .linalg import as_square_matrix, unitarity_defect

GATE_UNITARITY_TOL = 1e-10

ENSEMBLE_KINDS = ("haar", "tdual", "factorized", "fixed")

# Stream slots within one realization.
SLOT_GATE = 0
SLOT_SECOND_FACTOR = 1
SLOT_PHASES = 2


@dataclass(frozen=True)
class PhaseDistribution:
    """Distribution of the i.i.d. interaction phases; uniform(a, b) with a = -b."""

    kind: str = "uniform"
    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind != "uniform":
            raise ValueError(f"unsupported phase distribution {self.kind!r}")
        if not self.a < self.b:
            raise ValueError("require a < b")
        if self.a != -self.b:
            raise ValueError("phase distribution must have zero mean (a = -b)")

    @classmethod
    def uniform(cls, a: float = -1.0, b: float = 1.0) -> "PhaseDistribution":
        return cls("uniform", float(a), float(b))


def characteristic_function(dist: PhaseDistribution, j: float) -> complex:
    """<exp(i J xi)> in closed form; sin(J b)/(J b) for uniform(-b, b)."""
    # np.sinc is sin(pi x)/(pi x), with the x -> 0 limit built in.
    return complex(np.sinc(j * dist.b / np.pi))


@dataclass(frozen=True)
class RealizationSeed:
    """Identifies one realization's random stream, independent of call order."""

    master_seed: int
    realization_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.realization_index < 0:
            raise ValueError("realization_index must be nonnegative")


def stream(seed: RealizationSeed, slot: int) -> np.random.Generator:
    """Counter-based generator for (master_seed, realization_index, slot)."""
    counter = (seed.realization_index << 128) | (slot << 64)
    return np.random.Generator(np.random.Philox(key=seed.master_seed, counter=counter))


def _haar_from(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    # Rephasing columns by the phases of diag(R) selects the unique QR
    # factorization with positive-real diagonal, whose Q factor is exactly Haar.
    return q * (d / np.abs(d))


def sample_haar_unitary(dim: int, seed: RealizationSeed, slot: int = SLOT_GATE) -> np.ndarray:
    """Haar-distributed unitary of the given dimension."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return _haar_from(stream(seed, slot), dim)


def sample_factorized_pair(q: int, seed: RealizationSeed):
    """Two independent Haar single-qudit gates (u, v); the impurity is kron(u, v)."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    u = _haar_from(stream(seed, SLOT_GATE), q)
    v = _haar_from(stream(seed, SLOT_SECOND_FACTOR), q)
    return u, v


def sample_tdual_gate(q: int, j: float, dist: PhaseDistribution, seed: RealizationSeed) -> np.ndarray:
    """Diagonal phase gate times kron of two Haar single-qudit gates.

    Matrix elements exp(i J xi_ij) delta_ik delta_jl on the diagonal factor,
    with xi_ij i.i.d. from ``dist``. Both the gate and its partial transpose
    are unitary for any J.
    """
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    u0 = _haar_from(stream(seed, SLOT_GATE), q)
    u1 = _haar_from(stream(seed, SLOT_SECOND_FACTOR), q)
    product = np.kron(u0, u1)
    if j == 0.0:
        return product
    xi = stream(seed, SLOT_PHASES).uniform(dist.a, dist.b, size=q * q)
    return np.exp(1j * j * xi)[:, None] * product


@dataclass(frozen=True)
class EnsembleSpec:
    """Which impurity ensemble to draw from, plus the local dimension q."""

    q: int
    kind: str = "haar"
    j: float = 0.0
    dist: PhaseDistribution = field(default_factory=PhaseDistribution)
    gate: np.ndarray | None = None

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "fixed":
            if self.gate is None:
                raise ValueError("fixed ensemble requires a gate")
            g = as_square_matrix(self.gate)
            if g.shape[0] != self.q * self.q:
                raise DimensionError(f"fixed gate dim {g.shape[0]} is not q^2 for q={self.q}")
            defect = unitarity_defect(g)
            if defect > GATE_UNITARITY_TOL:
                raise UnitarityError(f"fixed gate unitarity defect {defect:.3e}")
            object.__setattr__(self, "gate", g)


def sample_impurity(spec: EnsembleSpec, seed: RealizationSeed) -> np.ndarray:
    """One impurity gate (q^2 x q^2) for the given ensemble and realization."""
    if spec.kind == "haar":
        return sample_haar_unitary(spec.q * spec.q, seed)
    if spec.kind == "tdual":
        return sample_tdual_gate(spec.q, spec.j, spec.dist, seed)
    if spec.kind == "factorized":
        u, v = sample_factorized_pair(spec.q, seed)
        return np.kron(u, v)
    return spec.gate
