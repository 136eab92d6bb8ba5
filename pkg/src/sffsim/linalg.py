"""Dense complex matrix kernels: unitarity checks, partial transpose, eigenphases.

All matrices are plain ``numpy.ndarray`` of complex128. The eigenphase
convention is fixed once here: principal value in [-pi, pi), ascending order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionError, UnitarityError

# Largest dimension accepted for a dense eigendecomposition; O(N^3) beyond
# this is a configuration decision, not an accident.
DEFAULT_DIM_CAP = 4096

UNITARITY_TOL = 1e-8


def as_square_matrix(m) -> np.ndarray:
    """Validate and return ``m`` as a square complex matrix with finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def unitarity_defect(m) -> float:
    """Max absolute entry of M^dag M - I; zero iff M is unitary."""
    a = as_square_matrix(m)
    d = a.conj().T @ a
    d[np.diag_indices_from(d)] -= 1.0
    return float(np.max(np.abs(d))) if d.size else 0.0


def partial_transpose(g, q: int) -> np.ndarray:
    """Transpose the second tensor leg of a two-qudit gate.

    Index convention on a q^2 x q^2 gate: G_{(i,j),(k,l)} -> G_{(i,l),(k,j)}.
    Involutive by construction.
    """
    a = as_square_matrix(g)
    if a.shape[0] != q * q:
        raise DimensionError(f"gate dim {a.shape[0]} is not q^2 for q={q}")
    t = a.reshape(q, q, q, q)  # (i, j, k, l)
    return np.ascontiguousarray(t.transpose(0, 3, 2, 1).reshape(q * q, q * q))


@dataclass(frozen=True)
class EigenphaseSpectrum:
    """Sorted eigenvalue arguments of a unitary, in [-pi, pi)."""

    phases: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.phases, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise DimensionError("phases must be a nonempty 1-d array")
        if np.any(p < -np.pi) or np.any(p >= np.pi):
            raise ValueError("phases must lie in [-pi, pi)")
        if np.any(np.diff(p) < 0):
            raise ValueError("phases must be sorted ascending")
        object.__setattr__(self, "phases", p)

    @property
    def n_levels(self) -> int:
        return self.phases.size


def eigenphases(u, *, tol: float = UNITARITY_TOL, dim_cap: int = DEFAULT_DIM_CAP) -> EigenphaseSpectrum:
    """All eigenvalue arguments of a unitary matrix, sorted ascending in [-pi, pi).

    Raises UnitarityError if the input fails the unitarity contract and
    CapacityError above the dense dimension cap.
    """
    a = as_square_matrix(u)
    n = a.shape[0]
    if n > dim_cap:
        raise CapacityError(f"dim {n} exceeds dense cap {dim_cap}")
    defect = unitarity_defect(a)
    if defect > tol:
        raise UnitarityError(f"unitarity defect {defect:.3e} exceeds tolerance {tol:.1e}")
    vals = np.linalg.eigvals(a)
    if np.max(np.abs(np.abs(vals) - 1.0)) > tol:
        raise UnitarityError("eigenvalue moduli deviate from 1 beyond tolerance")
    phases = np.angle(vals)  # in (-pi, pi]
    phases[phases >= np.pi] = -np.pi
    phases.sort()
    return EigenphaseSpectrum(phases)


def trace_power(spec: EigenphaseSpectrum, t: int) -> complex:
    """tr(U^t) = sum_j exp(i theta_j t) from a precomputed spectrum, t >= 1."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    return complex(np.sum(np.exp(1j * t * spec.phases)))


def trace_powers(spec: EigenphaseSpectrum, times) -> np.ndarray:
    """Vectorized trace_power over a sequence of integer times."""
    ts = np.asarray(times, dtype=np.int64)
    if ts.ndim != 1 or np.any(ts < 1):
        raise ValueError("times must be a 1-d sequence of integers >= 1")
    return np.exp(1j * np.outer(ts, spec.phases)).sum(axis=1)
