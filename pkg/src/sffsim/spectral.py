"""Monte Carlo form-factor estimation, level spacings, theory curves, fits.

Realizations are independent work items keyed by realization index; the
reduction is a fixed-order array fill, so results are bitwise identical for
any worker count and any completion order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitSpec, step_eigenphases
from .ensembles import RealizationSeed, sample_impurity
from .linalg import DEFAULT_DIM_CAP, EigenphaseSpectrum, trace_powers
from .predictions import factorized_sff

DEFAULT_BIN_EDGES = np.arange(0.0, 4.0 + 1e-12, 0.1)


@dataclass(frozen=True)
class SffConfig:
    """Times, moment orders, realization count and master seed for one run."""

    times: tuple[int, ...]
    moments: tuple[int, ...] = (1,)
    realizations: int = 1
    master_seed: int = 0

    def __post_init__(self):
        times = tuple(int(t) for t in self.times)
        moments = tuple(int(m) for m in self.moments)
        if not times or any(t < 1 for t in times):
            raise ValueError("times must be a nonempty list of integers >= 1")
        if list(times) != sorted(times):
            raise ValueError("times must be sorted ascending")
        if not moments or any(m < 1 for m in moments):
            raise ValueError("moments must be integers >= 1")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "moments", moments)


@dataclass(frozen=True)
class SffSeries:
    """Estimated moments K_m(t) with standard errors and Heisenberg rescalings.

    Arrays are indexed [time, moment]. stderr is NaN when realizations < 2.
    kappa_m = q^{-(L+1)} (K_m/m!)^{1/m}, tau = t/q^{L+1}, and delta_kappa is
    the excess over the ramp, kappa - min(tau, 1).
    """

    q: int
    L: int
    times: tuple[int, ...]
    moments: tuple[int, ...]
    k_est: np.ndarray
    stderr: np.ndarray
    realizations: int

    @property
    def dim(self) -> int:
        return self.q ** (self.L + 1)

    @property
    def tau(self) -> np.ndarray:
        return np.asarray(self.times, dtype=np.float64) / self.dim

    @property
    def kappa(self) -> np.ndarray:
        fact = np.array([math.factorial(m) for m in self.moments], dtype=np.float64)
        inv_m = 1.0 / np.asarray(self.moments, dtype=np.float64)
        return (self.k_est / fact) ** inv_m / self.dim

    @property
    def delta_kappa(self) -> np.ndarray:
        return self.kappa - np.minimum(self.tau, 1.0)[:, None]


def _moment_samples(phases: EigenphaseSpectrum, times, moments) -> np.ndarray:
    traces = trace_powers(phases, times)
    abs2 = np.abs(traces) ** 2
    return abs2[:, None] ** np.asarray(moments, dtype=np.float64)[None, :]


def _sff_worker(args) -> tuple[list[int], np.ndarray]:
    spec, times, moments, master_seed, indices, dim_cap = args
    out = np.empty((len(indices), len(times), len(moments)), dtype=np.float64)
    for row, r in enumerate(indices):
        gate = sample_impurity(spec.impurity, RealizationSeed(master_seed, r))
        phases = step_eigenphases(spec, gate, dim_cap=dim_cap)
        out[row] = _moment_samples(phases, times, moments)
    return indices, out


def _round_robin_shards(realizations: int, workers: int) -> list[list[int]]:
    shards = [list(range(w, realizations, workers)) for w in range(max(workers, 1))]
    return [s for s in shards if s]


def _run_sharded(worker, tasks):
    if len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=len(tasks)) as pool:
        return list(pool.map(worker, tasks))


def estimate_sff(
    spec: CircuitSpec,
    cfg: SffConfig,
    *,
    workers: int = 1,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> SffSeries:
    """Sample-mean estimate of K_m(t) = <|tr(step^t)|^{2m}> over realizations.

    One impurity sample and one eigendecomposition per realization; all times
    and moments reuse that spectrum, so estimates are correlated across (t, m).
    Deterministic given cfg.master_seed, independent of ``workers``: shards are
    scattered back into a fixed-order array before any reduction.
    """
    r_count = cfg.realizations
    samples = np.empty((r_count, len(cfg.times), len(cfg.moments)), dtype=np.float64)
    tasks = [
        (spec, cfg.times, cfg.moments, cfg.master_seed, shard, dim_cap)
        for shard in _round_robin_shards(r_count, workers)
    ]
    for indices, block in _run_sharded(_sff_worker, tasks):
        samples[indices] = block
    k_est = samples.mean(axis=0)
    if r_count >= 2:
        stderr = samples.std(axis=0, ddof=1) / math.sqrt(r_count)
    else:
        stderr = np.full_like(k_est, np.nan)
    return SffSeries(
        q=spec.q,
        L=spec.L,
        times=cfg.times,
        moments=cfg.moments,
        k_est=k_est,
        stderr=stderr,
        realizations=r_count,
    )


def level_spacings(spec: EigenphaseSpectrum) -> np.ndarray:
    """Circle spacings of the sorted phases scaled by N/2pi, wraparound last.

    Mean is exactly 1 by construction; no further unfolding is needed for a
    uniform quasi-energy density.
    """
    n = spec.n_levels
    if n < 2:
        raise ValueError("need at least 2 levels for spacings")
    gaps = np.empty(n, dtype=np.float64)
    gaps[:-1] = np.diff(spec.phases)
    gaps[-1] = spec.phases[0] + 2 * np.pi - spec.phases[-1]
    return gaps * (n / (2 * np.pi))


@dataclass(frozen=True)
class SpacingHistogram:
    """Ensemble-averaged spacing density on fixed bins, plus overflow mass.

    Each realization is normalized before averaging: sum(density * width)
    plus the overflow mass equals 1 per realization.
    """

    bin_edges: np.ndarray
    density: np.ndarray
    overflow_mass: float
    realizations: int

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def total_mass(self) -> float:
        widths = np.diff(self.bin_edges)
        return float(np.sum(self.density * widths) + self.overflow_mass)


def _spacing_worker(args) -> tuple[list[int], np.ndarray, np.ndarray]:
    spec, master_seed, edges, indices, dim_cap = args
    dens = np.empty((len(indices), len(edges) - 1), dtype=np.float64)
    over = np.empty(len(indices), dtype=np.float64)
    for row, r in enumerate(indices):
        gate = sample_impurity(spec.impurity, RealizationSeed(master_seed, r))
        s = level_spacings(step_eigenphases(spec, gate, dim_cap=dim_cap))
        counts, _ = np.histogram(s, bins=edges)
        dens[row] = counts / (s.size * np.diff(edges))
        # np.histogram closes the last bin on the right, so overflow is strict.
        over[row] = np.count_nonzero(s > edges[-1]) / s.size
    return indices, dens, over


def estimate_spacings(
    spec: CircuitSpec,
    realizations: int,
    master_seed: int,
    *,
    bin_edges: np.ndarray | None = None,
    workers: int = 1,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> SpacingHistogram:
    """Ensemble-averaged level-spacing histogram over sampled impurities."""
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    edges = DEFAULT_BIN_EDGES if bin_edges is None else np.asarray(bin_edges, dtype=np.float64)
    dens = np.empty((realizations, len(edges) - 1), dtype=np.float64)
    over = np.empty(realizations, dtype=np.float64)
    tasks = [
        (spec, master_seed, edges, shard, dim_cap)
        for shard in _round_robin_shards(realizations, workers)
    ]
    for indices, block, oblock in _run_sharded(_spacing_worker, tasks):
        dens[indices] = block
        over[indices] = oblock
    return SpacingHistogram(
        bin_edges=edges,
        density=dens.mean(axis=0),
        overflow_mass=float(over.mean()),
        realizations=realizations,
    )


def theory_curve(kind: str, **params):
    """Reference curves as callables of t (form factors) or s (spacing pdfs).

    Kinds: cue_sff(N), cue_moment(m, N), toy(L), poisson_spacing,
    wigner_cue_spacing, coe_sff(N, t_h_scale).
    """
    if kind == "cue_sff":
        n_dim = params["N"]
        return lambda t: np.minimum(np.asarray(t, dtype=np.float64), float(n_dim))
    if kind == "cue_moment":
        m = int(params["m"])
        n_dim = params["N"]
        if m < 1:
            raise ValueError("m must be >= 1")
        fact = math.factorial(m)
        return lambda t: fact * np.minimum(np.asarray(t, dtype=np.float64), float(n_dim)) ** m
    if kind == "toy":
        L = int(params["L"])

        def toy(t):
            ts = np.atleast_1d(np.asarray(t))
            out = np.array([factorized_sff(int(x), L) for x in ts], dtype=np.float64)
            return out[0] if np.isscalar(t) or np.ndim(t) == 0 else out

        return toy
    if kind == "poisson_spacing":
        return lambda s: np.exp(-np.asarray(s, dtype=np.float64))
    if kind == "wigner_cue_spacing":
        # Wigner surmise for the unitary class: (32/pi^2) s^2 exp(-4 s^2 / pi).
        return lambda s: (32 / np.pi**2) * np.asarray(s, dtype=np.float64) ** 2 * np.exp(
            -4 * np.asarray(s, dtype=np.float64) ** 2 / np.pi
        )
    if kind == "coe_sff":
        n_dim = float(params["N"])
        t_h = n_dim * float(params.get("t_h_scale", 1.0))

        def coe(t):
            ts = np.asarray(t, dtype=np.float64)
            ramp = 2 * ts - ts * np.log1p(2 * ts / t_h)
            with np.errstate(divide="ignore", invalid="ignore"):
                plateau = 2 * t_h - ts * np.log((2 * ts + t_h) / (2 * ts - t_h))
            return np.where(ts <= t_h, ramp, plateau)

        return coe
    raise ValueError(f"unknown theory curve kind {kind!r}")


def power_law_fit(xs, ys) -> tuple[float, float]:
    """Least-squares fit of y = A x^{-nu} on log-log axes; returns (A, nu)."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.size != y.size or x.size < 3:
        raise ValueError("need at least 3 (x, y) pairs")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit requires strictly positive data")
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return float(np.exp(intercept)), float(-slope)
