"""Large-q closed forms for the form-factor moments, and brute-force group oracles.

The interacting predictions are organized around the resonance n = gcd(t, L),
p = t/n: the boundary contributes a factor m! t^m and the bulk a sum over
fixed-point classes of the replica-shift group, weighted by powers of the
phase characteristic function.

All combinatorial identities are evaluated in exact integer/rational
arithmetic; floats appear only on output.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetError

# Enumeration caps: element count of the group(s) actually enumerated.
DEFAULT_GROUP_BUDGET = 2_000_000
DEFAULT_PAIR_BUDGET = 2**22


def resonance(t: int, L: int) -> tuple[int, int]:
    """(n, p) with n = gcd(t, L) and p = t/n; n*p = t and n divides L."""
    if t < 1 or L < 1:
        raise ValueError("need t >= 1 and L >= 1")
    n = math.gcd(t, L)
    return n, t // n


def subfactorial(y: int) -> int:
    """Derangement count !y, with !0 = 1 and !1 = 0."""
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    if y == 0:
        return 1
    a, b = 1, 0  # !0, !1
    for k in range(2, y + 1):
        a, b = b, (k - 1) * (a + b)
    return b


def fixed_point_poly(r: int, k: int, x):
    """Census polynomial A_k: elements of the r-replica period-x shift group
    with exactly k*x fixed points.

    A_k(x) = sum_{l=k}^{r} C(r,l) C(l,k) [!(r-l)] x^{r-l} (x-1)^{l-k}.
    Exact (int) for integer x.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if not 0 <= k <= r:
        raise ValueError(f"k must be in [0, {r}], got {k}")
    return sum(
        math.comb(r, l) * math.comb(l, k) * subfactorial(r - l) * x ** (r - l) * (x - 1) ** (l - k)
        for l in range(k, r + 1)
    )


@dataclass(frozen=True)
class ShiftInvariantGroupSpec:
    """Subgroup of S_{r*p}: permute r replicas, shift each cyclically mod p.

    Order r! * p^r; every element fixes a multiple of p points.
    """

    replicas: int
    period: int

    def __post_init__(self):
        if self.replicas < 1 or self.period < 1:
            raise ValueError("replicas and period must be >= 1")

    @property
    def order(self) -> int:
        return math.factorial(self.replicas) * self.period**self.replicas


def _shift_group_elements(m: int, t: int, shift: int):
    """All permutations of [m*t] commuting with the per-replica shift by ``shift``.

    Points are (replica, slot) -> replica*t + slot. The shift's cycles inside a
    replica are the residue classes mod n (n = gcd(t, shift)); group elements
    map cycles to cycles bijectively with an arbitrary rotation along each.
    Yields index arrays; order (m*n)! * p^{m*n} with p = t/n.
    """
    shift %= t
    n = math.gcd(t, shift) if shift else t
    p = t // n
    cycles = [
        [r * t + ((c + j * shift) % t) for j in range(p)]
        for r in range(m)
        for c in range(n)
    ]
    n_cycles = len(cycles)
    for beta in itertools.permutations(range(n_cycles)):
        for offsets in itertools.product(range(p), repeat=n_cycles):
            g = [0] * (m * t)
            for src in range(n_cycles):
                dst = cycles[beta[src]]
                e = offsets[src]
                for jj, pt in enumerate(cycles[src]):
                    g[pt] = dst[(jj + e) % p]
            yield g


def count_fixed_point_classes(
    g: ShiftInvariantGroupSpec, *, order_budget: int = DEFAULT_GROUP_BUDGET
) -> dict[int, int]:
    """Exhaustive census {k: #elements with exactly k*period fixed points}."""
    r, p = g.replicas, g.period
    if r * p > 12:
        raise BudgetError(f"r*p = {r * p} exceeds enumeration bound 12")
    if g.order > order_budget:
        raise BudgetError(f"group order {g.order} exceeds budget {order_budget}")
    counts: dict[int, int] = {}
    for elem in _shift_group_elements(r, p, 1):
        fp = sum(1 for i, x in enumerate(elem) if i == x)
        if fp % p:
            raise AssertionError("fixed-point count not a multiple of the period")
        k = fp // p
        counts[k] = counts.get(k, 0) + 1
    return counts


def factorized_sff(t: int, L: int) -> float:
    """Form factor of the non-interacting (tensor-product) impurity:
    (n!/n^n) t^{n+1} with n = gcd(t, L); equals t^2 for coprime t, L.
    """
    n, _ = resonance(t, L)
    return math.factorial(n) * t ** (n + 1) / n**n


def haar_moment(m: int, t: int) -> float:
    """Large-q moment for a generic impurity: m! t^m, independent of L."""
    if m < 1 or t < 1:
        raise ValueError("need m >= 1 and t >= 1")
    return float(math.factorial(m) * t**m)


def _tdual_moment_exact(m: int, t: int, L: int, c: Fraction) -> Fraction:
    n, p = resonance(t, L)
    mn = m * n
    total = Fraction(0)
    for k in range(mn + 1):
        total += fixed_point_poly(mn, k, p) * c ** (2 * m * t - 2 * k * p)
    return math.factorial(m) * t**m * total


def tdual_moment(m: int, t: int, L: int, abs_chi) -> float:
    """Large-q moment for a dual-unitary-under-partial-transpose impurity:

        K_m(t) = m! t^m sum_{k=0}^{mn} A_k(t/n) |chi|^{2mt(1 - k/(mn))}

    with n = gcd(t, L). Reduces to the factorized result at |chi| = 1 and to
    m! t^m as |chi| -> 0 or t -> infinity. Exact rational arithmetic inside.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    c = Fraction(abs_chi)
    if not 0 <= c <= 1:
        raise ValueError(f"abs_chi must lie in [0, 1], got {abs_chi}")
    return float(_tdual_moment_exact(m, t, L, c))


def tdual_moment_oracle(
    m: int, t: int, L: int, abs_chi, *, pair_budget: int = DEFAULT_PAIR_BUDGET
) -> float:
    """The same moment by explicit double enumeration:

        sum over sigma in the boundary shift group (replicas m, period t) and
        tau in the bulk shift group (replicas m*n, period t/n), both embedded
        in S_{mt}, of |chi|^{2mt - 2 fp(sigma^{-1} tau)}.

    The two groups are the centralizers, in S_{mt}, of the per-replica shifts
    by 1 and by L, so the embedding is fixed with no convention left to choose.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    n, p = resonance(t, L)
    c = Fraction(abs_chi)
    if not 0 <= c <= 1:
        raise ValueError(f"abs_chi must lie in [0, 1], got {abs_chi}")
    if m * t > 10:
        raise BudgetError(f"m*t = {m * t} exceeds enumeration bound 10")
    boundary_order = math.factorial(m) * t**m
    bulk_order = math.factorial(m * n) * p ** (m * n)
    if boundary_order * bulk_order > pair_budget:
        raise BudgetError(
            f"{boundary_order} x {bulk_order} pairs exceed budget {pair_budget}"
        )
    mt = m * t
    taus = np.array(list(_shift_group_elements(m, t, L)), dtype=np.intp)
    idx = np.arange(mt)
    hist = np.zeros(mt + 1, dtype=np.int64)
    for sigma in _shift_group_elements(m, t, 1):
        sigma_inv = np.argsort(np.asarray(sigma))
        fp = (sigma_inv[taus] == idx).sum(axis=1)
        hist += np.bincount(fp, minlength=mt + 1)
    total = Fraction(0)
    for fp_count, weight in enumerate(hist):
        if weight:
            total += int(weight) * c ** (2 * mt - 2 * fp_count)
    return float(total)


def thouless_bound(t: int, L: int, abs_chi: float) -> float:
    """Upper bound t + sqrt(2 pi L) e^{1-L} t^{L+1} |chi|^{2t/L} on the form factor."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if not 0 < abs_chi <= 1:
        raise ValueError(f"abs_chi must lie in (0, 1], got {abs_chi}")
    return t + math.sqrt(2 * math.pi * L) * math.exp(1 - L) * t ** (L + 1) * abs_chi ** (
        2 * t / L
    )


def thouless_estimate(L: int, abs_chi: float) -> float:
    """Scaling estimate L^2 ln(L) / |ln |chi|| for the ramp-onset time.

    An upper-bound scale, not a sharp time.
    """
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    if not 0 < abs_chi < 1:
        raise ValueError(f"abs_chi must lie in (0, 1), got {abs_chi}")
    return L * L * math.log(L) / abs(math.log(abs_chi))
