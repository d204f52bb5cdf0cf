"""Large-|k| perturbation series for the eigenvalues of the mode matrices (d = 1).

Writing ``M(k) = -2 pi i k (V + z B)`` with ``z = i / (2 pi k)``, the
eigenvalues of ``V + z B`` are analytic near ``z = 0`` when the velocities
are pairwise distinct:

    lambda_j(z) = v_j + sum_n z^n c_j[n]

with real coefficients ``c_j[n]`` given by a trace sum over compositions of
``n - 1`` (reduced resolvent expansion).  This module evaluates those
coefficients, the radius in ``k`` where the series is trusted, truncated
series values with a rigorous tail bound, and the eventual monotonicity of
``Re lambda_j(k)``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BelowThresholdError,
    DegenerateVelocitiesError,
    DimensionMismatchError,
    OrderTooLargeError,
)
from .model import rescale_to_unit_torus

MAX_ORDER = 7
DEFAULT_NSTAR_CAP = 3


def _velocities_1d(spec):
    if spec.d != 1:
        raise DimensionMismatchError("perturbation series are available for d = 1 only")
    unit = rescale_to_unit_torus(spec)
    v = unit.velocities[:, 0]
    if len(v) > 1:
        gap = np.abs(v[:, None] - v[None, :])[~np.eye(len(v), dtype=bool)].min()
        if gap <= 1e-12 * np.abs(v).max():
            raise DegenerateVelocitiesError(
                f"velocities must be pairwise distinct (min gap {gap:g})"
            )
    return unit, v


def reduced_resolvents(spec):
    """Diagonal reduced resolvents ``S_j`` and eigenprojections ``P_j``.

    Returns two arrays of shape (N, N, N): ``S[j] = diag((v_i - v_j)^-1)``
    with a zero in slot j, and ``P[j] = e_j e_j^T``.
    """
    _, v = _velocities_1d(spec)
    n = len(v)
    S = np.zeros((n, n, n))
    P = np.zeros((n, n, n))
    for j in range(n):
        for i in range(n):
            if i != j:
                S[j, i, i] = 1.0 / (v[i] - v[j])
        P[j, j, j] = 1.0
    return S, P


def compositions(total, parts):
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _composition_table(n):
    return np.array(list(compositions(n - 1, n)), dtype=int).reshape(-1, n)


def _coefficients_from_diagonals(B, s_diag, j, n):
    """Trace sum for one branch; ``s_diag`` is the diagonal of S_j."""
    size = len(s_diag)
    powers = [-np.eye(size)[j]]  # S^(0) = -P_j
    for p in range(1, n):
        powers.append(s_diag ** p)
    factors = B[None, :, :] * np.array(powers)[:, None, :]  # B S^(p)
    table = _composition_table(n)
    prod = factors[table[:, 0]]
    for col in range(1, n):
        prod = prod @ factors[table[:, col]]
    total = np.trace(prod, axis1=1, axis2=2).sum()
    return (-1) ** n / n * total


def coefficient(spec, j, n):
    """Series coefficient ``c_j[n]`` of branch ``j`` (zero-based), ``1 <= n <= 7``.

    Computed from the general composition formula

        c_j[n] = (-1)^n / n * sum_{k_1 + ... + k_n = n - 1} tr(B S^(k_1) ... B S^(k_n))

    with ``S^(0) = -P_j`` and ``S^(p) = S_j^p``.
    """
    unit, v = _velocities_1d(spec)
    n = int(n)
    if n < 1 or n > MAX_ORDER:
        raise OrderTooLargeError(f"coefficient order must be in 1..{MAX_ORDER}, got {n}")
    if not 0 <= j < unit.N:
        raise IndexError(f"branch {j} out of range for N = {unit.N}")
    s = np.where(np.arange(unit.N) == j, 0.0, 1.0 / np.where(np.arange(unit.N) == j, 1.0, v - v[j]))
    return float(_coefficients_from_diagonals(unit.B, s, j, n))


def coefficient_closed_form(spec, j, n):
    """Explicit low-order coefficients (n = 1, 2, 3) written out entrywise."""
    unit, v = _velocities_1d(spec)
    B = unit.B
    N = unit.N
    others = [i for i in range(N) if i != j]
    if n == 1:
        return float(B[j, j])
    if n == 2:
        return float(-sum(B[j, i] * B[i, j] / (v[i] - v[j]) for i in others))
    if n == 3:
        first = sum(
            B[j, l] * B[l, i] * B[i, j] / ((v[l] - v[j]) * (v[i] - v[j]))
            for i in others for l in others
        )
        second = sum(B[i, j] * B[j, i] * B[j, j] / (v[i] - v[j]) ** 2 for i in others)
        return float(first - second)
    raise OrderTooLargeError("closed forms exist for n <= 3 only")


def coefficients(spec, n_max):
    """Array ``c[j, n - 1]`` of all coefficients up to order ``n_max``."""
    N = spec.N
    return np.array([[coefficient(spec, j, n) for n in range(1, n_max + 1)] for j in range(N)])


def coefficient_bound(spec, n):
    """Cauchy bound ``spread * (2 ||B||_inf / gap)^n`` on ``|c_j[n]|``."""
    unit, _ = _velocities_1d(spec)
    if unit.N == 1:
        return 0.0 if n > 1 else abs(float(unit.B[0, 0]))
    return unit.velocity_spread * (2.0 * unit.norm_inf / unit.velocity_gap) ** n


def validity_threshold(spec):
    """Smallest trusted mode index ``K_pert = ceil(2 ||B||_inf / (pi * gap))``, at least 1.

    At ``|k| = K_pert`` the expansion variable ``1 / (2 pi k)`` is at most half
    of the convergence radius ``gap / (2 ||B||_inf)``.
    """
    unit, _ = _velocities_1d(spec)
    if unit.N == 1 or unit.norm_inf == 0:
        return 1
    return max(1, math.ceil(2.0 * unit.norm_inf / (math.pi * unit.velocity_gap)))


def eigenvalue_series(spec, j, k, n_max):
    """Truncated series for the eigenvalue of ``M(k)`` on branch ``j``.

    Returns ``(value, bound)`` where ``bound`` majorises the modulus of the
    omitted tail via the geometric Cauchy estimate.  ``n_max`` counts the
    correction terms beyond ``b_jj - 2 pi i k v_j``, so ``n_max <= 6``.
    """
    unit, v = _velocities_1d(spec)
    k = int(k)
    K_pert = validity_threshold(spec)
    if abs(k) < K_pert:
        raise BelowThresholdError(f"|k| = {abs(k)} is below the validity threshold {K_pert}")
    if not 0 <= n_max <= MAX_ORDER - 1:
        raise OrderTooLargeError(f"n_max must be in 0..{MAX_ORDER - 1}")
    z = 1j / (2.0 * math.pi * k)
    value = unit.B[j, j] - 2j * math.pi * k * v[j]
    for n in range(1, n_max + 1):
        value += z ** n * coefficient(spec, j, n + 1)
    if unit.N == 1:
        return complex(value), 0.0
    r = 2.0 * unit.norm_inf / unit.velocity_gap
    q = abs(z) * r
    bound = unit.velocity_spread * r * q ** (n_max + 1) / (1.0 - q)
    return complex(value), float(bound)


@dataclass(frozen=True)
class BranchReport:
    branch: int
    coeffs: tuple
    n_star: object  # int or None
    direction: str  # "inc", "dec" or "const"

    def to_dict(self, K_pert):
        return {
            "branch": self.branch,
            "coeffs": list(self.coeffs),
            "n_star": self.n_star,
            "direction": self.direction,
            "K_pert": K_pert,
        }


@dataclass(frozen=True)
class PerturbationReport:
    branches: tuple
    K_pert: int
    coeff_bound_base: float

    def direction(self, j):
        return self.branches[j].direction

    def to_json(self):
        return [b.to_dict(self.K_pert) for b in self.branches]


def _n2_eventually_constant(B, scale):
    tol = 1e-12 * max(scale, np.finfo(float).tiny)
    return abs(B[0, 1]) <= tol or abs(B[1, 0]) <= tol or abs(B[0, 0] - B[1, 1]) <= tol


def monotonicity(spec, n_cap=DEFAULT_NSTAR_CAP, order=None):
    """Eventual monotonicity of ``Re lambda_j(k)`` for every branch.

    ``n_star`` is the first ``n <= n_cap`` with ``c_j[2n + 1] != 0`` (tested
    against ``1e-12`` times its Cauchy bound).  The real part is eventually
    increasing when ``(-1)^(n_star + 1) c_j[2 n_star + 1] > 0``, decreasing
    when it is negative, and reported constant when every tested coefficient
    vanishes.  For N = 2 the exact criterion (b12 = 0, b21 = 0 or b11 = b22)
    decides constancy.  ``order`` sets how many coefficients are reported
    (default ``2 * n_cap + 1``); it does not affect the search.
    """
    unit, _ = _velocities_1d(spec)
    n_cap = int(n_cap)
    if n_cap < 1 or 2 * n_cap + 1 > MAX_ORDER:
        raise OrderTooLargeError(f"n_cap must be in 1..{(MAX_ORDER - 1) // 2}")
    n_report = 2 * n_cap + 1 if order is None else int(order)
    if not 1 <= n_report <= MAX_ORDER:
        raise OrderTooLargeError(f"order must be in 1..{MAX_ORDER}")
    n_needed = max(n_report, 2 * n_cap + 1)
    K_pert = validity_threshold(spec)
    base = (2.0 * unit.norm_inf / unit.velocity_gap) if unit.N > 1 else 0.0
    forced_constant = unit.N == 1 or (
        unit.N == 2 and _n2_eventually_constant(unit.B, unit.norm_inf)
    )
    branches = []
    for j in range(unit.N):
        coeffs = tuple(coefficient(spec, j, n) for n in range(1, n_needed + 1))
        n_star = None
        direction = "const"
        if not forced_constant:
            for n in range(1, n_cap + 1):
                c = coeffs[2 * n]
                if abs(c) > 1e-12 * coefficient_bound(spec, 2 * n + 1):
                    n_star = n
                    direction = "inc" if (-1) ** (n + 1) * c > 0 else "dec"
                    break
        branches.append(BranchReport(branch=j, coeffs=coeffs[:n_report], n_star=n_star,
                                     direction=direction))
    return PerturbationReport(branches=tuple(branches), K_pert=K_pert, coeff_bound_base=base)
