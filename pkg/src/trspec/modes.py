"""Mode matrices, sampled generator spectra and branch tracking.

On the unit torus the Fourier mode ``k`` of a transport-reaction model evolves
under ``M(k) = -2 pi i diag(k . v_1, ..., k . v_N) + B``.  The generator
spectrum is the closure of the union of the spectra of all ``M(k)``; here it
is sampled on the box ``|k|_inf <= K_max``.
"""

import itertools
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import AmbiguousMatchWarning, DimensionMismatchError
from .linalg import eigvals_stack
from .model import rescale_to_unit_torus

_TIE_TOL = 1e-12
_BRUTE_FORCE_MAX_N = 7


def mode_window(d, K_max):
    """All ``k`` with ``|k|_inf <= K_max`` in ascending lexicographic order, shape (m, d)."""
    K_max = int(K_max)
    if K_max < 0:
        raise ValueError("K_max must be non-negative")
    axis = range(-K_max, K_max + 1)
    return np.array(list(itertools.product(axis, repeat=d)), dtype=int).reshape(-1, d)


def mode_matrices(spec, ks):
    """Stack of mode matrices ``M(k)`` for the rows of ``ks`` (shape (m, d))."""
    unit = rescale_to_unit_torus(spec)
    ks = np.asarray(ks, dtype=float).reshape(-1, unit.d)
    phases = ks @ unit.velocities.T  # (m, N): k . v_j
    out = np.broadcast_to(unit.B.astype(complex), (len(ks), unit.N, unit.N)).copy()
    idx = np.arange(unit.N)
    out[:, idx, idx] += -2j * math.pi * phases
    return out


def mode_matrix(spec, k):
    """``M(k) = -2 pi i diag(k . v_j) + B`` for a single mode index ``k``.

    The spec is rescaled to the unit torus first, so ``v`` means ``v / L``.
    """
    k = np.atleast_1d(np.asarray(k))
    if k.shape != (spec.d,):
        raise DimensionMismatchError(f"mode index must have {spec.d} entries, got {k.shape}")
    return mode_matrices(spec, k[None])[0]


@dataclass(frozen=True)
class SpectrumTable:
    """Eigenvalues of ``M(k)`` for every ``k`` of a window.

    ``lambdas[r, j]`` is the eigenvalue on branch ``j`` at mode ``ks[r]``.
    Branch labels carry meaning only when ``tracked`` is true.
    """

    ks: np.ndarray
    lambdas: np.ndarray
    K_max: int
    tracked: bool = False

    @property
    def N(self):
        return self.lambdas.shape[1]

    @property
    def d(self):
        return self.ks.shape[1]

    def index_of(self, k):
        k = tuple(np.atleast_1d(k).tolist())
        K = self.K_max
        if any(abs(c) > K for c in k):
            raise KeyError(k)
        idx = 0
        for c in k:
            idx = idx * (2 * K + 1) + (c + K)
        return idx

    def at(self, k):
        """Eigenvalues at mode ``k``."""
        return self.lambdas[self.index_of(k)]

    def records(self):
        """Iterate ``(k, branch, lambda)`` triples in table order."""
        for k, row in zip(self.ks, self.lambdas):
            for j, lam in enumerate(row):
                yield tuple(int(c) for c in k), j, complex(lam)


def spectrum_table(spec, K_max):
    """Eigenvalue sample of the generator over the window ``|k|_inf <= K_max``.

    Every mode matrix is solved independently (no symmetry shortcut), in
    ascending lexicographic order of ``k``.
    """
    ks = mode_window(spec.d, K_max)
    lambdas = eigvals_stack(mode_matrices(spec, ks))
    return SpectrumTable(ks=ks, lambdas=lambdas, K_max=int(K_max))


def accumulation_abscissas(spec):
    """Real parts ``B_jj`` at which the sampled spectrum accumulates as |k| grows."""
    return np.sort(np.diag(spec.B))


@dataclass(frozen=True)
class SigmaProfile:
    """Per-mode growth rates ``Sigma(k) = max Re lambda`` over a window."""

    ks: np.ndarray
    sigma: np.ndarray
    sup: float
    argmax: list

    def as_dict(self):
        """Mapping ``k -> Sigma(k)`` (plain ints as keys when d = 1)."""
        if self.ks.shape[1] == 1:
            return {int(k[0]): float(s) for k, s in zip(self.ks, self.sigma)}
        return {tuple(int(c) for c in k): float(s) for k, s in zip(self.ks, self.sigma)}


def sigma_max(table, atol=None):
    """Growth rate per mode, its supremum and the modes attaining it.

    Modes within ``atol`` of the supremum all count as maximisers; the
    default is ``1e-9 * max(1, |sup|)``.
    """
    if len(table.ks) == 0:
        raise ValueError("empty spectrum table")
    sigma = table.lambdas.real.max(axis=1)
    sup = float(sigma.max())
    if atol is None:
        atol = 1e-9 * max(1.0, abs(sup))
    hits = np.nonzero(sigma >= sup - atol)[0]
    if table.d == 1:
        argmax = [int(table.ks[i, 0]) for i in hits]
    else:
        argmax = [tuple(int(c) for c in table.ks[i]) for i in hits]
    return SigmaProfile(ks=table.ks, sigma=sigma, sup=sup, argmax=argmax)


def _best_matching(prev, cur, perms):
    """Permutation p minimising sum |cur[p[j]] - prev[j]|; warns on ties."""
    cost = np.abs(prev[:, None] - cur[None, :])
    if perms is None:
        _, cols = linear_sum_assignment(cost)
        return cols
    totals = cost[np.arange(len(prev))[None, :], perms].sum(axis=1)
    order = np.argsort(totals, kind="stable")
    if len(order) > 1 and totals[order[1]] - totals[order[0]] <= _TIE_TOL:
        warnings.warn(
            "branch matching tie within 1e-12; taking the first candidate",
            AmbiguousMatchWarning,
            stacklevel=3,
        )
    return perms[order[0]]


def track_branches(table, spec, anchor_from=None):
    """Relabel eigenvalues so branches vary continuously in k (d = 1).

    Modes with ``|k| >= anchor_from`` are labelled by proximity to the
    large-|k| asymptote ``B_jj - 2 pi i k v_j`` of branch j; the remaining
    modes are labelled by minimal-sum matching against the neighbouring mode
    further out.  Without an anchor threshold the labels start from the
    eigenvalues of B at k = 0 (sorted by decreasing real part) and are
    propagated outwards.
    """
    if table.d != 1:
        raise DimensionMismatchError("branch tracking is implemented for d = 1")
    unit = rescale_to_unit_torus(spec)
    n = table.N
    perms = (np.array(list(itertools.permutations(range(n))))
             if n <= _BRUTE_FORCE_MAX_N else None)
    K = table.K_max
    out = table.lambdas.copy()
    v = unit.velocities[:, 0]
    bjj = np.diag(unit.B)

    def row(k):
        return k + K

    if anchor_from is not None and anchor_from <= K and n > 1:
        for k in list(range(K, anchor_from - 1, -1)) + list(range(-K, -anchor_from + 1)):
            target = bjj - 2j * math.pi * k * v
            out[row(k)] = table.lambdas[row(k)][_best_matching(target, table.lambdas[row(k)], perms)]
        for k in range(anchor_from - 1, -1, -1):
            out[row(k)] = table.lambdas[row(k)][_best_matching(out[row(k + 1)], table.lambdas[row(k)], perms)]
        for k in range(-anchor_from + 1, 0):
            out[row(k)] = table.lambdas[row(k)][_best_matching(out[row(k - 1)], table.lambdas[row(k)], perms)]
    else:
        zero = table.lambdas[row(0)]
        out[row(0)] = zero[np.argsort(-zero.real, kind="stable")]
        for k in range(1, K + 1):
            for kk, prev in ((k, k - 1), (-k, -k + 1)):
                cur = table.lambdas[row(kk)]
                out[row(kk)] = cur[_best_matching(out[row(prev)], cur, perms)]
    return replace(table, lambdas=out, tracked=True)


@dataclass(frozen=True)
class SemigroupSpectrumSample:
    """Points ``exp(t lambda)`` of the semigroup spectrum at time t."""

    t: float
    points: np.ndarray
    sources: np.ndarray


def semigroup_spectrum(table, t):
    """Map the sampled generator spectrum through ``lambda -> exp(t lambda)``."""
    sources = table.lambdas.reshape(-1)
    return SemigroupSpectrumSample(t=float(t), points=np.exp(float(t) * sources), sources=sources)
