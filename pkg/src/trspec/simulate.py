"""Exact Fourier-space evolution of transport-reaction models.

A real field ``u`` on the torus is stored by its truncated Fourier
coefficients ``u_hat(k)``, ``|k|_inf <= K``.  Each mode evolves
independently, ``u_hat(k, t) = exp(t M(k)) u_hat(k, 0)``, so there is no
time-stepping error; the only approximation is the cutoff K.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_scalar
from .classify import goldstein_kac_spec
from .errors import (
    ConjugateSymmetryError,
    DegenerateDataError,
    DimensionMismatchError,
    GridTooCoarseError,
    ImaginaryResidueError,
    OddGridError,
)
from .linalg import expm, expm_stack
from .model import neumann_extend, neumann_grid
from .modes import mode_matrices, mode_window, sigma_max, spectrum_table

_REALITY_TOL = 1e-9
_RESIDUE_TOL = 1e-10


def _mirror(coeffs):
    """``c(-k)`` laid out like ``c(k)``: reverse every mode axis."""
    d = coeffs.ndim - 1
    return coeffs[(slice(None),) + (slice(None, None, -1),) * d]


@dataclass(frozen=True, eq=False)
class FourierState:
    """Coefficients of a real N-component field on the unit torus.

    ``coeffs[j, k_1 + K, ..., k_d + K]`` is the coefficient of component j
    at mode k.  Construct through :meth:`from_coeffs`, which enforces the
    reality condition ``u_hat(-k) = conj(u_hat(k))``.
    """

    K: int
    coeffs: np.ndarray

    @classmethod
    def from_coeffs(cls, coeffs, tol=_REALITY_TOL):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim < 2:
            raise DimensionMismatchError("coeffs must have shape (N, 2K+1, ...)")
        side = c.shape[1]
        if side % 2 == 0 or any(s != side for s in c.shape[1:]):
            raise DimensionMismatchError(f"mode axes must all have odd length 2K+1, got {c.shape[1:]}")
        if not np.all(np.isfinite(c)):
            raise ConjugateSymmetryError("coefficients must be finite")
        partner = np.conj(_mirror(c))
        scale = max(float(np.abs(c).max(initial=0.0)), 1e-300)
        if np.abs(c - partner).max(initial=0.0) > tol * scale:
            raise ConjugateSymmetryError("coefficients violate u_hat(-k) = conj(u_hat(k))")
        return cls(K=(side - 1) // 2, coeffs=0.5 * (c + partner))

    @classmethod
    def zeros(cls, N, K, d=1):
        return cls(K=int(K), coeffs=np.zeros((N,) + (2 * int(K) + 1,) * d, dtype=complex))

    @property
    def N(self):
        return self.coeffs.shape[0]

    @property
    def d(self):
        return self.coeffs.ndim - 1

    def mode(self, k):
        """Coefficient vector at mode ``k``."""
        idx = tuple(int(c) + self.K for c in np.atleast_1d(k))
        return self.coeffs[(slice(None),) + idx]

    def flat(self):
        """Coefficients as ``(N, m)`` in the lexicographic order of :func:`mode_window`."""
        return self.coeffs.reshape(self.N, -1)

    def norm(self):
        """Root-mean-square norm of the field (Parseval)."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))


def sample_random_ic(spec, K, seed=None, amplitude=1e-4):
    """Random real initial data with ``u_hat_j(k) ~ N(0, amplitude * (|k| + 1)^-2)``.

    For ``k != 0`` the variance is split evenly between real and imaginary
    parts; ``u_hat(0)`` is real and ``u_hat(-k)`` is the conjugate of
    ``u_hat(k)``.  ``|k|`` is the Euclidean norm when d > 1.  The draw is
    deterministic for a given ``(seed, K, N, d)``.
    """
    K = int(K)
    if K < 1:
        raise ValueError("K must be at least 1")
    amplitude = check_scalar(amplitude, "amplitude")
    if amplitude < 0:
        raise ValueError("amplitude must be non-negative")
    ks = mode_window(spec.d, K)
    m = len(ks)
    var = amplitude / (np.linalg.norm(ks, axis=1) + 1.0) ** 2
    rng = np.random.default_rng(seed)
    re = rng.standard_normal((spec.N, m))
    im = rng.standard_normal((spec.N, m))
    c = np.sqrt(var / 2) * (re + 1j * im)
    centre = m // 2
    c[:, centre] = np.sqrt(var[centre]) * re[:, centre]
    c[:, :centre] = np.conj(c[:, :centre:-1])
    return FourierState(K=K, coeffs=c.reshape((spec.N,) + (2 * K + 1,) * spec.d))


def propagators(spec, K, t):
    """``exp(t M(k))`` for every mode of the window, shape ``(m, N, N)``."""
    return expm_stack(mode_matrices(spec, mode_window(spec.d, K)), t)


def evolve(spec, state, t):
    """State at time ``t`` (negative times run the group backwards)."""
    if state.N != spec.N or state.d != spec.d:
        raise DimensionMismatchError("state and model disagree on N or d")
    t = check_scalar(t, "t")
    E = propagators(spec, state.K, t)
    new = np.einsum("mij,jm->im", E, state.flat())
    new = new.reshape(state.coeffs.shape)
    return FourierState(K=state.K, coeffs=0.5 * (new + np.conj(_mirror(new))))


def default_grid(K):
    """Smallest power of two that is at least ``2 * (2K + 2)``."""
    return 1 << (2 * (2 * int(K) + 2) - 1).bit_length()


def _embed(state, n):
    """Place the coefficients into an FFT-ordered ``(N, n, ..., n)`` array."""
    K = state.K
    idx = np.arange(-K, K + 1) % n
    out = np.zeros((state.N,) + (n,) * state.d, dtype=complex)
    out[np.ix_(range(state.N), *([idx] * state.d))] = state.coeffs
    return out


def synthesize(state, grid_points=None, L=1.0):
    """Sample the field on the uniform grid ``x_i = i L / n`` (per axis).

    Returns ``(x, u)`` with ``u`` of shape ``(N, n, ..., n)``.
    """
    n = default_grid(state.K) if grid_points is None else int(grid_points)
    if n < 2 * state.K + 2:
        raise GridTooCoarseError(f"need at least {2 * state.K + 2} grid points, got {n}")
    axes = tuple(range(1, state.d + 1))
    u = np.fft.ifftn(_embed(state, n), axes=axes) * n ** state.d
    residue = float(np.abs(u.imag).max(initial=0.0))
    if residue > _RESIDUE_TOL * max(state.norm(), 1e-300) * math.sqrt(np.prod(state.coeffs.shape[1:])):
        raise ImaginaryResidueError(f"imaginary residue {residue:g} in synthesized field")
    return np.arange(n) * (L / n), u.real


def evaluate(state, x, L=1.0):
    """Field values at arbitrary points ``x`` (d = 1); shape ``(N, len(x))``."""
    if state.d != 1:
        raise DimensionMismatchError("evaluate supports d = 1")
    x = np.atleast_1d(np.asarray(x, dtype=float)) / L
    k = np.arange(-state.K, state.K + 1)
    phase = np.exp(2j * math.pi * np.outer(k, x))
    return (state.coeffs @ phase).real


def from_samples(values, K=None, offset=0.0):
    """Trigonometric interpolant of samples on ``x_i = (i + offset) / n`` (d = 1).

    With ``K = n / 2`` (the default for even n) the Nyquist coefficient is
    split evenly between ``+K`` and ``-K`` so the interpolant is real and
    reproduces the samples.
    """
    u = np.atleast_2d(np.asarray(values, dtype=float))
    n = u.shape[1]
    K = n // 2 if K is None else int(K)
    if K > n // 2:
        raise GridTooCoarseError(f"K = {K} exceeds n / 2 = {n // 2}")
    freqs = np.arange(-K, K + 1)
    a = np.fft.fft(u, axis=1) / n
    a = a[:, freqs % n] * np.exp(-2j * math.pi * freqs * offset / n)
    if n % 2 == 0 and K == n // 2:
        nyq = a[:, -1].copy()
        a[:, -1] = nyq / 2
        a[:, 0] = np.conj(nyq / 2)
    return FourierState.from_coeffs(a)


@dataclass(frozen=True)
class Observables:
    """Summary of a state at time ``t``.

    ``averages`` are spatial means (the k = 0 coefficients); ``l2_norm`` is
    the root-mean-square norm; extrema are taken on the synthesis grid.
    """

    t: float
    averages: np.ndarray
    l2_norm: float
    min_value: float
    minima: np.ndarray
    maxima: np.ndarray


def observables(spec, state, t=0.0, grid_points=None):
    """Observables of ``state`` (already evolved to time ``t``)."""
    _, u = synthesize(state, grid_points, spec.L)
    flat = u.reshape(state.N, -1)
    zero = state.mode(np.zeros(state.d, dtype=int))
    return Observables(
        t=float(t),
        averages=zero.real.copy(),
        l2_norm=state.norm(),
        min_value=float(flat.min()),
        minima=flat.min(axis=1),
        maxima=flat.max(axis=1),
    )


def growth_bound_estimate(spec, K):
    """Largest real part over the sampled spectrum ``|k| <= K``."""
    return sigma_max(spectrum_table(spec, K)).sup


def rescaled_trajectory(spec, state, times, c=0.0, grid_points=None):
    """Fields ``exp(-c t) u(t)`` at each time.

    ``c = "auto"`` uses the largest sampled growth rate so the output stays
    of order one.  Returns ``(x, fields, c)`` with ``fields`` of shape
    ``(len(times), N, n, ...)``.
    """
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be sorted ascending")
    rate = growth_bound_estimate(spec, state.K) if c == "auto" else check_scalar(c, "c")
    fields = []
    x = None
    for t in times:
        x, u = synthesize(evolve(spec, state, t), grid_points, spec.L)
        fields.append(math.exp(-rate * t) * u)
    return x, np.array(fields), rate


def _deviation_from_mean(state):
    c = state.coeffs.copy()
    zero = c[:, state.K]
    c[:, state.K] = zero - zero.mean()
    return float(np.sqrt(np.sum(np.abs(c) ** 2)))


def goldstein_kac_convergence_fit(Lambda, v, L, state, t_grid):
    """Fitted exponential rate of ``||u(t) - mean projection||`` for the Goldstein-Kac model.

    The mean projection replaces both components by half their total mass.
    Returns the least-squares slope of the log-norm over ``t_grid``.
    """
    spec = goldstein_kac_spec(Lambda, v, L)
    if state.N != 2:
        raise DimensionMismatchError("Goldstein-Kac states have two components")
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 2:
        raise DegenerateDataError("need at least two times to fit a rate")
    norms = np.array([_deviation_from_mean(evolve(spec, state, t)) for t in t_grid])
    if np.any(norms <= np.finfo(float).tiny) or not np.all(np.isfinite(norms)):
        raise DegenerateDataError("deviation from the mean vanishes or underflows")
    slope, _ = np.polyfit(t_grid, np.log(norms), 1)
    return float(slope)


@dataclass(frozen=True)
class NeumannResult:
    """Neumann solution on the cell-centred grid of (0, L).

    ``traces`` maps "alpha(0)", "beta(0)", "alpha(L)", "beta(L)" to arrays
    of per-species boundary values.
    """

    x: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    traces: dict
    periodic_state: FourierState


def neumann_initial_state(block, alpha, beta):
    """Fourier state of the reflected extension of ``(alpha, beta)`` on (0, 2L)."""
    ext_a, ext_b = neumann_extend(block, alpha, beta)
    return from_samples(np.vstack([ext_a, ext_b]), offset=0.5)


def simulate_neumann(block, alpha, beta, t):
    """Evolve a symmetric two-direction model with reflecting ends alpha = beta.

    The data on the cell-centred grid of (0, L) (even size n) is extended to
    (0, 2L), evolved as a periodic model and restricted back.
    """
    a = np.atleast_2d(np.asarray(alpha, dtype=float))
    n = a.shape[1]
    if n % 2:
        raise OddGridError(f"grid size must be even, got {n}")
    spec = block.periodic_spec()
    state = evolve(spec, neumann_initial_state(block, alpha, beta), t)
    x = neumann_grid(block.L, n)
    ns = block.n_species
    inner = evaluate(state, x, spec.L)
    ends = evaluate(state, [0.0, block.L], spec.L)
    traces = {
        "alpha(0)": ends[:ns, 0], "beta(0)": ends[ns:, 0],
        "alpha(L)": ends[:ns, 1], "beta(L)": ends[ns:, 1],
    }
    return NeumannResult(x=x, alpha=inner[:ns], beta=inner[ns:], traces=traces, periodic_state=state)


def averages_law(spec, initial_averages, t):
    """Spatial means at time t predicted by ``exp(t B)``."""
    return (expm(spec.B, t) @ np.asarray(initial_averages, dtype=complex)).real
