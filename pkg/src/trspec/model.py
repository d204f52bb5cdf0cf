"""Transport-reaction models: definition, validation, transforms and predicates.

A model is the linear system ``u_t + diag(v) . grad u = B u`` on the torus of
side length ``L`` in ``d`` space dimensions with ``N`` components.
"""

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Rational

import numpy as np

from ._validation import check_finite
from .errors import (
    DimensionMismatchError,
    IrrationalInputUnsupportedError,
    NonFiniteError,
    NonPositiveDeltaError,
    NonPositiveLengthError,
    OddGridError,
)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Parameters of a transport-reaction model.

    Parameters
    ----------
    velocities : array_like, shape (N, d)
        Transport velocity of each component.  A 1-D sequence of length N is
        read as ``d = 1``.
    B : array_like, shape (N, N)
        Real reaction matrix.
    L : float
        Side length of the torus.

    Use :func:`validate` (or :meth:`ModelSpec.create`) to build instances;
    the constructor itself performs no checks.
    """

    velocities: np.ndarray
    B: np.ndarray
    L: float = 1.0
    velocities_exact: tuple = field(default=None, repr=False)

    @classmethod
    def create(cls, velocities, B, L=1.0, velocities_exact=None):
        v = np.asarray(velocities, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        return validate(cls(velocities=v, B=np.asarray(B, dtype=float), L=L,
                            velocities_exact=velocities_exact))

    @property
    def N(self):
        return self.B.shape[0]

    @property
    def d(self):
        return self.velocities.shape[1]

    @property
    def norm_inf(self):
        """Maximum absolute row sum of B."""
        return float(np.abs(self.B).sum(axis=1).max())

    @property
    def velocity_gap(self):
        """``min_{i != j} |v_i - v_j|`` for d = 1 (inf when N = 1)."""
        if self.d != 1:
            raise DimensionMismatchError("velocity gap is defined for d = 1 only")
        v = self.velocities[:, 0]
        if len(v) < 2:
            return math.inf
        diff = np.abs(v[:, None] - v[None, :])
        return float(diff[~np.eye(len(v), dtype=bool)].min())

    @property
    def velocity_spread(self):
        """``max_{i != j} |v_i - v_j|`` for d = 1."""
        v = self.velocities[:, 0]
        return float(v.max() - v.min())

    def to_dict(self):
        out = {
            "d": self.d,
            "N": self.N,
            "L": float(self.L),
            "velocities": self.velocities.tolist(),
            "B": self.B.tolist(),
        }
        if self.velocities_exact is not None:
            out["velocities_exact"] = [[str(q) for q in row] for row in self.velocities_exact]
        return out

    def __eq__(self, other):
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return (self.L == other.L
                and np.array_equal(self.velocities, other.velocities)
                and np.array_equal(self.B, other.B))

    __hash__ = None


def validate(spec):
    """Check a :class:`ModelSpec` and return a normalized copy.

    Velocities become a float array of shape (N, d) and ``B`` a float array of
    shape (N, N).
    """
    v = np.asarray(spec.velocities, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    B = np.asarray(spec.B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 1:
        raise DimensionMismatchError(f"B must be a square N x N matrix, got shape {B.shape}")
    if v.ndim != 2 or v.shape[0] != B.shape[0] or v.shape[1] < 1:
        raise DimensionMismatchError(
            f"velocities must have shape (N, d) = ({B.shape[0]}, d), got {v.shape}"
        )
    check_finite(v, "velocities")
    check_finite(B, "B")
    try:
        L = float(spec.L)
    except (TypeError, ValueError) as exc:
        raise NonFiniteError(f"L must be a number, got {spec.L!r}") from exc
    if not math.isfinite(L):
        raise NonFiniteError("L must be finite")
    if L <= 0:
        raise NonPositiveLengthError(f"L must be positive, got {L}")
    return ModelSpec(velocities=v, B=B, L=L, velocities_exact=spec.velocities_exact)


def from_dict(data):
    """Build a validated spec from the model JSON object.

    ``d`` and ``N`` are optional but checked against the arrays when present.
    """
    try:
        velocities = data["velocities"]
        B = data["B"]
    except KeyError as exc:
        raise DimensionMismatchError(f"model is missing field {exc.args[0]!r}") from exc
    exact = data.get("velocities_exact")
    if exact is not None:
        exact = tuple(tuple(parse_rational(q) for q in _as_rows(row)) for row in exact)
    spec = ModelSpec.create(velocities, B, data.get("L", 1.0), velocities_exact=exact)
    if "N" in data and int(data["N"]) != spec.N:
        raise DimensionMismatchError(f"N = {data['N']} but B is {spec.N} x {spec.N}")
    if "d" in data and int(data["d"]) != spec.d:
        raise DimensionMismatchError(f"d = {data['d']} but velocities have dimension {spec.d}")
    return spec


def _as_rows(row):
    return row if isinstance(row, (list, tuple)) else [row]


def rescale_to_unit_torus(spec):
    """Equivalent model on the unit torus: velocities divided by L, L = 1.

    The mode matrices, hence all spectra, of the two models coincide.
    """
    if spec.L == 1.0:
        return spec
    exact = spec.velocities_exact
    if exact is not None:
        Lq = Fraction(spec.L)
        exact = tuple(tuple(q / Lq for q in row) for row in exact)
    return replace(spec, velocities=spec.velocities / spec.L, L=1.0, velocities_exact=exact)


def apply_killing(spec, delta):
    """Add a uniform death rate: ``B -> B - delta * I``."""
    delta = float(delta)
    if not math.isfinite(delta) or delta <= 0:
        raise NonPositiveDeltaError(f"delta must be positive, got {delta}")
    return replace(spec, B=spec.B - delta * np.eye(spec.N))


def positivity_check(spec):
    """Whether the semigroup is positive, i.e. every off-diagonal entry of B is >= 0.

    Returns ``(ok, offending)`` where ``offending`` lists the zero-based
    ``(i, j)`` positions of negative off-diagonal entries.
    """
    B = spec.B
    mask = (B < 0) & ~np.eye(spec.N, dtype=bool)
    offending = [(int(i), int(j)) for i, j in zip(*np.nonzero(mask))]
    return not offending, offending


@dataclass(frozen=True)
class ConservationBasis:
    """Basis of ker(B^T); each vector y gives a conserved quantity <y, mean u>."""

    vectors: np.ndarray
    mass_conserving: bool


def _null_space(a, tol):
    """Null space of ``a`` by Gaussian elimination with partial pivoting."""
    r = np.array(a, dtype=float, copy=True)
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        p = row + int(np.argmax(np.abs(r[row:, col])))
        if abs(r[p, col]) <= tol:
            continue
        r[[row, p]] = r[[p, row]]
        r[row] /= r[row, col]
        others = np.arange(rows) != row
        r[others] -= np.outer(r[others, col], r[row])
        pivots.append(col)
        row += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        y = np.zeros(cols)
        y[f] = 1.0
        for i, pc in enumerate(pivots):
            y[pc] = -r[i, f]
        basis.append(y)
    return np.array(basis).reshape(len(basis), cols)


def conservation_basis(spec):
    """Basis of ker(B^T) and whether total mass is conserved."""
    B = spec.B
    scale = float(np.abs(B).sum(axis=1).max()) if B.size else 0.0
    vectors = _null_space(B.T, 1e-12 * max(scale, np.finfo(float).tiny))
    ones = np.ones(spec.N)
    if len(vectors) == 0:
        mass = False
    else:
        coef, *_ = np.linalg.lstsq(vectors.T, ones, rcond=None)
        mass = bool(np.linalg.norm(vectors.T @ coef - ones) <= 1e-10 * math.sqrt(spec.N))
    return ConservationBasis(vectors=vectors, mass_conserving=mass)


def parse_rational(value):
    """Exact rational from an int, Fraction or ``"p/q"`` string; floats are refused."""
    if isinstance(value, bool):
        raise IrrationalInputUnsupportedError("booleans are not velocities")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise IrrationalInputUnsupportedError(f"cannot parse {value!r} as p/q") from exc
    raise IrrationalInputUnsupportedError(
        f"velocity {value!r} is not an exact rational; pass 'p/q' strings or Fractions"
    )


def _rational_period(entries):
    """Smallest t > 0 with t * q integral for every nonzero rational q."""
    nums = [abs(q.numerator) for q in entries if q != 0]
    dens = [q.denominator for q in entries if q != 0]
    if not nums:
        raise DimensionMismatchError("transport periodicity needs non-vanishing velocities")
    # t must be a common multiple of den_i / num_i; lcm of fractions in lowest terms
    top = math.lcm(*dens)
    bottom = math.gcd(*nums)
    return Fraction(top, bottom)


@dataclass(frozen=True)
class PeriodicityReport:
    component_periodic: tuple
    component_periods: tuple
    jointly_periodic: bool
    period: Fraction


def transport_periodicity(velocities):
    """Per-component and joint transport periodicity for exact rational velocities.

    ``velocities`` is a sequence of N vectors whose entries are ints,
    Fractions or ``"p/q"`` strings.  A component is periodic when some
    ``t > 0`` maps its velocity into the integer lattice; the minimal such
    ``t`` is its period.  Floats are refused because rationality cannot be
    decided in floating point.
    """
    rows = [tuple(parse_rational(q) for q in _as_rows(v)) for v in velocities]
    periods = tuple(_rational_period(r) for r in rows)
    joint = _rational_period([q for r in rows for q in r])
    return PeriodicityReport(
        component_periodic=tuple(True for _ in rows),
        component_periods=periods,
        jointly_periodic=True,
        period=joint,
    )


@dataclass(frozen=True)
class SymmetricBlockModel:
    """Left/right moving species with equal speeds and block-symmetric reactions.

    Species i moves right with speed ``Gamma[i]`` (density alpha_i) and left
    with the same speed (density beta_i).  The reaction matrix is
    ``[[B1, B2], [B2, B1]]``.  ``L`` is the length of the interval (0, L)
    carrying reflecting boundary conditions alpha = beta at both ends.
    """

    Gamma: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    L: float = 1.0

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.Gamma, dtype=float))
        b1 = np.atleast_2d(np.asarray(self.B1, dtype=float))
        b2 = np.atleast_2d(np.asarray(self.B2, dtype=float))
        n = len(g)
        if b1.shape != (n, n) or b2.shape != (n, n):
            raise DimensionMismatchError("B1 and B2 must be N_species x N_species")
        if np.any(g <= 0):
            raise DimensionMismatchError(
                "speeds must be positive; unequal or signed left/right speeds are not supported"
            )
        check_finite(g, "Gamma")
        check_finite(b1, "B1")
        check_finite(b2, "B2")
        if not (math.isfinite(self.L) and self.L > 0):
            raise NonPositiveLengthError(f"L must be positive, got {self.L}")
        object.__setattr__(self, "Gamma", g)
        object.__setattr__(self, "B1", b1)
        object.__setattr__(self, "B2", b2)
        object.__setattr__(self, "L", float(self.L))

    @property
    def n_species(self):
        return len(self.Gamma)

    def periodic_spec(self):
        """The equivalent periodic model on the torus of length 2L."""
        v = np.concatenate([self.Gamma, -self.Gamma])
        B = np.block([[self.B1, self.B2], [self.B2, self.B1]])
        return ModelSpec.create(v, B, 2.0 * self.L)


def neumann_grid(L, n):
    """Cell-centred grid ``x_i = (i + 1/2) L / n`` on (0, L)."""
    return (np.arange(n) + 0.5) * (L / n)


def neumann_extend(block, alpha, beta):
    """Reflect ``(alpha, beta)`` sampled on (0, L) to a state on (0, 2L).

    ``alpha`` and ``beta`` have shape ``(N_species, n)`` (or ``(n,)`` for one
    species) on the cell-centred grid of :func:`neumann_grid`, ``n`` even.
    On (L, 2L) the extension is ``alpha~(x) = beta(2L - x)`` and
    ``beta~(x) = alpha(2L - x)``, which on this grid is an index reversal.
    Returns ``(alpha~, beta~)`` of shape ``(N_species, 2n)``.
    """
    a = np.atleast_2d(np.asarray(alpha, dtype=float))
    b = np.atleast_2d(np.asarray(beta, dtype=float))
    if a.shape != b.shape or a.shape[0] != block.n_species:
        raise DimensionMismatchError(
            f"alpha and beta must both have shape ({block.n_species}, n)"
        )
    n = a.shape[1]
    if n % 2:
        raise OddGridError(f"grid size must be even, got {n}")
    ext_a = np.concatenate([a, b[:, ::-1]], axis=1)
    ext_b = np.concatenate([b, a[:, ::-1]], axis=1)
    return ext_a, ext_b
