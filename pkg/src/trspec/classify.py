"""Stability verdicts for transport-reaction models (d = 1).

The sampled growth rates ``Sigma(k) = max Re sigma(M(k))`` tend to
``b = max_j B_jj`` as |k| grows.  An instability is a *Turing pattern* when
finitely many modes beat that limit and everything else, and a *hyperbolic
instability* when Sigma creeps up to a positive ``b`` from below so ever
higher frequencies dominate.
"""

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._validation import check_scalar
from .errors import (
    DegenerateVelocitiesError,
    DimensionMismatchError,
    NonPositiveLambdaError,
    NonPositiveLengthError,
    NonPositiveRatesError,
    PreconditionUnmetError,
)
from .linalg import eigenvalues
from .model import ModelSpec
from .modes import sigma_max, spectrum_table
from . import perturb

DEFAULT_TOL = 1e-9
MIN_WINDOW = 64


class Verdict(str, Enum):
    STABLE = "Stable"
    UNSTABLE_REACTION = "UnstableReaction"
    TURING = "TuringPattern"
    HYPERBOLIC = "HyperbolicInstability"
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ClassificationReport:
    """Outcome of :func:`classify`.

    ``sigma_profile`` is None for the closed-form N = 2 path.  ``directions``
    holds the eventual monotonicity of each branch ("inc", "dec", "const")
    when the perturbation analysis was available.
    """

    verdict: Verdict
    b: float
    dominant_modes: list
    K_max: int
    sigma_profile: object = None
    K_pert: object = None
    directions: tuple = ()
    warnings: list = field(default_factory=list)

    @property
    def sup_sigma(self):
        return None if self.sigma_profile is None else self.sigma_profile.sup

    @property
    def eventually_constant(self):
        return "const" in self.directions

    def to_dict(self, sigma_profile_csv=None):
        return {
            "verdict": self.verdict.value,
            "b": self.b,
            "dominant_modes": list(self.dominant_modes),
            "K_max": self.K_max,
            "warnings": list(self.warnings),
            "sigma_profile_csv": sigma_profile_csv,
        }


def _scale(B):
    norm = float(np.abs(B).sum(axis=1).max())
    return norm if norm > 0 else 1.0


def default_window(spec):
    """``max(64, 4 * K_pert)``; 64 when the perturbation threshold is undefined."""
    try:
        return max(MIN_WINDOW, 4 * perturb.validity_threshold(spec))
    except DegenerateVelocitiesError:
        return MIN_WINDOW


def _strictly_increasing(values, noise):
    diffs = np.diff(values)
    return bool(np.all(diffs > -noise) and values[-1] - values[0] > noise)


def classify(spec, K_max=None, tol=DEFAULT_TOL):
    """Classify a d = 1 model from its sampled spectrum on ``|k| <= K_max``.

    The checks run in order: unstable reaction matrix, stable, Turing
    pattern, hyperbolic instability; anything else is Indeterminate with a
    reason in ``warnings``.  ``tol`` is relative to ``||B||_inf``.
    """
    if spec.d != 1:
        raise DimensionMismatchError("classification is implemented for d = 1")
    B = spec.B
    scale = _scale(B)
    eps = tol * scale
    notes = []

    K_pert = None
    directions = ()
    try:
        K_pert = perturb.validity_threshold(spec)
        directions = tuple(b.direction for b in perturb.monotonicity(spec).branches)
    except DegenerateVelocitiesError:
        notes.append("degenerate velocities: verdict relies on sampled spectrum only")
    if K_max is None:
        K_max = max(MIN_WINDOW, 4 * K_pert) if K_pert else MIN_WINDOW
    K_max = int(K_max)
    if spec.N > 1 and "const" in directions:
        notes.append("eventually constant branch: Re lambda_j(k) = B_jj for large |k|")

    table = spectrum_table(spec, K_max)
    profile = sigma_max(table, atol=eps)
    diag = np.diag(B)
    b = float(diag.max())
    top = np.sort(diag)[::-1]
    if spec.N > 1 and top[0] - top[1] < eps:
        notes.append("largest diagonal entries of B coincide within tolerance")

    def report(verdict, dominant=()):
        return ClassificationReport(
            verdict=verdict, b=b, dominant_modes=list(dominant), K_max=K_max,
            sigma_profile=profile, K_pert=K_pert, directions=directions, warnings=notes,
        )

    growth_B = float(eigenvalues(B).values.real.max())
    if growth_B >= eps:
        return report(Verdict.UNSTABLE_REACTION)
    if profile.sup < -eps and b < 0:
        return report(Verdict.STABLE)
    if profile.sup > b + eps and profile.sup > 0:
        return report(Verdict.TURING, sorted(profile.argmax))

    if b > eps and profile.sup <= b + eps:
        sigma = profile.sigma
        ks = table.ks[:, 0]
        start = K_pert if K_pert is not None and K_pert < K_max else max(1, K_max // 2)
        tail = sigma[(ks >= start)]
        noise = 64 * np.finfo(float).eps * (scale + 2 * math.pi * K_max * np.abs(spec.velocities).max() / spec.L)
        if len(tail) >= 2 and _strictly_increasing(tail, noise):
            return report(Verdict.HYPERBOLIC)
        notes.append(f"Sigma(k) not strictly increasing on [{start}, {K_max}]")
    elif abs(profile.sup - b) <= eps:
        notes.append("sup Sigma lies within tolerance of b")
    else:
        notes.append("no classification rule applies")
    return report(Verdict.INDETERMINATE)


def classify_n2(spec):
    """Closed-form verdict for two components.

    With ``B = [[a, b12], [b21, d]]`` stable, the model is unstable exactly
    when ``v1 != v2`` and ``a > 0`` or ``d > 0``, and then the instability is
    hyperbolic.
    """
    if spec.N != 2 or spec.d != 1:
        raise DimensionMismatchError("classify_n2 needs N = 2 and d = 1")
    B = spec.B
    a, d = float(B[0, 0]), float(B[1, 1])
    trace = a + d
    det = a * d - float(B[0, 1] * B[1, 0])
    b = max(a, d)
    v = spec.velocities[:, 0]
    base = dict(b=b, dominant_modes=[], K_max=0)
    if not (trace < 0 and det > 0):
        return ClassificationReport(verdict=Verdict.UNSTABLE_REACTION, **base)
    if v[0] != v[1] and (a > 0 or d > 0):
        return ClassificationReport(verdict=Verdict.HYPERBOLIC, **base)
    return ClassificationReport(verdict=Verdict.STABLE, **base)


def turing_criterion(spec, K_max=None, tol=DEFAULT_TOL):
    """Sufficient condition for Turing patterns: ``c_{j*}[3] < 0`` at ``j* = argmax B_jj``.

    Only meaningful for a stable B and an unstable model; otherwise
    PreconditionUnmetError.  A False result draws no conclusion.
    """
    if spec.d != 1:
        raise DimensionMismatchError("turing_criterion needs d = 1")
    perturb.validity_threshold(spec)  # raises on equal velocities
    if eigenvalues(spec.B).values.real.max() >= 0:
        raise PreconditionUnmetError("B must be stable")
    window = default_window(spec) if K_max is None else int(K_max)
    if sigma_max(spectrum_table(spec, window)).sup <= 0:
        raise PreconditionUnmetError("model is stable on the sampled window")
    j_star = int(np.argmax(np.diag(spec.B)))
    c3 = perturb.coefficient(spec, j_star, 3)
    return bool(c3 < -tol * perturb.coefficient_bound(spec, 3))


@dataclass(frozen=True)
class QuarticCoefficients:
    """Lower coefficients of the monic quartic ``x^4 + a3 x^3 + a2 x^2 + a1 x + a0``."""

    a3: float
    a2: float
    a1: float
    a0: float

    def as_tuple(self):
        return (self.a3, self.a2, self.a1, self.a0)

    def roots(self):
        return np.roots([1.0, *self.as_tuple()])


def _check_rates(**values):
    for name, x in values.items():
        check_scalar(x, name, positive=True, error=NonPositiveRatesError)


def random_walk_quartic(v1, v2, mu1, mu2, nu, L=1.0, k=0):
    """Characteristic quartic of mode ``k`` for the two-species reaction random walk.

    Species i moves with speed ``v_i`` and turns at rate ``mu_i``; ``nu`` is
    the 2x2 reaction matrix ``[[nu1, nu2], [nu3, nu4]]``.
    """
    _check_rates(v1=v1, v2=v2, mu1=mu1, mu2=mu2)
    L = check_scalar(L, "L", positive=True, error=NonPositiveLengthError)
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (2, 2):
        raise DimensionMismatchError("nu must be a 2x2 matrix")
    nu1, nu2, nu3, nu4 = nu.ravel()
    det_n = nu1 * nu4 - nu2 * nu3
    q = 4 * math.pi ** 2 * k ** 2 / L ** 2
    q2 = 16 * math.pi ** 4 * k ** 4 / L ** 4
    s = mu1 + mu2
    a3 = 2 * s - (nu1 + nu4)
    a2 = q * (v1 ** 2 + v2 ** 2) - 2 * s * (nu1 + nu4) + 4 * mu1 * mu2 + det_n
    a1 = (q * (v1 ** 2 * (2 * mu2 - nu4) + v2 ** 2 * (2 * mu1 - nu1))
          - 4 * (nu1 + nu4) * mu1 * mu2 + 2 * s * det_n)
    a0 = (q2 * v1 ** 2 * v2 ** 2 - 2 * q * (v1 ** 2 * nu4 * mu2 + v2 ** 2 * nu1 * mu1)
          + 4 * mu1 * mu2 * det_n)
    return QuarticCoefficients(float(a3), float(a2), float(a1), float(a0))


def random_walk_block_spec(v1, v2, mu1, mu2, nu, L=1.0):
    """Four-component model (right movers, then left movers) behind :func:`random_walk_quartic`."""
    _check_rates(v1=v1, v2=v2, mu1=mu1, mu2=mu2)
    nu = np.asarray(nu, dtype=float)
    M = np.diag([mu1, mu2])
    B = np.block([[-M + nu / 2, M + nu / 2], [M + nu / 2, -M + nu / 2]])
    return ModelSpec.create([v1, v2, -v1, -v2], B, L)


def routh_hurwitz_quartic(c):
    """Routh-Hurwitz test for a monic quartic; returns ``(all_negative, margins)``.

    >>> routh_hurwitz_quartic((4, 6, 4, 1))
    (True, (4.0, 20.0, 64.0, 64.0))
    """
    a3, a2, a1, a0 = (float(x) for x in (c.as_tuple() if isinstance(c, QuarticCoefficients) else c))
    m1 = a3
    m2 = a2 * a3 - a1
    m3 = m2 * a1 - a3 ** 2 * a0
    m4 = a0 * m3
    margins = (m1, m2, m3, m4)
    return all(m > 0 for m in margins), margins


def goldstein_kac_rate(Lambda, v, L=1.0):
    """Optimal decay rate towards the mean for the Goldstein-Kac model on a torus of side L.

    ``-Lambda`` when ``Lambda^2 <= 4 pi^2 v^2 / L^2``, otherwise
    ``-Lambda + sqrt(Lambda^2 - 4 pi^2 v^2 / L^2)``.

    >>> round(goldstein_kac_rate(10, 0.5), 4)
    -0.5063
    """
    Lambda = check_scalar(Lambda, "Lambda")
    v = check_scalar(v, "v", positive=True, error=NonPositiveRatesError)
    L = check_scalar(L, "L", positive=True, error=NonPositiveLengthError)
    if Lambda <= 0:
        raise NonPositiveLambdaError(
            f"Lambda = {Lambda} <= 0: the model does not converge to its mean",
            growth_rate=max(0.0, -2.0 * Lambda),
        )
    w2 = 4 * math.pi ** 2 * v ** 2 / L ** 2
    if Lambda ** 2 <= w2:
        return -Lambda
    return -Lambda + math.sqrt(Lambda ** 2 - w2)


def goldstein_kac_spec(Lambda, v, L=1.0):
    """Two-direction model with turning rate Lambda and speeds ``(v, -v)``."""
    return ModelSpec.create([v, -v], [[-Lambda, Lambda], [Lambda, -Lambda]], L)
