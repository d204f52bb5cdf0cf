"""Spectral analysis of linear transport-reaction systems on the torus."""

from .classify import (
    ClassificationReport,
    QuarticCoefficients,
    Verdict,
    classify,
    classify_n2,
    goldstein_kac_rate,
    goldstein_kac_spec,
    random_walk_block_spec,
    random_walk_quartic,
    routh_hurwitz_quartic,
    turing_criterion,
)
from .estimators import FourierEvolver, InstabilityClassifier
from .linalg import EigenSet, char_poly, eigenvalues, expm
from .model import (
    ModelSpec,
    SymmetricBlockModel,
    apply_killing,
    conservation_basis,
    from_dict,
    neumann_extend,
    positivity_check,
    rescale_to_unit_torus,
    transport_periodicity,
    validate,
)
from .modes import (
    mode_matrix,
    semigroup_spectrum,
    sigma_max,
    spectrum_table,
    track_branches,
)
from .perturb import (
    coefficient,
    eigenvalue_series,
    monotonicity,
    reduced_resolvents,
    validity_threshold,
)
from .simulate import (
    FourierState,
    evolve,
    goldstein_kac_convergence_fit,
    observables,
    rescaled_trajectory,
    sample_random_ic,
    simulate_neumann,
    synthesize,
)

__version__ = "0.1.0"
