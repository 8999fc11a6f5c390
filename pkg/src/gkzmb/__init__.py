"""Two-route evaluation of GKZ hypergeometric solution bases.

Coset-indexed series and Hankel-contour Mellin-Barnes quadrature compute the
same solutions of a GKZ system; the analytic continuations of the contour
integral are tied to the series basis by the character matrix of a finite
abelian lattice quotient, and the verification harness checks that relation
numerically together with the defining differential equations.
"""

from .errors import (
    BranchCut,
    DegenerateWeights,
    DimensionTooLarge,
    DomainError,
    GkzError,
    IllConditioned,
    IncompleteRepresentatives,
    InputError,
    LatticeNotSaturated,
    OrderTooHigh,
    PoleHit,
    QuadratureNotConverged,
    RankDeficient,
    RepresentativesNotFound,
    SingularModulus,
    SingularSimplex,
    TailNotConverged,
)
from .gkz import (
    AdmissibilityReport,
    GkzSystem,
    NonresonanceResult,
    Simplex,
    Triangulation,
    VeryGenericResult,
    build_system,
    is_nonresonant,
    is_very_generic,
    newton_volume,
    regular_triangulation,
    simplex_admissible,
)
from .lattice import (
    CharacterMatrix,
    IntMatrix,
    QuotientGroup,
    SnfDecomposition,
    character_matrix,
    kernel_basis,
    pairing,
    quotient_representatives,
    sigmabar_representatives,
    smith_normal_form,
)
from .mellin_barnes import (
    ContourSpec,
    MbFamilyEvaluator,
    MbSpec,
    MbValue,
    PartialSumResult,
    barnes_2f1,
    hankel_contour,
    in_convergence_domain,
    mb_eval,
    mb_integrand,
    residue_partial_sum,
)
from .series import (
    GammaSeriesSpec,
    SeriesValue,
    Truncation,
    diamond_cycle_value,
    diamond_f00_evaluator,
    gamma_series_derivative,
    gamma_series_eval,
    lambda_class_member,
    reciprocal_gamma,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
