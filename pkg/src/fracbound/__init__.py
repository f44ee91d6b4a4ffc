"""Fractional integration of complex order.

Riemann-Liouville and Hadamard-type integrals with their boundary groups,
operator-norm estimates, and contour-integral spectral splitting of
finite matrices.
"""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (DomainError, ExtrapolationError, FracboundError, NearSingularError,
                     NotConvergedError, NumericalError, PoleError, RankAmbiguityError,
                     SpectrumSplitError, TruncationError, ValidationError,
                     WeightSingularityError)
from .special import gamma, loggamma_lanczos, reciprocal_gamma
from .function_space import (Grid, NormSpec, SampledFunction, holder_seminorm,
                             little_holder_modulus, resample, sup_norm, weighted_lp,
                             weighted_lp_norm)
from .convergence import ConvergenceReport
from .riemann_liouville import (FractionalOrder, OperatorMatrix, ProductQuadrature,
                                rl_apply, rl_boundary_apply, rl_boundary_group_defect,
                                rl_matrix, rl_opnorm_holder_estimate, rl_opnorm_l2,
                                rl_opnorm_sup, rl_quadrature, rl_regularity_embedding_check,
                                rl_semigroup_defect, rl_shift_apply)
from .hadamard import (HadamardParams, cesaro_boyd_form, cesaro_power, dilation_semigroup_apply,
                       favard_inclusion_check, hadamard_apply, hadamard_boundary_apply,
                       hadamard_boundary_group_defect, hadamard_from_power_formula,
                       hadamard_semigroup_defect)
from .spectral_split import (ContourSpec, FiniteOperator, contour_T1, contour_T2,
                             laplace_consistency_check, projection_P, resolvent_apply,
                             split_spaces)
from .boundary_diag import (DiagonalGenerator, SectorPoint, diag_apply,
                            lower_boundary_membership, upper_boundary_norm)
