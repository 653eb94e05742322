"""Jointly exclusive (JE) and generalized JE random vectors.

Build a model from marginals with an atom at zero, a face-mass allocation
and per-face copulas; then sample it, evaluate its CDF and check its
defining properties by Monte Carlo.
"""

from .allocation import (
    FaceAllocation,
    axes_free_trivariate,
    closed_form_optimum,
    dual_vertex_optimum,
    enumerate_faces,
    feasible_allocation,
    lp_max_weighted_mass,
    trivariate_allocation,
    trivariate_lambda_bounds,
)
from .copulas import CopulaSpec, copula_cdf, copula_sample
from .distortions import DistortionSpec, distort, g_star, inverse_distorted_survival
from .errors import ConstraintViolation, ExistenceError, JEError
from .existence import ExistenceReport, check_gje, check_je, check_me, me_frechet_cdf
from .marginals import MarginalSpec, inverse_survival, sample_positive_part, survival
from .model import (
    JEModel,
    SampleBatch,
    build_model,
    cdf,
    cf_product_identity,
    make_rng,
    me_model,
    pearson_matrix,
    region_masses,
    sample,
    survival_all_positive,
)
from .transforms import je_to_jm, jm_to_je, reflect, translate

__version__ = "0.1.0"
