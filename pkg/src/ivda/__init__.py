"""Interval-valued data analysis under explicit latent microdata models.

Distances between interval observations are L2 distances between the
quantile functions of their microdata; with a latent-weight model for where
microdata sit inside each interval, distances, barycentres, Frechet
variances, and covariance/correlation matrices all have closed forms in the
centres, ranges, and the first two latent moments. This package implements
those measures, the quantile-integral oracles that verify them, and the
estimation routines that fit latent distributions from full samples,
summary statistics, or plain assumptions.
"""

from .errors import DataValidationError, DomainError, IvdaError, NumericFailure
from .latent import (
    Degenerate,
    InvertedTriangular,
    Kde,
    LatentDistribution,
    ShiftedBeta,
    Triangular,
    TruncatedNormal,
    Uniform,
    cross_moment,
    latent_from_dict,
    latent_to_dict,
    microdata_quantile,
    quantile_correlation,
    silverman_bandwidth,
)
from .interval import Box, Interval, IntervalFrame, Violation
from .mallows import (
    MahalanobisForm,
    MomentSummary,
    dist_sq_box,
    dist_sq_general,
    dist_sq_iid,
    dist_sq_mahalanobis,
    dist_sq_musigma,
    dist_sq_symmetric,
    distance_matrix,
    iso_distance_set,
    mahalanobis_form,
    oracle_dist_sq,
    reduced_vector,
)
from .moments import (
    Barycentre,
    SymbolicCovariance,
    correlation_from_cov,
    correlation_matrix,
    cov_model7,
    covariance_quantile_oracle,
    frechet_variance,
    frobenius_diff,
    jacobi_eigenvalues,
    sample_barycentre,
    symbolic_covariance,
)
from .estimation import (
    ModeEstimates,
    ScaledSample,
    VariableMicrodata,
    empirical_moment_summary,
    estimate_modes_pearson,
    fit_beta_mom,
    fit_kde,
    fit_triangular_pearson,
    scale_to_latent,
    test_mode_symmetry,
)
from .ingest import (
    MicroRecord,
    aggregate,
    load_interval_csv,
    read_microdata_csv,
    read_scaled_csv,
    read_summary_csv,
    write_interval_csv,
    write_scaled_csv,
)

__version__ = "0.1.0"
