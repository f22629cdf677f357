"""Global maximum-likelihood fitting of the generalized extreme value distribution."""
from .core import (
    DataSample,
    GevParams,
    beta_of,
    cdf,
    endpoints,
    log_likelihood,
    logpdf,
    pdf,
    quantile,
    sample,
    standardize,
    support_contains,
)
from .errors import (
    BracketFailure,
    ConvergenceFailure,
    DegenerateData,
    DomainError,
    GevError,
    NoCandidate,
    OutOfSupport,
    ParseError,
    PreconditionViolated,
    SingularInformation,
    ZeroShape,
)
from .inference import hessian, infer, local_concavity_scan, score_identities, standard_errors
from .io import BlockSpec, block_maxima, ingest_csv
from .mle import FitResult, SearchConfig, candidate_report, fit
from .profile import (
    ProfileCurve,
    ProfilePoint,
    curve,
    gumbel_cross_section,
    h_n,
    profile_deriv,
    profile_loglik,
    solve_beta,
    tau_of,
)

__version__ = "0.1.0"
