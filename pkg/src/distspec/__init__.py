"""Random distance matrices of metric measure spaces and their spectra."""

from .eig import (
    SpectralMeasure,
    TestFunction,
    apply_functional,
    bump,
    eigenvalues_symmetric,
    estimate_growth_exponent,
    hat,
    power_sum,
    rescale,
)
from .errors import (
    InsufficientDataError,
    InvalidInputError,
    NumericDegeneracyError,
    UnsupportedTripleError,
)
from .heavytail import (
    StableLimit,
    TraceStat,
    calibrate_scale,
    levy_cdf,
    sample_levy_limit,
    tail_exponent_check,
    trace_statistic,
    u_statistic,
)
from .inference import EmpiricalDistribution, iqr_ratio_report, ks_distance, quantile
from .matdist import DistanceMinor, minor_from_points, permute_minor, sample_minor
from .opspec import (
    OperatorSpectrum,
    analytic_circle_spectrum,
    compare_empirical_to_operator,
    nystrom_spectrum,
)
from .rng import replication_stream
from .triples import (
    MetricTriple,
    cauchy_line,
    check_metric_axioms,
    circle_geodesic,
    distance,
    get_triple,
    sample_points,
    sphere_chordal,
    unit_interval,
)

__version__ = "0.1.0"
