"""freefractal: fractal dimensions and entropies for matricial microstate spaces.

The library computes exact dimension formulas for spectral measures and
finite-dimensional tracial algebras, builds explicit quantile microstates,
samples unitary orbits with reproducible counter-based randomness, and
estimates packing/cover/Minkowski statistics at finite scale. The harness
subpackage wires these into seeded, CSV-emitting scenarios.
"""

from .algebra import (
    FiniteDimAlgebra,
    RepresentationPlan,
    commutant_unitary_dim,
    delta0_fd,
    plan_representation,
    represent,
    standard_generators,
)
from .matrixcore import (
    MatrixTuple,
    ball_volume,
    conjugate_tuple,
    eigenvalues,
    hs_distance,
    hs_norm,
    log_ball_volume,
    sample_gue,
    sample_haar_unitary,
    unnormalized_norm,
    word_moment,
)
from .metricgeom import (
    DimensionEstimate,
    PointCloud,
    constrained_cover_sum,
    cover_sum,
    greedy_cover,
    minkowski_log_volume,
    packing_measure_transfer,
    packing_number,
    scaling_exponent,
)
from .microstates import (
    MicrostateSpec,
    OrbitSample,
    QuantileMicrostate,
    build_quantile_microstate,
    freeness_defect,
    is_microstate,
    orbit_point_at_distance,
    orbit_sample,
    product_orbit_sample,
    sorted_eigenvalue_distance,
)
from .rmtformulas import (
    OrbitVolumeBound,
    chi_single,
    hausdorff_entropy_constant,
    isodiametric_log_ratio,
    mehta_constant_log,
    orbit_volume_lower_bound,
    selberg_box_log,
    vandermonde_sq_log,
)
from .spectral import (
    QuantilePlan,
    SpectralMeasure,
    build_quantile_plan,
    delta0_single,
    near_pair_bound,
    near_pair_count,
    quantiles,
)

__version__ = "0.1.0"
