"""Coverage and capacity of hexagonal cellular grids under best-cell attachment.

Analytical model of downlink attachment, other-cell interference and
outage when mobiles lock onto the strongest shadowed signal rather than
the nearest site, plus an exact Monte Carlo grid simulator that verifies
every analytical curve.
"""

from .attachment import (
    AttachmentProfile,
    NetworkConfig,
    attach_probability,
    attach_probability_complement,
    attachment_profile,
    marginal_not_in_cell,
    mean_owncell_gain,
    mobile_density,
    rb_grid,
    xi_b_max,
)
from .dimensioning import (
    DimensioningResult,
    InfeasibleLoadError,
    LognormalFit,
    RateDensityCurve,
    SystemConstants,
    cdma_bs_power,
    cell_outage,
    compute_dimensioning,
    coverage_curve,
    fit_lognormal,
    max_bs_power,
    outage_at,
    power_density,
    rate_density,
)
from .geometry import (
    GridLayout,
    NearestDistances,
    bs_density,
    build_grid,
    equivalent_network_radius,
    nearest_distances,
)
from .interference import OcifCurve, ocif_far_term, ocif_near_term, ocif_spatial_distribution
from .iopr import (
    IoprCurve,
    iopr_delta,
    iopr_far_mean,
    iopr_near_mean,
    iopr_second_moments,
    iopr_spatial_stats,
    iopr_total,
)
from .montecarlo import SimResult, SimSpec, empirical_coverage, simulate
from .numerics import (
    ConvergenceError,
    QuadratureSpec,
    integrate,
    q_function,
    q_inverse,
    truncated_ln_partial_moment,
)
from .verification import CheckResult, VerificationReport, run_all

__version__ = "0.1.0"
