"""Polar code construction with a simplified Gaussian approximation,
universal partial orders and the no-11 attractor set."""

__version__ = "0.1.0"

from .attractor import (  # noqa: E402
    AttractorReport,
    attractor_count,
    attractor_set,
    attractor_set_below_pi,
    bad_set,
    delta_formula,
    fib,
    fibonacci_series_partial,
    rate1,
)
from .channels import (  # noqa: E402
    SimConfig,
    SimResult,
    bec_profile,
    encode,
    genie_channel_error_rates,
    sc_decode,
    simulate_fer,
)
from .design import DesignResult, classify_vs_natural, design_code, union_bound  # noqa: E402
from .errors import (  # noqa: E402
    ConsistencyError,
    DomainError,
    GeometryError,
    PolarforgeError,
    UnsupportedSpecError,
    ValidationError,
)
from .ga import (  # noqa: E402
    LlrMean,
    ReliabilityProfile,
    error_prob,
    evolve,
    find_fixed_point,
    full_profile,
    init_llr,
    update_minus,
    update_plus,
)
from .index import ChannelSpec, PolarIndex, has_adjacent_ones, hamming_weight, parse_index  # noqa: E402
from .order import (  # noqa: E402
    DominanceRelation,
    OrderOperator,
    apply_addition,
    apply_left_swap,
    apply_multiple,
    dominates,
    downward_closure,
    generate_operators,
    upward_closure,
)
from .special import LLR_MAX, LLR_MIN, erfc, erfc_log, erfcinv, phi_exact, phi_inv, phi_simplified  # noqa: E402
