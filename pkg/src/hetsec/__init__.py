"""Secrecy outage of macro/small-cell spectrum sharing over Rayleigh fading.

Three sharing schemes are covered: orthogonal sharing (OSS), non-orthogonal
sharing with interference (IL) and non-orthogonal sharing where the macro
base station cancels the small-cell interference at its user (IC).  Each
has closed-form outage probabilities (:mod:`hetsec.analytic`), an exact
Monte-Carlo counterpart (:mod:`hetsec.montecarlo`) and high-SNR results
(:mod:`hetsec.asymptotics`).
"""

from .analytic import (
    Cell,
    Combiner,
    KernelParams,
    Scheme,
    SystemConfig,
    il_kernel,
    overall_sop,
    sop,
    sop_ic_macro,
    sop_ic_small,
    sop_il_macro,
    sop_il_small,
    sop_oss_macro,
    sop_oss_small,
)
from .asymptotics import DiversityReport, diversity_slope, ic_macro_bounds, il_macro_floor
from .channel import (
    FIG2_GAINS,
    FadingDraw,
    Link,
    LinkGains,
    LinkGeometry,
    RngStream,
    default_gains,
    link_gain,
    sample_fading,
)
from .errors import (
    ConfigError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    EvaluationError,
    ModelWarning,
)
from .montecarlo import (
    CapacityTuple,
    SopEstimate,
    estimate_cells,
    estimate_sop,
    estimate_sop_exact_ic_macro,
)
from .special_math import (
    QuadratureSpec,
    exp_integral,
    inner_inverse_square_integral,
    integrate_exp_weighted,
)

__version__ = "0.1.0"

__all__ = [
    "FIG2_GAINS",
    "CapacityTuple",
    "Cell",
    "Combiner",
    "ConfigError",
    "ConsistencyError",
    "ConvergenceError",
    "DiversityReport",
    "DomainError",
    "EvaluationError",
    "FadingDraw",
    "KernelParams",
    "Link",
    "LinkGains",
    "LinkGeometry",
    "ModelWarning",
    "QuadratureSpec",
    "RngStream",
    "Scheme",
    "SopEstimate",
    "SystemConfig",
    "default_gains",
    "diversity_slope",
    "estimate_cells",
    "estimate_sop",
    "estimate_sop_exact_ic_macro",
    "exp_integral",
    "ic_macro_bounds",
    "il_kernel",
    "il_macro_floor",
    "inner_inverse_square_integral",
    "integrate_exp_weighted",
    "link_gain",
    "overall_sop",
    "sample_fading",
    "sop",
    "sop_ic_macro",
    "sop_ic_small",
    "sop_il_macro",
    "sop_il_small",
    "sop_oss_macro",
    "sop_oss_small",
]
