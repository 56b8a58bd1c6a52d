"""Capacity bounds for the symmetric Gaussian relay channel.

Evaluates the classical cut-set bound, a geometric capacity upper bound
with its strict-gap certificate, and the compress-and-forward achievable
rate; provides exact log-domain high-dimensional geometry (caps, shells,
ball intersections) and seeded Monte Carlo verification of the underlying
concentration and cap-intersection properties.
"""

from .channel import (
    ChannelParams,
    capacity_full_cooperation,
    capacity_no_relay,
    cutset_c0_threshold,
)
from .bounds import (
    BoundCurve,
    BoundFamily,
    GapCertificate,
    OmegaSearchResult,
    capacity_upper_bound,
    compress_forward_rate,
    conditional_entropy_bound,
    cutset_bound,
    entropy_difference_bound,
    gap_certificate,
    minimize_entropy_difference,
    sweep,
)
from .errors import DomainError, InvalidInput, NumericalError, UnsupportedSet
from .geometry import (
    BallIntersection,
    BallPairSpec,
    CapSpec,
    LogMeasure,
    MeasureKind,
    ShellCapIntersection,
    ShellSpec,
    ball_overlap_lambda,
    cap_intersection_exponent,
    log_ball_intersection,
    log_cap_area,
    log_cap_area_quadrature,
    log_cap_intersection,
    log_shell_cap_volume,
    log_shell_volume,
    log_shellcap_intersection_bounds,
    log_sphere_area,
    reg_inc_beta,
)
from .montecarlo import (
    McConfig,
    McReport,
    ShellSet,
    SphereSet,
    Verdict,
    sample_uniform_cap,
    sample_uniform_sphere,
    verify_blowup,
    verify_concentration,
    verify_isoperimetry_shell,
    verify_isoperimetry_sphere,
)

__version__ = "0.1.0"

__all__ = [
    "BallIntersection",
    "BallPairSpec",
    "BoundCurve",
    "BoundFamily",
    "CapSpec",
    "ChannelParams",
    "DomainError",
    "GapCertificate",
    "InvalidInput",
    "LogMeasure",
    "McConfig",
    "McReport",
    "MeasureKind",
    "NumericalError",
    "OmegaSearchResult",
    "ShellCapIntersection",
    "ShellSet",
    "ShellSpec",
    "SphereSet",
    "UnsupportedSet",
    "Verdict",
    "ball_overlap_lambda",
    "cap_intersection_exponent",
    "capacity_full_cooperation",
    "capacity_no_relay",
    "capacity_upper_bound",
    "compress_forward_rate",
    "conditional_entropy_bound",
    "cutset_bound",
    "cutset_c0_threshold",
    "entropy_difference_bound",
    "gap_certificate",
    "log_ball_intersection",
    "log_cap_area",
    "log_cap_area_quadrature",
    "log_cap_intersection",
    "log_shell_cap_volume",
    "log_shell_volume",
    "log_shellcap_intersection_bounds",
    "log_sphere_area",
    "minimize_entropy_difference",
    "reg_inc_beta",
    "sample_uniform_cap",
    "sample_uniform_sphere",
    "sweep",
    "verify_blowup",
    "verify_concentration",
    "verify_isoperimetry_shell",
    "verify_isoperimetry_sphere",
]
