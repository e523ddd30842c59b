"""Certification and falsification of positivity properties of the radial
kernel ``f(x) = (1 - ||x||)/(1 - ||x||**r)`` and its reciprocal."""

__version__ = "0.1.0"

from .kernels import (  # noqa: E402
    Direction,
    DomainError,
    KernelParams,
    eval_f,
    eval_f_complex,
    eval_f_naive,
    eval_f_prime,
    eval_f_second,
    eval_g,
    eval_h,
)
from .matrices import (  # noqa: E402
    Generator,
    PointConfig,
    PositivityVerdict,
    Status,
    Subspace,
    build_kernel_matrix,
    cnd_verdict,
    hadamard_power,
    infdiv_probe,
    psd_verdict,
)
from .polynomials import (  # noqa: E402
    Verdict,
    build_phi_poly,
    build_psi_poly,
    sign_analysis,
    verify_convexity,
    verify_logconvexity,
)
from .probes import Outcome, ProbeReport, midpoint_logconvexity_check  # noqa: E402

__all__ = [
    "__version__",
    "Direction",
    "DomainError",
    "KernelParams",
    "eval_f",
    "eval_f_complex",
    "eval_f_naive",
    "eval_f_prime",
    "eval_f_second",
    "eval_g",
    "eval_h",
    "Generator",
    "PointConfig",
    "PositivityVerdict",
    "Status",
    "Subspace",
    "build_kernel_matrix",
    "cnd_verdict",
    "hadamard_power",
    "infdiv_probe",
    "psd_verdict",
    "Verdict",
    "build_phi_poly",
    "build_psi_poly",
    "sign_analysis",
    "verify_convexity",
    "verify_logconvexity",
    "Outcome",
    "ProbeReport",
    "midpoint_logconvexity_check",
]
