"""Large-x asymptotics of Fredholm determinants and resolvents of generalized
sine-kernel operators on the real line, checked against Nystrom discretization."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AdmissibilityError,
    ConfigurationError,
    GskError,
    NumericalError,
)
from .kernels import GskKernel, boson_kernel, entire_test_kernel, xxz_kernel  # noqa: E402
from .quadrature import QuadratureRule, composite_rule, truncated_line_rule  # noqa: E402
from .cauchy import CauchyData, alpha_at, alpha_pm, build_cauchy_data  # noqa: E402
from .roots import RootSet, find_roots, remainder_scale, strip_scale  # noqa: E402
from .asymptotics import (  # noqa: E402
    AsymptoticModel,
    ContourIndex,
    build_model,
    functional_A,
    logdet_thm2,
    logdet_thm3,
    resolvent_asym,
    x_derivative_asym,
)
from .oracle import logdet_lu, nystrom_logdet, nystrom_resolvent, wiener_hopf_logdet  # noqa: E402
