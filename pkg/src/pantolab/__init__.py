"""pantolab: a numerical laboratory for stochastic pantograph equations.

Analytic polynomial and exponential growth exponents for scalar,
multi-delay and matrix models; a dense-memory deterministic solver; an
Euler-Maruyama simulator with reproducible per-path random streams; and
statistical estimators that verify the analytic rates against simulation.
"""

__version__ = "0.1.0"

from .models import (InitialCondition, MatrixModel, MultiDelayModel,
                     ScalarPantographModel, validate)
from .exponents import (ExponentReport, LyapunovData, classify,
                        classify_scalar, first_mean_alpha, matrix_classify,
                        mean_square_alpha, multi_delay_classify,
                        multi_delay_real_root)
from .linalg import (solve_lyapunov, spectral_abscissa, spectral_norm,
                     sym_eig_extremes)
from .detsolver import (DenseSolution, check_comparison, kato_mcleod_psi,
                        solve_multi_pantograph_ode, solve_pantograph_ode)
from .sdesim import (Ensemble, RandomStreamSpec, Trajectory,
                     simulate_ensemble, simulate_path)
from .stats import (ExponentEstimate, MomentCurve, VerdictRecord,
                    estimate_as_exponent, estimate_moment_curve,
                    fit_exponential_rate, fit_polynomial_exponent,
                    verify_report)

__all__ = [
    "__version__",
    "InitialCondition", "MatrixModel", "MultiDelayModel",
    "ScalarPantographModel", "validate",
    "ExponentReport", "LyapunovData", "classify", "classify_scalar",
    "first_mean_alpha", "matrix_classify", "mean_square_alpha",
    "multi_delay_classify", "multi_delay_real_root",
    "solve_lyapunov", "spectral_abscissa", "spectral_norm",
    "sym_eig_extremes",
    "DenseSolution", "check_comparison", "kato_mcleod_psi",
    "solve_multi_pantograph_ode", "solve_pantograph_ode",
    "Ensemble", "RandomStreamSpec", "Trajectory",
    "simulate_ensemble", "simulate_path",
    "ExponentEstimate", "MomentCurve", "VerdictRecord",
    "estimate_as_exponent", "estimate_moment_curve",
    "fit_exponential_rate", "fit_polynomial_exponent", "verify_report",
]
