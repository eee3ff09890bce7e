"""Reconstruction of structured signals from moments via Prony systems."""

__version__ = "0.1.0"

from .errors import (AmbiguousAmplitudes, AmplitudeBelowFloor, ConfigInvalid,
                     DuplicateNodes, InconsistentAxes, InconsistentJumps,
                     InsufficientMoments, MultiplicityMismatch, NoConvergence,
                     NodeCollision, PronyError, QuadratureNotConverged,
                     SingularHankel, SingularMatrix, SolveFailed,
                     ZeroFourierCoefficient, ZeroMeanKernel)
from .multidim import (AxisMoments, MDPronySolution, axis_moments, md_moments,
                       solve_prony_md)
from .piecewise import (DifferentialOperator, PiecewiseConstantSignal,
                        fit_piecewise_constant, l2_distance, l2_norm,
                        operator_moment_transform, reconstruct_piecewise_constant,
                        recover_jumps_given_operator)
from .polyalg import (Polynomial, RootSet, confluent_vandermonde, find_roots,
                      gautschi_bound, inf_norm_inverse, pade_from_moments)
from .prony import (ConfluentPronySolution, PronySolution, confluent_moments,
                    prony_moments, solve_confluent_prony, solve_prony_1d)
from .shifts import (DualCoefficients, FourierMeasurements, KernelMoments,
                     dual_coefficients, generalized_moments,
                     recover_shifts_from_fourier, recover_shifts_from_moments,
                     shifts_from_nodes)
from .stability import (AmplitudeSweep, StabilityReport, amplitude_sweep,
                        confluent_error_bounds, local_error_bounds,
                        noise_experiment, prony_jacobian)
