"""Numerics for the non-linear Fourier transform of the real Dirac system.

The package propagates the transfer matrix of the Dirac system exactly on
piecewise-constant potentials and builds on it: Hermite-Biehler functions and
scattering coefficients, reproducing kernels and the spectral weight, the
resonances of E(t, .) and their dynamics, and pointwise convergence scans.
"""
from ._backend import BACKEND
from .convergence import (ConvergenceScan, convergence_scan, equivalence_surface,
                          local_asymptotic_residual, log_a_identity_residual,
                          section4_ode_residuals)
from .errors import *  # noqa: F401,F403
from .potential import Potential, abs_integral, integral, is_sigma_interval, l2_norm_sq, parse_potential
from .propagator import (PropagationOptions, TransferMatrix, propagate, propagate_batch,
                         step_exact, transfer)
from .quadrature import QuadratureResult
from .report import Check, DiagnosticReport
from .scattering import (ABPair, ScatteringPair, ab_coefficients, hermite_biehler,
                         local_scattering, nlft_partial, verify_identities)
from .spectral import (Box, SpectralWeight, estimate_w, kernel_K, kernel_proximity,
                       linearization_error, nonlinear_parseval_residual, sinc_kernel)
from .zeros import (BlaschkeProduct, GammaScale, InnerFunctionValue, ZeroTrajectory, exp_fit,
                    increments, lemma1_detect, locate_zeros, sine_fit, theta_eval, track_zero,
                    winding_count)

__version__ = "0.1.0"
