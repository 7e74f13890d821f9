"""Karhunen-Loeve spectra of fractional Brownian motion, its bridge and rank-one perturbations."""
from .base_asymptotics import (AsymptoticEigenvalue, BoundaryLayerProfile, base_eigenfunction,
                               base_eigenvalue, base_eigenvalues, base_frequency, base_value_at_one)
from .bridge_asymptotics import (bridge_eigenfunction, bridge_eigenvalue, bridge_eigenvalues,
                                 bridge_frequency, f1_tilde, g1_tilde)
from .errors import (BracketError, ConvergenceError, DegenerateKernelError, DomainError, KLBridgeError,
                     PoleError, SizeError, TruncationWarning)
from .identities import check_ell_integral, check_perturbed_equation, check_tangent_series
from .kernels import KernelSpec, critical_q, row_integral
from .oracle import (EigenPair, QuadratureGrid, Spectrum, build_grid, cached_spectrum, eigenfunction_at,
                     jacobi_eigh, solve_spectrum)
from .sampler import PathSample, empirical_covariance, sample_paths
from .special import Hurst, SpectralConstants, compute_constants, gamma_function, principal_power
from .transfer import (SecularFunction, bridge_root, bridge_roots, rank_one_root, rank_one_secular,
                       synthesize_bridge_eigenfunction, transfer_spectrum)

__version__ = "0.1.0"
