"""Noise sensitivity of |perm(X)|^2 for Gaussian matrices.

Exact permanent kernels, the degree decomposition of |perm|^2 and its
noisy version, closed-form spectra and correlations, and exact ideal vs
noisy BosonSampling distributions at small n.
"""
from .boson import (DistributionReport, compare, enumerate_outcomes, ideal_distribution,
                    noisy_distribution, noisy_distribution_mc, noisy_gram_exact)
from .errors import CapacityError, DegenerateInputError
from .estimators import (Estimate, estimate_corr, estimate_g_mc, estimate_moment,
                         project_degree_weight, truncation_mse)
from .expansion import (BasisTerm, TruncationModel, coefficient_query, degree_component,
                        degree_components, evaluate_truncated, h2_complex, hermite,
                        noisy_minor_coeff_exact, noisy_square_perm_exact, squared_coefficient)
from .matrices import (GaussianMatrix, NoiseParameter, apply_noise, correlated_pair,
                       sample_batch, sample_gaussian)
from .permanent import (MultisetOutcome, gram_permanent, minor, pair_permanent, permanent,
                        permanent_naive)
from .spectral import (PermutationPairStats, SpectralProfile, corr_asymptotic, corr_closed_form,
                       corr_geometric, cycle_sum_identity, degree_weights, fourth_moment,
                       pair_stats, truncation_error_bound)

__version__ = "0.1.0"
