"""Cadlag (jump) rough-path numerics.

Truncated tensor algebra and free nilpotent groups, exact p-variation,
Young and rough integration with jump-aware compensated Riemann sums,
minimal jump extensions and signatures, Marcus canonical RDEs, and Levy
process lifts with analytic and Monte-Carlo expected signatures.
"""

from ._kernels import BACKEND
from .errors import NumericsError, RegimeError, UnsupportedFeatureError
from .levy import (EnhancedLevyTriplet, LevyTriplet, SignatureEstimate,
                   area_moment_diagnostic, expected_signature_enhanced,
                   expected_signature_levy, lk_exponent,
                   manstavicius_diagnostic, marcus_lift_sampled,
                   mc_expected_signature, sample_enhanced, sample_path,
                   sub_ellipticity_check)
from .marcus import (GroupPath, VectorFieldSet, marcus_rde_solve,
                     minimal_jump_extension, phi_flow, signature,
                     time_stretch, williams_crosscheck)
from .nilpotent import (GroupElement, LieElement, cc_dist, cc_norm, dilate,
                        increment, log_linear_point)
from .path import (CadlagPath, Partition, compatible_partition,
                   dyadic_pvar_bound, oscillation, p_variation,
                   path_from_csv, path_to_csv, pvar_control)
from .rough import (CadlagRoughPath, ControlledPath, compose_controlled,
                    integral_jump, lift_young_canonical, lift_young_marcus,
                    marcus_to_ito, rough_integral, young_consistency)
from .tensor import (TruncatedTensor, exp_trunc, is_group_like, log_trunc,
                     mul, project, shuffles)
from .young import RRSResult, young_constant, young_integral, \
    young_remainder_bound

__version__ = "0.1.0"
