"""Constructive polynomial approximation in weighted sup-norm spaces.

Builds, for a continuous target and an admissible superexponential
weight, the explicit polynomial approximants of the three-stage
cutoff / mollification / Taylor construction, and certifies the error
through Young-conjugate bounds.
"""

from .conjugate import (
    SampledFunction,
    exp_substitute,
    lemma_gap,
    young_conjugate,
)
from .certify import (
    ErrorCertificate,
    bound_eq3,
    bound_eq4,
    conjugate_form_bound,
    eq5_diagnostic,
    sup_ratio,
    transfer_constants,
)
from .kernel import (
    H_eval,
    KernelConstants,
    build_UN,
    h_eval,
    h_taylor_coeff,
    kernel_constants,
    remainder_bound_eq2,
)
from .multipoly import MultiPoly
from .pipeline import (
    ApproxParams,
    CutoffStage,
    MollifiedStage,
    build_VN,
    build_chi,
    cutoff_apply,
    cutoff_error,
    mollify,
    mollify_error_split,
    moments,
)
from .weights import (
    RadialSection,
    TargetFunction,
    Weight,
    make_target,
    make_weight,
    membership_check,
    radial_section,
    weighted_norm_estimate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
