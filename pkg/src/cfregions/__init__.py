"""Value regions of Stieltjes-type continued fractions ``K(1/b_n)``."""

from .engine import (
    ConvergentState,
    ElementSequence,
    EvenOddLimits,
    convergent,
    convergent_at,
    determinant_residuals,
    even_odd_limits,
    km5_bound,
    reverse_closed_form,
    reverse_sequence,
    reverse_values,
    tail_closed_form,
    tail_sequence,
    tail_values,
    wallis_euler_step,
)
from .errors import (
    CFracError,
    DomainError,
    InvalidCertificateRequest,
    InvalidElementError,
    SectorTooWideError,
)
from .projective import (
    INF,
    ZERO,
    ExtendedComplex,
    MoebiusMap,
    Sector,
    excomplex_eq,
    mobius_apply,
    mobius_compose,
    s_map,
    sector_contains,
)
from .regions import (
    OriginDisk,
    RegionCertificate,
    ShiftedDisk,
    certify_even_convergents,
    certify_even_tails,
    certify_odd_reverse,
    counterexample_eval,
    halfplane_disk_equivalence,
    lemma_origin_disk_step,
    lemma_two_step_lower_bound,
    origin_disk_constant,
    shifted_disk_constant,
)

__version__ = "0.1.0"
