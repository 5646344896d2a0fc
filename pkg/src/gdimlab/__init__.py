"""Exact computations with graded Artinian rings R = R0 + R1 + R2 (m^3 = 0) over F_p
and certificates for modules of G-dimension zero over them."""

from .algebra import (
    DegreeTwoRingData,
    Element,
    GradedAlgebra,
    build_circulant_ring,
    build_quadratic_quotient,
    find_minimal_reduction,
    hilbert_coeffs,
    is_good_shape,
    is_minimal_reduction,
    parse_linear,
    quotient_by_quadric,
    socle,
    trivial_square_ring,
    veliche_ring,
)
from .approximation import (
    ApproximationCandidate,
    build_R_from_reduction,
    candidate_audit,
    obstruction_unsatisfiable,
    wakamatsu_check,
)
from .constructions import (
    FamilySpec,
    certified_quotient,
    endomorphism_algebra,
    family_module,
    fitting_degree1,
    good_ring,
    is_local,
    matrix_factorization_module,
    pairwise_noniso_sweep,
)
from .errors import (
    CertificateRejected,
    ConstructionError,
    DimensionError,
    FieldTooSmall,
    GdimlabError,
    InputError,
    NotAComplex,
    SchemaError,
    SearchExhausted,
)
from .gdim import (
    GdimCertificate,
    check_gdim_zero_bounded,
    verify_certificate,
    verify_periodic_cr,
    verify_theorem31,
)
from .gmodule import (
    BettiTable,
    GradedModule,
    ModuleMap,
    Presentation,
    Resolution,
    coker,
    minimal_generators,
    minimal_resolution,
    residue_field,
    ring_module,
)
from .homology import bass_numbers, bidual_check, dual, ext, hom_space, koszul_check
from .presets import ExperimentPreset, make_preset, run_preset
from .serialize import SessionStore

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
