"""Freeness certificates for matrix groups over local fields."""

from .cartan import (
    CartanTriple,
    SLMatrix,
    apply_hyperplane,
    apply_point,
    bilip_constant,
    cartan_decompose,
    diagonal,
    exterior_power,
    identity,
)
from .contraction import (
    ContractionCert,
    ProximalCert,
    contraction_coefficient,
    contraction_data,
    lipschitz_outside,
    proximal_cert,
    ratio_from_lipschitz,
    ratio_upper_bound_from_contraction,
    verify_contracting,
)
from .errors import (
    CertificationError,
    ConstructionError,
    DecompositionError,
    DomainError,
    InputError,
    NoSeparatorError,
    NotContractingError,
    PrecisionExhaustedError,
    PreconditionError,
)
from .fields import (
    COMPLEX,
    DEFAULT_PADIC_PRECISION,
    REAL,
    FieldSpec,
    Kind,
    PadicScalar,
    abs_value,
    padic,
    relative_tolerance,
    set_relative_tolerance,
    valuation,
)
from .liegen import (
    LieElement,
    SubalgebraBasis,
    dense_pair_test,
    derived_series,
    generated_subalgebra,
    matrix_exp,
    matrix_log,
)
from .pingpong import (
    PingPongCert,
    ProximalElement,
    VeryContractingElement,
    Word,
    build_pingpong_tuple,
    certify_free_generators,
    freeness_falsifier,
    make_proximal,
    make_very_contracting,
    make_very_proximal,
    separation_table,
    tighten_very_contracting,
    verify_pingpong,
)
from .projective import (
    ProjHyperplane,
    ProjPoint,
    Vector,
    dist_to_hyperplane,
    proj_dist,
)
from .separation import (
    Configuration,
    NotSeparatingWarning,
    SeparatingSet,
    best_separator,
    estimate_radius,
    greedy_separating_set,
    sample_configuration,
    verify_separating_for,
)

__version__ = "0.1.0"
