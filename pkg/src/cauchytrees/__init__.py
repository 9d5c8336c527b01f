"""Quotient trees of oriented polygons and the bijections behind the generalized Cauchy identity."""

from .errors import (
    BoundExceeded,
    CauchyTreesError,
    CorruptedState,
    InvalidInput,
    NotCatalanError,
    NotInDomain,
    PairingError,
)
from .identities import (
    arcsine_exact_cdf,
    cauchy_decompose,
    cauchy_rhs_m2,
    cauchy_rhs_m3,
    count_alpha,
    moment,
    pitman_transform,
)
from .main_bijection import (
    AlphaElement,
    BetaTuple,
    IntermediatePoint,
    beta_to_gamma,
    enumerate_alpha,
    enumerate_beta,
    gamma_to_beta,
    main_bijection,
    main_bijection_inverse,
    validate_point,
)
from .quotient_tree import (
    QuotientTree,
    build_quotient,
    count_compatible_orders,
    enumerate_compatible_orders,
    export_dot,
    leaf_bay_pairing,
    preorder,
    reaches,
)
from .reglue import unglue_reglue
from .signseq import (
    CauchyParams,
    Pairing,
    catalan_complete,
    catalan_pairing,
    enumerate_noncrossing_pairings,
    epsilon_i,
    is_catalan,
)
from .small_bijection import (
    IntermediateTriple,
    LabeledTree,
    backward_step,
    forward_step,
    small_bijection,
    small_bijection_inverse,
    validate_triple,
)

__version__ = "0.1.0"
