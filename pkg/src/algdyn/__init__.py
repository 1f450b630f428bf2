"""Certified computations for algebraic Z^d shift actions.

Exact group-ring arithmetic, certified Wiener-algebra inversion on the
dual torus, expansiveness and finite-entropy decision procedures, entropy
by quadrature / counting / packing, homoclinic-group construction, and
constructive independence and shadowing witnesses.
"""

__version__ = "0.1.0"

from .groupring import (
    GroupRingElement,
    GroupRingMatrix,
    TorusPoint,
    parse_element,
    torus_distance,
)
from .torus import (
    L1Approximant,
    TorusCertificate,
    certify_invertible,
    certify_matrix_invertible,
    evaluate,
    l1_inverse,
    lipschitz_bound,
    matrix_l1_inverse,
)
from .expansive import (
    ExpansivenessReport,
    PresentedAction,
    has_finite_entropy,
    is_expansive_principal,
    is_expansive_square,
)
from .entropy import (
    CompanionModule,
    EntropyEstimate,
    additivity_check,
    duality_check,
    mahler_measure,
    packing_lower_bound,
    peters_entropy,
)
from .homoclinic import (
    HomoclinicPoint,
    delta1_membership,
    fundamental_homoclinic,
    group_element,
    pairing_symmetry_check,
    psi,
    summable_metric_distance,
)
from .independence import (
    IndependenceReport,
    ShadowBlock,
    ShadowRequest,
    greedy_separated_subset,
    homoclinic_specification_check,
    independence_witnesses,
    shadow,
)
from .freegroup import FreeGroupRingElement, mul_truncated, sphere, verify_annihilator

__all__ = [
    "GroupRingElement",
    "GroupRingMatrix",
    "TorusPoint",
    "parse_element",
    "torus_distance",
    "L1Approximant",
    "TorusCertificate",
    "certify_invertible",
    "certify_matrix_invertible",
    "evaluate",
    "l1_inverse",
    "lipschitz_bound",
    "matrix_l1_inverse",
    "ExpansivenessReport",
    "PresentedAction",
    "has_finite_entropy",
    "is_expansive_principal",
    "is_expansive_square",
    "CompanionModule",
    "EntropyEstimate",
    "additivity_check",
    "duality_check",
    "mahler_measure",
    "packing_lower_bound",
    "peters_entropy",
    "HomoclinicPoint",
    "delta1_membership",
    "fundamental_homoclinic",
    "group_element",
    "pairing_symmetry_check",
    "psi",
    "summable_metric_distance",
    "IndependenceReport",
    "ShadowBlock",
    "ShadowRequest",
    "greedy_separated_subset",
    "homoclinic_specification_check",
    "independence_witnesses",
    "shadow",
    "FreeGroupRingElement",
    "mul_truncated",
    "sphere",
    "verify_annihilator",
]
