"""Exact computer algebra for finitely presented smooth superrings.

Polynomials over the rationals stand in for smooth functions; odd generators
t1..tq anticommute.  The package covers Grassmann arithmetic with smooth
operations, superderivations and the Euler field, truncated ideal arithmetic,
split certificates via adapted derivations, and a Cech engine for gluing
split charts.
"""

from .cech import (
    BatchelorReport,
    Cochain0,
    Cochain1,
    CocycleReport,
    GluingData,
    PartitionWeights,
    check_cocycles,
    cochain_difference,
    pou_coboundary,
    project_and_split,
)
from .coeff import Polynomial, SmoothAtom, atom, jet_expand, partial_derivative, substitute
from .derivations import (
    RawLinearMap,
    SuperDerivation,
    adapted_check,
    derive_apply,
    eigen_decompose,
    euler_field,
    leibniz_check,
)
from .errors import (
    ArgumentError,
    DomainError,
    KernelError,
    ParityError,
    PreconditionError,
    TruncationError,
    UnsupportedCenterError,
    UnsupportedModelError,
)
from .grassmann import AlgebraSignature, GrassmannElement, apply_smooth, gmul, jk_test, weight_component
from .morphisms import Morphism
from .presentation import (
    NoCertificate,
    Presentation,
    SplitCertificate,
    graded_basis,
    member,
    normal_form,
    quotient_basis,
    reduced_presentation,
    split_search,
)

__version__ = "0.1.0"
