"""Exact computation in the box category, the symmetric cubical PROP,
and finite cubical sets built on them."""

from .errors import (
    BadDimension,
    CompositionMismatch,
    IndexOutOfRange,
    InputError,
    MorphismSyntaxError,
    NotEpi,
    ResourceBound,
    SymcubeError,
    TruncationMismatch,
)
from .homotopy import (
    Homotopy,
    LiftingProblem,
    cap_inclusion,
    contraction_H,
    cylinder,
    find_homotopy,
    is_fibrant,
    projection_homotopy,
    solve_lifting,
)
from .monoidal import (
    ConvolutionResult,
    SymmetrizeResult,
    adjunction_counit,
    adjunction_unit,
    braiding_comparison,
    convolve,
    convolve_map,
    pairing_map,
    pushout_product,
    restrict,
    symmetrize,
    symmetrize_comparison,
    symmetrize_map,
    symmetrize_structure,
    unit_comparison,
    verify_triangle_identities,
)
from .presheaf import (
    PresheafMap,
    SectionRef,
    SkeletalPresheaf,
    SubgroupSpec,
    TruncatedPresheaf,
    boundary,
    cap,
    coskeleton,
    dumps_presheaf,
    dumps_presheaf_json,
    empty_presheaf,
    extension_methods_agree,
    find_isomorphism,
    hom_presheaf,
    identity_map,
    loads_presheaf,
    pushout,
    quotient_by_group,
    quotient_presheaf,
    representable,
    skeleton,
    terminal_map,
    terminal_presheaf,
)
from .realize import (
    ChainComplex,
    HomologyResult,
    SimplicialMap,
    SimplicialSet,
    euler_characteristic,
    homology,
    normalized_chains,
    realize,
    realize_map,
    smith_normal_form,
    verify_cubical_monoid_delta1,
    verify_snf,
)
from .report import Report, ReportEntry
from .site import (
    Conj,
    Const,
    Factorization,
    Morphism,
    Permutation,
    SiteTag,
    compose,
    constant,
    delta,
    endpoint,
    enumerate_factorizations,
    enumerate_hom,
    ez_factor,
    factor,
    gamma,
    hom_count,
    identity,
    parse_morphism,
    pi,
    sigma,
    symmetry,
    tensor,
    verify_ez,
    verify_relations,
    verify_split_pushouts,
    vertices_action,
)

__version__ = "0.1.0"
