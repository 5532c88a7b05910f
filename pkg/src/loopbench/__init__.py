"""loopbench: analyze, verify, construct and search finite loops."""

from .tables import (
    LoopError,
    LoopTable,
    NoIdentity,
    NotLatinSquare,
    NotPowerAssociative,
    OutOfRange,
    Perm,
    TableFormatError,
    dumps_table,
    load_table,
    loads_table,
    normalize_table,
    save_table,
    subtable,
    validate_table,
)
from .identities import (
    CheckResult,
    Identity,
    ParseError,
    PropertyReport,
    TooManyVariables,
    check_identity,
    classify,
    has_wip,
    is_cc,
    is_diassociative,
    is_pa,
    is_pa_element,
    parse_identity,
    print_term,
    wip_elements,
)
from .structure import (
    Autotopism,
    CenterTowerReport,
    NotCC,
    NotNormal,
    NotPrimePower,
    NotSubloop,
    OrderTooLarge,
    SubloopInfo,
    all_subloops,
    associates,
    associator,
    automorphisms,
    center,
    center_tower_check,
    generate_subloop,
    inner_maps,
    is_autotopism,
    is_isomorphic,
    is_normal,
    lagrange_check,
    nuclear_automorphisms,
    nuclei,
    nucleus,
    quotient,
)
from .construct import (
    ActionMap,
    BadAction,
    NotComplementary,
    NotHomomorphism,
    TriplesFail,
    check_semidirect_theorem,
    holomorph,
    holomorph_action,
    internal_decompose,
    semidirect,
    trivial_action,
)
from .search import SearchSpec, SearchStats, Unsatisfiable, find_models, iso_reduce

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
