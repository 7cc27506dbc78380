"""quatcert: certified quaternion-algebra norm witnesses over Q(i) and F_q(t).

The library constructs, for a prescribed even set of finite places, a
quaternion algebra ramified exactly there together with a global non-square
d that is a local square on that set; it then certifies, by two independent
local routes, that -d is a reduced norm while d is not the norm of any pure
quaternion.  Certificates are self-describing JSON documents that the
verifier re-derives from scratch.
"""

from .exact_arith import (
    ConsistencyError,
    FieldElem,
    FqPoly,
    Factorization,
    GaussInt,
    GrammarError,
    InputError,
    QuatcertError,
    SearchExhausted,
    canonical_associate,
    factor,
    format_elem,
    gauss_elem,
    ff_elem,
    is_global_square,
    make_elem,
    parse_elem,
)
from .finitefield import GF
from .places import (
    Place,
    ResidueElem,
    infinite_place,
    is_local_square,
    parse_place,
    place_of,
    places_dividing,
    residue_symbol,
)
from .hilbert import (
    QuatPresentation,
    RamificationSet,
    dyadic_hilbert,
    hilbert_symbol,
    presentation_from_ramification,
    ramification_set,
    tame_hilbert,
)
from .localsearch import HenselWitness, hensel_precision_bound, hensel_search
from .quadforms import (
    DiagForm,
    LocalSolvability,
    full_norm_form,
    global_search,
    local_represents,
    pure_norm_form,
)
from .witness import (
    DCandidate,
    Obstruction,
    check_neg_nrd,
    check_not_pure_norm,
    find_d,
    normalize_presentation,
    strip_even_part,
)
from .certify import (
    GroupDescriptor,
    VerifyReport,
    WitnessCertificate,
    build_witness,
    catalog,
    decode_certificate,
    encode_certificate,
    verify_certificate,
)

__version__ = "0.1.0"
