"""Chain-generated twisted groups over finite posets.

The pipeline: a finite strict order yields chain generators, the generators
present a group with insertion rewriting, the group acts on its rank-zero
cosets to give a twisted product, and the normalizer tower over a two element
seed climbs that product one level per step. Inverse systems of posets carry
the same machinery nodewise, with projection-compatible shifts and finitely
checkable limit laws.
"""

from .chains import ChainGen, GenUniverse, enumerate_gens, parse_gen
from .descriptors import (
    GroupDescriptor,
    TwistedDescriptor,
    TypeMap,
    enumerate_qf_types,
    equivalent,
    eval_group,
    eval_twisted,
    eval_typemap,
    reduce_descriptor,
    support,
    truly_reduced,
    validate_typemap,
)
from .errors import NormtowerError
from .group import (
    Coset,
    GroupElement,
    coset_of,
    element_from_word,
    enumerate_group,
    fast_ops,
    gen_element,
    identity,
    inverse,
    multiply,
    oracle_from_element,
    oracle_multiply,
    oracle_to_element,
)
from .normalizer import (
    Subgroup,
    check_level_normalizers,
    level_subgroup,
    normalizer,
    tower,
    tower_k_fast,
    tower_twisted_brute,
    whole_group,
)
from .poset import (
    Poset,
    QfType,
    load_poset,
    make_antichain,
    make_chain,
    make_wide_poset,
    parse_poset_text,
    poset_to_text,
    qf_type,
    rank,
)
from .powis import (
    Powis,
    apply_shift,
    build_from_functions,
    check_existential_limit,
    check_limit,
    check_shift_closure,
    check_shift_compat,
    lift_pattern,
    load_funcs,
    load_powis,
    parse_powis_text,
    powis_to_text,
    sequence_move,
    single_move,
    validate_powis,
)
from .twisted import (
    TwistedElement,
    base_flip,
    enumerate_twisted,
    identity_twisted,
    project,
    t_inverse,
    t_multiply,
)

__all__ = [name for name in dir() if not name.startswith("_")]
