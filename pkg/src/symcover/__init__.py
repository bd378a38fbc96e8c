"""Exact nonexistence tests for symmetric pair coverings with 2-regular excess.

A symmetric (v, k, lambda)-covering has v blocks of size k on v points
with every pair covered at least lambda times; when the excess (the
multigraph of over-covered pairs) is 2-regular it is a disjoint union
of cycles.  This package decides, by exact integer arithmetic on local
invariants, that particular excess cycle types cannot occur, reproduces
the survey reports, and verifies explicit coverings.
"""

from .cycletypes import (
    CycleType,
    PartitionTable,
    count_feasible,
    enumerate_feasible,
    format_cycle_type,
    parse_cycle_type,
    rank,
    sample_feasible,
    unrank,
)
from .invariant import (
    NonSquareDeterminant,
    ParameterSet,
    covering_gram,
    covering_gram_invariant,
    cycle_block,
    cycle_block3_invariant,
    cycle_block_invariant,
    det_covering_gram,
    det_exact,
    has_square_det,
    hasse_minkowski,
    join_factor,
    path_block,
    principal_minor_dets,
)
from .lucas import (
    GSequence,
    cycle_block_det,
    lucas_u,
    lucas_u_pfact,
    path_block_det,
)
from .matrices import DegenerateMatrix
from .numtheory import (
    INFINITY,
    PFactorization,
    Place,
    hilbert,
    is_perfect_square,
    is_prime,
    legendre,
    p_factorize,
    primes_up_to,
)
from .analysis import (
    CoveringInstance,
    CyclicReport,
    ExcessNotTwoRegular,
    NotACovering,
    ScanReport,
    ads_scan,
    cyclic_scan,
    iter_parameter_sets,
    params_for,
    reproduce_table,
    scan,
    verify_covering,
)
from .rules import (
    Certificate,
    MAY_EXIST,
    RULED_OUT,
    Verdict,
    brc_filter,
    hamilton_rule,
    hasse_rule,
    mod4_cycle_rule,
    recheck_certificate,
    run_all,
    small_cycles_rule2,
    small_cycles_rule5,
    square_test,
    uniform_rule_coprime,
    uniform_rule_divisible,
)

__version__ = "0.1.0"
