"""Geometric greedy sweeps on arborally satisfied point sets.

Library layout:

- ``geometry``: grid point sets, rectangle predicates, satisfaction oracle
- ``greedy``: the sweep (staircase and literal reference) and its invariants
- ``decomposition``: block decomposition trees, generation and inference
- ``pairs``: the coupled-pair taxonomy (zig/zag, good/bad, association map)
- ``lowerbound``: marking certificates, exact OPT, independent rectangles
- ``blockstats``: block regions, key ledgers, the structural lemma suite
- ``harness`` / ``cli``: instance pipeline, experiments, verification
"""

from .geometry import (
    MARKED,
    ORIGINAL,
    PermutationError,
    Point,
    PointSet,
    PointSetError,
    Relation,
    SatisfactionReport,
    is_arborally_satisfied,
    parse_permutation,
    read_permutation_file,
    rect_satisfied,
    relate,
    validate_permutation,
    write_permutation_file,
)
from .greedy import (
    AugmentedPointSet,
    SweepError,
    first_above,
    greedy_sweep,
    greedy_sweep_reference,
)
from .decomposition import (
    BlockNode,
    DecompositionError,
    DecompositionTree,
    generate_k_decomposable,
    infer_decomposition,
    validate_tree,
)
from .pairs import (
    BACKSLASH,
    BAD,
    GOOD,
    SIDE_L,
    SIDE_R,
    SLASH,
    ZAG,
    ZIG,
    ClassificationError,
    PairRecord,
    Tally,
    amc_all,
    amc_map,
    classify_all,
    cp,
    records_to_csv,
)
from .lowerbound import (
    Certificate,
    CertificateError,
    OptLimitError,
    OptResult,
    RectFamily,
    brute_force_opt,
    certificate_to_csv,
    check_independent,
    extract_certificate,
    good_rectangles,
    max_independent_set,
    verify_goodbound,
)
from .blockstats import BlockGeometry, KeyLedger, LemmaReport, block_geometry, check_block_lemmas, key_ledger
from .harness import analyze, structural_violations

__version__ = "0.1.0"
