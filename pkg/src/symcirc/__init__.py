"""Symmetric arithmetic circuits and their combinatorial companions.

Exact determinant/permanent circuits with verified symmetry witnesses,
a symmetry-preserving lowering to Boolean threshold circuits, CFI
perfect-matching graphs, and k-Weisfeiler-Leman equivalence testing.
"""

from .errors import (
    BudgetExceededError,
    CircuitError,
    FieldMismatchError,
    SchemaError,
    SymcircError,
)
from .field import GF, QQ, Field, FieldValue
from .circuit import (
    ADD,
    AND,
    MUL,
    NOT,
    OR,
    Circuit,
    CircuitBuilder,
    GateLabel,
    compare_by_random_eval,
    const,
    desugar_threshold_eq,
    deserialize,
    evaluate_arith,
    evaluate_bool,
    export_dot,
    input_label,
    pprod,
    psum,
    serialize,
    size_stats,
    th_eq,
    th_ge,
    validate,
)
from .symmetry import (
    Matrix,
    Partition,
    Square,
    Transpose,
    Witness,
    check_symmetric,
    find_extension,
    group_generators,
    is_support,
    minimal_support,
    orbits,
    verify_automorphism,
)
from .generators import (
    GeneratedCircuit,
    det_oracle,
    eval_on_matrix,
    gauss_det,
    leibniz_det,
    leibniz_perm,
    leverrier_det_circuit,
    matrix_assignment,
    perm_oracle,
    ryser_perm_circuit,
)
from .lowering import (
    ExpandedCircuit,
    GadgetSpec,
    OrbitPreservationReport,
    PartitionCircuit,
    ValueSetMap,
    accepting_vectors,
    expand_to_threshold,
    gadget_for_partition_function,
    gadget_input_names,
    lower_to_partition_basis,
    orbit_preservation_check,
    value_sets,
    verify_lowering,
)
from .graphs import (
    Graph,
    builtin_graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    format_graph,
    is_graph_isomorphism,
    is_two_connected,
    parse_graph,
    path_graph,
    petersen_graph,
)
from .cfi import (
    BaseGraphReport,
    CFIGraph,
    ExperimentReport,
    GadgetReport,
    MatchingReport,
    all_perfect_matchings,
    bipartition,
    build_cfi,
    check_base_graph,
    enumerate_orientations,
    enumerate_perfect_matchings,
    gadget_matchings_check,
    matching_count_via_permanent,
    matching_experiment,
    orientation_odd_set_census,
    path_flip_isomorphism,
    pq,
    uniform_count_formula,
)
from .wl import WLReport, wl_distinguishing_round, wl_equivalent

__version__ = "0.1.0"
