"""quditsim: exact simulation and certification of emitter-based qudit
photonic state generation protocols."""

from .algebra import (
    EMITTER,
    MATRIX_ATOL,
    PHOTON,
    STATE_ATOL,
    LocalOperator,
    RegisterState,
    Site,
    apply_cz,
    apply_hadamard,
    apply_hadamard_dag,
    apply_local,
    apply_x,
    apply_z,
    basis_state,
    digit_distribution,
    emitter_site,
    hadamard_dag_matrix,
    hadamard_matrix,
    omega_power,
    omega_powers,
    operator_matrix,
    overlap,
    permute_sites,
    phase_root,
    photon_site,
    reorder_to_labels,
    state_from_dict,
    state_to_dict,
    x_matrix,
    z_matrix,
    zero_state,
)
from .engine import (
    Correct,
    GateCZ,
    GateH,
    GateHdag,
    GateX,
    GateZ,
    MeasureZ,
    Protocol,
    ProtocolExecutionError,
    ProtocolValidationError,
    Pump,
    RunRecord,
    measure_z,
    pump,
    run,
)
from .graphs import (
    PhaseExtractionError,
    PhasePolynomial,
    WeightedGraph,
    build_graph_state,
    builtin_target_graph,
    phase_polynomial_of,
)
from .parser import ProtocolParseError, parse_protocol
from .protocols import BUILTINS, BuiltinInfo, builtin, builtin_info, builtin_names
from .verify import (
    AmeReport,
    CodeSpec,
    DensityMatrix,
    KlRecord,
    KlReport,
    SubsetRecord,
    codeword_transform_check,
    entropy,
    equiv_global_phase,
    is_ame,
    kl_check,
    logical_shift,
    partial_trace,
    purity,
    qecc312_code,
)

__version__ = "0.1.0"
