"""Suspension flows over finite directed graphs: pressure, entropy
spectra, and periodic-orbit counting by homology class."""

from .errors import (
    BudgetExceeded,
    DegenerateModel,
    DimensionMismatch,
    EmptySelection,
    InfiniteQuotient,
    InvalidGraph,
    InvalidTree,
    MissingChordValue,
    MissingEdge,
    MissingEdgeValue,
    MissingEdgeWeight,
    ModelSyntaxError,
    NoMeridians,
    NonConvergence,
    NotPrimitive,
    OrbitflowError,
    OutsideCone,
    RoofNotUnit,
    SingularHessian,
    UnknownModel,
    ValidationError,
)
from .graphs import (
    DirectedGraph,
    PrimeCycle,
    canonical_form,
    enumerate_prime_cycles,
    is_aperiodic,
    scan_prime_cycles,
    validate_graph,
)
from .weights import (
    BirkhoffData,
    ChordAssignment,
    GenerationCheck,
    WeightSystem,
    birkhoff,
    generation_check,
    lattice_length_heuristic,
    linking_numbers,
    smith_decomposition,
    smith_normal_form,
    weights_from_chords,
)
from .thermo import (
    MarkovMeasure,
    PerronData,
    equilibrium_measure,
    flow_pressure,
    integrate_observable,
    perron,
    pressure_gradient,
    pressure_hessian,
    shift_pressure,
    transfer_matrix,
)
from .legendre import (
    DirectionData,
    DirectionHull,
    Membership,
    direction_hull,
    entropy_hessian,
    hull_contains,
    membership,
    solve_u,
)
from .counting import (
    ChebotarevResult,
    CountQuery,
    CountResult,
    EquidistributionResult,
    FiniteQuotient,
    MargulisCount,
    SweepRow,
    chebotarev_distribution,
    cycle_table,
    equidistribution_test,
    evaluate_query,
    exact_window_count,
    floor_class,
    jitter_averaged_ratio,
    margulis_total,
    predict_count,
    sweep,
    trace_prime_count,
    trace_prime_counts_table,
    window_count_from_table,
)
from .models import (
    ModelSpec,
    builtin_model,
    load_model,
    parse_model,
    serialize_model,
)

__version__ = "0.1.0"
