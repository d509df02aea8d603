"""Entanglement toolkit for bipartite qutrit pure states."""

from .state_model import (
    ALL_CELLS,
    BasisCell,
    CellParseError,
    PureState,
    SingularOperatorError,
    StateConstructionError,
    SupportPattern,
    TermSpec,
    apply_local,
    build_state,
    load_state,
    parse_cell,
    random_state,
    save_state,
    state_from_dict,
    state_to_dict,
    support_of,
    type_i_state,
    type_ii_state,
    type_iii_state,
)
from .measure import (
    DensityMatrix,
    SchmidtData,
    eta,
    reduced_density,
    schmidt,
    von_neumann_entropy,
)
from .patterns import (
    OrbitClass,
    SymmetryGroup,
    TypeLabelResult,
    canonicalize,
    census,
    census_to_dicts,
    enumerate_patterns,
    forced_separable,
    generic_rank,
    type_labels,
)
from .extremal import (
    CycleBasis,
    ExtremalResult,
    ExtremumVerdict,
    GradientResult,
    ParamPoint,
    ZeroMeasureRegionError,
    cycle_basis,
    cycle_invariants,
    eta_gradient,
    find_stationary,
    has_interior_extremum,
    state_from_params,
)
from .slocc import (
    ILOWitness,
    RankClass,
    count_lu_parameters,
    ilo_witness,
    schmidt_rank,
    slocc_class,
)

__version__ = "0.1.0"
