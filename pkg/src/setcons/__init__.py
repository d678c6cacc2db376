"""Consensus on interval sets.

Exact algebra of finite interval unions, set-valued update maps, their
binary cell encodings, and the convergence analyzers and simulator built on
top of them.
"""

from .analysis import (
    CellEquilibriaReport,
    ConsensusVerdict,
    ContractivityVerdict,
    check_distance_bound,
    consensus_region,
    equilibria_sbm,
    global_fixed_point,
    incidence_apply,
    is_contractive_sbm,
    is_locally_attractive_direct,
    is_locally_attractive_sbm,
    set_distance,
)
from .bindyn import (
    BinaryContraction,
    BinaryMap,
    OrbitSummary,
    binary_contractivity,
    binary_distance,
    discrete_derivative,
    equilibria,
    is_vnn_attractive,
    is_vnn_attractive_direct,
    orbit,
    semantic_incidence,
)
from .boolmat import (
    BoolMatrix,
    BoolVector,
    Permutation,
    column_at_most_one,
    find_dependency_cycle,
    find_strict_triangular_permutation,
    has_empty_eigenvalue,
    has_universe_eigenvalue,
    is_nilpotent,
    is_strictly_lower,
    nilpotency_index,
)
from .caps import Caps
from .dsl import Diagnostic, DslError, SystemSpec, parse, pretty_print, to_json
from .encoding import EncodedSystem, Partition, block_incidence_check, build_partition, translate_map
from .errors import CapExceeded, CellEncodingError, OrbitLimitError, SetconsError
from .expr import (
    Complement,
    ConstRef,
    Difference,
    EmptyLit,
    Intersect,
    LinearSetMap,
    NormalForm,
    SetExpr,
    SetMap,
    SymDiff,
    Union,
    UniverseLit,
    Var,
    as_linear,
    augment_constants,
    check_composition_bound,
    compose,
    desugar,
    normal_form,
)
from .intervals import Endpoint, Interval, IntervalSet, Universe, parse_interval_set
from .sim import Trajectory, TopologyView, render_timeline, simulate

__version__ = "0.1.0"
