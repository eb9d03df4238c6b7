"""Minimum-cost and sparsest input selection for structural controllability.

The pipeline: model a selection problem as a small ILP over the system
bipartite graph, relax it, solve the relaxation with an exact rational
simplex, and read the selection off the integral vertex; matrices
built under the source-grouped input constraint are totally
unimodular, which is what makes the vertex integral, and the
unimodular module can certify that on concrete instances.
"""

from .errors import (
    CertificateFailure,
    CtrlselError,
    GenerationExhausted,
    GroupingViolation,
    InfeasibleSystem,
    NonIntegralSolution,
    TooLarge,
    ZeroMaxCost,
)
from .graphs import (
    ControllabilityCertificate,
    StructuredSystem,
    build_bipartite,
    build_system_digraph,
    is_structurally_controllable,
    max_matching,
    scc_decompose,
)
from .instances import (
    InstanceParseError,
    dump_instance,
    dumps_instance,
    load_instance,
    loads_instance,
)
from .models import (
    InputSelection,
    SolveResult,
    check_assumption_grouped,
    check_assumption_sc,
    solve_problem,
)
from .oracle import (
    InstanceGenSpec,
    OracleSolution,
    brute_force_solve,
    generate_instance,
    generic_rank_controllable,
)
from .unimodular import (
    AugmentedIncidence,
    TuVerdict,
    build_incidence_m,
    build_incidence_m_hat,
    build_standard_form_matrix,
    tu_exhaustive,
    tu_ghouila_houri,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedIncidence",
    "CertificateFailure",
    "ControllabilityCertificate",
    "CtrlselError",
    "GenerationExhausted",
    "GroupingViolation",
    "InfeasibleSystem",
    "InputSelection",
    "InstanceGenSpec",
    "InstanceParseError",
    "NonIntegralSolution",
    "OracleSolution",
    "SolveResult",
    "StructuredSystem",
    "TooLarge",
    "TuVerdict",
    "ZeroMaxCost",
    "brute_force_solve",
    "build_bipartite",
    "build_incidence_m",
    "build_incidence_m_hat",
    "build_standard_form_matrix",
    "build_system_digraph",
    "check_assumption_grouped",
    "check_assumption_sc",
    "dump_instance",
    "dumps_instance",
    "generate_instance",
    "generic_rank_controllable",
    "is_structurally_controllable",
    "load_instance",
    "loads_instance",
    "max_matching",
    "scc_decompose",
    "solve_problem",
    "tu_exhaustive",
    "tu_ghouila_houri",
]
