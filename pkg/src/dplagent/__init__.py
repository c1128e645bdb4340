"""Mental-state engine for BDI agents grounded in dynamic preference logic."""

from .errors import *  # noqa: F401,F403
from .plans import Plan, PlanLibrary, make_plan_library, post_entails
from .program import (
    AgentProgram,
    CoherenceReport,
    RankedFormula,
    StratifiedBase,
    base_entails,
    is_coherent,
    max_consistent,
    query,
)
from .syntax import (
    ConjClause,
    DnfFormula,
    Literal,
    Vocabulary,
    desugar,
    parse_formula,
    print_formula,
    to_conj_clause,
    to_dnf,
)
from .dynamics import (
    announce,
    cont_base,
    contract_belief,
    contract_desire,
    revise_belief,
    revise_desire,
)
from .semantics import (
    AgentModel,
    Preorder,
    World,
    evaluate,
    extension,
    extract_program,
    induced_model,
    induced_order,
    models_equal,
)

__version__ = "0.1.0"
