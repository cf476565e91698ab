"""Proof search, derivation checking and countermodel tools for
relational hypersequent calculi over modal logics."""

from .syntax import (
    And,
    Atom,
    Box,
    Formula,
    Hypersequent,
    Neg,
    Or,
    ParseError,
    Sequent,
    formula_to_text,
    hypersequent_to_text,
    modal_depth,
    parse_formula,
    parse_hypersequent,
    parse_sequent,
    sequent_to_text,
    subformula_closure,
)
from .calculus import (
    CalculusSpec,
    Derivation,
    DerivationResult,
    RuleApplication,
    RuleId,
    check_derivation,
    check_step,
    derivation_from_data,
    derivation_to_data,
)
from .kripke import (
    BoundedVerdict,
    FrameClass,
    KripkeFrame,
    KripkeModel,
    bounded_validity,
    branches,
    check_frame_class,
    countermodels_hypersequent,
    evaluate,
    model_from_data,
    model_to_data,
)
from .ps4 import (
    PS4Frame,
    PS4Model,
    STAR,
    builtin_fig5_model,
    check_ps4_frame,
    check_s_preservation,
    copy_branch,
    evaluate3,
    ps4_countermodel,
    ps4_model_from_data,
    ps4_model_to_data,
    random_ps4_model,
)
from .search import SearchLimits, SearchOutcome, default_limits, fuzz_derivations, search
from .transform import (
    TransformError,
    TranslationResult,
    ec_from_merge,
    eliminate_merge,
    invert,
    proof_from_translation,
    proof_of_translation,
    translate,
)
from .decide import DecideLimits, DecideResult, decide, extract_model, saturate

__version__ = "0.1.0"
