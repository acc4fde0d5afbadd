"""Modal non-associative Lambek calculus with vector-space semantics.

Proof search for the display calculus, K-algebras and their subspace
lattices, modal relations, and the embedding of finite modal residuated
posets into subspace lattices over F2.
"""

from ._accel import backend_name
from .calculus import BASE, Limits, NoProofWithinBound, ProofTree, RuleSet, check_proof, export_latex, prove
from .completeness import (
    Embedding,
    ModalResiduatedPoset,
    embed,
    handcrafted_three,
    search_countermodel,
    validate_poset,
    verify_embedding,
)
from .complex_algebra import box, check_vplus_property, dia, eval_term, holds, lres, rres, tensor
from .fields import F2, Q, Field
from .kalgebra import (
    KAlgebra,
    PseudoVerdict,
    builtin_octonions,
    builtin_quaternions,
    check_pseudo,
    check_pseudo_modal,
    random_algebra,
    star,
)
from .linalg import Subspace, Vector, span
from .relations import ModalRelation, validate_relation
from .syntax import ParseError, parse_formula, parse_lexicon, parse_sentence, parse_sequent, print_formula, print_sequent
from .terms import Sequent

__version__ = "0.1.0"
