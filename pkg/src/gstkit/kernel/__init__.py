from .syntax import (  # noqa: F401
    Abs, App, Arrow, BOOL, BoolTy, Const, D0, Domain, Term, TyVar, Type, Var,
    alpha_eq, beta_normalize, canon_norm, canonical, free_vars, is_instance,
    lam, subst_term, subst_type, subst_type_in_term, type_of, type_vars,
    term_from_sexp, term_to_sexp, term_from_str, term_to_str,
    type_from_sexp, type_to_sexp,
)
from .signature import LOGIC, Signature, infer_type  # noqa: F401
from .sequent import Sequent, mk_sequent  # noqa: F401
from .deduction import HOL, HOL_AXIOMS, Derivation, derive  # noqa: F401
