"""The deduction relation: six rules over sequents, plus the HOL axiom set.

Axioms are stored schematically: their for-all-quantified variables appear
as free variables with reserved %-names, to be specialized with trm-inst /
typ-inst.  (With a defined universal quantifier, closed axioms could never
be eliminated by the six rules; the instantiation rules exist exactly to
specialize schematic axioms and theorems.)

Axiom sets admissible as assm leaves are kept in a registry; "HOL" is
registered here and "SoftTypeOps" by the softtypes module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import RuleMismatch, SideConditionViolated, TypeMismatch
from .sequent import Sequent, fv_set, mk_sequent, tv_set
from .signature import (
    A,
    BOOL,
    FALSE,
    LOGIC,
    TRUE,
    conj,
    disj,
    eq,
    imp,
    neg,
    the_else,
)
from .syntax import (
    Abs,
    App,
    Const,
    Term,
    Type,
    Var,
    canon_norm,
    free_vars,
    lam,
    subst_term,
    subst_type_in_term,
    type_of,
)

# ---------------------------------------------------------------------------
# The HOL axiom block.  Schematic variables: %x %y %p %q %d at type %a or *.

_x = Var("%x", A)
_y = Var("%y", A)
_pA = Var("%p", A >> BOOL)
_pB = Var("%p", BOOL)
_qB = Var("%q", BOOL)
_rB = Var("%r", BOOL)
_d = Var("%d", A)
_P = Var("%P", A >> BOOL)
_b = Var("%b", BOOL)
_c = Var("%c", A)
_idB = lam(Var("%z", BOOL), Var("%z", BOOL))

HOL_AXIOMS: dict[str, Term] = {
    # reflexivity of equality
    "refl": eq(_x, _x),
    # indiscernability of equal objects
    "subst": imp(eq(_x, _y), imp(App(_pA, _x), App(_pA, _y))),
    # law of the excluded middle
    "em": disj(eq(_pB, TRUE), eq(_pB, FALSE)),
    # definite description with default
    "iota_intro": imp(App(LOGIC.mk("ex1"), _pA), App(_pA, the_else(_d, _pA))),
    "iota_default": imp(neg(App(LOGIC.mk("ex1"), _pA)), eq(the_else(_d, _pA), _d)),
    # conditional operator
    "def_IF": eq(
        LOGIC.mk("IF"),
        lam(
            _b,
            Var("%u", A),
            Var("%v", A),
            the_else(
                Var("%u", A),
                Abs(
                    _c,
                    conj(
                        imp(_b, eq(_c, Var("%u", A))),
                        imp(neg(_b), eq(_c, Var("%v", A))),
                    ),
                ),
            ),
        ),
    ),
    # simple definitions completing the connectives (Church encodings)
    "def_True": eq(TRUE, eq(_idB, _idB)),
    "def_all": eq(LOGIC.mk("all"), Abs(_P, eq(_P, Abs(_x, TRUE)))),
    "def_ex": eq(
        LOGIC.mk("ex"),
        Abs(
            _P,
            App(
                LOGIC.mk("all", {"%a": BOOL}),
                Abs(
                    _qB,
                    imp(
                        App(LOGIC.mk("all"), Abs(_x, imp(App(_P, _x), _qB))),
                        _qB,
                    ),
                ),
            ),
        ),
    ),
    "def_False": eq(FALSE, App(LOGIC.mk("all", {"%a": BOOL}), Abs(_pB, _pB))),
    "def_not": eq(LOGIC.mk("not"), Abs(_pB, imp(_pB, FALSE))),
    "def_and": eq(
        LOGIC.mk("and"),
        lam(
            _pB,
            _qB,
            App(
                LOGIC.mk("all", {"%a": BOOL}),
                Abs(_rB, imp(imp(_pB, imp(_qB, _rB)), _rB)),
            ),
        ),
    ),
    "def_or": eq(
        LOGIC.mk("or"),
        lam(
            _pB,
            _qB,
            App(
                LOGIC.mk("all", {"%a": BOOL}),
                Abs(_rB, imp(imp(_pB, _rB), imp(imp(_qB, _rB), _rB))),
            ),
        ),
    ),
    "def_iff": eq(LOGIC.mk("iff"), lam(_pB, _qB, eq(_pB, _qB))),
    "def_exle1": eq(
        LOGIC.mk("exle1"),
        Abs(
            _P,
            App(
                LOGIC.mk("all"),
                Abs(
                    _x,
                    App(
                        LOGIC.mk("all"),
                        Abs(_y, imp(App(_P, _x), imp(App(_P, _y), eq(_x, _y)))),
                    ),
                ),
            ),
        ),
    ),
    "def_ex1": eq(
        LOGIC.mk("ex1"),
        Abs(_P, conj(App(LOGIC.mk("ex"), _P), App(LOGIC.mk("exle1"), _P))),
    ),
}

HOL: frozenset[Term] = frozenset(canon_norm(t) for t in HOL_AXIOMS.values())

# assm-admissible axiom sets; softtypes registers "SoftTypeOps" on import.
AXIOM_SETS: dict[str, frozenset[Term]] = {"HOL": HOL}


def register_axiom_set(name: str, formulas) -> None:
    AXIOM_SETS[name] = frozenset(canon_norm(t) for t in formulas)


def _admissible(phi: Term, seq_defs: frozenset[Term], seq_hyps: frozenset[Term]) -> bool:
    if phi in seq_defs or phi in seq_hyps:
        return True
    return any(phi in s for s in AXIOM_SETS.values())


# ---------------------------------------------------------------------------
# The six rules

RULES = ("assm", "impI", "impE", "typ_inst", "trm_inst", "ext")


def _split_imp(phi: Term) -> tuple[Term, Term]:
    match phi:
        case App(App(Const("imp", _), a), b):
            return a, b
    raise RuleMismatch(f"conclusion is not an implication: {phi}")


def derive(rule: str, premises: list[Sequent], extras: dict[str, Any]) -> Sequent:
    """Apply one inference rule; raises RuleMismatch / SideConditionViolated."""
    if rule == "assm":
        if premises:
            raise RuleMismatch("assm takes no premises")
        seq = mk_sequent(extras["delta"], extras["gamma"], extras["formula"])
        if not _admissible(seq.concl, seq.defs, seq.hyps):
            raise SideConditionViolated(
                "assm-membership", f"formula not in HOL, SoftTypeOps, Delta or Gamma"
            )
        return seq

    if rule == "impI":
        (s,) = premises
        phi = canon_norm(extras["discharge"])
        if phi not in s.hyps:
            raise SideConditionViolated("impI-hypothesis", "discharged formula not in Gamma")
        return Sequent(s.defs, s.hyps - {phi}, canon_norm(imp(phi, s.concl)))

    if rule == "impE":
        s1, s2 = premises
        if s1.defs != s2.defs or s1.hyps != s2.hyps:
            raise RuleMismatch("impE premises have different contexts")
        a, b = _split_imp(s1.concl)
        if canon_norm(a) != s2.concl:
            raise RuleMismatch("impE minor premise does not match the antecedent")
        return Sequent(s1.defs, s1.hyps, canon_norm(b))

    if rule == "typ_inst":
        (s,) = premises
        alpha: str = extras["tyvar"]
        sigma: Type = extras["type"]
        if alpha in tv_set(s.hyps):
            raise SideConditionViolated("typ-inst", f"{alpha} occurs in TV(Gamma)")
        return Sequent(s.defs, s.hyps, canon_norm(subst_type_in_term(s.concl, {alpha: sigma})))

    if rule == "trm_inst":
        (s,) = premises
        x: Var = extras["var"]
        b: Term = extras["term"]
        if type_of(b) != x.ty:
            raise SideConditionViolated("trm-inst-typing", f"term is not of type of {x.name}")
        if x in fv_set(s.defs | s.hyps):
            raise SideConditionViolated("trm-inst", f"{x.name} occurs free in Delta or Gamma")
        return Sequent(s.defs, s.hyps, canon_norm(subst_term(s.concl, x, b)))

    if rule == "ext":
        (s,) = premises
        x: Var = extras["var"]
        f: Term = extras["lhs"]
        g: Term = extras["rhs"]
        if x in free_vars(f) | free_vars(g):
            raise SideConditionViolated("ext", f"{x.name} occurs free in an operand")
        if x in fv_set(s.defs | s.hyps):
            raise SideConditionViolated("ext", f"{x.name} occurs free in Delta or Gamma")
        if canon_norm(eq(App(f, x), App(g, x))) != s.concl:
            raise RuleMismatch("ext premise is not F x = G x for the given F, G, x")
        return Sequent(s.defs, s.hyps, canon_norm(eq(f, g)))

    raise RuleMismatch(f"unknown rule '{rule}'")


# ---------------------------------------------------------------------------
# Derivation trees (stored proof objects)


@dataclass(frozen=True)
class Derivation:
    rule: str
    premises: tuple["Derivation", ...] = ()
    extras: dict[str, Any] = field(default_factory=dict)

    def replay(self) -> Sequent:
        """Re-validate every step; returns the concluded sequent."""
        return derive(self.rule, [p.replay() for p in self.premises], self.extras)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)
