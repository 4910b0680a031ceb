"""Builders for derivation trees over the six primitive rules.

Everything here is plumbing for *constructing* stored proof objects; no
proof search.  A `Bld` is a function from a context to a theorem, so the
same proof fragment can be replayed under extended hypothesis sets (needed
whenever a hypothesis is discharged inside a sub-proof).

The bootstrap order matters: equality reasoning (sym/trans/cong/eq_mp)
comes from the schematic subst axiom, truth of `True` from its definition,
forall-elimination from the definition of `all` plus congruence, and
forall-introduction from `ext` plus the excluded middle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..errors import RuleMismatch
from .deduction import HOL_AXIOMS, Derivation, derive
from .sequent import Sequent
from .signature import BOOL, FALSE, TRUE, eq, imp
from .syntax import (
    Abs,
    App,
    Arrow,
    Const,
    Term,
    Type,
    Var,
    beta_normalize,
    canon_norm,
    free_vars,
    type_of,
)


@dataclass(frozen=True)
class Ctx:
    delta: frozenset
    hyps: frozenset

    def plus(self, *phis: Term) -> "Ctx":
        return Ctx(self.delta, self.hyps | {canon_norm(p) for p in phis})


def ctx(defs=(), hyps=()) -> Ctx:
    return Ctx(frozenset(canon_norm(d) for d in defs), frozenset(canon_norm(h) for h in hyps))


@dataclass(frozen=True)
class Thm:
    deriv: Derivation
    seq: Sequent


Bld = Callable[[Ctx], Thm]


def _step(rule: str, premises: list[Thm], extras: dict) -> Thm:
    seq = derive(rule, [p.seq for p in premises], extras)
    return Thm(Derivation(rule, tuple(p.deriv for p in premises), extras), seq)


# -- primitive steps --------------------------------------------------------


def assume(c: Ctx, phi: Term) -> Thm:
    return _step("assm", [], {"delta": c.delta, "gamma": c.hyps, "formula": phi})


def imp_i(t: Thm, phi: Term) -> Thm:
    return _step("impI", [t], {"discharge": phi})


def imp_e(t_imp: Thm, t_min: Thm) -> Thm:
    return _step("impE", [t_imp, t_min], {})


def typ_i(t: Thm, tyvar: str, ty: Type) -> Thm:
    return _step("typ_inst", [t], {"tyvar": tyvar, "type": ty})


def trm_i(t: Thm, var: Var, term: Term) -> Thm:
    return _step("trm_inst", [t], {"var": var, "term": term})


def ext_i(t: Thm, x: Var, lhs: Term, rhs: Term) -> Thm:
    return _step("ext", [t], {"var": x, "lhs": lhs, "rhs": rhs})


# -- instantiation of schematic theorems ------------------------------------


def inst(t: Thm, tymap: dict[str, Type] | None, vals: list[tuple[str, Term]]) -> Thm:
    """typ-inst the given type variables, then trm-inst schematic variables
    of the conclusion by name, in order."""
    for a, ty in (tymap or {}).items():
        t = typ_i(t, a, ty)
    for name, term in vals:
        here = {v.name: v for v in free_vars(t.seq.concl)}
        if name not in here:
            raise RuleMismatch(f"no free schematic variable '{name}' to instantiate")
        t = trm_i(t, here[name], term)
    return t


def b_ax(name: str) -> Bld:
    return lambda c: assume(c, HOL_AXIOMS[name])


def b_inst(name: str, tymap: dict[str, Type] | None, vals: list[tuple[str, Term]]) -> Bld:
    return lambda c: inst(assume(c, HOL_AXIOMS[name]), tymap, vals)


def b_assume(phi: Term) -> Bld:
    return lambda c: assume(c, phi)


def b_imp_i(phi: Term, body: Bld) -> Bld:
    def bld(c: Ctx) -> Thm:
        assert canon_norm(phi) not in c.hyps, "discharging an ambient hypothesis"
        return imp_i(body(c.plus(phi)), phi)

    return bld


def b_imp_e(f: Bld, a: Bld) -> Bld:
    return lambda c: imp_e(f(c), a(c))


def b_chain(f: Bld, *args: Bld) -> Bld:
    out = f
    for a in args:
        out = b_imp_e(out, a)
    return out


# -- equality reasoning ------------------------------------------------------


def _dest_eq(phi: Term) -> tuple[Term, Term]:
    match phi:
        case App(App(Const("eq", _), a), b):
            return a, b
    raise RuleMismatch(f"not an equation: {phi}")


def b_refl(term: Term) -> Bld:
    return b_inst("refl", {"%a": type_of(term)}, [("%x", term)])


def b_eq_mp(b_ab: Bld, b_a: Bld) -> Bld:
    """From |- a = b and |- a conclude |- b (for boolean a, b)."""

    def bld(c: Ctx) -> Thm:
        t_ab = b_ab(c)
        a, b = _dest_eq(t_ab.seq.concl)
        ident = Abs(Var("w'", BOOL), Var("w'", BOOL))
        ax = b_inst("subst", {"%a": BOOL}, [("%p", ident), ("%x", a), ("%y", b)])(c)
        return imp_e(imp_e(ax, t_ab), b_a(c))

    return bld


def b_sym(b_st: Bld) -> Bld:
    def bld(c: Ctx) -> Thm:
        t = b_st(c)
        s, tt = _dest_eq(t.seq.concl)
        sigma = type_of(s)
        p = Abs(Var("w'", sigma), eq(Var("w'", sigma), s))
        ax = b_inst("subst", {"%a": sigma}, [("%p", p), ("%x", s), ("%y", tt)])(c)
        return imp_e(imp_e(ax, t), b_refl(s)(c))

    return bld


def b_trans(b_st: Bld, b_tu: Bld) -> Bld:
    def bld(c: Ctx) -> Thm:
        t1, t2 = b_st(c), b_tu(c)
        s, t = _dest_eq(t1.seq.concl)
        t_, u = _dest_eq(t2.seq.concl)
        if canon_norm(t) != canon_norm(t_):
            raise RuleMismatch("trans: middle terms differ")
        sigma = type_of(s)
        p = Abs(Var("w'", sigma), eq(s, Var("w'", sigma)))
        ax = b_inst("subst", {"%a": sigma}, [("%p", p), ("%x", t), ("%y", u)])(c)
        return imp_e(imp_e(ax, t2), t1)

    return bld


def b_cong(b_st: Bld, context: Term) -> Bld:
    """From |- s = t conclude |- C s = C t for an operator-valued context C."""

    def bld(c: Ctx) -> Thm:
        t = b_st(c)
        s, tt = _dest_eq(t.seq.concl)
        sigma = type_of(s)
        cs = beta_normalize(App(context, s))
        p = Abs(Var("w'", sigma), eq(cs, App(context, Var("w'", sigma))))
        ax = b_inst("subst", {"%a": sigma}, [("%p", p), ("%x", s), ("%y", tt)])(c)
        return imp_e(imp_e(ax, t), b_refl(cs)(c))

    return bld


def b_true() -> Bld:
    ident = Abs(Var("z'", BOOL), Var("z'", BOOL))
    return b_eq_mp(b_sym(b_ax("def_True")), b_refl(ident))


def b_eq_true_elim(b_pt: Bld) -> Bld:
    """From |- phi = True conclude |- phi."""
    return b_eq_mp(b_sym(b_pt), b_true())


def b_unfold(definition: Term, tymap: dict[str, Type] | None, args: list[Term]) -> Bld:
    """From a definition kappa = D conclude |- kappa a1..an = D a1..an."""

    def bld(c: Ctx) -> Thm:
        t = assume(c, definition)
        for a, ty in (tymap or {}).items():
            t = typ_i(t, a, ty)
        lhs, _ = _dest_eq(t.seq.concl)
        if args:
            w = Var("w'", type_of(lhs))
            body: Term = w
            for a in args:
                body = App(body, a)
            t = b_cong(lambda _c: t, Abs(w, body))(c)
        return t

    return bld


# -- quantifiers -------------------------------------------------------------


def _dest_all(phi: Term) -> tuple[Term, Type]:
    match phi:
        case App(Const("all", Arrow(Arrow(sigma, _), _)), q):
            return q, sigma
    raise RuleMismatch(f"not a universal statement: {phi}")


def b_forall_elim(b_all: Bld, witness: Term) -> Bld:
    def bld(c: Ctx) -> Thm:
        t = b_all(c)
        q, sigma = _dest_all(t.seq.concl)
        e1 = b_unfold(HOL_AXIOMS["def_all"], {"%a": sigma}, [q])(c)
        e2 = b_eq_mp(lambda _c: e1, lambda _c: t)(c)
        w = Var("w'", Arrow(sigma, BOOL))
        e3 = b_cong(lambda _c: e2, Abs(w, App(w, witness)))(c)
        return b_eq_true_elim(lambda _c: e3)(c)

    return bld


def b_forall_elims(b_all: Bld, *witnesses: Term) -> Bld:
    out = b_all
    for w in witnesses:
        out = b_forall_elim(out, w)
    return out


def b_false_elim(b_false: Bld, phi: Term) -> Bld:
    all_forms = b_eq_mp(b_ax("def_False"), b_false)
    return b_forall_elim(all_forms, phi)


def b_or_elim(b_or: Bld, chi: Term, left: Bld, right: Bld) -> Bld:
    def bld(c: Ctx) -> Thm:
        t = b_or(c)
        match t.seq.concl:
            case App(App(Const("or", _), a), b):
                pass
            case _:
                raise RuleMismatch("or_elim premise is not a disjunction")
        u = b_unfold(HOL_AXIOMS["def_or"], None, [a, b])
        t_all = b_eq_mp(u, lambda _c: t)
        t_inst = b_forall_elim(t_all, chi)
        return b_chain(t_inst, b_imp_i(a, left), b_imp_i(b, right))(c)

    return bld


def b_eq_true_intro(phi: Term, b_phi: Bld) -> Bld:
    """From |- phi conclude |- phi = True (via the excluded middle)."""
    chi = eq(phi, TRUE)
    em = b_inst("em", None, [("%p", phi)])

    def right(c2: Ctx) -> Thm:
        t_false = b_eq_mp(b_assume(eq(phi, FALSE)), b_phi)(c2)
        return b_false_elim(lambda _c: t_false, chi)(c2)

    return b_or_elim(em, chi, b_assume(chi), right)


def b_forall_intro(x: Var, phi: Term, b_phi: Bld) -> Bld:
    def bld(c: Ctx) -> Thm:
        e1 = b_eq_true_intro(phi, b_phi)(c)
        f, g = Abs(x, phi), Abs(x, TRUE)
        e2 = ext_i(e1, x, f, g)
        e3 = b_unfold(HOL_AXIOMS["def_all"], {"%a": x.ty}, [f])(c)
        return b_eq_mp(b_sym(lambda _c: e3), lambda _c: e2)(c)

    return bld


def b_forall_intros(xs: list[Var], phi: Term, b_phi: Bld) -> Bld:
    from .signature import forall

    out = b_phi
    body = phi
    for x in reversed(xs):
        out = b_forall_intro(x, body, out)
        body = forall(x, body)
    return out


# -- connectives -------------------------------------------------------------


def b_and_intro(a: Term, b: Term, b_a: Bld, b_b: Bld) -> Bld:
    r = Var("r'", BOOL)
    hyp = imp(a, imp(b, r))
    step = b_chain(b_assume(hyp), b_a, b_b)
    t_imp = b_imp_i(hyp, step)
    body = imp(hyp, r)
    t_all = b_forall_intro(r, body, t_imp)
    fold = b_sym(b_unfold(HOL_AXIOMS["def_and"], None, [a, b]))
    return b_eq_mp(fold, t_all)


def _dest_and(phi: Term) -> tuple[Term, Term]:
    match phi:
        case App(App(Const("and", _), a), b):
            return a, b
    raise RuleMismatch(f"not a conjunction: {phi}")


def _b_and_elim(b_ab: Bld, side: str) -> Bld:
    def bld(c: Ctx) -> Thm:
        t = b_ab(c)
        a, b = _dest_and(t.seq.concl)
        u = b_unfold(HOL_AXIOMS["def_and"], None, [a, b])
        t_all = b_eq_mp(u, lambda _c: t)
        goal = a if side == "left" else b
        t_inst = b_forall_elim(t_all, goal)
        triv = b_imp_i(a, b_imp_i(b, b_assume(goal)))
        return b_imp_e(t_inst, triv)(c)

    return bld


def b_and_elim_left(b_ab: Bld) -> Bld:
    return _b_and_elim(b_ab, "left")


def b_and_elim_right(b_ab: Bld) -> Bld:
    return _b_and_elim(b_ab, "right")


def b_or_intro(a: Term, b: Term, b_side: Bld, side: str) -> Bld:
    r = Var("r'", BOOL)
    ha, hb = imp(a, r), imp(b, r)
    use = b_assume(ha) if side == "left" else b_assume(hb)
    step = b_imp_e(use, b_side)
    t_imp = b_imp_i(ha, b_imp_i(hb, step))
    body = imp(ha, imp(hb, r))
    t_all = b_forall_intro(r, body, t_imp)
    fold = b_sym(b_unfold(HOL_AXIOMS["def_or"], None, [a, b]))
    return b_eq_mp(fold, t_all)


def b_or_intro_left(a: Term, b: Term, b_a: Bld) -> Bld:
    return b_or_intro(a, b, b_a, "left")


def b_or_intro_right(a: Term, b: Term, b_b: Bld) -> Bld:
    return b_or_intro(a, b, b_b, "right")
