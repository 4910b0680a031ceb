"""Soft types: combinator definitions, notation, and derived rules.

Three things live here:

* `SOFT_DEFS` / `soft_defs()` -- the simple definitions of the soft type
  operators (:), Top, Bot, TFun, TPi, TAnd, TOr, TSub, registered as an
  assm-admissible axiom set named "SoftTypeOps".

* the notation layer -- `Reader` turns sugared s-expressions (bounded
  quantifiers, dependent operator types, set-membership-bounded
  quantifiers, n-ary connectives) into core terms; `desugar` is its
  term-level entry point and `resugar` the inverse on the sugared fragment.

* `derived_rules()` -- eleven introduction/elimination rules for the
  combinators, stored as replayable derivation trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ReplayFailed, SexpError
from .kernel.deduction import register_axiom_set
from .kernel.prooflib import (
    Bld,
    Ctx,
    Thm,
    b_and_elim_left,
    b_and_elim_right,
    b_and_intro,
    b_assume,
    b_eq_mp,
    b_forall_elim,
    b_forall_intro,
    b_imp_e,
    b_imp_i,
    b_or_intro_left,
    b_or_intro_right,
    b_sym,
    b_unfold,
    ctx as mk_ctx,
)
from .kernel.sequent import Sequent
from .kernel.deduction import Derivation
from .kernel.signature import (
    A,
    B,
    BOOL,
    LOGIC,
    Signature,
    TRUE,
    FALSE,
    conj,
    disj,
    eq,
    forall,
    iff,
    imp,
    ite,
    neg,
    quant,
    st,
    tand,
    the_else,
    tfun,
    top,
    bot,
    tor,
    tsub,
)
from .kernel.syntax import (
    Abs,
    App,
    Arrow,
    Const,
    RESERVED_PREFIX,
    Term,
    Type,
    TyVar,
    Var,
    free_vars,
    lam,
    spine,
    type_from_sexp,
    type_of,
    type_to_sexp,
)
from . import sexp as _sexp

# ---------------------------------------------------------------------------
# The SoftTypeOps definition set

_xA = Var("x", A)
_pA = Var("p", Arrow(A, BOOL))
_qA = Var("q", Arrow(A, BOOL))
_qB = Var("q", Arrow(B, BOOL))
_qAB = Var("q", Arrow(A, Arrow(B, BOOL)))
_fAB = Var("f", Arrow(A, B))

SOFT_DEFS: dict[str, Term] = {
    "def_st": eq(LOGIC.mk(":"), lam(_xA, _pA, App(_pA, _xA))),
    "def_top": eq(LOGIC.mk("Top"), Abs(_xA, TRUE)),
    "def_bot": eq(LOGIC.mk("Bot"), Abs(_xA, FALSE)),
    "def_tfun": eq(
        LOGIC.mk("TFun"),
        lam(_pA, _qB, _fAB, forall(_xA, imp(st(_xA, _pA), st(App(_fAB, _xA), _qB)))),
    ),
    "def_tpi": eq(
        LOGIC.mk("TPi"),
        lam(
            _pA,
            _qAB,
            _fAB,
            forall(_xA, imp(st(_xA, _pA), st(App(_fAB, _xA), App(_qAB, _xA)))),
        ),
    ),
    "def_tand": eq(
        LOGIC.mk("TAnd"), lam(_pA, _qA, _xA, conj(st(_xA, _pA), st(_xA, _qA)))
    ),
    "def_tor": eq(LOGIC.mk("TOr"), lam(_pA, _qA, _xA, disj(st(_xA, _pA), st(_xA, _qA)))),
    "def_tsub": eq(
        LOGIC.mk("TSub"), lam(_pA, _qA, forall(_xA, imp(st(_xA, _pA), st(_xA, _qA))))
    ),
}

register_axiom_set("SoftTypeOps", SOFT_DEFS.values())


def soft_defs() -> dict[str, Term]:
    """The soft type operator definitions, keyed def_<op>; idempotent."""
    return dict(SOFT_DEFS)


def soft_def_lookup(op_name: str) -> Term:
    """The definition body for a soft operator, e.g. 'TAnd'."""
    key = {
        ":": "def_st",
        "Top": "def_top",
        "Bot": "def_bot",
        "TFun": "def_tfun",
        "TPi": "def_tpi",
        "TAnd": "def_tand",
        "TOr": "def_tor",
        "TSub": "def_tsub",
    }[op_name]
    match SOFT_DEFS[key]:
        case App(App(Const("eq", _), _), body):
            return body
    raise AssertionError


# ---------------------------------------------------------------------------
# Notation: sugared s-expressions -> core terms

_BINDERS = {"all": "all", "ex": "ex", "ex1": "ex1", "exle1": "exle1"}
_BOUNDED = {"all-st": "all", "ex-st": "ex", "ex1-st": "ex1", "exle1-st": "exle1"}
_MEM_BOUNDED = {"all-mem": "all", "ex-mem": "ex"}


def _elem_ty(p: Term) -> Type:
    ty = type_of(p)
    if not (isinstance(ty, Arrow) and ty.right == BOOL):
        raise SexpError(f"bound is not a soft type: {ty}")
    return ty.left


class Reader:
    """Reads sugared term s-expressions against a signature.

    Bare symbols resolve to the innermost bound variable of that name, or
    else to a constant at its declared type.  %-prefixed names are
    reserved for the kernel and rejected.
    """

    def __init__(self, sig: Signature):
        self.sig = sig

    def term(self, sx, bound: tuple = ()) -> Term:
        if isinstance(sx, str):
            return self._symbol(sx, bound)
        if isinstance(sx, int):
            raise SexpError(f"unexpected number {sx} in term position")
        if not isinstance(sx, tuple) or not sx:
            raise SexpError("empty term")
        head = sx[0]
        if isinstance(head, str):
            handler = getattr(self, f"_form_{head.replace('-', '_')}", None)
            if handler is not None:
                return handler(sx, bound)
        # generic application spine
        t = self.term(head, bound)
        for arg in sx[1:]:
            t = App(t, self.term(arg, bound))
        return t

    # -- helpers

    def _symbol(self, name: str, bound: tuple) -> Term:
        if name.startswith(RESERVED_PREFIX):
            raise SexpError(f"'%'-prefixed names are reserved: {name}")
        for v in reversed(bound):
            if v.name == name:
                return v
        if name in self.sig:
            return self.sig.mk(name)
        raise SexpError(f"unknown symbol '{name}'")

    def _binder_specs(self, sx) -> list:
        if not isinstance(sx, tuple) or not all(
            isinstance(b, tuple) and len(b) == 2 and isinstance(b[0], str) for b in sx
        ):
            raise SexpError(f"bad binder list: {sx}")
        return list(sx)

    # -- special forms

    def _form_var(self, sx, bound):
        _, name, ty = sx
        if name.startswith(RESERVED_PREFIX):
            raise SexpError(f"'%'-prefixed names are reserved: {name}")
        return Var(name, type_from_sexp(ty))

    def _form_const(self, sx, bound):
        _, name, ty = sx
        return self.sig.at(name, type_from_sexp(ty))

    def _form_app(self, sx, bound):
        if len(sx) != 3:
            raise SexpError("(app ...) takes exactly two arguments")
        return App(self.term(sx[1], bound), self.term(sx[2], bound))

    def _form_lam(self, sx, bound):
        if len(sx) == 4 and isinstance(sx[1], str):  # core form
            v = Var(sx[1], type_from_sexp(sx[2]))
            return Abs(v, self.term(sx[3], bound + (v,)))
        if len(sx) == 3:
            body = sx[2]
            vs = []
            for name, ty in self._binder_specs(sx[1]):
                vs.append(Var(name, type_from_sexp(ty)))
            t = self.term(body, bound + tuple(vs))
            for v in reversed(vs):
                t = Abs(v, t)
            return t
        raise SexpError(f"bad lam form: {sx}")

    def _quant(self, qname: str, sx, bound, mode: str):
        if len(sx) != 3:
            raise SexpError(f"bad {sx[0]} form")
        specs = self._binder_specs(sx[1])
        vs, bounds_ = [], []
        cur = bound
        for name, bexpr in specs:
            if mode == "plain":
                v = Var(name, type_from_sexp(bexpr))
                b = None
            elif mode == "soft":
                p = self.term(bexpr, cur)
                v = Var(name, _elem_ty(p))
                b = p
            else:  # membership bound
                x = self.term(bexpr, cur)
                v = Var(name, type_of(x))
                b = x
            vs.append(v)
            bounds_.append(b)
            cur = cur + (v,)
        body = self.term(sx[2], cur)
        for v, b in zip(reversed(vs), reversed(bounds_)):
            if mode == "plain":
                inner = body
            elif mode == "soft":
                guard = st(v, b)
                inner = imp(guard, body) if qname == "all" else conj(guard, body)
            else:
                guard = App(App(self.sig.mk("mem"), v), b)
                inner = imp(guard, body) if qname == "all" else conj(guard, body)
            body = quant(qname, v, inner)
        return body

    def _form_all(self, sx, bound):
        return self._quant("all", sx, bound, "plain")

    def _form_ex(self, sx, bound):
        return self._quant("ex", sx, bound, "plain")

    def _form_ex1(self, sx, bound):
        return self._quant("ex1", sx, bound, "plain")

    def _form_exle1(self, sx, bound):
        return self._quant("exle1", sx, bound, "plain")

    def _form_all_st(self, sx, bound):
        return self._quant("all", sx, bound, "soft")

    def _form_ex_st(self, sx, bound):
        return self._quant("ex", sx, bound, "soft")

    def _form_ex1_st(self, sx, bound):
        return self._quant("ex1", sx, bound, "soft")

    def _form_exle1_st(self, sx, bound):
        return self._quant("exle1", sx, bound, "soft")

    def _form_all_mem(self, sx, bound):
        return self._quant("all", sx, bound, "mem")

    def _form_ex_mem(self, sx, bound):
        return self._quant("ex", sx, bound, "mem")

    def _nary(self, build, sx, bound):
        args = [self.term(a, bound) for a in sx[1:]]
        if len(args) < 2:
            raise SexpError(f"{sx[0]} needs at least two arguments")
        out = args[-1]
        for a in reversed(args[:-1]):
            out = build(a, out)
        return out

    def _form_and(self, sx, bound):
        return self._nary(conj, sx, bound)

    def _form_or(self, sx, bound):
        return self._nary(disj, sx, bound)

    def _form_imp(self, sx, bound):
        return self._nary(imp, sx, bound)

    def _form_iff(self, sx, bound):
        a, b = (self.term(x, bound) for x in sx[1:3])
        return iff(a, b)

    def _form_not(self, sx, bound):
        return neg(self.term(sx[1], bound))

    def _form_eq(self, sx, bound):
        a, b = (self.term(x, bound) for x in sx[1:3])
        return eq(a, b)

    def _form_st(self, sx, bound):
        x, p = (self.term(e, bound) for e in sx[1:3])
        return st(x, p)

    def _form_tand(self, sx, bound):
        return self._nary(tand, sx, bound)

    def _form_tor(self, sx, bound):
        return self._nary(tor, sx, bound)

    def _form_tsub(self, sx, bound):
        a, b = (self.term(x, bound) for x in sx[1:3])
        return tsub(a, b)

    def _form_tfun(self, sx, bound):
        return self._nary(tfun, sx, bound)

    def _form_tpi(self, sx, bound):
        if len(sx) != 3:
            raise SexpError("(tpi (x P) Q) takes a binder and the codomain soft type")
        name, pexpr = sx[1]
        p = self.term(pexpr, bound)
        v = Var(name, _elem_ty(p))
        q = self.term(sx[2], bound + (v,))
        return App(
            App(LOGIC.mk("TPi", {"%a": _elem_ty(p), "%b": _elem_ty(q)}), p),
            Abs(v, q),
        )

    def _form_top(self, sx, bound):
        return top(type_from_sexp(sx[1]))

    def _form_bot(self, sx, bound):
        return bot(type_from_sexp(sx[1]))

    def _form_if(self, sx, bound):
        c, a, b = (self.term(x, bound) for x in sx[1:4])
        return ite(c, a, b)

    def _form_the_else(self, sx, bound):
        if len(sx) != 4:
            raise SexpError("(the-else D (x ty) body)")
        d = self.term(sx[1], bound)
        name, ty = sx[2]
        v = Var(name, type_from_sexp(ty))
        return the_else(d, Abs(v, self.term(sx[3], bound + (v,))))


def desugar(notation, sig: Signature | None = None) -> Term:
    """Expand sugared notation into a core term; identity on core terms."""
    if isinstance(notation, Term):
        return notation
    if isinstance(notation, str):
        notation = _sexp.parse_sexp(notation)
    return Reader(sig if sig is not None else LOGIC).term(notation)


# ---------------------------------------------------------------------------
# Resugaring (inverse pretty-printer on the sugared fragment)

_BIN_FORMS = {"imp": "imp", "and": "and", "or": "or", "iff": "iff", "eq": "eq"}
_SOFT_BIN = {"TAnd": "tand", "TOr": "tor", "TSub": "tsub", "TFun": "tfun"}


def resugar(t: Term, sig: Signature | None = None, bound: tuple = ()):
    """Render a core term as a sugared s-expression; desugar(resugar(t)) == t."""
    sig = sig if sig is not None else LOGIC

    def go(t: Term, bound: tuple):
        match t:
            case Var(name, ty):
                if any(v.name == name and v == Var(name, ty) for v in bound):
                    return name
                return ("var", name, type_to_sexp(ty))
            case Const(name, ty):
                if name in sig and sig.ctyp(name) == ty:
                    return name
                return ("const", name, type_to_sexp(ty))
            case App(App(Const(cn, _), a), b) if cn in _BIN_FORMS:
                return (_BIN_FORMS[cn], go(a, bound), go(b, bound))
            case App(App(Const(":", _), x), p):
                return ("st", go(x, bound), go(p, bound))
            case App(App(Const(cn, _), a), b) if cn in _SOFT_BIN:
                return (_SOFT_BIN[cn], go(a, bound), go(b, bound))
            case App(App(Const("TPi", _), p), Abs(v, q)):
                return ("tpi", (v.name, go(p, bound)), go(q, bound + (v,)))
            case App(Const("not", _), a):
                return ("not", go(a, bound))
            case App(App(App(Const("IF", _), c), a), b):
                return ("if", go(c, bound), go(a, bound), go(b, bound))
            case App(App(Const("the", _), d), Abs(v, body)):
                return (
                    "the-else",
                    go(d, bound),
                    (v.name, type_to_sexp(v.ty)),
                    go(body, bound + (v,)),
                )
            case App(Const(q, _), Abs(v, body)) if q in _BINDERS:
                inner = bound + (v,)
                guard_head = "imp" if q == "all" else "and"
                match body:
                    case App(App(Const(gh, _), App(App(Const(":", _), Var() as w), p)), rest) if (
                        gh == guard_head and w == v and v not in free_vars(p)
                    ):
                        return (f"{q}-st", ((v.name, go(p, bound)),), go(rest, inner))
                return (q, ((v.name, type_to_sexp(v.ty)),), go(body, inner))
            case Abs(v, body):
                return ("lam", ((v.name, type_to_sexp(v.ty)),), go(body, bound + (v,)))
            case App():
                head, args = spine(t)
                return tuple([go(head, bound)] + [go(a, bound) for a in args])
        raise TypeError(f"not a term: {t!r}")

    return go(t, bound)


# ---------------------------------------------------------------------------
# Derived rules

_a = TyVar("a")
_b = TyVar("b")


@dataclass(frozen=True)
class DerivedRule:
    name: str
    derivation: Derivation
    statement: Sequent

    def replay(self) -> Sequent:
        try:
            seq = self.derivation.replay()
        except Exception as e:  # noqa: BLE001 - reported with rule name
            raise ReplayFailed(f"derived rule '{self.name}' failed to replay: {e}") from e
        if seq != self.statement:
            raise ReplayFailed(f"derived rule '{self.name}' replayed to a different sequent")
        return seq


def _rule(name: str, hyps: list[Term], goal_bld: Bld) -> DerivedRule:
    c = mk_ctx(SOFT_DEFS.values(), hyps)
    thm: Thm = goal_bld(c)
    return DerivedRule(name, thm.deriv, thm.seq)


def _unfold_st(subject: Term, pred: Term) -> Bld:
    return b_unfold(SOFT_DEFS["def_st"], {"%a": type_of(subject)}, [subject, pred])


@lru_cache(maxsize=1)
def derived_rules() -> tuple[DerivedRule, ...]:
    P = Var("P", Arrow(_a, BOOL))
    Q = Var("Q", Arrow(_a, BOOL))
    Qb = Var("Q", Arrow(_b, BOOL))
    Qd = Var("Q", Arrow(_a, Arrow(_b, BOOL)))
    R = Var("R", Arrow(_a, BOOL))
    F = Var("F", Arrow(_a, _b))
    x = Var("x", _a)
    bb = Var("b", _a)

    rules = []

    # TFun (non-dependent operator soft type)
    tfun_pq = tfun(P, Qb)
    hyp_typing = st(F, tfun_pq)
    unfold_chain = b_eq_mp(
        b_unfold(SOFT_DEFS["def_tfun"], {"%a": _a, "%b": _b}, [P, Qb, F]),
        b_eq_mp(_unfold_st(F, tfun_pq), b_assume(hyp_typing)),
    )
    rules.append(
        _rule(
            "tfun_elim",
            [hyp_typing, st(bb, P)],
            b_imp_e(b_forall_elim(unfold_chain, bb), b_assume(st(bb, P))),
        )
    )
    allform = forall(x, imp(st(x, P), st(App(F, x), Qb)))
    rules.append(
        _rule(
            "tfun_intro",
            [allform],
            b_eq_mp(
                b_sym(_unfold_st(F, tfun_pq)),
                b_eq_mp(
                    b_sym(b_unfold(SOFT_DEFS["def_tfun"], {"%a": _a, "%b": _b}, [P, Qb, F])),
                    b_assume(allform),
                ),
            ),
        )
    )

    # TPi (dependent operator soft type)
    tpi_pq = App(App(LOGIC.mk("TPi", {"%a": _a, "%b": _b}), P), Qd)
    hyp_pi = st(F, tpi_pq)
    pi_chain = b_eq_mp(
        b_unfold(SOFT_DEFS["def_tpi"], {"%a": _a, "%b": _b}, [P, Qd, F]),
        b_eq_mp(_unfold_st(F, tpi_pq), b_assume(hyp_pi)),
    )
    rules.append(
        _rule(
            "tpi_elim",
            [hyp_pi, st(bb, P)],
            b_imp_e(b_forall_elim(pi_chain, bb), b_assume(st(bb, P))),
        )
    )
    allform_pi = forall(x, imp(st(x, P), st(App(F, x), App(Qd, x))))
    rules.append(
        _rule(
            "tpi_intro",
            [allform_pi],
            b_eq_mp(
                b_sym(_unfold_st(F, tpi_pq)),
                b_eq_mp(
                    b_sym(b_unfold(SOFT_DEFS["def_tpi"], {"%a": _a, "%b": _b}, [P, Qd, F])),
                    b_assume(allform_pi),
                ),
            ),
        )
    )

    # TAnd
    pq = tand(P, Q)
    unfold_tand = b_unfold(SOFT_DEFS["def_tand"], {"%a": _a}, [P, Q, x])
    rules.append(
        _rule(
            "tand_intro",
            [st(x, P), st(x, Q)],
            b_eq_mp(
                b_sym(_unfold_st(x, pq)),
                b_eq_mp(
                    b_sym(unfold_tand),
                    b_and_intro(st(x, P), st(x, Q), b_assume(st(x, P)), b_assume(st(x, Q))),
                ),
            ),
        )
    )
    into_conj = b_eq_mp(unfold_tand, b_eq_mp(_unfold_st(x, pq), b_assume(st(x, pq))))
    rules.append(_rule("tand_elim_left", [st(x, pq)], b_and_elim_left(into_conj)))
    rules.append(_rule("tand_elim_right", [st(x, pq)], b_and_elim_right(into_conj)))

    # TOr
    pq_or = tor(P, Q)
    unfold_tor = b_unfold(SOFT_DEFS["def_tor"], {"%a": _a}, [P, Q, x])

    def fold_or(b: Bld) -> Bld:
        return b_eq_mp(b_sym(_unfold_st(x, pq_or)), b_eq_mp(b_sym(unfold_tor), b))

    rules.append(
        _rule(
            "tor_intro_left",
            [st(x, P)],
            fold_or(b_or_intro_left(st(x, P), st(x, Q), b_assume(st(x, P)))),
        )
    )
    rules.append(
        _rule(
            "tor_intro_right",
            [st(x, Q)],
            fold_or(b_or_intro_right(st(x, P), st(x, Q), b_assume(st(x, Q)))),
        )
    )

    # TSub
    def unfold_tsub(p: Term, q: Term) -> Bld:
        return b_unfold(SOFT_DEFS["def_tsub"], {"%a": _a}, [p, q])

    refl_body = imp(st(x, P), st(x, P))
    rules.append(
        _rule(
            "tsub_refl",
            [],
            b_eq_mp(
                b_sym(unfold_tsub(P, P)),
                b_forall_intro(x, refl_body, b_imp_i(st(x, P), b_assume(st(x, P)))),
            ),
        )
    )
    h_pq, h_qr = tsub(P, Q), tsub(Q, R)
    via_pq = b_eq_mp(unfold_tsub(P, Q), b_assume(h_pq))
    via_qr = b_eq_mp(unfold_tsub(Q, R), b_assume(h_qr))
    step = b_imp_i(
        st(x, P),
        b_imp_e(
            b_forall_elim(via_qr, x),
            b_imp_e(b_forall_elim(via_pq, x), b_assume(st(x, P))),
        ),
    )
    rules.append(
        _rule(
            "tsub_trans",
            [h_pq, h_qr],
            b_eq_mp(
                b_sym(unfold_tsub(P, R)),
                b_forall_intro(x, imp(st(x, P), st(x, R)), step),
            ),
        )
    )

    assert len(rules) == 11
    return tuple(rules)


def replay_all() -> list[str]:
    """Replay every stored derived rule; returns their names."""
    out = []
    for r in derived_rules():
        r.replay()
        out.append(r.name)
    return out
