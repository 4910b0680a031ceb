"""Constant signatures and the built-in logical/soft-type vocabulary.

Declared types of polymorphic constants use the reserved type variables
%a, %b so they can never collide with type variables in user formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import IllTyped, NotAnInstance, UnknownConstant
from .syntax import (
    BOOL,
    Abs,
    App,
    Arrow,
    Const,
    Term,
    Type,
    TyVar,
    Var,
    is_instance,
    match_type,
    pretty_type,
    subst_type,
    type_of,
)

A = TyVar("%a")
B = TyVar("%b")


@dataclass(frozen=True, slots=True)
class ConstDecl:
    name: str
    ty: Type
    infix: bool = False
    binder: bool = False
    prec: int = 0


@dataclass
class Signature:
    """Maps constant names to declarations; names are unique."""

    decls: dict[str, ConstDecl] = field(default_factory=dict)

    def declare(self, name: str, ty: Type, *, infix=False, binder=False, prec=0) -> None:
        if name in self.decls:
            if self.decls[name].ty == ty:
                return
            raise UnknownConstant(f"constant '{name}' redeclared at a different type")
        self.decls[name] = ConstDecl(name, ty, infix, binder, prec)

    def __contains__(self, name: str) -> bool:
        return name in self.decls

    def ctyp(self, name: str) -> Type:
        try:
            return self.decls[name].ty
        except KeyError:
            raise UnknownConstant(f"unknown constant '{name}'") from None

    def mk(self, name: str, tysubst: dict[str, Type] | None = None) -> Const:
        """Constant instance at the declared type, optionally instantiated."""
        ty = self.ctyp(name)
        return Const(name, subst_type(ty, tysubst) if tysubst else ty)

    def at(self, name: str, instance: Type) -> Const:
        if not is_instance(instance, self.ctyp(name)):
            raise NotAnInstance(
                f"{pretty_type(instance)} is not an instance of "
                f"ctyp({name}) = {pretty_type(self.ctyp(name))}"
            )
        return Const(name, instance)

    def copy(self) -> "Signature":
        return Signature(dict(self.decls))

    def extend(self, other: "Signature") -> "Signature":
        out = self.copy()
        for d in other.decls.values():
            out.declare(d.name, d.ty, infix=d.infix, binder=d.binder, prec=d.prec)
        return out


def infer_type(t: Term, sig: Signature) -> Type:
    """Typing per the four rules, also validating every constant instance."""

    def go(t: Term) -> Type:
        match t:
            case Var(_, ty):
                return ty
            case Const(name, ty):
                declared = sig.ctyp(name)
                if not is_instance(ty, declared):
                    raise NotAnInstance(
                        f"'{name}' used at {pretty_type(ty)}, which is not an "
                        f"instance of its declared type {pretty_type(declared)}"
                    )
                return ty
            case Abs(var, body):
                return Arrow(var.ty, go(body))
            case App(fn, arg):
                fty, aty = go(fn), go(arg)
                if not isinstance(fty, Arrow):
                    raise IllTyped(f"applying non-operator of type {pretty_type(fty)}", t)
                if fty.left != aty:
                    raise IllTyped(
                        f"operator expects {pretty_type(fty.left)}, got {pretty_type(aty)}",
                        t,
                    )
                return fty.right
        raise TypeError(f"not a term: {t!r}")

    return go(t)


# ---------------------------------------------------------------------------
# The built-in vocabulary (Fig. 1 logical constants + soft type operators)

PRED_A = Arrow(A, BOOL)

LOGIC = Signature()
LOGIC.declare("imp", BOOL >> (BOOL >> BOOL), infix=True, prec=30)
LOGIC.declare("iff", BOOL >> (BOOL >> BOOL), infix=True, prec=25)
LOGIC.declare("and", BOOL >> (BOOL >> BOOL), infix=True, prec=40)
LOGIC.declare("or", BOOL >> (BOOL >> BOOL), infix=True, prec=35)
LOGIC.declare("not", BOOL >> BOOL)
LOGIC.declare("True", BOOL)
LOGIC.declare("False", BOOL)
LOGIC.declare("eq", A >> (A >> BOOL), infix=True, prec=50)
LOGIC.declare("all", PRED_A >> BOOL, binder=True)
LOGIC.declare("ex", PRED_A >> BOOL, binder=True)
LOGIC.declare("ex1", PRED_A >> BOOL, binder=True)
LOGIC.declare("exle1", PRED_A >> BOOL, binder=True)
LOGIC.declare("the", A >> (PRED_A >> A))
LOGIC.declare("IF", BOOL >> (A >> (A >> A)))

# Soft type operators (the combinator layer).
LOGIC.declare(":", A >> (PRED_A >> BOOL), infix=True, prec=45)
LOGIC.declare("Top", PRED_A)
LOGIC.declare("Bot", PRED_A)
LOGIC.declare("TFun", PRED_A >> (Arrow(B, BOOL) >> (Arrow(A, B) >> BOOL)), infix=True, prec=20)
LOGIC.declare("TPi", PRED_A >> (Arrow(A, Arrow(B, BOOL)) >> (Arrow(A, B) >> BOOL)))
LOGIC.declare("TAnd", PRED_A >> (PRED_A >> PRED_A), infix=True, prec=44)
LOGIC.declare("TOr", PRED_A >> (PRED_A >> PRED_A), infix=True, prec=43)
LOGIC.declare("TSub", PRED_A >> (PRED_A >> BOOL), infix=True, prec=22)

SOFT_OP_NAMES = ("  :".strip(), "Top", "Bot", "TFun", "TPi", "TAnd", "TOr", "TSub")
QUANTIFIERS = ("all", "ex", "ex1", "exle1")


# ---------------------------------------------------------------------------
# Smart constructors.  Instance types are computed from the arguments.


def _bin(name: str, a: Term, b: Term) -> Term:
    return App(App(LOGIC.mk(name), a), b)


def imp(a: Term, b: Term) -> Term:
    return _bin("imp", a, b)


def conj(a: Term, b: Term) -> Term:
    return _bin("and", a, b)


def disj(a: Term, b: Term) -> Term:
    return _bin("or", a, b)


def iff(a: Term, b: Term) -> Term:
    return _bin("iff", a, b)


def neg(a: Term) -> Term:
    return App(LOGIC.mk("not"), a)


TRUE = LOGIC.mk("True")
FALSE = LOGIC.mk("False")


def eq(a: Term, b: Term) -> Term:
    ty = type_of(a)
    return App(App(LOGIC.mk("eq", {"%a": ty}), a), b)


def quant(name: str, x: Var, body: Term) -> Term:
    return App(LOGIC.mk(name, {"%a": x.ty}), Abs(x, body))


def forall(x: Var, body: Term) -> Term:
    return quant("all", x, body)


def exists(x: Var, body: Term) -> Term:
    return quant("ex", x, body)


def forall_many(xs, body: Term) -> Term:
    for x in reversed(list(xs)):
        body = forall(x, body)
    return body


def the_else(default: Term, pred: Abs) -> Term:
    """(iota x. phi else D) == the D (lam x. phi)."""
    ty = type_of(default)
    return App(App(LOGIC.mk("the", {"%a": ty}), default), pred)


def ite(c: Term, a: Term, b: Term) -> Term:
    ty = type_of(a)
    return App(App(App(LOGIC.mk("IF", {"%a": ty}), c), a), b)


def _elem_ty(p: Term) -> Type:
    ty = type_of(p)
    if not (isinstance(ty, Arrow) and ty.right == BOOL):
        raise IllTyped(f"not a soft type: {pretty_type(ty)}", p)
    return ty.left


def st(x: Term, p: Term) -> Term:
    """The soft typing x : P."""
    return App(App(LOGIC.mk(":", {"%a": _elem_ty(p)}), x), p)


def tand(p: Term, q: Term) -> Term:
    return App(App(LOGIC.mk("TAnd", {"%a": _elem_ty(p)}), p), q)


def tor(p: Term, q: Term) -> Term:
    return App(App(LOGIC.mk("TOr", {"%a": _elem_ty(p)}), p), q)


def tsub(p: Term, q: Term) -> Term:
    return App(App(LOGIC.mk("TSub", {"%a": _elem_ty(p)}), p), q)


def tfun(p: Term, q: Term) -> Term:
    return App(App(LOGIC.mk("TFun", {"%a": _elem_ty(p), "%b": _elem_ty(q)}), p), q)


def tpi(p: Term, q: Abs) -> Term:
    qty = type_of(q)
    inner = qty.right
    if not (isinstance(inner, Arrow) and inner.right == BOOL):
        raise IllTyped(f"TPi codomain family has type {pretty_type(qty)}", q)
    return App(App(LOGIC.mk("TPi", {"%a": _elem_ty(p), "%b": inner.left}), p), q)


def top(elem_ty: Type) -> Const:
    return LOGIC.mk("Top", {"%a": elem_ty})


def bot(elem_ty: Type) -> Const:
    return LOGIC.mk("Bot", {"%a": elem_ty})


def fold_tor(preds: list[Term], elem_ty: Type) -> Term:
    """P1 | P2 | ... | Pn, right-associated; the empty union is Bot."""
    if not preds:
        return bot(elem_ty)
    out = preds[-1]
    for p in reversed(preds[:-1]):
        out = tor(p, out)
    return out


def fold_disj(forms: list[Term]) -> Term:
    if not forms:
        return FALSE
    out = forms[-1]
    for f in reversed(forms[:-1]):
        out = disj(f, out)
    return out
