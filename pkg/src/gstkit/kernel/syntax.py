"""Object-logic syntax: types, terms, substitution, alpha/beta machinery.

Terms are plain frozen trees.  Structural equality is *syntactic*; use
`alpha_eq` / `canonical` for alpha-equivalence and `beta_normalize` for the
beta-normal representative.  The deduction layer keys everything on
`canon_norm` (canonical form of the beta-normal form), which realizes the
"terms modulo alpha-beta" view.

Names beginning with '%' are reserved for the kernel (canonical binders,
schematic axiom variables, signature type variables); readers reject them
in user input.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..errors import IllTyped, SexpError, TypeMismatch
from .. import sexp as _sexp

RESERVED_PREFIX = "%"


# ---------------------------------------------------------------------------
# Types


class Type:
    __slots__ = ()

    def __rshift__(self, other: "Type") -> "Arrow":
        return Arrow(self, other)


@dataclass(frozen=True, slots=True)
class TyVar(Type):
    name: str


@dataclass(frozen=True, slots=True)
class BoolTy(Type):
    pass


@dataclass(frozen=True, slots=True)
class Domain(Type):
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("domain indices are non-negative")


@dataclass(frozen=True, slots=True)
class Arrow(Type):
    left: Type
    right: Type


BOOL = BoolTy()
D0 = Domain(0)


def type_vars_of_type(ty: Type) -> frozenset[str]:
    match ty:
        case TyVar(name):
            return frozenset((name,))
        case Arrow(left, right):
            return type_vars_of_type(left) | type_vars_of_type(right)
        case _:
            return frozenset()


def subst_type(ty: Type, s: dict[str, Type]) -> Type:
    """Simultaneous substitution of types for type variables."""
    match ty:
        case TyVar(name):
            return s.get(name, ty)
        case Arrow(left, right):
            return Arrow(subst_type(left, s), subst_type(right, s))
        case _:
            return ty


def match_type(pattern: Type, target: Type, s: dict[str, Type] | None = None):
    """One-way matching: extend s so that pattern[s] == target, or None."""
    if s is None:
        s = {}
    match pattern:
        case TyVar(name):
            bound = s.get(name)
            if bound is None:
                s[name] = target
                return s
            return s if bound == target else None
        case Arrow(pl, pr):
            if not isinstance(target, Arrow):
                return None
            s = match_type(pl, target.left, s)
            return None if s is None else match_type(pr, target.right, s)
        case _:
            return s if pattern == target else None


def is_instance(sigma: Type, tau: Type) -> bool:
    """True iff sigma arises from tau by substituting types for type variables."""
    return match_type(tau, sigma) is not None


def arrow_args(ty: Type) -> tuple[list[Type], Type]:
    """Split sigma1 => ... => sigman => rho into ([sigma..], rho)."""
    args = []
    while isinstance(ty, Arrow):
        args.append(ty.left)
        ty = ty.right
    return args, ty


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()

    def __call__(self, *args: "Term") -> "Term":
        t = self
        for a in args:
            t = App(t, a)
        return t


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str
    ty: Type


@dataclass(frozen=True, slots=True)
class Const(Term):
    """A constant instance: a name paired with an instance of its declared type."""

    name: str
    ty: Type


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Abs(Term):
    var: Var
    body: Term


def lam(*args) -> Term:
    """lam(x, y, ..., body) builds nested abstractions."""
    *vs, body = args
    for v in reversed(vs):
        body = Abs(v, body)
    return body


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Unwind applications: spine(f a b) == (f, [a, b])."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def free_vars(t: Term) -> frozenset[Var]:
    match t:
        case Var():
            return frozenset((t,))
        case Const():
            return frozenset()
        case App(fn, arg):
            return free_vars(fn) | free_vars(arg)
        case Abs(var, body):
            return free_vars(body) - {var}
    raise TypeError(f"not a term: {t!r}")


def type_vars(t: Term) -> frozenset[str]:
    """Type variables occurring anywhere in the term's annotations."""
    match t:
        case Var(_, ty) | Const(_, ty):
            return type_vars_of_type(ty)
        case App(fn, arg):
            return type_vars(fn) | type_vars(arg)
        case Abs(var, body):
            return type_vars_of_type(var.ty) | type_vars(body)
    raise TypeError(f"not a term: {t!r}")


def constants_of(t: Term) -> frozenset[str]:
    match t:
        case Const(name, _):
            return frozenset((name,))
        case App(fn, arg):
            return constants_of(fn) | constants_of(arg)
        case Abs(_, body):
            return constants_of(body)
        case _:
            return frozenset()


def type_of(t: Term) -> Type:
    """The unique type of a term, trusting Const annotations.

    Signature-level validation of constant instances lives in
    `signature.infer_type`; this function implements the four typing rules.
    """
    match t:
        case Var(_, ty) | Const(_, ty):
            return ty
        case Abs(var, body):
            return Arrow(var.ty, type_of(body))
        case App(fn, arg):
            fty = type_of(fn)
            if not isinstance(fty, Arrow):
                raise IllTyped(f"applying a non-operator of type {pretty_type(fty)}", t)
            aty = type_of(arg)
            if fty.left != aty:
                raise IllTyped(
                    f"operator expects {pretty_type(fty.left)}, got {pretty_type(aty)}", t
                )
            return fty.right
    raise TypeError(f"not a term: {t!r}")


def is_formula(t: Term) -> bool:
    try:
        return type_of(t) == BOOL
    except IllTyped:
        return False


# ---------------------------------------------------------------------------
# Substitution

_fresh_counter = 0


def fresh_name(base: str = "v") -> str:
    global _fresh_counter
    _fresh_counter += 1
    return f"{RESERVED_PREFIX}{base}{_fresh_counter}"


def rename_bound(t: Abs, avoid: frozenset[Var]) -> Abs:
    v = t.var
    new = Var(fresh_name(v.name.lstrip(RESERVED_PREFIX) or "v"), v.ty)
    while new in avoid:
        new = Var(fresh_name(new.name.lstrip(RESERVED_PREFIX)), v.ty)
    return Abs(new, _subst(t.body, v, new))


def _subst(t: Term, x: Var, c: Term) -> Term:
    match t:
        case Var():
            return c if t == x else t
        case Const():
            return t
        case App(fn, arg):
            return App(_subst(fn, x, c), _subst(arg, x, c))
        case Abs(var, body):
            if var == x:
                return t
            if var in free_vars(c) and x in free_vars(body):
                t = rename_bound(t, free_vars(c) | free_vars(body))
            return Abs(t.var, _subst(t.body, x, c))
    raise TypeError(f"not a term: {t!r}")


def subst_term(b: Term, x: Var, c: Term, *, check_types: bool = True) -> Term:
    """Capture-avoiding b[x := c], returned in canonical alpha-form."""
    if check_types and type_of(c) != x.ty:
        raise TypeMismatch(
            f"cannot substitute a {pretty_type(type_of(c))} term for "
            f"{x.name} :: {pretty_type(x.ty)}"
        )
    return canonical(_subst(b, x, c))


def subst_many(t: Term, bindings: dict[Var, Term]) -> Term:
    """Simultaneous substitution, realized by substituting through fresh names."""
    temps = {x: Var(fresh_name("s"), x.ty) for x in bindings}
    for x, tmp in temps.items():
        t = _subst(t, x, tmp)
    for x, tmp in temps.items():
        t = _subst(t, tmp, bindings[x])
    return t


def subst_type_in_term(t: Term, s: dict[str, Type]) -> Term:
    """Rewrite every type annotation by the type substitution s."""
    match t:
        case Var(name, ty):
            return Var(name, subst_type(ty, s))
        case Const(name, ty):
            return Const(name, subst_type(ty, s))
        case App(fn, arg):
            return App(subst_type_in_term(fn, s), subst_type_in_term(arg, s))
        case Abs(var, body):
            return Abs(Var(var.name, subst_type(var.ty, s)), subst_type_in_term(body, s))
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Alpha-canonical form and beta normalization


def canonical(t: Term) -> Term:
    """Rename bound variables to %b0, %b1, ... in traversal order.

    Alpha-equivalent terms have identical canonical forms; free variables
    are untouched; idempotent.
    """
    counter = [0]

    def go(t: Term, env: dict[Var, Var]) -> Term:
        match t:
            case Var():
                return env.get(t, t)
            case Const():
                return t
            case App(fn, arg):
                return App(go(fn, env), go(arg, env))
            case Abs(var, body):
                new = Var(f"{RESERVED_PREFIX}b{counter[0]}", var.ty)
                counter[0] += 1
                inner = dict(env)
                inner[var] = new
                return Abs(new, go(body, inner))
        raise TypeError(f"not a term: {t!r}")

    return go(t, {})


def alpha_eq(a: Term, b: Term) -> bool:
    return canonical(a) == canonical(b)


def beta_step(t: Term):
    """One leftmost-outermost beta reduction, or None if already normal."""
    match t:
        case App(Abs(var, body), arg):
            return _subst(body, var, arg)
        case App(fn, arg):
            r = beta_step(fn)
            if r is not None:
                return App(r, arg)
            r = beta_step(arg)
            return None if r is None else App(fn, r)
        case Abs(var, body):
            r = beta_step(body)
            return None if r is None else Abs(var, r)
        case _:
            return None


def beta_normalize(t: Term) -> Term:
    """The unique beta-normal form (simply-typed terms strongly normalize)."""
    while True:
        r = beta_step(t)
        if r is None:
            return t
        t = r


def canon_norm(t: Term) -> Term:
    """Canonical alpha-form of the beta-normal form: the Term-mod-alpha-beta key."""
    return canonical(beta_normalize(t))


def aeq_beta(a: Term, b: Term) -> bool:
    return canon_norm(a) == canon_norm(b)


# ---------------------------------------------------------------------------
# Wire format

_TYPE_ATOMS = {"bool": BOOL}


def type_to_sexp(ty: Type):
    match ty:
        case TyVar(name):
            return ("tv", name)
        case BoolTy():
            return "bool"
        case Domain(index):
            return ("d", index)
        case Arrow(left, right):
            return ("arrow", type_to_sexp(left), type_to_sexp(right))
    raise TypeError(f"not a type: {ty!r}")


def type_from_sexp(x) -> Type:
    if x == "bool":
        return BOOL
    if isinstance(x, tuple) and x:
        head = x[0]
        if head == "tv" and len(x) == 2 and isinstance(x[1], str):
            return TyVar(x[1])
        if head == "d" and len(x) == 2 and isinstance(x[1], int):
            return Domain(x[1])
        if head == "arrow" and len(x) == 3:
            return Arrow(type_from_sexp(x[1]), type_from_sexp(x[2]))
    raise SexpError(f"not a type: {_sexp.print_sexp(x) if not isinstance(x, int) else x}")


def term_to_sexp(t: Term):
    match t:
        case Var(name, ty):
            return ("var", name, type_to_sexp(ty))
        case Const(name, ty):
            return ("const", name, type_to_sexp(ty))
        case App(fn, arg):
            return ("app", term_to_sexp(fn), term_to_sexp(arg))
        case Abs(var, body):
            return ("lam", var.name, type_to_sexp(var.ty), term_to_sexp(body))
    raise TypeError(f"not a term: {t!r}")


def term_from_sexp(x) -> Term:
    if isinstance(x, tuple) and x:
        head = x[0]
        if head == "var" and len(x) == 3 and isinstance(x[1], str):
            return Var(x[1], type_from_sexp(x[2]))
        if head == "const" and len(x) == 3 and isinstance(x[1], str):
            return Const(x[1], type_from_sexp(x[2]))
        if head == "app" and len(x) == 3:
            return App(term_from_sexp(x[1]), term_from_sexp(x[2]))
        if head == "lam" and len(x) == 4 and isinstance(x[1], str):
            return Abs(Var(x[1], type_from_sexp(x[2])), term_from_sexp(x[3]))
    raise SexpError(f"not a term: {_sexp.print_sexp(x) if not isinstance(x, int) else x}")


def term_to_str(t: Term) -> str:
    return _sexp.print_sexp(term_to_sexp(t))


def term_from_str(s: str) -> Term:
    return term_from_sexp(_sexp.parse_sexp(s))


# ---------------------------------------------------------------------------
# Display helpers (human-facing only; the wire format above is normative)


@lru_cache(maxsize=None)
def pretty_type(ty: Type) -> str:
    match ty:
        case TyVar(name):
            return name
        case BoolTy():
            return "*"
        case Domain(index):
            return f"d{index}"
        case Arrow(left, right):
            l = pretty_type(left)
            if isinstance(left, Arrow):
                l = f"({l})"
            return f"{l} => {pretty_type(right)}"
    raise TypeError(f"not a type: {ty!r}")


def pretty_term(t: Term) -> str:
    match t:
        case Var(name, _):
            return name
        case Const(name, _):
            return name
        case App():
            head, args = spine(t)
            parts = [pretty_term(head)] + [
                f"({pretty_term(a)})" if isinstance(a, (App, Abs)) else pretty_term(a)
                for a in args
            ]
            return " ".join(parts)
        case Abs(var, body):
            return f"(lam {var.name}. {pretty_term(body)})"
    raise TypeError(f"not a term: {t!r}")
