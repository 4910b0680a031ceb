"""Bounded semantic evaluation over the finite tiered model.

Terms are compiled once to Python closures and then run under variable
assignments.  First-order quantifiers range over the environment's domain;
higher-order quantifiers enumerate exhaustively below the configured
bounds and otherwise fall back to targeted witnesses plus seeded samples.
The definite-description operator returns its default unless exactly one
domain element satisfies the predicate.

Verdicts: `holds`, `fails` (with the first counterexample assignment in
canonical domain order), `unchecked-infinite` (the formula mentions a
constant that needs a genuinely infinite model), or `unchecked-budget`
(an enumeration or materialization exceeded its budget).  Wall time is
never written into report artifacts, which must be byte-identical across
runs at a fixed seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import BudgetExceeded, ModelBudgetError, UnknownConstant
from .hfmodel import HF, hf_to_str
from .interp import (
    BOOM,
    INFINITE_CONSTS,
    NonMaterializable,
    ZfplusModel,
    model_interps,
    model_signature,
)
from .kernel.signature import Signature
from .kernel.syntax import (
    Abs,
    App,
    Arrow,
    BOOL,
    BoolTy,
    Const,
    D0,
    Domain,
    Term,
    Var,
    constants_of,
    pretty_type,
)

QUANTS = {"all", "ex", "ex1", "exle1"}


@dataclass
class Env:
    """Evaluation environment: the quantifier domain, constant denotations,
    and enumeration bounds."""

    domain: list
    consts: dict[str, object]
    sig: Signature | None = None
    unary_bound: int = 10
    binary_bound: int = 4
    op_bound: int = 4096
    unary_samples: int = 32
    binary_samples: int = 8
    op_samples: int = 8
    seed: int = 0

    def bounds_dict(self) -> dict:
        return {
            "unary_bound": self.unary_bound,
            "binary_bound": self.binary_bound,
            "op_bound": self.op_bound,
            "unary_samples": self.unary_samples,
            "binary_samples": self.binary_samples,
            "op_samples": self.op_samples,
            "seed": self.seed,
        }


def build_zfplus_env(depth: int = 3, seed: int = 0, **bounds):
    """Build tiers, the model, and the checking environment."""
    from .hfmodel import build_zfplus_tiers

    ts = build_zfplus_tiers(depth)
    model = ZfplusModel(ts)
    env = Env(
        domain=ts.domain(),
        consts=model_interps(model),
        sig=model_signature(),
        seed=seed,
        **bounds,
    )
    return ts, model, env


# ---------------------------------------------------------------------------
# Enumeration of higher-order quantifier ranges


def _rng(env: Env, kind: str, n: int) -> random.Random:
    return random.Random(f"{env.seed}|{kind}|{n}")


def _key(v):
    return v.key() if isinstance(v, HF) else v


def enum_type(ty, env: Env):
    """The (possibly sampled) range of a quantifier at type ty."""
    if ty == D0:
        return list(env.domain)
    if ty == BOOL:
        return [False, True]
    match ty:
        case Arrow(Domain(0), BoolTy()):
            return _enum_unary(env)
        case Arrow(Domain(0), Arrow(Domain(0), BoolTy())):
            return _enum_binary(env)
        case Arrow(Domain(0), Domain(0)):
            return _enum_op(env)
    raise BudgetExceeded(f"cannot enumerate quantifier range at type {pretty_type(ty)}")


def _pred_of(keys: frozenset):
    return lambda v: _key(v) in keys


def _enum_unary(env: Env):
    dom = env.domain
    n = len(dom)
    if n <= env.unary_bound:
        out = []
        for mask in range(2**n):
            keys = frozenset(_key(dom[i]) for i in range(n) if (mask >> i) & 1)
            out.append(_pred_of(keys))
        return out
    rng = _rng(env, "unary", n)
    out = [lambda v: False, lambda v: True]
    out.extend(_pred_of(frozenset([_key(d)])) for d in dom)
    for _ in range(env.unary_samples):
        keys = frozenset(_key(d) for d in dom if rng.random() < 0.5)
        out.append(_pred_of(keys))
    return out


def _rel_of(pairs: frozenset):
    return lambda a: lambda b: (_key(a), _key(b)) in pairs


def _enum_binary(env: Env):
    dom = env.domain
    n = len(dom)
    if n <= env.binary_bound:
        cells = [(a, b) for a in dom for b in dom]
        out = []
        for mask in range(2 ** (n * n)):
            pairs = frozenset(
                (_key(a), _key(b)) for i, (a, b) in enumerate(cells) if (mask >> i) & 1
            )
            out.append(_rel_of(pairs))
        return out
    rng = _rng(env, "binary", n)
    out = [
        lambda a: lambda b: False,
        lambda a: lambda b: True,
        lambda a: lambda b: a == b,
    ]
    # functional relations make Repl/mkFun instances interesting
    for _ in range(3):
        tgt = {_key(a): rng.randrange(n) for a in dom}
        table = {k: _key(dom[i]) for k, i in tgt.items()}
        out.append(lambda a, t=table: lambda b: t.get(_key(a)) == _key(b))
    for _ in range(env.binary_samples):
        pairs = frozenset(
            (_key(a), _key(b)) for a in dom for b in dom if rng.random() < 0.25
        )
        out.append(_rel_of(pairs))
    return out


def _enum_op(env: Env):
    dom = env.domain
    n = len(dom)
    if n == 0:
        return []
    if n**n <= env.op_bound:
        from itertools import product

        out = []
        for choice in product(range(n), repeat=n):
            table = {_key(d): dom[i] for d, i in zip(dom, choice)}
            out.append(lambda v, t=table: t[_key(v)])
        return out
    rng = _rng(env, "op", n)
    out = [lambda v: v, lambda v, c=dom[0]: c]
    if BOOM in dom:
        out.append(lambda v: BOOM)
    for _ in range(env.op_samples):
        table = {_key(d): dom[rng.randrange(n)] for d in dom}
        out.append(lambda v, t=table: t.get(_key(v), dom[0]))
    return out


def denot_eq(a, b, ty, env: Env) -> bool:
    """Denotational equality; pointwise over enumerable argument types."""
    if isinstance(ty, Arrow):
        args = enum_type(ty.left, env)
        return all(denot_eq(a(x), b(x), ty.right, env) for x in args)
    return a == b


# ---------------------------------------------------------------------------
# Term compilation


def _resolve_const(c: Const, env: Env):
    name, ty = c.name, c.ty
    if name == "True":
        return True
    if name == "False":
        return False
    if name == "not":
        return lambda p: not p
    if name == "and":
        return lambda p: lambda q: p and q
    if name == "or":
        return lambda p: lambda q: p or q
    if name == "imp":
        return lambda p: lambda q: (not p) or q
    if name == "iff":
        return lambda p: lambda q: p == q
    if name == "eq":
        sigma = ty.left
        return lambda a: lambda b: denot_eq(a, b, sigma, env)
    if name in QUANTS:
        sigma = ty.left.left
        if name == "all":
            return lambda p: all(p(v) for v in enum_type(sigma, env))
        if name == "ex":
            return lambda p: any(p(v) for v in enum_type(sigma, env))
        if name == "ex1":
            return lambda p: _count_upto(p, enum_type(sigma, env), 2) == 1
        return lambda p: _count_upto(p, enum_type(sigma, env), 2) <= 1
    if name == "the":
        sigma = ty.left
        if sigma != D0:
            raise BudgetExceeded(f"description operator at type {pretty_type(sigma)}")

        def the(d):
            def inner(p):
                hits = [v for v in env.domain if p(v)]
                return hits[0] if len(hits) == 1 else d

            return inner

        return the
    if name == "IF":
        return lambda c_: lambda a: lambda b: a if c_ else b
    if name == ":":
        return lambda x: lambda p: p(x)
    if name == "Top":
        return lambda x: True
    if name == "Bot":
        return lambda x: False
    if name == "TAnd":
        return lambda p: lambda q: lambda x: p(x) and q(x)
    if name == "TOr":
        return lambda p: lambda q: lambda x: p(x) or q(x)
    if name == "TSub":
        sigma = ty.left.left
        return lambda p: lambda q: all((not p(x)) or q(x) for x in enum_type(sigma, env))
    if name == "TFun":
        sigma = ty.left.left
        return lambda p: lambda q: lambda f: all(
            (not p(x)) or q(f(x)) for x in enum_type(sigma, env)
        )
    if name == "TPi":
        sigma = ty.left.left
        return lambda p: lambda q: lambda f: all(
            (not p(x)) or q(x)(f(x)) for x in enum_type(sigma, env)
        )
    if name in env.consts:
        v = env.consts[name]
        if isinstance(v, NonMaterializable):
            raise BudgetExceeded(f"constant '{name}' is not materializable at finite depth")
        return v
    raise UnknownConstant(f"no interpretation for constant '{name}'")


def _count_upto(p, xs, limit: int) -> int:
    hits = 0
    for v in xs:
        if p(v):
            hits += 1
            if hits >= limit:
                break
    return hits


def _same_val(x, y) -> bool:
    return x is y or (isinstance(x, HF) and isinstance(y, HF) and x == y)


def _with_memo(t: Term, raw, env: Env):
    """Memoize a compiled node on the values of its free variables.

    Keys use structural keys for HF values and id() for callables; entries
    keep the keyed objects alive, and hits re-check identity, so id reuse
    after garbage collection cannot alias.  This doubles as closed-subterm
    hoisting (empty key) and loop-invariant caching inside quantifier and
    description scans.
    """
    from .kernel.syntax import free_vars

    fvs = sorted(free_vars(t), key=lambda v: (v.name, id(v.ty)))
    cache: dict = {}

    def run(rho):
        vals = tuple(rho[v] for v in fvs)
        key = tuple(_key(v) if isinstance(v, HF) else (id(v) if callable(v) else v) for v in vals)
        hit = cache.get(key)
        if hit is not None and all(_same_val(h, v) for h, v in zip(hit[0], vals)):
            return hit[1]
        out = raw(rho)
        cache[key] = (vals, out)
        return out

    return run


def _contains_binder(t: Term) -> bool:
    match t:
        case Abs():
            return True
        case App(fn, arg):
            return _contains_binder(fn) or _contains_binder(arg)
        case _:
            return False


def compile_term(t: Term, env: Env):
    """Compile to a closure over assignments (dicts keyed by Var nodes)."""
    out = _compile(t, env)
    # memoize only nodes that run loops (quantifier/description/lambda
    # bodies); plain applications are cheaper to recompute than to key
    if isinstance(t, App) and _contains_binder(t):
        return _with_memo(t, out, env)
    return out


def _compile(t: Term, env: Env):
    match t:
        case Var():
            return lambda rho: rho[t]
        case Const():
            v = _resolve_const(t, env)
            return lambda rho: v
        case App(App(Const("and", _), a), b):
            ca, cb = compile_term(a, env), compile_term(b, env)
            return lambda rho: ca(rho) and cb(rho)
        case App(App(Const("or", _), a), b):
            ca, cb = compile_term(a, env), compile_term(b, env)
            return lambda rho: ca(rho) or cb(rho)
        case App(App(Const("imp", _), a), b):
            ca, cb = compile_term(a, env), compile_term(b, env)
            return lambda rho: (not ca(rho)) or cb(rho)
        case App(Const("not", _), a):
            ca = compile_term(a, env)
            return lambda rho: not ca(rho)
        case App(App(App(Const("IF", _), c), a), b):
            cc, ca, cb = (compile_term(x, env) for x in (c, a, b))
            return lambda rho: ca(rho) if cc(rho) else cb(rho)
        case App(Const(q, qty), Abs(v, body)) if q in QUANTS:
            cbody = compile_term(body, env)
            sigma = qty.left.left

            def mkrho(rho, v=v):
                def p(val):
                    inner = dict(rho)
                    inner[v] = val
                    return cbody(inner)

                return p

            if q == "all":
                return lambda rho: all(mkrho(rho)(x) for x in enum_type(sigma, env))
            if q == "ex":
                return lambda rho: any(mkrho(rho)(x) for x in enum_type(sigma, env))
            if q == "ex1":
                return lambda rho: _count_upto(mkrho(rho), enum_type(sigma, env), 2) == 1
            return lambda rho: _count_upto(mkrho(rho), enum_type(sigma, env), 2) <= 1
        case App(fn, arg):
            cf, ca = compile_term(fn, env), compile_term(arg, env)
            return lambda rho: cf(rho)(ca(rho))
        case Abs(v, body):
            cbody = compile_term(body, env)

            def clo(rho, v=v):
                def f(val):
                    inner = dict(rho)
                    inner[v] = val
                    return cbody(inner)

                return f

            return clo
    raise TypeError(f"not a term: {t!r}")


def eval_term(t: Term, env: Env, assignment: dict | None = None):
    """Evaluate a term; truth value for formulas, a value otherwise."""
    return compile_term(t, env)(assignment or {})


# ---------------------------------------------------------------------------
# Verdicts and reports


@dataclass(frozen=True)
class Verdict:
    axiom: str
    provenance: str
    feature: str | None
    verdict: str  # holds | fails | unchecked-infinite | unchecked-budget
    reason: str | None = None
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {
            "axiom": self.axiom,
            "provenance": self.provenance,
            "feature": self.feature,
            "verdict": self.verdict,
        }
        if self.reason:
            out["reason"] = self.reason
        if self.witness:
            out["witness"] = self.witness
        return out


@dataclass
class CheckReport:
    verdicts: list[Verdict] = field(default_factory=list)
    examples: list[dict] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for v in self.verdicts:
            out[v.verdict] = out.get(v.verdict, 0) + 1
        return out

    @property
    def ok(self) -> bool:
        return not any(v.verdict == "fails" for v in self.verdicts) and all(
            e.get("ok", True) for e in self.examples
        )

    def to_json(self, config: dict | None = None) -> dict:
        return {
            "config": config or {},
            "summary": {
                "verdicts": dict(sorted(self.counts().items())),
                "examples_ok": all(e.get("ok", True) for e in self.examples),
                "ok": self.ok,
            },
            "axioms": [v.to_json() for v in self.verdicts],
            "examples": self.examples,
        }


def _render(v) -> str:
    if isinstance(v, HF):
        return hf_to_str(v)
    return repr(v)


def find_witness(t: Term, env: Env, rho: dict | None = None) -> dict:
    """First failing assignment, walking the outermost universal prefix in
    canonical domain order."""
    rho = dict(rho or {})
    match t:
        case App(Const("all", qty), Abs(v, body)) if qty.left.left == D0:
            cbody = compile_term(body, env)
            for val in env.domain:
                inner = dict(rho)
                inner[v] = val
                if not cbody(inner):
                    out = find_witness(body, env, inner)
                    out[v.name] = _render(val)
                    return out
            return {}
        case _:
            return {}


def classify(term: Term, env: Env) -> tuple[str, str | None, dict | None]:
    touched = sorted(constants_of(term) & INFINITE_CONSTS)
    if touched:
        return (
            "unchecked-infinite",
            f"mentions {', '.join(touched)}: needs a genuinely infinite model",
            None,
        )
    try:
        value = eval_term(term, env)
    except (BudgetExceeded, ModelBudgetError) as e:
        return "unchecked-budget", str(e), None
    if value is True:
        return "holds", None, None
    witness = find_witness(term, env)
    return "fails", None, witness or {"note": "closed formula evaluated to false"}


def check_axiom_set(entries, env: Env) -> CheckReport:
    """Classify every (provenance, feature, term) entry; order preserved."""
    from .kernel.syntax import term_to_str

    report = CheckReport()
    for provenance, feature, term in entries:
        verdict, reason, witness = classify(term, env)
        report.verdicts.append(
            Verdict(term_to_str(term), provenance, feature, verdict, reason, witness)
        )
    return report


# ---------------------------------------------------------------------------
# The worked examples (ordinal left-subtraction, function operators,
# combining operators)


def _source_const(name: str):
    from .kernel.syntax import subst_type, type_vars_of_type

    ty = model_signature().ctyp(name)
    sub = {a: D0 for a in type_vars_of_type(ty)}
    return Const(name, subst_type(ty, sub))


def numeral(k: int) -> Term:
    t: Term = _source_const("zero")
    succ = _source_const("succ")
    for _ in range(k):
        t = App(succ, t)
    return t


def example_terms() -> dict[str, Term]:
    """The worked-example operators as source-vocabulary terms at d0."""
    from .kernel.signature import conj, eq, ite, st, the_else
    from .kernel.syntax import lam

    c = _source_const
    i, j, k = Var("i", D0), Var("j", D0), Var("k", D0)
    f, g, x, y, b, cc = (Var(n, D0) for n in ("f", "g", "x", "y", "b", "c"))
    t1 = Var("t", Arrow(D0, D0))
    o = Var("o", Arrow(D0, Arrow(D0, D0)))
    boom = c("boom")

    lsub = lam(i, j, the_else(boom, Abs(k, eq(i, App(App(c("add"), j), k)))))
    bapp = lam(f, x, the_else(boom, Abs(y, c("fapp")(f, x, y))))
    dotlam = lam(x, t1, c("mkFun")(x, lam(b, cc, conj(c("mem")(b, x), eq(cc, App(t1, b))))))
    lift = lam(
        o,
        f,
        g,
        dotlam(
            c("inter")(c("dom")(f), c("dom")(g)),
            Abs(b, o(bapp(f, b), bapp(g, b))),
        ),
    )
    funret = lam(
        Var("p", Arrow(D0, BOOL)),
        f,
        conj(st(f, c("Fun")), st(c("ran")(f), App(c("SetOf"), Var("p", Arrow(D0, BOOL))))),
    )
    t_ords = lam(x, y, conj(st(x, c("Ord")), st(y, c("Ord"))))
    t_funs = lam(
        x, y, conj(st(x, funret(c("Ord"))), st(y, funret(c("Ord"))))
    )
    tt1 = Var("t1", Arrow(D0, Arrow(D0, BOOL)))
    tt2 = Var("t2", Arrow(D0, Arrow(D0, BOOL)))
    o1 = Var("o1", Arrow(D0, Arrow(D0, D0)))
    o2 = Var("o2", Arrow(D0, Arrow(D0, D0)))
    override = lam(
        tt1, o1, tt2, o2, x, y, ite(tt1(x, y), o1(x, y), ite(tt2(x, y), o2(x, y), boom))
    )
    minus = override(t_ords, lsub, t_funs, lift(lsub))
    return {
        "lsub": lsub,
        "bapp": bapp,
        "dotlam": dotlam,
        "lift": lift,
        "funret": funret,
        "override": override,
        "minus": minus,
        "guard_ords": t_ords,
        "guard_funs": t_funs,
    }


def run_examples(env: Env, n: int = 8) -> list[dict]:
    """Evaluate the worked examples' concrete claims; returns report rows."""
    from .kernel.syntax import beta_normalize
    from .morphisms import combined_zfplus_map, translate_term

    eta = combined_zfplus_map()

    def tr(term: Term):
        return translate_term(beta_normalize(term), eta, frozenset())

    def ev(term: Term):
        return eval_term(tr(term), env)

    terms = example_terms()
    c = _source_const
    rows: list[dict] = []

    max_ord = max((v.payload.n for v in env.domain if v.tag == 1), default=0)
    n_eff = min(n, max(max_ord - 1, 1))

    def claim(name: str, got, want):
        rows.append(
            {
                "name": name,
                "got": _render(got),
                "expected": _render(want),
                "ok": got == want,
            }
        )

    two, one, boomv = ev(numeral(2)), ev(numeral(1)), ev(c("boom"))
    claim("lsub 5 3 = 2", ev(terms["lsub"](numeral(5), numeral(3))), two)
    claim("lsub 3 5 = boom", ev(terms["lsub"](numeral(3), numeral(5))), boomv)
    claim("lsub 3 empty = boom", ev(terms["lsub"](numeral(3), c("Empty"))), boomv)

    b = Var("b", D0)
    fterm = terms["dotlam"](c("predSet")(numeral(n_eff)), Abs(b, c("add")(b, numeral(2))))
    gterm = terms["dotlam"](c("predSet")(numeral(n_eff)), Abs(b, c("add")(b, numeral(1))))
    lifted = terms["lift"](terms["lsub"], fterm, gterm)
    minus_fg = terms["minus"](fterm, gterm)
    for j in range(n_eff):
        claim(f"(lift lsub f g) ` {j} = 1", ev(terms["bapp"](lifted, numeral(j))), one)
    for j in range(n_eff):
        claim(f"(f - g) ` {j} = 1", ev(terms["bapp"](minus_fg, numeral(j))), one)

    g1 = compile_term(tr(terms["guard_ords"]), env)({})
    g2 = compile_term(tr(terms["guard_funs"]), env)({})
    overlap = sum(
        1 for x in env.domain for y in env.domain if g1(x)(y) and g2(x)(y)
    )
    rows.append(
        {
            "name": "override guards never overlap (exhaustive)",
            "got": f"{overlap} overlapping pairs",
            "expected": "0 overlapping pairs",
            "ok": overlap == 0,
        }
    )
    fval, gval = ev(fterm), ev(gterm)
    ordinal_branch = g1(fval)(gval)
    rows.append(
        {
            "name": "override never selects the ordinal branch on functions",
            "got": f"ordinal guard on (f, g) = {ordinal_branch}",
            "expected": "ordinal guard on (f, g) = False",
            "ok": ordinal_branch is False,
        }
    )
    if n_eff != n:
        rows.append(
            {
                "name": "note",
                "got": f"predSet width clamped to {n_eff} (largest materialized ordinal {max_ord})",
                "expected": "",
                "ok": True,
            }
        )
    return rows
