"""Denotations of the ZF+ model constants over the tiered universe.

Quantifiers in the checker range over the finite tier domain, but the
predicates here are *intensional*: mSet, mOrd, mFun, mExc and the model
membership predicate hold of any structurally well-formed tagged value,
whether or not the bounded construction has reached it yet.  This is what
makes closure axioms (e.g. succ : Ord +> Ord) true in the truncation: the
successor of the largest materialized ordinal is still a model value, it
just lives in a deeper tier.

Payload well-formedness bakes in the exclusion table: a set payload may
not contain exception-tagged values, a function graph may not mention
them in domain or range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import ModelBudgetError
from .hfmodel import (
    EMPTY,
    FinOrd,
    HF,
    HFSet,
    Tagged,
    TierState,
    graph_decode,
    graph_encode,
    hfset,
    is_single_valued,
    kuratowski,
    tag_map,
    union,
)
from .kernel.signature import LOGIC, Signature
from .kernel.syntax import Arrow, BOOL, D0, Domain

SET, ORD, FUN, EXC = 0, 1, 2, 3
TAG_NAMES = ("set", "ord", "fun", "exc")

BOOM = Tagged(EXC, FinOrd(0))


@dataclass
class ZfplusModel:
    """Computable denotations for the model-side constants."""

    ts: TierState
    _wf: dict = field(default_factory=dict)

    # -- well-formedness / soft type predicates

    def is_m(self, v) -> bool:
        memo = self._wf
        hit = memo.get(v)
        if hit is not None:
            return hit
        out = self._is_m(v)
        memo[v] = out
        return out

    def _is_m(self, v) -> bool:
        if not isinstance(v, Tagged):
            return False
        if v.tag == EXC:
            return v.payload == FinOrd(0)
        if v.tag == ORD:
            return isinstance(v.payload, FinOrd)
        if v.tag == SET:
            if not isinstance(v.payload, HFSet):
                return False
            return all(self.is_m(b) and b.tag != EXC for b in v.payload)
        if v.tag == FUN:
            pairs = graph_decode(v.payload)
            if pairs is None or not is_single_valued(pairs):
                return False
            return all(
                self.is_m(a) and self.is_m(b) and a.tag != EXC and b.tag != EXC
                for a, b in pairs
            )
        return False

    def m_set(self, v) -> bool:
        return isinstance(v, Tagged) and v.tag == SET and self.is_m(v)

    def m_ord(self, v) -> bool:
        return isinstance(v, Tagged) and v.tag == ORD and self.is_m(v)

    def m_fun(self, v) -> bool:
        return isinstance(v, Tagged) and v.tag == FUN and self.is_m(v)

    def m_exc(self, v) -> bool:
        return v == BOOM

    def m_setmem(self, v) -> bool:
        return self.is_m(v) and v.tag != EXC

    def m_funmem(self, v) -> bool:
        return self.is_m(v) and v.tag != EXC

    def m_limit(self, v) -> bool:
        # no finite ordinal is a limit
        return False

    # -- membership and set operations

    def m_mem(self, b, y) -> bool:
        return self.m_set(y) and b in y.payload

    def m_sub(self, x, y) -> bool:
        if not self.m_set(x):
            return True
        return all(self.m_mem(b, y) for b in x.payload)

    def m_setof(self, p, x) -> bool:
        return self.m_set(x) and all(p(b) for b in x.payload)

    def m_union(self, x):
        if not self.m_setof(self.m_set, x):
            return BOOM
        return Tagged(SET, union(*[y.payload for y in x.payload]) if len(x.payload) else EMPTY)

    def m_pow(self, x):
        if not self.m_set(x):
            return BOOM
        from .hfmodel import op_powerset

        return Tagged(SET, tag_map(SET, op_powerset(0, x.payload)))

    def m_empty(self):
        return Tagged(SET, EMPTY)

    def m_succ_set(self, x):
        if not self.m_set(x):
            return BOOM
        return Tagged(SET, hfset(list(x.payload) + [x]))

    def m_setmem_candidates(self, extra=()):
        return list(self.ts.domain()) + list(extra)

    def m_replpred(self, x, p) -> bool:
        if not self.m_set(x):
            return True
        dom = self.ts.domain()
        for b in x.payload:
            hits = 0
            for c in dom:
                if self.m_setmem(c) and p(b)(c):
                    hits += 1
                    if hits > 1:
                        return False
        return True

    def m_repl(self, x, p):
        if not (self.m_set(x) and self.m_replpred(x, p)):
            return BOOM
        dom = self.m_setmem_candidates(x.payload)
        out = [
            c
            for c in dict.fromkeys(dom)
            if self.m_setmem(c) and any(p(b)(c) for b in x.payload)
        ]
        return Tagged(SET, hfset(out))

    # -- ordinals

    def m_zero(self):
        return Tagged(ORD, FinOrd(0))

    def m_lt(self, u, v) -> bool:
        return self.m_ord(u) and self.m_ord(v) and u.payload.n < v.payload.n

    def m_succ_ord(self, u):
        if not self.m_ord(u):
            return BOOM
        return Tagged(ORD, FinOrd(u.payload.n + 1))

    def m_pred_set(self, u):
        if not self.m_ord(u):
            return BOOM
        return Tagged(SET, hfset(Tagged(ORD, FinOrd(i)) for i in range(u.payload.n)))

    def m_sup_ord(self, x):
        if not self.m_setof(self.m_ord, x):
            return BOOM
        ns = [b.payload.n for b in x.payload]
        return Tagged(ORD, FinOrd(max(ns) if ns else 0))

    def m_add(self, u, v):
        if self.m_ord(u) and self.m_ord(v):
            return Tagged(ORD, FinOrd(u.payload.n + v.payload.n))
        return BOOM

    # -- functions (payloads are sets of Kuratowski pairs)

    def m_app(self, f, b, c) -> bool:
        return self.m_fun(f) and kuratowski(b, c) in f.payload

    def _graph(self, f):
        return graph_decode(f.payload) or []

    def m_dom(self, f):
        if not self.m_fun(f):
            return BOOM
        return Tagged(SET, hfset(a for a, _ in self._graph(f)))

    def m_ran(self, f):
        if not self.m_fun(f):
            return BOOM
        return Tagged(SET, hfset(b for _, b in self._graph(f)))

    def m_funpred(self, x, p) -> bool:
        if not self.m_set(x):
            return True
        dom = self.ts.domain()
        for b in x.payload:
            if not self.m_funmem(b):
                continue
            hits = 0
            for c in dom:
                if self.m_funmem(c) and p(b)(c):
                    hits += 1
                    if hits > 1:
                        return False
        return True

    def m_mkfun(self, x, p):
        if not (self.m_set(x) and self.m_funpred(x, p)):
            return BOOM
        dom = dict.fromkeys(list(self.ts.domain()) + list(x.payload if self.m_set(x) else ()))
        pairs = [
            (b, c)
            for b in x.payload
            for c in dom
            if self.m_funmem(b) and self.m_funmem(c) and p(b)(c)
        ]
        return Tagged(FUN, graph_encode(pairs))

    def m_pfun(self, x, y):
        if not (self.m_set(x) and self.m_set(y)):
            return BOOM
        xs, ys = list(x.payload), list(y.payload)
        if (len(ys) + 1) ** len(xs) > 4096:
            raise ModelBudgetError("partial function space too large to materialize")
        graphs = []
        for choice in product([None] + ys, repeat=len(xs)):
            pairs = [(a, b) for a, b in zip(xs, choice) if b is not None]
            graphs.append(Tagged(FUN, graph_encode(pairs)))
        return Tagged(SET, hfset(graphs))

    def m_inter(self, x, y):
        if not (self.m_set(x) and self.m_set(y)):
            return BOOM
        return Tagged(SET, hfset(b for b in x.payload if b in y.payload))


# ---------------------------------------------------------------------------
# Constant tables


def _curry(fn, arity: int):
    if arity == 1:
        return fn
    if arity == 2:
        return lambda a: lambda b: fn(a, b)
    if arity == 3:
        return lambda a: lambda b: lambda c: fn(a, b, c)
    raise ValueError(arity)


def _k(v):
    # id() is only a sound cache key while the object is alive; callers
    # keep the keyed objects referenced in the cache entry and re-check
    # identity on hits.
    return v.key() if isinstance(v, HF) else (id(v) if callable(v) else v)


def _same(x, y) -> bool:
    return x is y or (isinstance(x, HF) and isinstance(y, HF) and x == y)


def _memo2(fn):
    cache: dict = {}

    def wrapped(a):
        def inner(b):
            key = (_k(a), _k(b))
            hit = cache.get(key)
            if hit is not None and _same(hit[0], a) and _same(hit[1], b):
                return hit[2]
            out = fn(a, b)
            cache[key] = (a, b, out)
            return out

        return inner

    return wrapped


def _memo1(fn):
    cache: dict = {}

    def wrapped(a):
        key = _k(a)
        hit = cache.get(key)
        if hit is not None and _same(hit[0], a):
            return hit[1]
        out = fn(a)
        cache[key] = (a, out)
        return out

    return wrapped


class NonMaterializable:
    """Sentinel denotation for constants needing a genuinely infinite model."""

    def __init__(self, name: str):
        self.name = name

    def __repr__(self):
        return f"NonMaterializable({self.name})"


#: constants whose appearance makes a formula unchecked-infinite
INFINITE_CONSTS = frozenset(
    {"Inf", "mInf", "omega", "momega", "Limit", "mLimit", "TierLimit", "Tier_limit"}
)

P1 = Arrow(D0, BOOL)
P2 = Arrow(D0, Arrow(D0, BOOL))
OP1 = Arrow(D0, D0)
OP2 = Arrow(D0, Arrow(D0, D0))

MODEL_CONST_TYPES: dict[str, object] = {
    "MM": P1,
    "mSet": P1, "mOrd": P1, "mFun": P1, "mExc": P1,
    "mSetMem": P1, "mFunMem": P1, "mLimit": P1,
    "mMem": P2, "mlt": P2,
    "mApp": Arrow(D0, Arrow(D0, Arrow(D0, BOOL))),
    "mUnion": OP1, "mPow": OP1, "mSucc": OP1, "msucc": OP1,
    "mDom": OP1, "mRan": OP1, "mPredSet": OP1, "mSupOrd": OP1,
    "mEmpty": D0, "mzero": D0, "momega": D0, "mInf": D0, "mboom": D0,
    "oset": D0, "oord": D0, "ofun": D0, "oexc": D0,
    "mRepl": Arrow(D0, Arrow(P2, D0)), "mMkFun": Arrow(D0, Arrow(P2, D0)),
    "mSetOf": Arrow(P1, P1),
    "mReplPred": Arrow(D0, Arrow(P2, BOOL)), "mFunPred": Arrow(D0, Arrow(P2, BOOL)),
    "mPfun": OP2, "mAdd": OP2, "mInter": OP2,
    "add": OP2, "inter": OP2,
}


def model_signature(base: Signature | None = None) -> Signature:
    """LOGIC plus the source catalogue plus ground model constants."""
    from .registry import builtin_features

    sig = (base or LOGIC).copy()
    for f in builtin_features().values():
        for name, ty in f.cls.params:
            sig.declare(name, ty)
        for name, body in f.cls.definitions:
            from .kernel.syntax import type_of

            sig.declare(name, type_of(body))
    for name, ty in MODEL_CONST_TYPES.items():
        sig.declare(name, ty)
    return sig


def model_interps(model: ZfplusModel) -> dict[str, object]:
    """name -> denotation (value, curried callable, or sentinel)."""
    m = model
    return {
        "MM": m.is_m,
        "mSet": m.m_set,
        "mOrd": m.m_ord,
        "mFun": m.m_fun,
        "mExc": m.m_exc,
        "mSetMem": m.m_setmem,
        "mFunMem": m.m_funmem,
        "mLimit": m.m_limit,
        "mMem": _curry(m.m_mem, 2),
        "sub": _curry(m.m_sub, 2),
        "mlt": _curry(m.m_lt, 2),
        "mApp": _curry(m.m_app, 3),
        "mUnion": _memo1(m.m_union),
        "mPow": _memo1(m.m_pow),
        "mSucc": _memo1(m.m_succ_set),
        "msucc": _memo1(m.m_succ_ord),
        "mDom": _memo1(m.m_dom),
        "mRan": _memo1(m.m_ran),
        "mPredSet": _memo1(m.m_pred_set),
        "mSupOrd": _memo1(m.m_sup_ord),
        "mEmpty": m.m_empty(),
        "mzero": m.m_zero(),
        "momega": NonMaterializable("omega"),
        "mInf": NonMaterializable("Inf"),
        "mboom": BOOM,
        "oset": BOOM,
        "oord": BOOM,
        "ofun": BOOM,
        "oexc": BOOM,
        "mRepl": _memo2(m.m_repl),
        "mMkFun": _memo2(m.m_mkfun),
        "mSetOf": lambda p: lambda x: m.m_setof(p, x),
        "mReplPred": _memo2(m.m_replpred),
        "mFunPred": _memo2(m.m_funpred),
        "mPfun": _memo2(m.m_pfun),
        "mAdd": _curry(m.m_add, 2),
        "mInter": _curry(m.m_inter, 2),
    }
