"""A tagged hereditarily-finite universe and the tier construction.

Model elements are tagged values <tag, payload> built over a canonical
hereditarily-finite value algebra.  Tiers follow the ordinal-recursion
equations of the model kit:

    Tier 0        = disjoint-union over tags i of  i (+) TierImp i 0 {}
    Tier (succ j) = Tier j  u  disjoint-union of  i (+) TierImp i j (Tier j (-) E_i)

where (+) is elementwise tagging and x (-) p removes excluded elements.
Limit tiers are represented but never materialized: this backend is a
finite truncation, and anything needing a limit ordinal is reported as
unchecked rather than approximated.

Constructors are desk-scale bounded: a component's successor rule may cap
both payload size and per-tier contribution so depth-3 universes stay
small enough for exhaustive quantifier checks.  The unbounded powerset
rule of the set component is also provided (usable at small depths; the
cardinality guard aborts it cleanly otherwise).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import combinations

from .errors import (
    ExcludedUnsatisfiable,
    ModelBudgetError,
    SexpError,
    TagCollision,
    ValidationError,
)
from . import sexp as _sexp

DEFAULT_MAX_SET_SIZE = 2**16


def max_set_size() -> int:
    env = os.environ.get("GST_MAX_SET_SIZE")
    return int(env) if env else DEFAULT_MAX_SET_SIZE


# ---------------------------------------------------------------------------
# The value algebra


class HF:
    """Base class; subclasses are canonical, immutable, totally ordered."""

    __slots__ = ("_key",)

    def key(self):
        k = object.__getattribute__(self, "_key")
        return k

    def __lt__(self, other: "HF"):
        return self.key() < other.key()

    def __eq__(self, other):
        return isinstance(other, HF) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


class FinOrd(HF):
    __slots__ = ("n",)

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("finite ordinals are non-negative")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_key", (0, n))

    def __repr__(self):
        return f"FinOrd({self.n})"

    def __setattr__(self, *a):
        raise AttributeError("immutable")


class HFSet(HF):
    __slots__ = ("elems",)

    def __init__(self, elems=()):
        xs = sorted(set(elems), key=lambda e: e.key())
        if len(xs) > max_set_size():
            raise ModelBudgetError(
                f"set of {len(xs)} elements exceeds the cardinality guard "
                f"({max_set_size()}); raise GST_MAX_SET_SIZE to override"
            )
        object.__setattr__(self, "elems", tuple(xs))
        object.__setattr__(self, "_key", (1, len(xs), tuple(x.key() for x in xs)))

    def __contains__(self, x: HF):
        return x in set(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __len__(self):
        return len(self.elems)

    def __repr__(self):
        return "HFSet({" + ", ".join(map(repr, self.elems)) + "})"

    def __setattr__(self, *a):
        raise AttributeError("immutable")


class KPair(HF):
    __slots__ = ("fst", "snd")

    def __init__(self, fst: HF, snd: HF):
        object.__setattr__(self, "fst", fst)
        object.__setattr__(self, "snd", snd)
        object.__setattr__(self, "_key", (2, fst.key(), snd.key()))

    def __repr__(self):
        return f"KPair({self.fst!r}, {self.snd!r})"

    def __setattr__(self, *a):
        raise AttributeError("immutable")


class Tagged(HF):
    __slots__ = ("tag", "payload")

    def __init__(self, tag: int, payload: HF):
        if tag < 0:
            raise ValueError("tags are small naturals")
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "payload", payload)
        object.__setattr__(self, "_key", (3, tag, payload.key()))

    def __repr__(self):
        return f"Tagged({self.tag}, {self.payload!r})"

    def __setattr__(self, *a):
        raise AttributeError("immutable")


EMPTY = HFSet()


def hfset(elems) -> HFSet:
    return HFSet(elems)


def union(*sets: HFSet) -> HFSet:
    out = []
    for s in sets:
        out.extend(s.elems)
    return HFSet(out)


def kuratowski(a: HF, b: HF) -> HFSet:
    """The Kuratowski pair {{a}, {a, b}}."""
    return HFSet([HFSet([a]), HFSet([a, b])])


def dest_kuratowski(p: HF) -> tuple[HF, HF] | None:
    if not isinstance(p, HFSet):
        return None
    if len(p) == 1:
        (inner,) = p.elems
        if isinstance(inner, HFSet) and len(inner) == 1:
            return inner.elems[0], inner.elems[0]
        return None
    if len(p) == 2:
        u, v = p.elems
        if not (isinstance(u, HFSet) and isinstance(v, HFSet)):
            return None
        small, big = (u, v) if len(u) <= len(v) else (v, u)
        if len(small) == 1 and len(big) == 2 and small.elems[0] in big:
            a = small.elems[0]
            b = next(e for e in big.elems if e != a) if a in big else None
            return (a, b)
    return None


def graph_encode(pairs) -> HFSet:
    return HFSet([kuratowski(a, b) for a, b in pairs])


def graph_decode(g: HF) -> list[tuple[HF, HF]] | None:
    """Decode a set of Kuratowski pairs; None if any element is not a pair."""
    if not isinstance(g, HFSet):
        return None
    out = []
    for e in g:
        ab = dest_kuratowski(e)
        if ab is None:
            return None
        out.append(ab)
    return out


def is_single_valued(pairs) -> bool:
    seen: dict[HF, HF] = {}
    for a, b in pairs:
        if a in seen and seen[a] != b:
            return False
        seen[a] = b
    return True


# ---------------------------------------------------------------------------
# Fig.-8 style operations


def tag_map(i: int, x: HFSet) -> HFSet:
    """i (+) x = {<i, b> | b in x}; preserves cardinality."""
    return HFSet([Tagged(i, b) for b in x])


def ominus(x: HFSet, excluded_tags: frozenset[int]) -> HFSet:
    """x (-) E = {b in x | b's tag not excluded}."""
    return HFSet([b for b in x if not (isinstance(b, Tagged) and b.tag in excluded_tags)])


# ---------------------------------------------------------------------------
# Constructor rules (payload-level, file-expressible)


def _guard_count(n: int, what: str) -> None:
    if n > max_set_size():
        raise ModelBudgetError(
            f"{what} would have {n} elements, over the cardinality guard "
            f"({max_set_size()}); raise GST_MAX_SET_SIZE to override"
        )


def op_const_empty(j: int, x: HFSet) -> HFSet:
    return EMPTY


def op_powerset(j: int, x: HFSet) -> HFSet:
    _guard_count(2 ** len(x), "a full powerset")
    out = []
    for r in range(len(x) + 1):
        out.extend(HFSet(c) for c in combinations(x.elems, r))
    return HFSet(out)


def op_powerset_bounded(max_card: int, cap: int):
    def op(j: int, x: HFSet) -> HFSet:
        out = []
        for r in range(min(max_card, len(x)) + 1):
            out.extend(HFSet(c) for c in combinations(x.elems, r))
        out.sort(key=lambda s: s.key())
        return HFSet(out[:cap])

    return op


def op_ordinal_range_linear(slope: int):
    def op(j: int, x: HFSet) -> HFSet:
        return HFSet([FinOrd(i) for i in range(slope * j + 1)])

    return op


def op_graphs_bounded(max_entries: int, cap: int):
    """Single-valued Kuratowski graphs with at most max_entries entries
    over the ingestible part of the previous tier."""

    def op(j: int, x: HFSet) -> HFSet:
        if max_entries != 1:
            raise ValidationError("graphs-bounded currently supports max 1 entry")
        out = [EMPTY]
        for a in x:
            for b in x:
                out.append(graph_encode([(a, b)]))
        out.sort(key=lambda s: s.key())
        return HFSet(out[:cap])

    return op


_OPS = {
    "const-empty": lambda args: op_const_empty,
    "powerset": lambda args: op_powerset,
    "powerset-bounded": lambda args: op_powerset_bounded(*args),
    "ordinal-range-linear": lambda args: op_ordinal_range_linear(*args),
    "graphs-bounded": lambda args: op_graphs_bounded(*args),
}


def constructor_op(spec_sx):
    if not (isinstance(spec_sx, tuple) and spec_sx and isinstance(spec_sx[0], str)):
        raise SexpError(f"bad constructor rule {spec_sx}")
    name, *args = spec_sx
    if name not in _OPS:
        raise SexpError(f"unknown constructor rule '{name}'")
    if not all(isinstance(a, int) for a in args):
        raise SexpError(f"constructor rule arguments must be naturals: {spec_sx}")
    return _OPS[name](args)


# -- HF value literals in files


def hf_to_sexp(v: HF):
    match v:
        case FinOrd(n=n):
            return ("ord", n)
        case HFSet():
            return ("set",) + tuple(hf_to_sexp(e) for e in v.elems)
        case KPair():
            return ("kpair", hf_to_sexp(v.fst), hf_to_sexp(v.snd))
        case Tagged():
            return ("tag", v.tag, hf_to_sexp(v.payload))
    raise TypeError(f"not an HF value: {v!r}")


def hf_from_sexp(sx) -> HF:
    if isinstance(sx, tuple) and sx:
        head = sx[0]
        if head == "ord" and len(sx) == 2:
            return FinOrd(sx[1])
        if head == "set":
            return HFSet([hf_from_sexp(e) for e in sx[1:]])
        if head == "kpair" and len(sx) == 3:
            return KPair(hf_from_sexp(sx[1]), hf_from_sexp(sx[2]))
        if head == "tag" and len(sx) == 3:
            return Tagged(sx[1], hf_from_sexp(sx[2]))
        if head == "hfset":
            return HFSet([hf_from_sexp(e) for e in sx[1:]])
    raise SexpError(f"not an HF value literal: {sx}")


def hf_to_str(v: HF) -> str:
    return _sexp.print_sexp(hf_to_sexp(v))


# ---------------------------------------------------------------------------
# Model components


@dataclass(frozen=True)
class ModelComponent:
    """One feature's contribution to the tier construction.

    `zero` is the tier-0 payload set; `succ(j, x)` the successor-case
    payload rule; `limit` a named rule kept for fidelity but never run.
    `constraints` restrict the Excluded table; `excludes` are forced
    exclusions from this component's own file.
    """

    tag_name: str
    feature: str | None
    deps: tuple[str, ...]
    zero: HFSet
    succ: object  # callable (j, HFSet) -> HFSet
    succ_desc: tuple
    limit_desc: tuple
    constraints: tuple[tuple[str, str], ...] = ()
    excludes: tuple[str, ...] = ()


def parse_component(text: str, path: str = "<component>") -> ModelComponent:
    from .registry import _sections

    preamble, secs = _sections(text, path)
    name = preamble.get("component") if "component" in preamble else None
    if name is None:
        raise SexpError(f"{path}: missing 'component <tag>' line")
    feature = preamble.get("feature")

    rules = {}
    for entry in _sexp.parse_many(secs.get("constructor", "")):
        if not (isinstance(entry, tuple) and len(entry) == 2 and entry[0] in ("zero", "succ", "limit")):
            raise SexpError(f"{path}: bad constructor entry {entry}")
        rules[entry[0]] = entry[1]
    if set(rules) != {"zero", "succ", "limit"}:
        raise SexpError(f"{path}: constructor needs zero, succ and limit cases")

    zero = hf_from_sexp(rules["zero"])
    if not isinstance(zero, HFSet):
        raise SexpError(f"{path}: zero case must be a set")

    constraints, excludes = [], []
    for entry in _sexp.parse_many(secs.get("constraints", "")):
        match entry:
            case ("never-excluded", str(t)):
                constraints.append(("never-excluded", t))
            case _:
                raise SexpError(f"{path}: bad constraint {entry}")
    for entry in _sexp.parse_many(secs.get("excluded", "")):
        match entry:
            case ("excludes", str(t)):
                excludes.append(t)
            case _:
                raise SexpError(f"{path}: bad excluded entry {entry}")

    return ModelComponent(
        tag_name=name,
        feature=feature,
        deps=tuple(secs.get("deps", "").split()),
        zero=zero,
        succ=constructor_op(rules["succ"]),
        succ_desc=rules["succ"],
        limit_desc=rules["limit"],
        constraints=tuple(constraints),
        excludes=tuple(excludes),
    )


# The preamble word is "component", which _sections does not know; patch by
# accepting it as a preamble kind.


def _load_component_file(fname: str) -> ModelComponent:
    root = resources.files("gstkit").joinpath("data/components")
    return parse_component(root.joinpath(fname).read_text(encoding="utf-8"), fname)


@lru_cache(maxsize=1)
def zfplus_components() -> tuple[ModelComponent, ...]:
    """Desk-scale components for the four ZF+ features, in tag order
    set, ord, fun, exc."""
    return tuple(_load_component_file(f) for f in ("set.comp", "ord.comp", "fun.comp", "exc.comp"))


def paper_set_component() -> ModelComponent:
    """The set component with the unbounded per-tier powerset rule."""
    return _load_component_file("set_paper.comp")


# ---------------------------------------------------------------------------
# Excluded tables


def solve_excluded(
    components: list[ModelComponent], blacklist_tags: dict[str, frozenset[str]]
) -> dict[str, frozenset[int]]:
    """The minimal Excluded table: blacklist-forced plus file-forced
    exclusions, checked against every component's constraints."""
    index = {c.tag_name: i for i, c in enumerate(components)}
    table: dict[str, set[int]] = {c.tag_name: set() for c in components}
    for c in components:
        for t in blacklist_tags.get(c.tag_name, frozenset()) | set(c.excludes):
            if t not in index:
                raise ValidationError(f"excluded tag '{t}' is not a component")
            table[c.tag_name].add(index[t])
    for c in components:
        for kind, t in c.constraints:
            if kind == "never-excluded" and index.get(t) in table[c.tag_name]:
                raise ExcludedUnsatisfiable(
                    f"component {c.tag_name}: '{t}' is both excluded and never-excluded"
                )
    return {k: frozenset(v) for k, v in table.items()}


# ---------------------------------------------------------------------------
# Tier construction


@dataclass(frozen=True)
class TierState:
    depth: int
    tiers: tuple[HFSet, ...]
    tag_names: tuple[str, ...]
    components: tuple[ModelComponent, ...]
    excluded: dict[str, frozenset[int]]
    limit_note: str = (
        "limit tiers are represented (TierImp limit cases recorded) but not "
        "materialized: finite truncation"
    )

    def tag_index(self, name: str) -> int:
        return self.tag_names.index(name)

    def domain(self) -> list[HF]:
        return list(self.tiers[-1].elems)


def tier_zero(components: list[ModelComponent]) -> HFSet:
    parts = [tag_map(i, c.zero) for i, c in enumerate(components)]
    return union(*parts)


def tier_succ(
    components: list[ModelComponent],
    excluded: dict[str, frozenset[int]],
    j: int,
    prev: HFSet,
) -> HFSet:
    if j < 1:
        raise ValidationError("tier_succ needs j >= 1")
    parts = [prev]
    for i, c in enumerate(components):
        ingest = ominus(prev, excluded[c.tag_name])
        parts.append(tag_map(i, c.succ(j, ingest)))
    return union(*parts)


def build_tiers(
    components,
    depth: int,
    blacklist_tags: dict[str, frozenset[str]] | None = None,
) -> TierState:
    components = list(components)
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    names = [c.tag_name for c in components]
    if len(names) != len(set(names)):
        raise TagCollision(f"duplicate component tags: {names}")
    excluded = solve_excluded(components, blacklist_tags or {})

    tiers = [tier_zero(components)]
    for j in range(1, depth + 1):
        tiers.append(tier_succ(components, excluded, j, tiers[-1]))
    return TierState(
        depth=depth,
        tiers=tuple(tiers),
        tag_names=tuple(names),
        components=tuple(components),
        excluded=excluded,
    )


def zfplus_blacklist_tags() -> dict[str, frozenset[str]]:
    """Exclusions induced by the ZF+ spec blacklists: sets and functions
    may not ingest the exception object."""
    return {"set": frozenset({"exc"}), "fun": frozenset({"exc"})}


def build_zfplus_tiers(depth: int = 3) -> TierState:
    return build_tiers(zfplus_components(), depth, zfplus_blacklist_tags())


# ---------------------------------------------------------------------------
# Intro rules as executable checks


def check_intro_rules(ts: TierState) -> dict[str, object]:
    """zero / succ1 / succ2 exhaustively over every built tier; the limit
    rules are reported as unchecked."""
    report: dict[str, object] = {}

    viol = [
        b
        for i, c in enumerate(ts.components)
        for b in c.zero
        if Tagged(i, b) not in ts.tiers[0]
    ]
    report["zero"] = {"holds": not viol, "violations": len(viol)}

    succ1 = all(
        all(b in ts.tiers[j + 1] for b in ts.tiers[j]) for j in range(ts.depth)
    )
    report["succ1"] = {"holds": succ1}

    bad = 0
    for j in range(1, ts.depth + 1):
        prev = ts.tiers[j - 1]
        for i, c in enumerate(ts.components):
            ingest = ominus(prev, ts.excluded[c.tag_name])
            for b in c.succ(j, ingest):
                if Tagged(i, b) not in ts.tiers[j]:
                    bad += 1
    report["succ2"] = {"holds": bad == 0, "violations": bad}

    report["lim1"] = {"holds": None, "note": "unchecked: requires a limit ordinal"}
    report["lim2"] = {"holds": None, "note": "unchecked: requires a limit ordinal"}
    return report


# ---------------------------------------------------------------------------
# Model dump


def dump_model(ts: TierState) -> dict:
    return {
        "depth": ts.depth,
        "tags": list(ts.tag_names),
        "excluded": {
            name: sorted(ts.tag_names[i] for i in ts.excluded[name]) for name in ts.tag_names
        },
        "tiers": [[hf_to_str(b) for b in tier] for tier in ts.tiers],
        "limit": ts.limit_note,
    }
