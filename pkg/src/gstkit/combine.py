"""Combining features into a GST: the axiom generator.

Given a spec (an ordered list of feature configurations), the generator
emits, in order: every feature's `otherwise` axioms, the pairwise
disjointness axioms over the logo types, one cover axiom, and each
feature's admit/restrict cargo pair; plus one default definition per
feature.

Cargo policy: applied literally, a feature whose cargo type is Bot and
whose blacklist is empty would admit every logo into Bot, an
unsatisfiable axiom.  The default policy therefore admits nothing into a
Bot cargo (the admit side degenerates to the vacuous Bot <= Bot);
`policy="literal"` keeps the unmodified behaviour.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import EmptyArgList, ValidationError
from .kernel.signature import eq, fold_disj, fold_tor, forall_many, imp, neg, st, top, tsub
from .kernel.syntax import (
    App,
    Const,
    Term,
    TyVar,
    Var,
    free_vars,
    term_from_str,
    term_to_str,
    type_of,
)
from .registry import Class, Feature, FeatureConfig, builtin_features
from . import sexp as _sexp

POLICIES = ("default", "literal")


# ---------------------------------------------------------------------------
# typList / otherwise


def typ_list(softtype: Term, start: int = 1) -> list[tuple[Var, Term]]:
    """Peel an operator soft type into argument typings [(b_i, P_i), ...].

    TFun contributes its domain and recurses on the codomain; TPi applies
    its codomain family to the fresh argument variable first; anything
    else ends the list.
    """
    from .kernel.syntax import beta_normalize

    used = {v.name for v in free_vars(softtype)}
    out: list[tuple[Var, Term]] = []
    i = start
    t = softtype

    def fresh(ty) -> Var:
        nonlocal i
        name = f"b{i}"
        while name in used:
            i += 1
            name = f"b{i}"
        used.add(name)
        i += 1
        return Var(name, ty)

    while True:
        match t:
            case App(App(Const("TFun", _), p), q):
                b = fresh(type_of(p).left)
                out.append((b, p))
                t = q
            case App(App(Const("TPi", _), p), q):
                b = fresh(type_of(p).left)
                out.append((b, p))
                t = beta_normalize(App(q, b))
            case _:
                return out


def otherwise(kappa: Const, args: list[tuple[Var, Term]], default: Term) -> Term:
    """forall b1..bn. (~b1:P1 \\/ ... \\/ ~bn:Pn) -> kappa b1..bn = default."""
    if not args:
        raise EmptyArgList("otherwise requires at least one argument typing")
    guard = fold_disj([neg(st(b, p)) for b, p in args])
    applied: Term = kappa
    for b, _ in args:
        applied = App(applied, b)
    return forall_many((b for b, _ in args), imp(guard, eq(applied, default)))


def soft_typing_of_axiom(f: Feature, axiom: Term) -> tuple[Const, Term] | None:
    """Match a top-level soft typing `kappa : R` of a parameter constant,
    R of any shape."""
    params = {n for n, _ in f.cls.params}
    match axiom:
        case App(App(Const(":", _), Const(name, _) as kappa), r) if name in params:
            return kappa, r
    return None


def typing_of_axiom(f: Feature, axiom: Term) -> tuple[Const, Term] | None:
    """Like soft_typing_of_axiom but only for operator-shaped R (TFun/TPi);
    these are the axioms that trigger `otherwise` generation."""
    hit = soft_typing_of_axiom(f, axiom)
    if hit is None:
        return None
    kappa, r = hit
    match r:
        case App(App(Const("TFun", _), _), _) | App(App(Const("TPi", _), _), _):
            return kappa, r
    return None


def all_otherwise(f: Feature, default: Term) -> list[Term]:
    out = []
    for ax in f.cls.axioms:
        hit = typing_of_axiom(f, ax)
        if hit is not None:
            kappa, r = hit
            out.append(otherwise(kappa, typ_list(r), default))
    return out


# ---------------------------------------------------------------------------
# cover / disjoint / cargo


def _elem_ty(p: Term):
    return type_of(p).left


def cover(logos: list[Term]) -> Term:
    if not logos:
        raise EmptyArgList("cover requires at least one logo type")
    ety = _elem_ty(logos[0])
    return eq(fold_tor(logos, ety), top(ety))


def disjoint(logos: list[Term]) -> list[Term]:
    from .kernel.signature import bot, tand

    out = []
    for i in range(len(logos)):
        for j in range(i + 1, len(logos)):
            ety = _elem_ty(logos[i])
            out.append(eq(tand(logos[i], logos[j]), bot(ety)))
    return out


def admit_cargo(cargo: Term, logos: list[Term]) -> Term:
    from .kernel.signature import fold_tor

    return tsub(fold_tor(logos, _elem_ty(cargo)), cargo)


def restrict_cargo(cargo: Term, logos: list[Term]) -> Term:
    from .kernel.signature import bot, tand

    ety = _elem_ty(cargo)
    return eq(tand(fold_tor(logos, ety), cargo), bot(ety))


def _is_bot(t: Term) -> bool:
    return isinstance(t, Const) and t.name == "Bot"


def cargo_ax(
    f: Feature,
    all_features: list[Feature],
    blacklist: list[Feature],
    policy: str = "default",
) -> list[Term]:
    """The admit/restrict pair constraining the internal structure of f's
    objects."""
    if policy not in POLICIES:
        raise ValidationError(f"unknown policy '{policy}'")
    names = {b.name for b in blacklist}
    if not names <= {g.name for g in all_features}:
        raise ValidationError("blacklist mentions a feature outside the spec")
    admitted = [g.logo for g in all_features if g.name not in names]
    if policy == "default" and _is_bot(f.cargo):
        admitted = []
    restricted = [g.logo for g in blacklist]
    return [admit_cargo(f.cargo, admitted), restrict_cargo(f.cargo, restricted)]


# ---------------------------------------------------------------------------
# Specs and generated axiom sets


@dataclass(frozen=True)
class GstSpec:
    name: str
    configs: tuple[FeatureConfig, ...]

    def validate(self) -> None:
        names = [c.feature.name for c in self.configs]
        if len(names) != len(set(names)):
            raise ValidationError("feature names are not pairwise distinct")
        for c in self.configs:
            for b in c.blacklist:
                if b.name not in names:
                    raise ValidationError(
                        f"blacklist entry '{b.name}' does not occur in the spec"
                    )


@dataclass(frozen=True)
class LabeledAxiom:
    provenance: str  # otherwise | disjoint | cover | admit | restrict | defs
    feature: str | None
    term: Term


@dataclass(frozen=True)
class AxiomSet:
    name: str
    features: tuple[str, ...]
    entries: tuple[LabeledAxiom, ...]

    def axioms(self) -> list[LabeledAxiom]:
        return [e for e in self.entries if e.provenance != "defs"]

    def defs(self) -> list[LabeledAxiom]:
        return [e for e in self.entries if e.provenance == "defs"]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for e in self.entries:
            out[e.provenance] = out.get(e.provenance, 0) + 1
        return out


def gst_axioms(spec: GstSpec, policy: str = "default") -> list[LabeledAxiom]:
    spec.validate()
    feats = [c.feature for c in spec.configs]
    out: list[LabeledAxiom] = []
    for c in spec.configs:
        for ax in all_otherwise(c.feature, c.default_value):
            out.append(LabeledAxiom("otherwise", c.feature.name, ax))
    logos = [f.logo for f in feats]
    pairs = [(i, j) for i in range(len(feats)) for j in range(i + 1, len(feats))]
    for (i, j), ax in zip(pairs, disjoint(logos)):
        out.append(LabeledAxiom("disjoint", f"{feats[i].name}/{feats[j].name}", ax))
    out.append(LabeledAxiom("cover", None, cover(logos)))
    for c in spec.configs:
        admit, restrict = cargo_ax(c.feature, feats, list(c.blacklist), policy)
        out.append(LabeledAxiom("admit", c.feature.name, admit))
        out.append(LabeledAxiom("restrict", c.feature.name, restrict))
    return out


def gst_defs(spec: GstSpec) -> list[LabeledAxiom]:
    return [
        LabeledAxiom("defs", c.feature.name, eq(c.feature.default_const(), c.default_value))
        for c in spec.configs
    ]


def mk_gst(spec: GstSpec, policy: str = "default") -> tuple[Class, AxiomSet]:
    """The generated GST class and its labeled axiom set."""
    axioms = gst_axioms(spec, policy)
    defs = gst_defs(spec)
    cls = Class(
        name=spec.name,
        deps=tuple(c.feature.cls for c in spec.configs),
        params=(),
        axioms=tuple(a.term for a in axioms),
        definitions=tuple(),
    )
    axset = AxiomSet(
        name=spec.name,
        features=tuple(c.feature.name for c in spec.configs),
        entries=tuple(axioms + defs),
    )
    return cls, axset


def zfplus_spec() -> GstSpec:
    """[[GZF, boom, [Exc]], [Ordinal, boom, []], [Function, boom, [Exc]],
    [Exc, boom, []]]."""
    feats = builtin_features()
    boom = Const("boom", TyVar("a"))
    gzf, ordinal, function, exc = (feats[n] for n in ("GZF", "Ordinal", "Function", "Exc"))
    return GstSpec(
        "ZF+",
        (
            FeatureConfig(gzf, boom, (exc,)),
            FeatureConfig(ordinal, boom, ()),
            FeatureConfig(function, boom, (exc,)),
            FeatureConfig(exc, boom, ()),
        ),
    )


# ---------------------------------------------------------------------------
# Wire formats


def spec_to_json(spec: GstSpec) -> dict:
    return {
        "name": spec.name,
        "configs": [
            {
                "feature": c.feature.name,
                "default": term_to_str(c.default_value),
                "blacklist": [b.name for b in c.blacklist],
            }
            for c in spec.configs
        ],
    }


def spec_from_json(data: dict) -> GstSpec:
    feats = builtin_features()
    configs = []
    for entry in data["configs"]:
        fname = entry["feature"]
        if fname not in feats:
            raise ValidationError(f"unknown feature '{fname}'")
        feature = feats[fname]
        default = term_from_str(entry["default"])
        blacklist = tuple(feats[b] for b in entry.get("blacklist", ()))
        configs.append(FeatureConfig(feature, default, blacklist))
    if not configs:
        raise ValidationError("empty spec: no feature configurations")
    return GstSpec(data.get("name", "GST"), tuple(configs))


def axiom_set_to_json(axset: AxiomSet) -> dict:
    return {
        "name": axset.name,
        "features": list(axset.features),
        "axioms": [
            {"provenance": e.provenance, "feature": e.feature, "sexp": term_to_str(e.term)}
            for e in axset.entries
        ],
    }


def axiom_set_from_json(data: dict) -> AxiomSet:
    entries = tuple(
        LabeledAxiom(e["provenance"], e.get("feature"), term_from_str(e["sexp"]))
        for e in data["axioms"]
    )
    return AxiomSet(data.get("name", "GST"), tuple(data.get("features", ())), entries)


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=1, ensure_ascii=False, sort_keys=False) + "\n"
