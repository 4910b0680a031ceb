"""Parameter morphisms: translating feature axioms into model statements.

A morphism maps constants given by a feature to constants given by a model
component.  Translation instantiates a feature's axioms at the domain type
d0, replaces mapped constants, and bounds every first-order quantifier by
the model membership predicate: an annotated `all x : P. phi` becomes
`all x : MM /\\ P'. phi'`, an unannotated one gets the plain MM bound, and
existential forms get the conjunctive analogue.  Higher-order quantifiers
(predicate and operator variables) are left unbounded syntactically; the
checker enumerates them over the finite domain anyway.

Constants that the morphism does not map fall in two classes: parameters
of the feature's class (or its dependencies) raise UnmappedConstant, while
class-defined constants (e.g. the subset relation) are kept by name and
given their model semantics by the checker environment.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import UnmappedConstant, ValidationError
from .kernel.signature import LOGIC, QUANTIFIERS, conj, forall, imp, st, tand
from .kernel.syntax import (
    Abs,
    App,
    Arrow,
    BOOL,
    Const,
    D0,
    Domain,
    Term,
    Var,
    constants_of,
    subst_type_in_term,
    type_of,
)
from .interp import MODEL_CONST_TYPES
from .registry import Feature

MM = Const("MM", Arrow(D0, BOOL))


@dataclass(frozen=True)
class ParameterMorphism:
    """A constant-to-constant mapping plus the bounding predicate name."""

    name: str
    mapping: tuple[tuple[str, str], ...]
    domain_predicate: str = "MM"

    def get(self, const_name: str) -> str | None:
        for src, dst in self.mapping:
            if src == const_name:
                return dst
        return None

    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)


def parse_morphism(text: str, name: str = "<morphism>") -> ParameterMorphism:
    """Lines of `source -> target` (also accepts a Unicode mapsto arrow)."""
    entries = []
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        for arrow in ("↦", "->"):
            if arrow in line:
                src, _, dst = line.partition(arrow)
                entries.append((src.strip(), dst.strip()))
                break
        else:
            raise ValidationError(f"{name}: bad morphism line: {line}")
    return ParameterMorphism(name, tuple(entries))


def _load_map(fname: str) -> ParameterMorphism:
    root = resources.files("gstkit").joinpath("data/morphisms")
    return parse_morphism(root.joinpath(fname).read_text(encoding="utf-8"), fname)


@lru_cache(maxsize=None)
def mgzf_map() -> ParameterMorphism:
    """The eleven-entry map for the GZF feature into the set component."""
    m = _load_map("mgzf.map")
    assert len(m.mapping) == 11
    return m


@lru_cache(maxsize=None)
def mord_map() -> ParameterMorphism:
    return _load_map("mord.map")


@lru_cache(maxsize=None)
def mfun_map() -> ParameterMorphism:
    return _load_map("mfun.map")


@lru_cache(maxsize=None)
def mexc_map() -> ParameterMorphism:
    return _load_map("mexc.map")


@lru_cache(maxsize=None)
def defaults_map() -> ParameterMorphism:
    return _load_map("defaults.map")


def feature_map(feature_name: str) -> ParameterMorphism:
    """The feature's own map extended by the maps of its class dependencies
    (a feature's axioms may mention dependency parameters)."""
    own = {"GZF": mgzf_map, "Ordinal": mord_map, "Function": mfun_map, "Exc": mexc_map}
    dep_maps = {"GZF": (), "Ordinal": (), "Function": (mgzf_map,), "Exc": ()}
    if feature_name not in own:
        raise ValidationError(f"no builtin morphism for feature '{feature_name}'")
    entries = list(own[feature_name]().mapping)
    for dm in dep_maps[feature_name]:
        for e in dm().mapping:
            if e not in entries:
                entries.append(e)
    return ParameterMorphism(f"m{feature_name}+deps", tuple(entries))


def combined_zfplus_map() -> ParameterMorphism:
    """Union of the four feature maps plus the default-parameter map."""
    entries: list[tuple[str, str]] = []
    for m in (mgzf_map(), mord_map(), mfun_map(), mexc_map(), defaults_map()):
        for e in m.mapping:
            if e not in entries:
                entries.append(e)
    return ParameterMorphism("mZF+", tuple(entries))


# ---------------------------------------------------------------------------
# Translation


def _image_const(name: str, ty) -> Const:
    if name in MODEL_CONST_TYPES:
        want = MODEL_CONST_TYPES[name]
        return Const(name, want)
    return Const(name, ty)


def translate_term(t: Term, eta: ParameterMorphism, param_names: frozenset[str]) -> Term:
    """Structural descent: constants through eta, first-order quantifiers
    MM-bounded, everything else untouched."""
    mapping = eta.as_dict()

    def go(t: Term) -> Term:
        match t:
            case Var():
                return t
            case Const(name, ty):
                if name in mapping:
                    return _image_const(mapping[name], ty)
                if name in param_names:
                    raise UnmappedConstant(name)
                return t
            case App(Const(q, qty) as qc, Abs(v, body)) if q in QUANTIFIERS and v.ty == D0:
                bound, rest = _split_bound(q, v, body)
                new_bound = tand(MM, go(bound)) if bound is not None else MM
                guard = st(v, new_bound)
                new_body = imp(guard, go(rest)) if q == "all" else conj(guard, go(rest))
                return App(Const(q, qty), Abs(v, new_body))
            case App(fn, arg):
                return App(go(fn), go(arg))
            case Abs(v, body):
                return Abs(v, go(body))
        raise TypeError(f"not a term: {t!r}")

    return go(t)


def _split_bound(q: str, v: Var, body: Term):
    """Detect the bounded-quantifier pattern around v: x:P -> rest for
    universals, x:P /\\ rest for the existential family."""
    head = "imp" if q == "all" else "and"
    match body:
        case App(App(Const(h, _), App(App(Const(":", _), Var() as w), p)), rest) if (
            h == head and w == v
        ):
            from .kernel.syntax import free_vars

            if v not in free_vars(p):
                return p, rest
    return None, body


def _at_d0(feature: Feature, t: Term) -> Term:
    return subst_type_in_term(t, {feature.cls.tyvar: D0})


def _check_total(feature: Feature, eta: ParameterMorphism, terms) -> None:
    params = set()
    for c in feature.cls.dep_closure():
        params |= {n for n, _ in c.params}
    used = set()
    for t in terms:
        used |= constants_of(t)
    missing = sorted((used & params) - set(eta.as_dict()))
    if missing:
        raise UnmappedConstant(missing[0])


def translate_axioms(feature: Feature, eta: ParameterMorphism) -> list[Term]:
    """The model translation of every axiom of the feature, in axiom order."""
    axs = [_at_d0(feature, ax) for ax in feature.cls.axioms]
    _check_total(feature, eta, axs)
    params = frozenset()  # totality already checked; defined constants pass through
    return [translate_term(ax, eta, params) for ax in axs]


def translate_definitions(feature: Feature, eta: ParameterMorphism) -> list[tuple[str, Term]]:
    """Model translations of the class's defined constants (for auditing;
    the checker interprets them natively)."""
    out = []
    for name, body in feature.cls.definitions:
        t = translate_term(_at_d0(feature, body), eta, frozenset())
        out.append((eta.get(name) or name, t))
    return out


# ---------------------------------------------------------------------------
# Respectfulness goals


def resp_thms(feature: Feature, eta: ParameterMorphism) -> list[Term]:
    """Closure goals: each mapped operator constant with a soft-typing
    axiom maps MM-members to MM-members at its arity.  First-order
    arguments are MM-bounded; higher-order arguments are quantified
    plainly."""
    from .combine import soft_typing_of_axiom, typ_list

    _check_total(feature, eta, [_at_d0(feature, ax) for ax in feature.cls.axioms])
    goals = []
    for ax in feature.cls.axioms:
        hit = soft_typing_of_axiom(feature, ax)
        if hit is None:
            continue
        kappa, r = hit
        image = eta.get(kappa.name)
        if image is None:
            raise UnmappedConstant(kappa.name)
        args = typ_list(_at_d0(feature, r))
        applied: Term = _image_const(image, subst_type_in_term(kappa, {feature.cls.tyvar: D0}).ty)
        for b, _ in args:
            applied = App(applied, b)
        goal = st(applied, MM)
        for b, _ in reversed(args):
            if b.ty == D0:
                goal = forall(b, imp(st(b, MM), goal))
            else:
                goal = forall(b, goal)
        goals.append(goal)
    return goals
