"""Classes, features, and the builtin catalogue.

The catalogue is stored as source files in the sugared s-expression format
(one file per feature under data/features/) and parsed at load, so the
figure content stays auditable and the reader gets exercised on real data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import (
    MissingBinding,
    SexpError,
    TypeVarInBinding,
    ValidationError,
)
from .kernel.sequent import check_definition_set
from .kernel.signature import LOGIC, Signature, eq, infer_type
from .kernel.syntax import (
    BOOL,
    Arrow,
    Const,
    Domain,
    Term,
    Type,
    alpha_eq,
    constants_of,
    free_vars,
    subst_type,
    subst_type_in_term,
    type_from_sexp,
    type_of,
    type_to_sexp,
    type_vars,
    type_vars_of_type,
)
from .softtypes import Reader, resugar
from . import sexp as _sexp


@dataclass(frozen=True)
class Class:
    """A type class: dependencies, parameters, axioms, simple definitions."""

    name: str
    deps: tuple["Class", ...]
    params: tuple[tuple[str, Type], ...]
    axioms: tuple[Term, ...]
    definitions: tuple[tuple[str, Term], ...]

    @property
    def tyvar(self) -> str:
        tvs = set()
        for _, ty in self.params:
            tvs |= type_vars_of_type(ty)
        if len(tvs) == 1:
            return next(iter(tvs))
        raise ValidationError(
            f"class {self.name}: expected exactly one type variable in parameters, got {sorted(tvs)}"
        )

    def dep_closure(self) -> list["Class"]:
        """Dependencies in topological order, self last, no duplicates."""
        seen: dict[str, Class] = {}

        def walk(c: Class):
            for d in c.deps:
                walk(d)
            seen.setdefault(c.name, c)

        walk(self)
        return list(seen.values())

    def signature(self) -> Signature:
        """LOGIC extended by the closure's parameters and defined constants."""
        sig = LOGIC.copy()
        for c in self.dep_closure():
            for name, ty in c.params:
                sig.declare(name, ty)
            for name, body in c.definitions:
                sig.declare(name, type_of(body))
        return sig

    def own_signature_names(self) -> set[str]:
        out = set()
        for c in self.dep_closure():
            out |= {n for n, _ in c.params}
            out |= {n for n, _ in c.definitions}
        return out

    def def_formulas(self) -> list[Term]:
        sig = self.signature()
        return [eq(sig.mk(name), body) for name, body in self.definitions]


@dataclass(frozen=True)
class Feature:
    """A class plus its logo/cargo soft types and default parameter."""

    name: str
    cls: Class
    logo: Term
    cargo: Term
    default: str

    def default_const(self) -> Const:
        for name, ty in self.cls.params:
            if name == self.default:
                return Const(name, ty)
        raise ValidationError(f"feature {self.name}: default '{self.default}' not a parameter")


@dataclass(frozen=True)
class FeatureConfig:
    feature: Feature
    default_value: Term
    blacklist: tuple[Feature, ...]


# ---------------------------------------------------------------------------
# Catalogue file format


def _sections(text: str, path: str) -> tuple[dict[str, str], dict[str, str]]:
    """Split a catalogue file into a preamble (feature/class names) and
    `header:`-introduced sections.  Headers sit at column 0."""
    preamble: dict[str, str] = {}
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].rstrip()
        if not line.strip():
            continue
        is_header = not line[0].isspace() and ":" in line and " " not in line.split(":", 1)[0]
        if is_header:
            head, _, rest = line.partition(":")
            current = head
            sections[current] = [rest] if rest.strip() else []
        elif current is not None:
            sections[current].append(line)
        else:
            kind, _, name = line.strip().partition(" ")
            if not name or not kind.isidentifier():
                raise SexpError(f"{path}: bad preamble line: {line.strip()}")
            preamble[kind] = name.strip()
    return preamble, {k: "\n".join(v) for k, v in sections.items()}


def _parse_class_file(text: str, path: str, known: dict[str, Class]) -> tuple[dict, Class]:
    preamble, secs = _sections(text, path)
    cname = preamble.get("class")
    if cname is None:
        raise SexpError(f"{path}: missing 'class <name>' line")

    deps = tuple(known[n] for n in secs.get("deps", "").split())

    params: list[tuple[str, Type]] = []
    for entry in _sexp.parse_many(secs.get("consts", "")):
        if not (isinstance(entry, tuple) and len(entry) == 2 and isinstance(entry[0], str)):
            raise SexpError(f"{path}: bad constant declaration {entry}")
        params.append((entry[0], type_from_sexp(entry[1])))

    sig = LOGIC.copy()
    for c in deps:
        for d in c.dep_closure():
            for name, ty in d.params:
                sig.declare(name, ty)
            for name, body in d.definitions:
                sig.declare(name, type_of(body))
    for name, ty in params:
        sig.declare(name, ty)

    definitions: list[tuple[str, Term]] = []
    for entry in _sexp.parse_many(secs.get("defs", "")):
        if not (isinstance(entry, tuple) and len(entry) == 3 and entry[0] == "def"):
            raise SexpError(f"{path}: bad definition {entry}")
        body = Reader(sig).term(entry[2])
        definitions.append((entry[1], body))
        sig.declare(entry[1], type_of(body))

    reader = Reader(sig)
    axioms = tuple(reader.term(e) for e in _sexp.parse_many(secs.get("axioms", "")))

    cls = Class(cname, deps, tuple(params), axioms, tuple(definitions))
    extra = {}
    for key in ("logo", "cargo", "default"):
        if key in secs and secs[key].strip():
            extra[key] = secs[key].strip()
    extra["feature"] = preamble.get("feature")
    extra["reader"] = reader
    return extra, cls


def load_catalogue_text(files: list[tuple[str, str]]) -> tuple[dict[str, Feature], dict[str, Class]]:
    """Load (path, text) catalogue files; deps must appear before dependents."""
    classes: dict[str, Class] = {}
    features: dict[str, Feature] = {}
    for path, text in files:
        extra, cls = _parse_class_file(text, path, classes)
        if cls.name in classes:
            raise ValidationError(f"duplicate class '{cls.name}'")
        classes[cls.name] = cls
        fname = extra.get("feature")
        if fname:
            reader = extra["reader"]
            logo = reader.term(_sexp.parse_sexp(extra["logo"]))
            cargo = reader.term(_sexp.parse_sexp(extra["cargo"]))
            features[fname] = Feature(fname, cls, logo, cargo, extra["default"].strip())
    return features, classes


_FEATURE_FILES = (
    "gzf.feat",
    "ordinal.feat",
    "ordinalrec.feat",
    "function.feat",
    "exception.feat",
    "opair.feat",
    "tagging.class",
)


@lru_cache(maxsize=1)
def _load_builtin() -> tuple[dict[str, Feature], dict[str, Class]]:
    files = []
    root = resources.files("gstkit").joinpath("data/features")
    for fname in _FEATURE_FILES:
        files.append((fname, root.joinpath(fname).read_text(encoding="utf-8")))
    return load_catalogue_text(files)


def builtin_features() -> dict[str, Feature]:
    """GZF, Ordinal, OrdRec, Function, Exc (Figs. of the feature catalogue)
    plus OPair; keyed by feature name, in catalogue order."""
    return dict(_load_builtin()[0])


def builtin_classes() -> dict[str, Class]:
    return dict(_load_builtin()[1])


def tagging_class() -> Class:
    return builtin_classes()["Tagging"]


# ---------------------------------------------------------------------------
# Validation


def validate_class(c: Class) -> list[str]:
    """Check the class invariants; returns a list of violations (empty = valid)."""
    report: list[str] = []

    names = [n for n, _ in c.params]
    if len(names) != len(set(names)):
        report.append(f"{c.name}: duplicate parameter names")

    tvs = set()
    for _, ty in c.params:
        tvs |= type_vars_of_type(ty)
    if c.params and len(tvs) != 1:
        report.append(f"{c.name}: multiple tv" if len(tvs) > 1 else f"{c.name}: no type variable")

    sig = c.signature()
    for i, ax in enumerate(c.axioms):
        try:
            ty = infer_type(ax, sig)
            if ty != BOOL:
                report.append(f"{c.name}: axiom {i} is not a formula")
        except Exception as e:  # noqa: BLE001
            report.append(f"{c.name}: axiom {i} ill-typed: {e}")
        if free_vars(ax):
            report.append(f"{c.name}: axiom {i} has free term variables")

    try:
        check_definition_set(frozenset(c.def_formulas()))
    except ValidationError as e:
        report.append(f"{c.name}: {e}")

    for name, body in c.definitions:
        try:
            infer_type(body, sig)
        except Exception as e:  # noqa: BLE001
            report.append(f"{c.name}: definition {name} ill-typed: {e}")

    report.extend(orphan_constants(c))
    return report


def orphan_constants(c: Class) -> list[str]:
    """Constants used in axioms/definitions but declared nowhere."""
    known = c.own_signature_names() | set(LOGIC.decls)
    out = []
    for i, ax in enumerate(c.axioms):
        for name in sorted(constants_of(ax) - known):
            out.append(f"{c.name}: axiom {i} uses undeclared constant '{name}'")
    for dname, body in c.definitions:
        for name in sorted(constants_of(body) - known):
            out.append(f"{c.name}: definition {dname} uses undeclared constant '{name}'")
    return out


def validate_feature(f: Feature) -> list[str]:
    from .kernel.syntax import TyVar as _TyVar

    report = validate_class(f.cls)
    tv = f.cls.tyvar
    pnames = {n for n, _ in f.cls.params}
    if f.default not in pnames:
        report.append(f"{f.name}: default parameter '{f.default}' not in parameters")
    elif dict(f.cls.params)[f.default] != _TyVar(tv):
        report.append(f"{f.name}: default parameter is not at the class type variable")

    want = Arrow(_TyVar(tv), BOOL)
    for label, t in (("logo", f.logo), ("cargo", f.cargo)):
        try:
            if infer_type(t, f.cls.signature()) != want:
                report.append(f"{f.name}: {label} is not a soft type over tv({f.cls.name})")
        except Exception as e:  # noqa: BLE001
            report.append(f"{f.name}: {label} ill-typed: {e}")
    return report


# ---------------------------------------------------------------------------
# Parameter instantiation (classes at a domain type)


def instantiate_class(
    c: Class, index: int, bindings: dict[str, Term]
) -> tuple[list[Term], list[Term]]:
    """Returns (definition set, proof/check obligations) for C at d<index>.

    The definition set is Theta[d_i] plus the parameter instantiation
    equations; obligations are Phi[d_i].
    """
    tv = c.tyvar if c.params else None
    sub = {tv: Domain(index)} if tv else {}

    missing = [n for n, _ in c.params if n not in bindings]
    if missing:
        raise MissingBinding(f"{c.name}: no binding for {', '.join(missing)}")

    defs: list[Term] = []
    for name, ty in c.params:
        b = bindings[name]
        if type_vars(b):
            raise TypeVarInBinding(f"{c.name}: binding for {name} contains type variables")
        if free_vars(b):
            raise TypeVarInBinding(f"{c.name}: binding for {name} is not closed")
        lhs = Const(name, subst_type(ty, sub))
        if type_of(b) != lhs.ty:
            raise TypeVarInBinding(
                f"{c.name}: binding for {name} has the wrong type"
            )
        defs.append(eq(lhs, b))
    for name, body in c.definitions:
        lhs = Const(name, subst_type(type_of(body), sub))
        defs.append(eq(lhs, subst_type_in_term(body, sub)))

    obligations = [subst_type_in_term(ax, sub) for ax in c.axioms]
    return defs, obligations


# ---------------------------------------------------------------------------
# Catalogue printing (round-trip fidelity)


def class_to_text(c: Class, feature: Feature | None = None) -> str:
    sig = c.signature()
    lines = []
    if feature is not None:
        lines.append(f"feature {feature.name}")
    lines.append(f"class {c.name}")
    lines.append("deps: " + " ".join(d.name for d in c.deps))
    lines.append("consts:")
    for name, ty in c.params:
        lines.append(f"  ({name} {_sexp.print_sexp(type_to_sexp(ty))})")
    lines.append("defs:")
    for name, body in c.definitions:
        lines.append(f"  (def {name} {_sexp.print_sexp(resugar(body, sig))})")
    lines.append("axioms:")
    for ax in c.axioms:
        lines.append(f"  {_sexp.print_sexp(resugar(ax, sig))}")
    if feature is not None:
        lines.append(f"logo: {_sexp.print_sexp(resugar(feature.logo, sig))}")
        lines.append(f"cargo: {_sexp.print_sexp(resugar(feature.cargo, sig))}")
        lines.append(f"default: {feature.default}")
    return "\n".join(lines) + "\n"


def classes_equal(a: Class, b: Class) -> bool:
    return (
        a.name == b.name
        and tuple(d.name for d in a.deps) == tuple(d.name for d in b.deps)
        and a.params == b.params
        and len(a.axioms) == len(b.axioms)
        and all(alpha_eq(x, y) for x, y in zip(a.axioms, b.axioms))
        and tuple(n for n, _ in a.definitions) == tuple(n for n, _ in b.definitions)
        and all(alpha_eq(x[1], y[1]) for x, y in zip(a.definitions, b.definitions))
    )
