"""Sequents: definition sets, hypothesis sets, and a conclusion.

Formulas inside sequents are stored as canonical beta-normal forms, so set
membership is alpha-beta-equality.  Definition sets must consist of simple
definitions whose bodies do not refer back to the defined constant through
any chain of definitions.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError
from .syntax import (
    BOOL,
    App,
    Const,
    Term,
    canon_norm,
    constants_of,
    free_vars,
    type_of,
    type_vars,
)


def as_definition(phi: Term) -> tuple[str, Term] | None:
    """Decompose a simple definition kappa =_sigma B into (kappa, B)."""
    match phi:
        case App(App(Const("eq", _), Const(name, _)), body):
            return name, body
        case _:
            return None


def check_definition_set(defs: frozenset[Term]) -> None:
    """Every member a simple definition; dependency graph acyclic."""
    graph: dict[str, set[str]] = {}
    for phi in defs:
        d = as_definition(phi)
        if d is None:
            raise ValidationError(f"not a simple definition: {phi}")
        name, body = d
        graph.setdefault(name, set()).update(constants_of(body))

    defined = set(graph)
    state: dict[str, int] = {}

    def visit(n: str, path: list[str]) -> None:
        if state.get(n) == 2:
            return
        if state.get(n) == 1:
            raise ValidationError(f"definition cycle: {' -> '.join(path + [n])}")
        state[n] = 1
        for m in graph.get(n, ()):
            if m in defined:
                visit(m, path + [n])
        state[n] = 2

    for n in defined:
        visit(n, [])


@dataclass(frozen=True, slots=True)
class Sequent:
    defs: frozenset[Term]
    hyps: frozenset[Term]
    concl: Term

    def __str__(self) -> str:
        from .syntax import pretty_term

        hyps = ", ".join(sorted(pretty_term(h) for h in self.hyps))
        return f"[{len(self.defs)} defs]; {hyps} |- {pretty_term(self.concl)}"


def mk_sequent(defs, hyps, concl: Term, *, validate: bool = True) -> Sequent:
    defs = frozenset(canon_norm(d) for d in defs)
    hyps = frozenset(canon_norm(h) for h in hyps)
    concl = canon_norm(concl)
    if validate:
        check_definition_set(defs)
        for phi in hyps | {concl}:
            if type_of(phi) != BOOL:
                raise ValidationError(f"not a formula: {phi}")
    return Sequent(defs, hyps, concl)


def fv_set(formulas) -> frozenset:
    out = frozenset()
    for phi in formulas:
        out |= free_vars(phi)
    return out


def tv_set(formulas) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for phi in formulas:
        out |= type_vars(phi)
    return out
