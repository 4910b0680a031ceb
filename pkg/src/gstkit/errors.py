"""Exception types shared across the package."""


class GstError(Exception):
    """Base class for all errors raised by gstkit."""


class SexpError(GstError):
    """Malformed s-expression input."""

    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(msg if line is None else f"line {line}: {msg}")


class IllTyped(GstError):
    """A term violates the typing rules; carries the offending subterm."""

    def __init__(self, msg: str, location=None):
        self.location = location
        super().__init__(msg)


class UnknownConstant(GstError):
    pass


class NotAnInstance(GstError):
    """A constant instance's type is not an instance of its declared type."""


class TypeMismatch(GstError):
    pass


class RuleMismatch(GstError):
    """A deduction rule was applied to premises of the wrong shape."""


class SideConditionViolated(GstError):
    """A deduction rule's side condition failed; names the condition."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        super().__init__(f"{condition}" + (f": {detail}" if detail else ""))


class ReplayFailed(GstError):
    """A stored derivation did not replay; names the broken rule."""


class ValidationError(GstError):
    pass


class MissingBinding(GstError):
    pass


class TypeVarInBinding(GstError):
    pass


class EmptyArgList(GstError):
    pass


class UnmappedConstant(GstError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no morphism entry for constant '{name}'")


class TagCollision(GstError):
    pass


class ExcludedUnsatisfiable(GstError):
    pass


class ModelBudgetError(GstError):
    """A tier or powerset would exceed the configured cardinality guard."""


class BudgetExceeded(GstError):
    """An enumeration exceeded the checker's budget; reported as a verdict,
    never raised out of check_axiom_set."""
