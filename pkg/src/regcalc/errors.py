"""Exception hierarchy shared by every regcalc module."""


class RegCalcError(Exception):
    """Base class for all regcalc errors."""


class DomainError(RegCalcError, ValueError):
    """An argument lies outside the domain of an index operation."""


class InvalidExponents(RegCalcError, ValueError):
    """Young's inequality does not apply: 1/i + 1/j < 1."""


class NotInZS(RegCalcError, ValueError):
    """Strict Hoelder mode produced a non-integral product exponent."""


class SizeLimit(RegCalcError, ValueError):
    """A combinatorial enumeration exceeds the configured cap."""


class OrderOverflow(RegCalcError):
    """A derivative order exceeds the regularity k of an annotation."""


class FamilyMismatch(RegCalcError):
    """Two operands carry incompatible multiplicative structures."""


class OrderedRequired(RegCalcError):
    """Composing two B-diffeomorphisms needs the ordered property."""


class NotAbsorbing(RegCalcError):
    """A retraction produced a transition that is not B-regular."""


class NonConvergent(RegCalcError, ArithmeticError):
    """Quadrature refinement exhausted its depth without converging."""


class Divergent(NonConvergent):
    """An integral over an unbounded domain keeps growing with the window."""


class DslError(RegCalcError):
    """A diagnostic attached to a position in DSL source text."""

    def __init__(self, message, line=0, col=0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class DslSyntaxError(DslError):
    def __init__(self, message, line=0, col=0, expected=()):
        self.expected = tuple(sorted(set(expected)))
        if self.expected:
            message = f"{message}; expected one of: {', '.join(self.expected)}"
        super().__init__(message, line, col)


class UnknownFamily(DslError):
    pass


class DuplicateName(DslError):
    pass


class UnboundVariable(DslError):
    pass
