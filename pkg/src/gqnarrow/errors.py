"""Exception hierarchy shared by every layer of the engine."""


class GQLError(Exception):
    """Base class for all errors raised by gqnarrow."""


class IncompatibleMatches(GQLError):
    pass


class SourceMismatch(GQLError):
    pass


class EvaluationError(GQLError):
    """An expression could not be evaluated for some match."""


class ExprTypeError(EvaluationError):
    pass


class DivisionByZero(EvaluationError):
    pass


class EmptyAggregate(EvaluationError):
    pass


class UnboundVariable(EvaluationError):
    pass


class InvalidPattern(GQLError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class EmptySelectList(GQLError):
    pass


class GQLSyntaxError(GQLError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class NonDeterminismDetected(GQLError):
    """More than one redex was found in a term reachable from an initial term."""


class StuckTerm(GQLError):
    """A derivation reached a normal form that is not a terminal configuration."""


class TerminationViolation(GQLError):
    """The well-founded measure failed to decrease, or the step bound was exceeded."""


class CheckMismatch(GQLError):
    """The rewriting engine and the reference evaluator disagree."""

    def __init__(self, message, narrowing=None, oracle=None):
        self.narrowing = narrowing
        self.oracle = oracle
        super().__init__(message)
