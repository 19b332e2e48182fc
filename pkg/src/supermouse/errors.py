"""Exception hierarchy shared across the toolkit."""


class MouseError(Exception):
    """Base class for all toolkit errors."""


class StructuralError(MouseError):
    """A configuration or program violates a structural invariant."""


class PatternError(MouseError):
    """Malformed cycle pattern or program text."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"col {column}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class NotAffineError(MouseError):
    """The affine update law does not hold for a cycle."""

    def __init__(self, x, expected, actual):
        self.x = x
        self.expected = expected
        self.actual = actual
        super().__init__(f"affine law fails at x={x}: law gives {expected}, traversal gives {actual}")


class NotMultiplicativeError(MouseError):
    def __init__(self, table):
        self.table = table
        super().__init__(f"cycle is not multiplicative on sampled multiples: {table}")


class InfeasibleError(MouseError):
    """No integral gadget exists for the requested factor and residues."""


class CMError(MouseError):
    """Malformed counter machine or invalid execution."""


class DecrementOfNull(CMError):
    def __init__(self, label, register, config=None):
        self.label = label
        self.register = register
        self.config = config
        super().__init__(f"instruction {label} decrements null register R{register}")


class CompileError(MouseError):
    """Counter machine cannot be compiled to a super-mouse."""
