"""Exception hierarchy shared by every tbqudit module."""


class QuditError(Exception):
    """Base class for all tbqudit errors."""


class BinRangeError(QuditError, IndexError):
    """A bin index or qubit index lies outside the register."""


class InvalidConstraintError(QuditError, ValueError):
    pass


class DimensionError(QuditError, ValueError):
    pass


class NormError(QuditError, ValueError):
    pass


class NonUnitaryError(QuditError, ValueError):
    pass


class InvalidGateError(QuditError, ValueError):
    """Gate arguments collide (e.g. control equals target)."""


class UnsupportedFeatureError(QuditError, NotImplementedError):
    pass


class ScheduleError(QuditError):
    """An optical schedule misbehaved during event-level simulation."""

    def __init__(self, message, pass_index=None, block_id=None):
        self.reason = message
        self.pass_index = pass_index
        self.block_id = block_id
        where = []
        if pass_index is not None:
            where.append(f"pass {pass_index}")
        if block_id is not None:
            where.append(f"block {block_id}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)

    def located(self, pass_index=None, block_id=None):
        """Copy of this error tagged with where it happened."""
        return type(self)(self.reason,
                          self.pass_index if pass_index is None else pass_index,
                          self.block_id if block_id is None else block_id)


class ScheduleCollisionError(ScheduleError):
    """Two amplitudes met at one (node, time) outside a beamsplitter."""


class ParseError(QuditError):
    def __init__(self, message, line, column, token=""):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"line {line}, column {column}: {message}"
                         + (f" (at {token!r})" if token else ""))
