"""Exception hierarchy.

``InputError`` and its subclasses are operational failures (bad files,
malformed shorthand, wrong dimensions).  ``BudgetExceeded`` means a search was
cut short; it never stands in for a mathematical verdict.
"""


class SupertopeError(Exception):
    pass


class InputError(SupertopeError, ValueError):
    pass


class FamilySyntaxError(InputError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)


class SlotCountError(InputError):
    pass


class MultiplicityMismatch(InputError):
    def __init__(self, expected, actual, family=""):
        self.expected = expected
        self.actual = actual
        super().__init__(f"family {family} expands to {actual} vectors, declared multiplicity {expected}")


class DuplicateVertex(InputError):
    def __init__(self, vertex):
        self.vertex = tuple(vertex)
        super().__init__(f"vertex {self.vertex} is produced by more than one family")


class NotPositiveDefinite(InputError):
    pass


class NotCircumscribed(InputError):
    def __init__(self, vertex, value):
        self.vertex = tuple(vertex)
        self.value = value
        super().__init__(f"quadric does not pass through vertex {self.vertex} (value {value})")


class NotCentrallySymmetric(SupertopeError):
    def __init__(self, vertex):
        self.vertex = tuple(vertex)
        super().__init__(f"antipode of {self.vertex} is not a vertex")


class BudgetExceeded(SupertopeError):
    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)
