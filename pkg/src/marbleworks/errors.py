"""Exception types shared across the package."""


class MarbleworksError(Exception):
    """Base class for all errors raised by this package."""


class NotAssociative(MarbleworksError):
    def __init__(self, x, y, z):
        self.triple = (x, y, z)
        super().__init__(f"multiplication table is not associative at ({x}, {y}, {z})")


class BadIdentity(MarbleworksError):
    def __init__(self, x):
        self.element = x
        super().__init__(f"identity law fails at element {x}")


class UnknownLetter(MarbleworksError):
    def __init__(self, letter):
        self.letter = letter
        super().__init__(f"letter {letter!r} is not in the alphabet")


class NotInImage(MarbleworksError):
    def __init__(self, element):
        self.element = element
        super().__init__(f"element {element} has no preimage word under the morphism")


class ArityMismatch(MarbleworksError):
    pass


class NotIndependent(MarbleworksError):
    pass


class DegreeExceeded(MarbleworksError):
    pass


class StarOnNonProper(MarbleworksError):
    def __init__(self):
        super().__init__("Kleene star requires the child series to map the empty word to 0")


class UnsupportedNode(MarbleworksError):
    def __init__(self, kind):
        self.kind = kind
        super().__init__(f"series node {kind!r} has no blind-machine translation")


class NotPermutable(MarbleworksError):
    def __init__(self, instance):
        self.instance = instance
        super().__init__("machine failed the permutability check; see .instance for the counterexample")


class BudgetExceeded(MarbleworksError):
    def __init__(self, size, budget):
        self.size = size
        self.budget = budget
        super().__init__(f"enumeration of {size} instances exceeds the budget of {budget}")


class NoRepresentative(MarbleworksError):
    pass


class PartitionViolation(MarbleworksError):
    pass


class ForestViolation(MarbleworksError):
    def __init__(self, path, reason):
        self.path = tuple(path)
        self.reason = reason
        super().__init__(f"invalid forest at node {self.path}: {reason}")


class ParseError(MarbleworksError):
    pass


class ValidationError(MarbleworksError):
    def __init__(self, where, reason):
        self.where = where
        super().__init__(f"{where}: {reason}")
