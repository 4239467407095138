"""Exception hierarchy shared by all engine modules."""


class OslError(Exception):
    """Base class for every error raised by the engine."""


class PosetSpecError(OslError, ValueError):
    """A poset specification is malformed (empty or unknown labels)."""


class DuplicateLabel(PosetSpecError):
    pass


class CycleDetected(OslError, ValueError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__(f"covers induce a cycle through {' -> '.join(self.cycle)}")


class NoUniqueBound(OslError, ValueError):
    def __init__(self, which, candidates):
        self.which = which
        self.candidates = tuple(candidates)
        super().__init__(f"no unique {which}; candidates: {list(self.candidates)}")


class NotALattice(OslError, ValueError):
    """Some pair has no unique least upper bound or greatest lower bound.

    ``pair`` holds the offending labels, ``kind`` is ``"join"`` or ``"meet"``
    and ``evidence`` lists the minimal upper (maximal lower) bounds found.
    """

    def __init__(self, pair, kind, evidence=()):
        self.pair = tuple(pair)
        self.kind = kind
        self.evidence = tuple(evidence)
        bound = "least upper" if kind == "join" else "greatest lower"
        super().__init__(
            f"pair {self.pair} has no unique {bound} bound; candidates: {list(self.evidence)}"
        )


class IndexOutOfRange(OslError, IndexError):
    pass


class UnknownLabel(OslError, LookupError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown label"


class WeightOutOfRange(OslError, ValueError):
    pass


class InvalidNode(OslError, ValueError):
    pass


class StaleComponents(OslError, ValueError):
    pass


class InvalidScenario(OslError, ValueError):
    def __init__(self, message, step=None):
        self.step = step
        where = f"step {step}: " if step is not None else ""
        super().__init__(where + message)


class ParseError(OslError, ValueError):
    def __init__(self, message, line=None, offset=None):
        self.line = line
        self.offset = offset
        where = ""
        if line is not None:
            where = f"line {line}" + (f", offset {offset}" if offset is not None else "") + ": "
        super().__init__(where + message)


class InsufficientData(OslError, ValueError):
    pass


class UnknownShape(OslError, ValueError):
    pass
