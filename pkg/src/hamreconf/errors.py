"""Exception hierarchy.

Everything raised on bad input derives from ``HamError`` so the CLI can map
it to exit code 1. ``InternalInvariantBroken`` and ``BoundExceeded`` signal
defects rather than user mistakes; they still derive from ``HamError`` so a
failing run reports cleanly.
"""


class HamError(Exception):
    """Base class for domain errors."""


class OutOfRange(HamError):
    pass


class InvalidState(HamError):
    """A raw edge set is not a Hamiltonian cycle or e-cycle."""


class DegreeViolation(InvalidState):
    def __init__(self, vertex, degree):
        super().__init__(f"vertex {vertex} has degree {degree}")
        self.vertex = vertex
        self.degree = degree


class NotSpanning(InvalidState):
    def __init__(self, missing_vertex):
        super().__init__(f"vertex {missing_vertex} is not covered")
        self.missing_vertex = missing_vertex


class Disconnected(InvalidState):
    def __init__(self, component_count):
        super().__init__(f"edge set has {component_count} components")
        self.component_count = component_count


class BadECycleEdge(InvalidState):
    pass


class ParseError(HamError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class NotSwitchable(HamError):
    pass


class SecondNotSwitchable(HamError):
    pass


class NotHamiltonianAfter(HamError):
    pass


class MoreThanTwoComponents(HamError):
    pass


class NotAPath(HamError):
    pass


class IllegalNeighbor(HamError):
    pass


class NotASmallCookie(HamError):
    pass


class InternalInvariantBroken(HamError):
    pass


class DimsTooSmall(HamError):
    pass


class IllegalChoice(HamError):
    def __init__(self, step, box, reason=""):
        msg = f"step {step}: box {box} is not a legal choice"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)
        self.step = step
        self.box = box


class DimsMismatch(HamError):
    pass


class KindMismatch(HamError):
    pass


class PreconditionFailed(HamError):
    pass


class NoLargeCookiePair(PreconditionFailed):
    pass


class BoundExceeded(HamError):
    pass


class CapExceeded(HamError):
    pass
