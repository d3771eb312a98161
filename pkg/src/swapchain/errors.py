"""Exception hierarchy."""


class SwapChainError(Exception):
    """Base class for all library errors."""


class GraphError(SwapChainError, ValueError):
    pass


class DuplicateEdge(GraphError):
    pass


class LoopEdge(GraphError):
    pass


class BadVertex(GraphError):
    pass


class TooFewEdges(GraphError):
    pass


class StaleSwap(GraphError):
    pass


class Unrealizable(SwapChainError, ValueError):
    pass


class NotConnectable(SwapChainError, ValueError):
    pass


class BadInput(SwapChainError, ValueError):
    pass


class WrongHeuristic(SwapChainError, ValueError):
    pass


class DegenerateP(SwapChainError, ValueError):
    pass


class NoValidSwaps(SwapChainError, RuntimeError):
    pass


class UnreachableMean(SwapChainError, ValueError):
    pass


class SamplingFailed(SwapChainError, RuntimeError):
    pass


class OddSum(SwapChainError, ValueError):
    pass


class FormatError(SwapChainError, ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
