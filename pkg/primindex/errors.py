class PrimIndexError(Exception):
    """Base class for every error raised by primindex."""


class WordError(PrimIndexError, ValueError):
    pass


class RankMismatch(WordError):
    pass


class GraphError(PrimIndexError, ValueError):
    pass


class NotInSubgroup(GraphError):
    pass


class HypothesisViolation(PrimIndexError, ValueError):
    pass


class SearchCapExhausted(PrimIndexError):
    """The bounded search ran out of degrees; `log` holds what was exhausted."""

    def __init__(self, message: str, log=None):
        super().__init__(message)
        self.log = list(log or [])


class InfeasibleSearch(PrimIndexError):
    pass
