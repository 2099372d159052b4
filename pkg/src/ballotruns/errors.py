"""Exception hierarchy shared by the library and the command line."""


class BallotRunsError(Exception):
    """Base class for every error raised by ballotruns."""


class RosterError(BallotRunsError, KeyError):
    """A candidate label is not on the transcript's roster."""

    def __str__(self):
        return Exception.__str__(self)


class InsufficientDataError(BallotRunsError, ValueError):
    """Not enough ballots, rows or flags to compute the requested quantity."""


class DomainError(BallotRunsError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateModelError(DomainError):
    """The null model has zero variance (constant flag sequence)."""


class NumericError(BallotRunsError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class ScenarioError(BallotRunsError, ValueError):
    """A synthetic scenario is malformed or cannot be realised."""


class OutOfRangeError(BallotRunsError, ValueError):
    """A Monte Carlo estimate was requested for a tail too small to resolve."""


class ParseError(BallotRunsError, ValueError):
    """An input file could not be parsed.

    ``line`` is the 1-based line number of the offending row when known.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
