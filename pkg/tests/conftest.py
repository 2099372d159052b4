import pytest

from ballotruns.flagseq import Transcript
from ballotruns.tables import load_dataset


@pytest.fixture(scope="session")
def dataset():
    return load_dataset()


def run_lengths_to_flags(lengths, first=1):
    """Alternating runs, starting with state ``first``."""
    flags, state = [], first
    for length in lengths:
        flags += [state] * length
        state = 1 - state
    return flags


def anikeeva_like_flags():
    # 10 runs of ones and 9 of zeros: r1 = 532, s1 = 382, r0 = 45, s0 = 13, m = 19
    ones = [382, 16, 16, 16, 16, 17, 17, 17, 17, 18]
    zeros = [13, 4, 4, 4, 4, 4, 4, 4, 4]
    lengths = [x for pair in zip(ones, zeros + [0]) for x in pair][:-1]
    return run_lengths_to_flags(lengths)


def transcript_from_columns(columns: dict, precinct_id="t"):
    """Ballots from equal-length 0/1 columns keyed by candidate label."""
    labels = tuple(columns)
    n = len(next(iter(columns.values())))
    ballots = [frozenset(c for c in labels if columns[c][i]) for i in range(n)]
    return Transcript(precinct_id=precinct_id, candidates=labels, ballots=tuple(ballots))


# One pass/fail line per acceptance criterion, printed after the run.
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
