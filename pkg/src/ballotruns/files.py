"""Reading and writing transcript CSV files, config files and scenario files.

Transcript CSV layout::

    # precinct: 219
    # date: 2024-09-08
    # official: 120,98,77,...        (optional certified totals, roster order)
    Anikeeva,Afonin,Bulkina,...
    1,0,1,...
    0,0,1,...

Config and scenario files are flat ``key = value`` text with ``#`` comments.
"""

from __future__ import annotations

import configparser
import csv
import io
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from .errors import ParseError
from .flagseq import DEFAULT_MAX_MARKS, Transcript, validity_filter


def parse_transcript(text: str, *, precinct_id: str | None = None, max_marks: int = DEFAULT_MAX_MARKS,
                     strict: bool = False, path=None) -> Transcript:
    """Parse transcript CSV text.

    Rows with no marks or more than ``max_marks`` marks are dropped and
    counted; their line numbers end up in ``metadata['invalid_rows']``. With
    ``strict=True`` they raise :class:`ParseError` instead.
    """
    meta: dict[str, str] = {}
    header = None
    ballots = []
    invalid_rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                meta[key.strip().lower()] = value.strip()
            continue
        cells = [c.strip() for c in next(csv.reader([line]))]
        if header is None:
            if any(not c for c in cells):
                raise ParseError("empty candidate label in header", lineno, path)
            if len(set(cells)) != len(cells):
                raise ParseError("duplicate candidate label in header", lineno, path)
            header = cells
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(cells)}", lineno, path)
        if any(c not in ("0", "1") for c in cells):
            raise ParseError("cells must be 0 or 1", lineno, path)
        marks = frozenset(label for label, c in zip(header, cells) if c == "1")
        if validity_filter(len(marks), max_marks):
            ballots.append(marks)
        elif strict:
            raise ParseError(f"invalid ballot with {len(marks)} marks", lineno, path)
        else:
            invalid_rows.append(lineno)
    if header is None:
        raise ParseError("no header row: the file is empty", None, path)
    if not ballots:
        raise ParseError("transcript has no valid ballots", None, path)
    official = None
    if "official" in meta:
        try:
            totals = [int(v) for v in meta["official"].split(",")]
        except ValueError as exc:
            raise ParseError(f"bad official totals: {exc}", None, path) from None
        if len(totals) != len(header):
            raise ParseError("official totals must list one count per candidate", None, path)
        official = dict(zip(header, totals))
    if invalid_rows:
        meta["invalid_rows"] = ",".join(map(str, invalid_rows))
    pid = precinct_id or meta.get("precinct") or (Path(path).stem if path else "unknown")
    return Transcript(
        precinct_id=pid,
        candidates=tuple(header),
        ballots=tuple(ballots),
        max_marks=max_marks,
        invalid_count=len(invalid_rows),
        metadata=meta,
        official_votes=official,
    )


def read_transcript(path, **kw) -> Transcript:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read transcript: {exc.strerror}", None, path) from None
    return parse_transcript(text, path=path, **kw)


def format_transcript(transcript: Transcript) -> str:
    out = io.StringIO()
    out.write(f"# precinct: {transcript.precinct_id}\n")
    for key, value in transcript.metadata.items():
        if key not in ("precinct", "invalid_rows", "official"):
            out.write(f"# {key}: {value}\n")
    if transcript.official_votes:
        out.write("# official: " + ",".join(str(transcript.official_votes[c]) for c in transcript.candidates) + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(transcript.candidates)
    for marks in transcript.ballots:
        writer.writerow(["1" if c in marks else "0" for c in transcript.candidates])
    return out.getvalue()


def parse_key_values(text: str, path=None) -> dict[str, str]:
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[root]\n" + text)
    except configparser.Error as exc:
        raise ParseError(f"malformed key = value file: {exc.message}", None, path) from None
    return dict(parser["root"])


def read_key_values(path) -> dict[str, str]:
    path = Path(path)
    try:
        return parse_key_values(path.read_text(encoding="utf-8"), path)
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", None, path) from None


def parse_fraction(text: str) -> float:
    """'1/9', '0.05' or '1e-9' as a float."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a number: {text!r}") from None


def write_atomic(path, data: str | bytes) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if isinstance(data, bytes) else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
