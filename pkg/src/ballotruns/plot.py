"""SVG rendering of a transcript as a ballot-by-candidate grid."""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .flagseq import FlagSequence, Transcript, candidate_flags, consolidated_flags, rank_candidates, runs, tuned_flags
from .runstats import BernoulliModel, exact_longest_run_alpha

COL_WIDTH = 14
COL_GAP = 4
HEADER = 120
MARGIN = 10
VOTE = "#1f1f1f"
GROUP_VOTE = "#7a7a7a"
SERIES = "#d62728"


def least_probable_run(seq: FlagSequence):
    """(start, length) of the first longest run of whichever state is less probable."""
    best = None
    for state in (0, 1):
        if seq.count(state) == 0:
            continue
        all_runs = [r for r in runs(seq) if r[0] == state]
        longest = max(all_runs, key=lambda r: r[2])
        alpha = exact_longest_run_alpha(BernoulliModel.fit(seq, state), longest[2]).alpha
        if best is None or alpha < best[0]:
            best = (alpha, longest[1], longest[2])
    return None if best is None else (best[1], best[2])


def _f(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def transcript_svg(transcript: Transcript, top_k: int = 5, tuned_k: int = 6) -> str:
    """SVG text: one column per candidate plus the two group columns, one row per ballot."""
    n = transcript.n
    row_h = max(0.5, min(6.0, 1200.0 / max(n, 1)))
    columns = [(label, candidate_flags(transcript, label), VOTE) for label in transcript.candidates]
    top = {label for label, _ in rank_candidates(transcript)[:top_k]} if n else set()
    if n:
        columns.append((f"all top-{top_k}", consolidated_flags(transcript, top_k), GROUP_VOTE))
        columns.append((f"only top-{tuned_k}", tuned_flags(transcript, tuned_k), GROUP_VOTE))
    width = 2 * MARGIN + len(columns) * (COL_WIDTH + COL_GAP)
    height = 2 * MARGIN + HEADER + n * row_h
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}" font-family="sans-serif" font-size="11">',
        f"<title>{escape('Transcript of precinct ' + str(transcript.precinct_id))}</title>",
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="#ffffff"/>',
    ]
    y0 = MARGIN + HEADER
    for k, (label, seq, colour) in enumerate(columns):
        x = MARGIN + k * (COL_WIDTH + COL_GAP)
        cx = x + COL_WIDTH / 2
        weight = "bold" if label in top else "normal"
        out.append(
            f'<text x="{_f(cx)}" y="{_f(y0 - 6)}" font-weight="{weight}" '
            f'transform="rotate(-90 {_f(cx)} {_f(y0 - 6)})">{escape(label)}</text>'
        )
        out.append(f'<rect x="{_f(x)}" y="{_f(y0)}" width="{COL_WIDTH}" height="{_f(n * row_h)}" '
                   f'fill="none" stroke="#cccccc" stroke-width="0.5"/>')
        out.append(f"<g fill={quoteattr(colour)}>")
        for state, start, length in runs(seq):
            if state == 1:
                out.append(f'<rect x="{_f(x)}" y="{_f(y0 + start * row_h)}" width="{COL_WIDTH}" '
                           f'height="{_f(length * row_h)}"/>')
        out.append("</g>")
        span = least_probable_run(seq) if n else None
        if span is not None:
            start, length = span
            lx = x + COL_WIDTH + 1
            out.append(f'<line x1="{_f(lx)}" y1="{_f(y0 + start * row_h)}" x2="{_f(lx)}" '
                       f'y2="{_f(y0 + (start + length) * row_h)}" stroke="{SERIES}" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
