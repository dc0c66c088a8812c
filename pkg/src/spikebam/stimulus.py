"""Bimodal character stimuli, their spike encoding, and the two-phase protocol.

Glyph file format: blocks made of a ``label:`` line followed by ten lines of
ten characters from ``#`` (black) and ``.`` (white), separated by blank
lines.  Consecutive glyphs form a pair: the first goes to perceptive layer 1,
the second to perceptive layer 2 (``A``, ``1``, ``B``, ``2``, ...).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

SIDE = 10
N_PAIRS = 10
REPETITIONS = 10
PERIOD_MS = 10
PRESENTATION_MS = 100
N_SEQUENCES = 10


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class Pattern:
    pixels: np.ndarray
    label: str

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.shape != (SIDE, SIDE):
            raise PatternError(f"glyph {self.label!r}: expected {SIDE}x{SIDE} pixels, got {px.shape}")
        if not np.isin(px, (0, 1)).all():
            raise PatternError(f"glyph {self.label!r}: pixels must be 0 or 1")
        if not px.any():
            raise PatternError(f"glyph {self.label!r}: no black pixel")
        object.__setattr__(self, "pixels", px.astype(np.uint8))

    @property
    def black(self) -> np.ndarray:
        """Neuron indices (row-major pixel order) of the black pixels."""
        return np.flatnonzero(self.pixels.ravel())


@dataclass(frozen=True)
class StimulusSet:
    pairs: Tuple[Tuple[Pattern, Pattern], ...]

    def __post_init__(self) -> None:
        if len(self.pairs) != N_PAIRS:
            raise PatternError(f"expected {N_PAIRS} pairs, got {len(self.pairs)}")
        labels = [g.label for pair in self.pairs for g in pair]
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        if dupes:
            raise PatternError(f"duplicate labels: {dupes}")

    def __len__(self) -> int:
        return len(self.pairs)


# 10x10 bitmaps, one string per row
_FONT = {
    "A": ["...####...", "..##..##..", ".##....##.", ".##....##.", ".##....##.",
          ".########.", ".##....##.", ".##....##.", ".##....##.", ".##....##."],
    "B": [".#######..", ".##....##.", ".##....##.", ".##....##.", ".#######..",
          ".##....##.", ".##....##.", ".##....##.", ".##....##.", ".#######.."],
    "C": ["..######..", ".##....##.", ".##.......", ".##.......", ".##.......",
          ".##.......", ".##.......", ".##.......", ".##....##.", "..######.."],
    "D": [".######...", ".##...##..", ".##....##.", ".##....##.", ".##....##.",
          ".##....##.", ".##....##.", ".##....##.", ".##...##..", ".######..."],
    "E": [".########.", ".##.......", ".##.......", ".##.......", ".#######..",
          ".##.......", ".##.......", ".##.......", ".##.......", ".########."],
    "F": [".########.", ".##.......", ".##.......", ".##.......", ".#######..",
          ".##.......", ".##.......", ".##.......", ".##.......", ".##......."],
    "G": ["..######..", ".##....##.", ".##.......", ".##.......", ".##.......",
          ".##..####.", ".##....##.", ".##....##.", ".##....##.", "..######.."],
    "H": [".##....##.", ".##....##.", ".##....##.", ".##....##.", ".########.",
          ".##....##.", ".##....##.", ".##....##.", ".##....##.", ".##....##."],
    "I": ["..######..", "....##....", "....##....", "....##....", "....##....",
          "....##....", "....##....", "....##....", "....##....", "..######.."],
    "J": ["...######.", ".......##.", ".......##.", ".......##.", ".......##.",
          ".......##.", ".##....##.", ".##....##.", ".##....##.", "..######.."],
    "1": ["....##....", "...###....", "..####....", "....##....", "....##....",
          "....##....", "....##....", "....##....", "....##....", "..######.."],
    "2": ["..######..", ".##....##.", ".......##.", "......##..", ".....##...",
          "....##....", "...##.....", "..##......", ".##.......", ".########."],
    "3": ["..######..", ".##....##.", ".......##.", ".......##.", "...#####..",
          ".......##.", ".......##.", ".......##.", ".##....##.", "..######.."],
    "4": [".....###..", "....####..", "...##.##..", "..##..##..", ".##...##..",
          ".########.", "......##..", "......##..", "......##..", "......##.."],
    "5": [".########.", ".##.......", ".##.......", ".#######..", ".......##.",
          ".......##.", ".......##.", ".......##.", ".##....##.", "..######.."],
    "6": ["..######..", ".##....##.", ".##.......", ".##.......", ".#######..",
          ".##....##.", ".##....##.", ".##....##.", ".##....##.", "..######.."],
    "7": [".########.", ".......##.", "......##..", ".....##...", "....##....",
          "....##....", "....##....", "....##....", "....##....", "....##...."],
    "8": ["..######..", ".##....##.", ".##....##.", ".##....##.", "..######..",
          ".##....##.", ".##....##.", ".##....##.", ".##....##.", "..######.."],
    "9": ["..######..", ".##....##.", ".##....##.", ".##....##.", "..#######.",
          ".......##.", ".......##.", ".......##.", ".##....##.", "..######.."],
    "0": ["..######..", ".##....##.", ".##...###.", ".##..####.", ".##.##.##.",
          ".####..##.", ".###...##.", ".##....##.", ".##....##.", "..######.."],
}
_PAIR_LABELS = [("A", "1"), ("B", "2"), ("C", "3"), ("D", "4"), ("E", "5"),
                ("F", "6"), ("G", "7"), ("H", "8"), ("I", "9"), ("J", "0")]


def _parse_rows(rows: Sequence[str], label: str) -> np.ndarray:
    return np.array([[1 if c == "#" else 0 for c in row] for row in rows], dtype=np.uint8)


def builtin_patterns() -> StimulusSet:
    """Default glyph set: pairs (A,1), (B,2), ..., (I,9), (J,0)."""
    pairs = tuple(
        (Pattern(_parse_rows(_FONT[a], a), a), Pattern(_parse_rows(_FONT[b], b), b))
        for a, b in _PAIR_LABELS
    )
    return StimulusSet(pairs)


def load_patterns(path: str | Path | None = None) -> StimulusSet:
    """Read a glyph file; with ``path=None`` return the built-in set.

    Errors carry the line number of the offending glyph header or row.
    """
    if path is None:
        return builtin_patterns()
    lines = Path(path).read_text().splitlines()
    glyphs: List[Pattern] = []
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if not line.endswith(":") or len(line) < 2:
            raise PatternError(f"line {i + 1}: expected 'label:' header, got {line!r}")
        label, start = line[:-1].strip(), i + 1
        rows = []
        i += 1
        while i < len(lines) and lines[i].strip():
            row = lines[i].strip()
            if len(row) != SIDE or set(row) - {"#", "."}:
                raise PatternError(
                    f"line {i + 1}: glyph {label!r} row must be {SIDE} chars of '#'/'.', got {row!r}"
                )
            rows.append(row)
            i += 1
        if len(rows) != SIDE:
            raise PatternError(f"line {start}: glyph {label!r} has {len(rows)} rows, expected {SIDE}")
        try:
            glyphs.append(Pattern(_parse_rows(rows, label), label))
        except PatternError as exc:
            raise PatternError(f"line {start}: {exc}") from None
    if len(glyphs) != 2 * N_PAIRS:
        raise PatternError(f"{path}: expected {2 * N_PAIRS} glyphs, found {len(glyphs)}")
    return StimulusSet(tuple((glyphs[2 * k], glyphs[2 * k + 1]) for k in range(N_PAIRS)))


def write_patterns(path: str | Path, stimuli: StimulusSet) -> None:
    blocks = []
    for pair in stimuli.pairs:
        for g in pair:
            rows = ["".join("#" if v else "." for v in row) for row in g.pixels]
            blocks.append("\n".join([f"{g.label}:"] + rows))
    Path(path).write_text("\n\n".join(blocks) + "\n")


INJECTION_DTYPE = np.dtype([("t", np.int64), ("layer", np.int64), ("neuron", np.int64)])


def encode_presentation(
    pair: Tuple[Pattern, Pattern],
    t0: int,
    repetitions: int = REPETITIONS,
    period: int = PERIOD_MS,
) -> np.ndarray:
    """Forced sensory spikes for one 100 ms presentation.

    Every black pixel ``j`` of modality ``k`` (1 or 2) makes perceptive
    pyramidal neuron ``j`` of layer ``k`` fire at the first ms of each 10 ms
    slot.  Returns a structured array with fields ``t``, ``layer``,
    ``neuron`` sorted by time, then layer, then neuron.
    """
    per_slot = [(k + 1, j) for k, g in enumerate(pair) for j in g.black]
    events = np.empty(repetitions * len(per_slot), dtype=INJECTION_DTYPE)
    i = 0
    for r in range(repetitions):
        for k, j in per_slot:
            events[i] = (t0 + period * r, k, j)
            i += 1
    return events


class PresentationEntry(NamedTuple):
    phase: int
    p: int
    l: int  # stimulus index, 1-based
    t0: int


def protocol_schedule(stimuli: StimulusSet, seed: int) -> List[PresentationEntry]:
    """Learning phase (fixed order, p=1..10) then recall phase (shuffled, p=11..20).

    Recall order for each sequence is ``rng.permutation`` drawn from
    ``numpy.random.default_rng([seed, 1])``.
    """
    n = len(stimuli)
    rng = np.random.default_rng([seed, 1])
    entries: List[PresentationEntry] = []
    t0 = 0
    for p in range(1, 2 * N_SEQUENCES + 1):
        if p <= N_SEQUENCES:
            order = list(range(1, n + 1))
        else:
            order = [int(x) + 1 for x in rng.permutation(n)]
        for l in order:
            entries.append(PresentationEntry(1 if p <= N_SEQUENCES else 2, p, l, t0))
            t0 += PRESENTATION_MS
    return entries


def write_schedule(path: str | Path, entries: Sequence[PresentationEntry], header: Sequence[str] = ()) -> None:
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phase", "p", "l", "t0_ms"])
        for e in entries:
            w.writerow([e.phase, e.p, e.l, e.t0])
