"""Label-sequence algebra for nested segmentations.

A well-formed label sequence brackets a sentence into properly nested,
contiguous segments that cover every token. ``repair`` turns an arbitrary
classifier output into such a sequence with one left-to-right and one
right-to-left depth-tracking pass.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .corpus import BoundaryLabel

B = BoundaryLabel.BEGIN
E = BoundaryLabel.END
BE = BoundaryLabel.BEGIN_END
I = BoundaryLabel.INSIDE  # noqa: E741

__all__ = [
    "Segment",
    "Violation",
    "WellFormedness",
    "IllFormedError",
    "SegmentationError",
    "check_well_formed",
    "repair",
    "labels_to_segments",
    "segments_to_labels",
    "segment_depths",
    "validate_segmentation",
    "render_brackets",
    "parse_labels",
]


class Segment(NamedTuple):
    start: int
    end: int  # inclusive


class Violation(enum.Enum):
    UNCOVERED_TOKEN = "UncoveredToken"
    UNMATCHED_END = "UnmatchedEnd"
    UNCLOSED_BEGIN = "UnclosedBegin"


@dataclass(frozen=True)
class WellFormedness:
    ok: bool
    position: Optional[int] = None
    kind: Optional[Violation] = None

    @property
    def first_violation(self):
        return None if self.ok else (self.position, self.kind)

    def __bool__(self):
        return self.ok


class IllFormedError(ValueError):
    def __init__(self, check: WellFormedness):
        self.check = check
        super().__init__(f"ill-formed label sequence: {check.kind.value} at token {check.position}")


class SegmentationError(ValueError):
    pass


def parse_labels(text: str) -> list[BoundaryLabel]:
    """``"B I E"`` -> labels; convenience for tests and the CLI."""
    return [BoundaryLabel.from_code(code) for code in text.split()]


def check_well_formed(labels: Sequence[BoundaryLabel]) -> WellFormedness:
    depth = 0
    open_stack: list[int] = []
    for i, label in enumerate(labels):
        if label is B:
            open_stack.append(i)
            depth += 1
        elif label is I:
            if depth == 0:
                return WellFormedness(False, i, Violation.UNCOVERED_TOKEN)
        elif label is E:
            if depth == 0:
                return WellFormedness(False, i, Violation.UNMATCHED_END)
            open_stack.pop()
            depth -= 1
    if depth > 0:
        return WellFormedness(False, open_stack[0], Violation.UNCLOSED_BEGIN)
    return WellFormedness(True)


def repair(labels: Sequence[BoundaryLabel]) -> list[BoundaryLabel]:
    """Rebalance a label sequence so that it brackets the whole sentence.

    Pass 1 scans left to right; a token met at depth 0 that is not a
    segment opener (Inside or End) becomes Begin. Pass 2 scans right to
    left with the mirrored depth; a stranded Inside becomes End and a
    Begin with nothing left to close it becomes BeginEnd.
    """
    out = list(labels)

    depth = 0
    for i, label in enumerate(out):
        if label is B:
            depth += 1
        elif label is I or label is E:
            if depth == 0:
                out[i] = B
                depth = 1
            elif label is E:
                depth -= 1

    depth = 0
    for i in range(len(out) - 1, -1, -1):
        label = out[i]
        if label is E:
            depth += 1
        elif label is I:
            if depth == 0:
                out[i] = E
                depth = 1
        elif label is B:
            if depth == 0:
                out[i] = BE
            else:
                depth -= 1
    return out


def _segments_with_depth(labels: Sequence[BoundaryLabel]):
    check = check_well_formed(labels)
    if not check.ok:
        raise IllFormedError(check)
    stack: list[int] = []
    for i, label in enumerate(labels):
        if label is B:
            stack.append(i)
        elif label is E:
            start = stack.pop()
            yield Segment(start, i), len(stack) + 1
        elif label is BE:
            yield Segment(i, i), len(stack) + 1


def labels_to_segments(labels: Sequence[BoundaryLabel]) -> frozenset[Segment]:
    return frozenset(seg for seg, _ in _segments_with_depth(labels))


def segment_depths(labels: Sequence[BoundaryLabel]) -> dict[Segment, int]:
    """Map each segment to its nesting depth (1 = top level)."""
    return dict(_segments_with_depth(labels))


def validate_segmentation(segments: Iterable[Segment], length: int) -> list[Segment]:
    """Check the nesting, coverage and distinct-boundary invariants.

    Returns the segments sorted by (start, -end); raises
    :class:`SegmentationError` naming the offending segments.
    """
    segs = sorted((Segment(*s) for s in segments), key=lambda s: (s.start, -s.end))
    for s in segs:
        if not 0 <= s.start <= s.end < length:
            raise SegmentationError(f"segment {tuple(s)} out of range for length {length}")
    starts: dict[int, Segment] = {}
    ends: dict[int, Segment] = {}
    for s in segs:
        if s.start in starts:
            raise SegmentationError(f"segments {tuple(starts[s.start])} and {tuple(s)} share a start")
        if s.end in ends:
            raise SegmentationError(f"segments {tuple(ends[s.end])} and {tuple(s)} share an end")
        starts[s.start] = s
        ends[s.end] = s
    # sorted by start, an open-segment stack detects crossing brackets
    stack: list[Segment] = []
    for s in segs:
        while stack and stack[-1].end < s.start:
            stack.pop()
        if stack and s.end > stack[-1].end:
            raise SegmentationError(f"segments {tuple(stack[-1])} and {tuple(s)} partially overlap")
        stack.append(s)
    covered = [False] * length
    for s in segs:
        for i in range(s.start, s.end + 1):
            covered[i] = True
    if not all(covered):
        raise SegmentationError(f"token {covered.index(False)} is not covered by any segment")
    return segs


def segments_to_labels(segments: Iterable[Segment], length: int) -> list[BoundaryLabel]:
    segs = validate_segmentation(segments, length)
    labels = [I] * length
    for s in segs:
        if s.start == s.end:
            labels[s.start] = BE
        else:
            labels[s.start] = B
            labels[s.end] = E
    return labels


def render_brackets(forms: Sequence[str], labels: Sequence[BoundaryLabel]) -> str:
    """Interleave ``[`` / ``]`` with token forms, e.g. ``[Ces pièces , [x ,] ...]``."""
    parts = []
    for form, label in zip(forms, labels):
        if label is B:
            parts.append("[" + form)
        elif label is E:
            parts.append(form + "]")
        elif label is BE:
            parts.append("[" + form + "]")
        else:
            parts.append(form)
    return " ".join(parts)
