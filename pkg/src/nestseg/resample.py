"""Chunk-guided training filter and the matching label forcing at test time.

Sentence-boundary tokens and tokens strictly inside chunks are left out of
training; at prediction time those positions get deterministic labels
instead of classifier decisions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .corpus import LABEL_ORDER, BoundaryLabel, ChunkPosition, Sentence, Token, UnannotatedCorpusError

__all__ = [
    "InstanceFilterReport",
    "is_strictly_chunk_internal",
    "filter_training",
    "is_training_position",
    "apply_forced_labels",
]


@dataclass
class InstanceFilterReport:
    kept: int = 0
    dropped_sentence_boundary: int = 0
    dropped_chunk_internal: int = 0
    per_label_kept: dict = field(default_factory=lambda: {label: 0 for label in LABEL_ORDER})

    @property
    def total(self) -> int:
        return self.kept + self.dropped_sentence_boundary + self.dropped_chunk_internal

    def format(self) -> str:
        lines = [
            f"instances\t{self.total}",
            f"kept\t{self.kept}",
            f"dropped sentence-boundary\t{self.dropped_sentence_boundary}",
            f"dropped chunk-internal\t{self.dropped_chunk_internal}",
        ]
        lines += [f"kept {label.code}\t{self.per_label_kept[label]}" for label in LABEL_ORDER]
        return "\n".join(lines) + "\n"


def is_strictly_chunk_internal(token: Token) -> bool:
    """True when the token is Inside at every chunk nesting level."""
    return bool(token.chunk_path) and all(
        el.position is ChunkPosition.INSIDE for el in token.chunk_path
    )


def is_training_position(sentence: Sentence, index: int, resample: bool = True) -> bool:
    if not resample:
        return True
    if index == 0 or index == len(sentence) - 1:
        return False
    return not is_strictly_chunk_internal(sentence.tokens[index])


def filter_training(sentences: Sequence[Sentence], resample: bool = True):
    """Select training positions.

    Returns ``(kept, report)`` where ``kept`` lists ``(sentence, index)``
    pairs in corpus order. With ``resample=False`` every token is kept.
    """
    kept = []
    report = InstanceFilterReport()
    for sent in sentences:
        labels = sent.gold_labels
        if labels is None:
            raise UnannotatedCorpusError(f"sentence {sent.sentence_id} has no gold boundary labels")
        last = len(sent) - 1
        for i, tok in enumerate(sent.tokens):
            if resample and (i == 0 or i == last):
                report.dropped_sentence_boundary += 1
            elif resample and is_strictly_chunk_internal(tok):
                report.dropped_chunk_internal += 1
            else:
                kept.append((sent, i))
                report.kept += 1
                report.per_label_kept[labels[i]] += 1
    return kept, report


def apply_forced_labels(
    sentence: Sentence,
    predicted: Sequence[BoundaryLabel],
    force_boundaries: bool = True,
    force_chunks: bool = True,
) -> list[BoundaryLabel]:
    if len(predicted) != len(sentence):
        raise ValueError(
            f"predicted {len(predicted)} labels for a sentence of {len(sentence)} tokens"
        )
    out = list(predicted)
    if force_chunks:
        for i, tok in enumerate(sentence.tokens):
            if is_strictly_chunk_internal(tok):
                out[i] = BoundaryLabel.INSIDE
    if force_boundaries:
        if len(out) == 1:
            out[0] = BoundaryLabel.BEGIN_END
        else:
            out[0] = BoundaryLabel.BEGIN
            out[-1] = BoundaryLabel.END
    return out
