"""Input validation helpers shared by the estimators."""

from __future__ import annotations

from typing import Sequence

from .corpus import BoundaryLabel, Document, Sentence, UnannotatedCorpusError


def check_sentences(X, require_gold: bool = False) -> list[Sentence]:
    """Flatten documents/sentences into a list of sentences.

    Raises ``TypeError`` on foreign items and
    :class:`UnannotatedCorpusError` when gold labels are required but missing.
    """
    if isinstance(X, (Sentence, Document)):
        X = [X]
    out: list[Sentence] = []
    for item in X:
        if isinstance(item, Document):
            out.extend(item.sentences)
        elif isinstance(item, Sentence):
            out.append(item)
        else:
            raise TypeError(f"expected Sentence or Document, got {type(item).__name__}")
    if require_gold:
        for sent in out:
            if sent.gold_labels is None:
                raise UnannotatedCorpusError(
                    f"unannotated corpus: sentence {sent.sentence_id} lacks gold labels"
                )
    return out


def check_label_sequences(sentences: Sequence[Sentence], labels) -> list[list[BoundaryLabel]]:
    labels = [list(seq) for seq in labels]
    if len(labels) != len(sentences):
        raise ValueError(f"{len(labels)} label sequences for {len(sentences)} sentences")
    for k, (sent, seq) in enumerate(zip(sentences, labels)):
        if len(seq) != len(sent):
            raise ValueError(
                f"sentence {k}: {len(seq)} predicted labels for {len(sent)} tokens"
            )
        for j, lab in enumerate(seq):
            if not isinstance(lab, BoundaryLabel):
                seq[j] = BoundaryLabel.from_code(str(lab))
    return labels
