"""End-to-end segmenter: features, resampling, MaxEnt, forcing and repair."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .corpus import LABEL_ORDER, Sentence
from .features import Lexicons, build_feature_space, vectorize
from .maxent import MaxEntClassifier, MaxEntModel
from .resample import apply_forced_labels, filter_training, is_training_position
from .segment import repair as repair_labels
from .validation import check_sentences

__all__ = ["DiscourseSegmenter"]


class DiscourseSegmenter(BaseEstimator):
    """Nested discourse segmenter.

    ``fit`` takes annotated sentences (or documents); ``predict`` returns
    one label list per sentence.

    Parameters
    ----------
    lexicons : Lexicons, optional
        Discourse markers and speech verbs.
    l2_sigma2, max_iter, tol :
        MaxEnt prior variance and optimizer stopping rule.
    min_count : int, default=1
        Feature frequency threshold.
    resample : bool, default=True
        Drop sentence-boundary and strictly chunk-internal tokens from training.
    force_boundaries : bool, default=True
        Force sentence-boundary and chunk-internal labels at prediction time.
    repair : bool, default=True
        Rebalance each predicted sentence into a well-formed segmentation.
    """

    def __init__(
        self,
        lexicons: Optional[Lexicons] = None,
        l2_sigma2: float = 1.0,
        max_iter: int = 500,
        tol: float = 1e-6,
        min_count: int = 1,
        resample: bool = True,
        force_boundaries: bool = True,
        repair: bool = True,
    ):
        self.lexicons = lexicons
        self.l2_sigma2 = l2_sigma2
        self.max_iter = max_iter
        self.tol = tol
        self.min_count = min_count
        self.resample = resample
        self.force_boundaries = force_boundaries
        self.repair = repair

    def _lexicons(self) -> Lexicons:
        return self.lexicons if self.lexicons is not None else Lexicons()

    def fit(self, X, y=None):
        sentences = check_sentences(X, require_gold=True)
        kept, self.filter_report_ = filter_training(sentences, resample=self.resample)
        if not kept:
            raise ValueError("no training instances left after filtering")
        self.space_ = build_feature_space(sentences, self._lexicons(), self.min_count)
        matrix = vectorize(sentences, self._lexicons(), self.space_)
        rows, labels = [], []
        offset = 0
        for sent in sentences:
            for i, tok in enumerate(sent.tokens):
                if is_training_position(sent, i, self.resample):
                    rows.append(offset + i)
                    labels.append(tok.gold)
            offset += len(sent)
        self.classifier_ = MaxEntClassifier(self.l2_sigma2, self.max_iter, self.tol)
        self.classifier_.fit(matrix[np.asarray(rows, dtype=np.int64)], labels)
        self.training_ = self.classifier_.training_
        return self

    @classmethod
    def from_model(cls, model: MaxEntModel, **params) -> "DiscourseSegmenter":
        seg = cls(**params)
        seg.space_ = model.space
        seg.classifier_ = MaxEntClassifier.from_model(model, l2_sigma2=seg.l2_sigma2,
                                                      max_iter=seg.max_iter, tol=seg.tol)
        seg.training_ = model.training
        return seg

    @property
    def model_(self) -> MaxEntModel:
        check_is_fitted(self, "classifier_")
        return self.classifier_.to_model(self.space_)

    def decode(self, X) -> list[list]:
        """Raw per-token classifier decisions, before forcing and repair."""
        check_is_fitted(self, "classifier_")
        sentences = check_sentences(X)
        if not sentences:
            return []
        matrix = vectorize(sentences, self._lexicons(), self.space_)
        idx = np.argmax(self.classifier_._log_proba(matrix), axis=1)
        out = []
        offset = 0
        for sent in sentences:
            out.append([LABEL_ORDER[k] for k in idx[offset:offset + len(sent)]])
            offset += len(sent)
        return out

    def postprocess(self, sentences: Sequence[Sentence], raw, repair: Optional[bool] = None):
        do_repair = self.repair if repair is None else repair
        out = []
        for sent, labels in zip(sentences, raw):
            if self.force_boundaries:
                labels = apply_forced_labels(sent, labels)
            if do_repair:
                labels = repair_labels(labels)
            out.append(list(labels))
        return out

    def predict(self, X) -> list[list]:
        sentences = check_sentences(X)
        return self.postprocess(sentences, self.decode(sentences))

    def score(self, X, y=None) -> float:
        """EDU F1 against the gold labels of ``X``."""
        from .evaluation import score as score_labels

        sentences = check_sentences(X, require_gold=True)
        return score_labels(sentences, self.predict(sentences)).edus.f1

