"""Segmentation metrics, cross-validation and learning curves.

Rows follow the clause-identification evaluation of CoNLL-2001: segment
starts (Left), segment ends (Right), single-token segments (Both) and
complete segments matched by exact span (EDUs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sklearn.base import clone

from .corpus import BoundaryLabel, Document, Sentence
from .segment import check_well_formed, labels_to_segments
from .validation import check_label_sequences, check_sentences

__all__ = [
    "PRF",
    "EvalReport",
    "CVResult",
    "CurvePoint",
    "score",
    "cross_validate",
    "learning_curve",
    "curve_sizes",
    "format_report",
    "format_report_tsv",
    "format_curve",
]

B = BoundaryLabel.BEGIN
E = BoundaryLabel.END
BE = BoundaryLabel.BEGIN_END


@dataclass(frozen=True)
class PRF:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 1.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 1.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "PRF") -> "PRF":
        return PRF(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class EvalReport:
    left: PRF = PRF()
    right: PRF = PRF()
    both: PRF = PRF()
    edus: PRF = PRF()
    n_sentences: int = 0
    n_well_formed: int = 0
    # start/end rows that also count single-token segments
    left_with_singletons: PRF = PRF()
    right_with_singletons: PRF = PRF()

    @property
    def well_formed_rate(self) -> float:
        return self.n_well_formed / self.n_sentences if self.n_sentences else 1.0

    def __add__(self, other: "EvalReport") -> "EvalReport":
        return EvalReport(
            self.left + other.left,
            self.right + other.right,
            self.both + other.both,
            self.edus + other.edus,
            self.n_sentences + other.n_sentences,
            self.n_well_formed + other.n_well_formed,
            self.left_with_singletons + other.left_with_singletons,
            self.right_with_singletons + other.right_with_singletons,
        )


def _token_prf(gold, pred, positive) -> PRF:
    tp = fp = fn = 0
    for g, p in zip(gold, pred):
        gp, pp = g in positive, p in positive
        tp += gp and pp
        fp += pp and not gp
        fn += gp and not pp
    return PRF(tp, fp, fn)


def score_sentence(gold: Sequence[BoundaryLabel], pred: Sequence[BoundaryLabel]) -> EvalReport:
    if len(gold) != len(pred):
        raise ValueError(f"{len(pred)} predicted labels for {len(gold)} gold labels")
    gold_segs = labels_to_segments(gold)
    well_formed = check_well_formed(pred).ok
    if well_formed:
        pred_segs = labels_to_segments(pred)
        edus = PRF(len(gold_segs & pred_segs), len(pred_segs - gold_segs), len(gold_segs - pred_segs))
    else:
        edus = PRF(0, 0, len(gold_segs))
    return EvalReport(
        left=_token_prf(gold, pred, {B}),
        right=_token_prf(gold, pred, {E}),
        both=_token_prf(gold, pred, {BE}),
        edus=edus,
        n_sentences=1,
        n_well_formed=int(well_formed),
        left_with_singletons=_token_prf(gold, pred, {B, BE}),
        right_with_singletons=_token_prf(gold, pred, {E, BE}),
    )


def score(gold, predicted) -> EvalReport:
    """Score predicted label sequences against gold-annotated sentences.

    Predicted sentences that are not well-formed earn no EDU credit: their
    gold segments all count as misses.
    """
    sentences = check_sentences(gold, require_gold=True)
    predicted = check_label_sequences(sentences, predicted)
    report = EvalReport()
    for sent, pred in zip(sentences, predicted):
        report = report + score_sentence(sent.gold_labels, pred)
    return report


# ---------------------------------------------------------------------------
# Cross-validation


@dataclass
class CVResult:
    report: EvalReport
    folds: list
    without_repair: EvalReport
    seed: int
    k: int


def _fold_units(corpus, doc_folds: bool):
    if doc_folds:
        docs = [d for d in corpus if isinstance(d, Document)]
        if len(docs) != len(corpus):
            raise TypeError("document-level folds need a list of documents")
        return [list(d.sentences) for d in docs]
    return [[s] for s in check_sentences(corpus)]


def cross_validate(corpus, estimator=None, k: int = 10, seed: int = 0, doc_folds: bool = False) -> CVResult:
    """k-fold cross-validation with micro-averaged (pooled) counts.

    Sentences (or documents, with ``doc_folds``) are shuffled with ``seed``
    and split into ``k`` near-equal folds. ``estimator`` defaults to a
    :class:`~nestseg.pipeline.DiscourseSegmenter` and is cloned per fold.
    """
    from .pipeline import DiscourseSegmenter

    if k < 2:
        raise ValueError("k must be >= 2")
    units = _fold_units(list(corpus), doc_folds)
    if len(units) < k:
        unit = "documents" if doc_folds else "sentences"
        raise ValueError(f"{len(units)} {unit} is fewer than {k} folds")
    if estimator is None:
        estimator = DiscourseSegmenter()
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(units))
    folds = np.array_split(order, k)

    fold_reports = []
    total = EvalReport()
    total_raw = EvalReport()
    for fold in folds:
        held_out = set(fold.tolist())
        test = [s for j in fold for s in units[j]]
        train = [s for j in order if j not in held_out for s in units[j]]
        est = clone(estimator).fit(train)
        raw = est.decode(test)
        rep = score(test, est.postprocess(test, raw))
        rep_raw = score(test, est.postprocess(test, raw, repair=False))
        fold_reports.append(rep)
        total = total + rep
        total_raw = total_raw + rep_raw
    return CVResult(total, fold_reports, total_raw, seed, k)


@dataclass(frozen=True)
class CurvePoint:
    n_docs: int
    report: EvalReport


def curve_sizes(n_docs: int, step: int) -> list[int]:
    if step < 1:
        raise ValueError("step must be >= 1")
    if n_docs < step:
        raise ValueError(f"corpus of {n_docs} documents is smaller than step {step}")
    sizes = list(range(step, n_docs + 1, step))
    if sizes[-1] != n_docs:
        sizes.append(n_docs)
    return sizes


def learning_curve(
    docs: Sequence[Document], estimator=None, step_docs: int = 5, k: int = 10, seed: int = 0,
    doc_folds: bool = False,
) -> list[CurvePoint]:
    """Cross-validate on nested, growing random document samples."""
    docs = list(docs)
    sizes = curve_sizes(len(docs), step_docs)
    order = np.random.default_rng(seed).permutation(len(docs))
    points = []
    for size in sizes:
        # corpus order inside each sample: the full-size point equals plain CV
        subset = [docs[j] for j in sorted(order[:size])]
        result = cross_validate(subset, estimator, k=k, seed=seed, doc_folds=doc_folds)
        points.append(CurvePoint(size, result.report))
    return points


# ---------------------------------------------------------------------------
# Rendering

_ROWS = ("Left", "Right", "Both", "EDUs")


def _rows(report: EvalReport):
    return zip(_ROWS, (report.left, report.right, report.both, report.edus))


def format_report(report: EvalReport, header: Optional[dict] = None, title: Optional[str] = None) -> str:
    lines = [f"# {key} = {value}" for key, value in (header or {}).items()]
    if title:
        lines.append(title)
    lines.append(f"{'Class':<8}{'Recall':>10}{'Precision':>11}{'F-measure':>11}")
    for name, prf in _rows(report):
        lines.append(f"{name:<8}{prf.recall:>10.3f}{prf.precision:>11.3f}{prf.f1:>11.3f}")
    lines.append(
        f"well-formed: {report.n_well_formed}/{report.n_sentences} ({report.well_formed_rate:.3f})"
    )
    return "\n".join(lines) + "\n"


def format_report_tsv(report: EvalReport) -> str:
    lines = ["class\trecall\tprecision\tf1\ttp\tfp\tfn"]
    for name, prf in _rows(report):
        lines.append(
            f"{name}\t{prf.recall:.6f}\t{prf.precision:.6f}\t{prf.f1:.6f}\t{prf.tp}\t{prf.fp}\t{prf.fn}"
        )
    lines.append(f"well_formed_rate\t{report.well_formed_rate:.6f}\t\t\t{report.n_well_formed}\t\t{report.n_sentences}")
    return "\n".join(lines) + "\n"


def format_curve(points: Sequence[CurvePoint]) -> str:
    lines = ["size\tleft_f\tright_f\tedu_f"]
    for pt in points:
        r = pt.report
        lines.append(f"{pt.n_docs}\t{r.left.f1:.4f}\t{r.right.f1:.4f}\t{r.edus.f1:.4f}")
    return "\n".join(lines) + "\n"
