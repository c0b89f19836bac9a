"""``nestseg`` command line: train, predict, evaluate, cv, curve, generate, repair, stats."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from contextlib import contextmanager

from .corpus import (
    CorpusFormatError,
    UnannotatedCorpusError,
    corpus_stats,
    iter_sentences,
    read_corpus,
    write_corpus,
)
from .evaluation import (
    cross_validate,
    format_curve,
    format_report,
    format_report_tsv,
    learning_curve,
    score,
)
from .features import Lexicons
from .maxent import ModelFormatError, TrainingError, load_model, save_model
from .pipeline import DiscourseSegmenter
from .resample import filter_training
from .segment import IllFormedError, SegmentationError, check_well_formed, render_brackets, repair
from .synthetic import DISCOURSE_MARKERS, RELATIVE_MARKERS, SPEECH_MARKER, SPEECH_VERBS, generate_synthetic

log = logging.getLogger("nestseg")

EXIT_OK = 0
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_CONTRACT = 5


class PathError(OSError):
    pass


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _check_inputs(*paths):
    for p in paths:
        if p is not None and not os.path.isfile(p):
            raise PathError(f"cannot read {p}: no such file")


def _check_outputs(*paths):
    for p in paths:
        if p is None or p == "-":
            continue
        parent = os.path.dirname(os.path.abspath(p))
        if not os.path.isdir(parent):
            raise PathError(f"cannot write {p}: directory {parent} does not exist")


def _header(args) -> dict:
    cfg = {"command": args.command}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "func", "verbose", "out"):
            continue
        cfg[key] = value
    return cfg


def _header_lines(args) -> str:
    return "".join(f"# {k} = {v}\n" for k, v in _header(args).items())


def _lexicons(args) -> Lexicons:
    _check_inputs(getattr(args, "markers", None), getattr(args, "verbs", None))
    return Lexicons.from_files(getattr(args, "markers", None), getattr(args, "verbs", None))


def _estimator(args, lexicons) -> DiscourseSegmenter:
    return DiscourseSegmenter(
        lexicons=lexicons,
        l2_sigma2=args.l2_sigma2,
        max_iter=args.max_iterations,
        tol=args.tolerance,
        min_count=args.min_count,
        resample=not args.no_resample,
        force_boundaries=not args.no_force_boundaries,
        repair=not args.no_repair,
    )


# ---------------------------------------------------------------------------
# commands


def cmd_train(args) -> int:
    _check_inputs(args.corpus)
    _check_outputs(args.model, args.out)
    lexicons = _lexicons(args)
    docs = read_corpus(args.corpus)
    stats = corpus_stats(docs)
    sentences = list(iter_sentences(docs))
    seg = _estimator(args, lexicons).fit(sentences)
    with open(args.model, "w", encoding="utf-8", newline="\n") as fh:
        save_model(seg.model_, fh)
    report = seg.filter_report_
    training = seg.training_
    with _output(args.out) as out:
        out.write(_header_lines(args))
        out.write(f"tokens\t{stats.n_tokens}\n")
        for label, count in stats.label_counts.items():
            out.write(f"pre-filter {label.code}\t{count}\n")
        out.write(report.format())
        out.write(f"features\t{len(seg.space_)}\n")
        out.write(f"iterations\t{training.iterations}\n")
        out.write(f"objective\t{training.objective:.6f}\n")
        out.write(f"gradient max-norm\t{training.gradient_norm:.6g}\n")
        out.write(f"converged\t{training.converged}\n")
    return EXIT_OK


def _predict(args, docs, model):
    seg = DiscourseSegmenter.from_model(
        model,
        lexicons=_lexicons(args),
        force_boundaries=not args.no_force_boundaries,
        repair=not args.no_repair,
    )
    return seg.predict(list(iter_sentences(docs)))


def cmd_predict(args) -> int:
    _check_inputs(args.corpus, args.model)
    _check_outputs(args.out)
    with open(args.model, encoding="utf-8") as fh:
        model = load_model(fh)
    docs = read_corpus(args.corpus)
    predicted = _predict(args, docs, model)
    with _output(args.out) as out:
        write_corpus(docs, out, labels=predicted)
    if args.out and args.out != "-":
        with open(args.out + ".brackets", "w", encoding="utf-8", newline="\n") as fh:
            for sent, labels in zip(iter_sentences(docs), predicted):
                fh.write(render_brackets([t.form for t in sent], labels) + "\n")
    ok = sum(check_well_formed(p).ok for p in predicted)
    n = len(predicted)
    print(f"well-formed: {ok}/{n} ({ok / n if n else 1.0:.4f})", file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if (args.model is None) == (args.predictions is None):
        raise ValueError("evaluate: give exactly one of --model or --predictions")
    _check_inputs(args.corpus, args.model, args.predictions)
    _check_outputs(args.out)
    gold = read_corpus(args.corpus)
    if args.model is not None:
        with open(args.model, encoding="utf-8") as fh:
            predicted = _predict(args, gold, load_model(fh))
    else:
        pred_docs = read_corpus(args.predictions)
        predicted = []
        for sent in iter_sentences(pred_docs):
            labels = sent.gold_labels
            if labels is None:
                raise UnannotatedCorpusError(f"{args.predictions}: sentence without predicted labels")
            predicted.append(labels)
    report = score(list(iter_sentences(gold)), predicted)
    with _output(args.out) as out:
        if args.format == "tsv":
            out.write(_header_lines(args))
            out.write(format_report_tsv(report))
        else:
            out.write(format_report(report, header=_header(args)))
    return EXIT_OK


def cmd_cv(args) -> int:
    _check_inputs(args.corpus)
    _check_outputs(args.out)
    lexicons = _lexicons(args)
    docs = read_corpus(args.corpus)
    result = cross_validate(docs, _estimator(args, lexicons), k=args.folds, seed=args.seed,
                            doc_folds=args.doc_folds)
    with _output(args.out) as out:
        if args.format == "tsv":
            out.write(_header_lines(args))
            out.write(format_report_tsv(result.report))
        else:
            out.write(format_report(result.report, header=_header(args)))
            out.write("\n")
            out.write(format_report(result.without_repair, title="without repair"))
            for k, rep in enumerate(result.folds):
                out.write(
                    f"fold {k}\tedu_f1={rep.edus.f1:.4f}\twell_formed={rep.well_formed_rate:.4f}\n"
                )
    return EXIT_OK


def cmd_curve(args) -> int:
    _check_inputs(args.corpus)
    _check_outputs(args.out)
    lexicons = _lexicons(args)
    docs = read_corpus(args.corpus)
    points = learning_curve(docs, _estimator(args, lexicons), step_docs=args.step_docs,
                            k=args.folds, seed=args.seed, doc_folds=args.doc_folds)
    with _output(args.out) as out:
        out.write(_header_lines(args))
        out.write(format_curve(points))
    return EXIT_OK


def cmd_generate(args) -> int:
    _check_outputs(args.out, args.markers, args.verbs)
    docs = generate_synthetic(
        seed=args.seed,
        num_docs=args.num_docs,
        sentences_per_doc=args.sentences_per_doc,
        nesting_prob=args.nesting_prob,
        marker_cue_prob=args.marker_cue_prob,
        chunk_error_prob=args.chunk_error_prob,
    )
    with _output(args.out) as out:
        write_corpus(docs, out)
    if args.markers:
        with open(args.markers, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# synthetic discourse markers\n")
            for m in DISCOURSE_MARKERS + RELATIVE_MARKERS + (SPEECH_MARKER,):
                fh.write(m + "\n")
    if args.verbs:
        with open(args.verbs, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# synthetic speech verbs\n")
            for _, lemma in SPEECH_VERBS:
                fh.write(lemma + "\n")
    return EXIT_OK


def cmd_repair(args) -> int:
    _check_inputs(args.corpus)
    _check_outputs(args.out)
    docs = read_corpus(args.corpus)
    repaired = []
    for sent in iter_sentences(docs):
        labels = sent.gold_labels
        if labels is None:
            raise UnannotatedCorpusError(f"sentence {sent.sentence_id} has no boundary labels to repair")
        repaired.append(repair(labels))
    with _output(args.out) as out:
        write_corpus(docs, out, labels=repaired)
    return EXIT_OK


def cmd_stats(args) -> int:
    _check_inputs(args.corpus)
    _check_outputs(args.out)
    docs = read_corpus(args.corpus)
    stats = corpus_stats(docs)
    _, report = filter_training(list(iter_sentences(docs)))
    with _output(args.out) as out:
        out.write(_header_lines(args))
        out.write(stats.format())
        out.write(report.format())
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_training_flags(p):
    p.add_argument("--markers", help="discourse marker lexicon file")
    p.add_argument("--verbs", help="indirect speech verb lexicon file")
    p.add_argument("--l2-sigma2", type=float, default=1.0, help="Gaussian prior variance")
    p.add_argument("--max-iterations", type=int, default=500)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--no-resample", action="store_true", help="train on every token")


def _add_postprocess_flags(p):
    p.add_argument("--no-repair", action="store_true")
    p.add_argument("--no-force-boundaries", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nestseg", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a boundary classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--out", help="training log (default stdout)")
    _add_training_flags(p)
    p.add_argument("--no-force-boundaries", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--no-repair", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label a corpus with a trained model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--markers")
    p.add_argument("--verbs")
    p.add_argument("--out", help="prediction file (default stdout)")
    _add_postprocess_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against a gold corpus")
    p.add_argument("--corpus", required=True, help="gold corpus")
    p.add_argument("--model", help="model to predict with")
    p.add_argument("--predictions", help="prediction file in corpus format")
    p.add_argument("--markers")
    p.add_argument("--verbs")
    p.add_argument("--out")
    p.add_argument("--format", choices=("table", "tsv"), default="table")
    _add_postprocess_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cv", help="k-fold cross-validation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--doc-folds", action="store_true", help="fold over documents instead of sentences")
    p.add_argument("--format", choices=("table", "tsv"), default="table")
    _add_training_flags(p)
    _add_postprocess_flags(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("curve", help="learning curve over growing document sets")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-docs", type=int, default=5)
    p.add_argument("--doc-folds", action="store_true")
    _add_training_flags(p)
    _add_postprocess_flags(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("generate", help="write a synthetic annotated corpus")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--num-docs", type=int, default=47)
    p.add_argument("--sentences-per-doc", type=int, default=13)
    p.add_argument("--nesting-prob", type=float, default=0.085)
    p.add_argument("--marker-cue-prob", type=float, default=1.0)
    p.add_argument("--chunk-error-prob", type=float, default=0.15)
    p.add_argument("--markers", help="also write the marker lexicon here")
    p.add_argument("--verbs", help="also write the speech verb lexicon here")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("repair", help="repair the boundary column of a corpus file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("stats", help="corpus and resampling statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PathError, OSError) as exc:
        print(f"nestseg: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CorpusFormatError, ModelFormatError) as exc:
        print(f"nestseg: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (UnannotatedCorpusError, IllFormedError, SegmentationError, TrainingError, ValueError) as exc:
        print(f"nestseg: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
