import subprocess
import sys

import pytest

from nestseg.cli import EXIT_CONTRACT, EXIT_FORMAT, EXIT_IO, main
from nestseg.corpus import Document, corpus_stats, read_corpus, write_corpus
from nestseg.maxent import load_model
from nestseg.resample import filter_training
from nestseg.segment import check_well_formed

from conftest import make_sentence


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main([
        "generate", "--seed", "5", "--num-docs", "6", "--sentences-per-doc", "8",
        "--out", str(d / "corpus.tsv"), "--markers", str(d / "markers.txt"),
        "--verbs", str(d / "verbs.txt"),
    ]) == 0
    return d


def lex(d):
    return ["--markers", str(d / "markers.txt"), "--verbs", str(d / "verbs.txt")]


def parse_log(path):
    out = {}
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            continue
        key, value = line.split("\t")
        out[key] = value
    return out


def test_generate_matches_library(workdir):
    from nestseg.synthetic import generate_synthetic

    text = (workdir / "corpus.tsv").read_text(encoding="utf-8")
    assert text == write_corpus(generate_synthetic(seed=5, num_docs=6, sentences_per_doc=8))


def test_train_log_matches_recount(workdir):
    model, log = workdir / "m.model", workdir / "train.log"
    assert main(["train", "--corpus", str(workdir / "corpus.tsv"), "--model", str(model),
                 "--out", str(log)] + lex(workdir)) == 0
    entries = parse_log(log)
    docs = read_corpus(workdir / "corpus.tsv")
    stats = corpus_stats(docs)
    _, report = filter_training([s for d in docs for s in d.sentences])
    assert int(entries["tokens"]) == stats.n_tokens
    for label, count in stats.label_counts.items():
        assert int(entries[f"pre-filter {label.code}"]) == count
        assert int(entries[f"kept {label.code}"]) == report.per_label_kept[label]
    assert int(entries["dropped chunk-internal"]) == report.dropped_chunk_internal
    assert int(entries["features"]) == len(load_model(model.read_text()).space)
    assert "# l2_sigma2 = 1.0" in log.read_text()


def test_train_no_resample(workdir):
    log = workdir / "nr.log"
    assert main(["train", "--corpus", str(workdir / "corpus.tsv"), "--model", str(workdir / "nr.model"),
                 "--out", str(log), "--no-resample", "--max-iterations", "3"] + lex(workdir)) == 0
    entries = parse_log(log)
    assert entries["kept"] == entries["tokens"]


def test_train_zero_iterations(workdir):
    model = workdir / "zero.model"
    assert main(["train", "--corpus", str(workdir / "corpus.tsv"), "--model", str(model),
                 "--out", str(workdir / "zero.log"), "--max-iterations", "0"] + lex(workdir)) == 0
    assert not load_model(model.read_text()).weights.any()


def test_predict_and_evaluate(workdir, capsys):
    model = workdir / "p.model"
    corpus = str(workdir / "corpus.tsv")
    main(["train", "--corpus", corpus, "--model", str(model), "--out", str(workdir / "p.log")] + lex(workdir))
    pred = workdir / "pred.tsv"
    raw = workdir / "raw.tsv"
    assert main(["predict", "--corpus", corpus, "--model", str(model), "--out", str(pred)] + lex(workdir)) == 0
    summary = capsys.readouterr().err
    assert main(["predict", "--corpus", corpus, "--model", str(model), "--out", str(raw),
                 "--no-repair"] + lex(workdir)) == 0
    raw_summary = capsys.readouterr().err

    def tally(path):
        labels = [s.gold_labels for d in read_corpus(path) for s in d.sentences]
        return sum(check_well_formed(x).ok for x in labels), len(labels)

    ok, n = tally(raw)
    assert f"well-formed: {ok}/{n}" in raw_summary
    assert f"well-formed: {n}/{n}" in summary
    assert tally(pred)[0] >= ok
    assert (workdir / "pred.tsv.brackets").read_text().count("\n") == n

    out_a, out_b = workdir / "eval_a.txt", workdir / "eval_b.txt"
    assert main(["evaluate", "--corpus", corpus, "--model", str(model), "--out", str(out_a)] + lex(workdir)) == 0
    assert main(["evaluate", "--corpus", corpus, "--predictions", str(pred), "--out", str(out_b)]) == 0
    rows_a = [line for line in out_a.read_text().splitlines() if not line.startswith("#")]
    rows_b = [line for line in out_b.read_text().splitlines() if not line.startswith("#")]
    assert rows_a == rows_b
    assert rows_a[0].split() == ["Class", "Recall", "Precision", "F-measure"]


def test_repair_identity(workdir):
    out = workdir / "repaired.tsv"
    assert main(["repair", "--corpus", str(workdir / "corpus.tsv"), "--out", str(out)]) == 0
    assert out.read_text() == (workdir / "corpus.tsv").read_text()


def test_repair_fixes_labels(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text(write_corpus([Document("d", (make_sentence(list("abc"), "I I I"),))]))
    out = tmp_path / "fixed.tsv"
    assert main(["repair", "--corpus", str(path), "--out", str(out)]) == 0
    (doc,) = read_corpus(out)
    assert [lab.code for lab in doc.sentences[0].gold_labels] == ["B", "I", "E"]


def test_cv_deterministic(workdir):
    args = ["cv", "--corpus", str(workdir / "corpus.tsv"), "--folds", "3", "--seed", "7"] + lex(workdir)
    a, b = workdir / "cv_a.txt", workdir / "cv_b.txt"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert "# seed = 7" in text and "# folds = 3" in text
    assert "without repair" in text
    assert text.count("\nfold ") == 3


def test_curve_rows(workdir):
    out = workdir / "curve.txt"
    assert main(["curve", "--corpus", str(workdir / "corpus.tsv"), "--step-docs", "4", "--folds", "2",
                 "--max-iterations", "20", "--out", str(out)] + lex(workdir)) == 0
    rows = [line for line in out.read_text().splitlines() if not line.startswith("#")]
    assert rows[0] == "size\tleft_f\tright_f\tedu_f"
    assert [r.split("\t")[0] for r in rows[1:]] == ["4", "6"]


def test_stats(workdir):
    out = workdir / "stats.txt"
    assert main(["stats", "--corpus", str(workdir / "corpus.tsv"), "--out", str(out)]) == 0
    entries = parse_log(out)
    stats = corpus_stats(read_corpus(workdir / "corpus.tsv"))
    assert int(entries["segments"]) == stats.n_segments


def test_exit_codes(tmp_path, workdir, capsys):
    assert main(["stats", "--corpus", str(tmp_path / "missing.tsv")]) == EXIT_IO
    assert main(["stats", "--corpus", str(workdir / "corpus.tsv"), "--out",
                 str(tmp_path / "no" / "dir.txt")]) == EXIT_IO
    bad = tmp_path / "bad.tsv"
    bad.write_text("0\ta\ta\tX\tX\t_\t0\tdep\tBE\n")
    assert main(["stats", "--corpus", str(bad)]) == EXIT_FORMAT
    assert "bad.tsv:1" in capsys.readouterr().err
    bad_model = tmp_path / "bad.model"
    bad_model.write_text("edu-seg-model v9\nlabels B E BE I\nfeatures 0\n")
    assert main(["predict", "--corpus", str(workdir / "corpus.tsv"), "--model", str(bad_model)]) == EXIT_FORMAT
    plain = tmp_path / "plain.tsv"
    plain.write_text(write_corpus([Document("d", (make_sentence(["a", "b"]),))]))
    assert main(["stats", "--corpus", str(plain)]) == EXIT_CONTRACT
    assert "unannotated corpus" in capsys.readouterr().err
    assert main(["evaluate", "--corpus", str(plain)]) == EXIT_CONTRACT
    with pytest.raises(SystemExit) as info:
        main(["cv"])
    assert info.value.code == 2


def test_console_script(workdir):
    proc = subprocess.run(
        [sys.executable, "-m", "nestseg.cli", "stats", "--corpus", str(workdir / "corpus.tsv")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "segments\t" in proc.stdout
