import io
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nestseg.corpus import (
    BoundaryLabel,
    ChunkElement,
    ChunkPosition,
    CorpusFormatError,
    Document,
    UnannotatedCorpusError,
    corpus_stats,
    parse_corpus,
    read_word_list,
    write_corpus,
)
from nestseg.segment import parse_labels
from nestseg.synthetic import generate_synthetic

from conftest import PIECES_FORMS, make_sentence

B, E, BE, I = (BoundaryLabel.BEGIN, BoundaryLabel.END, BoundaryLabel.BEGIN_END, BoundaryLabel.INSIDE)

PREFIX = """# doc = pieces
0\tCes\tce\tDET\tD\tNP-B\t1\tdet\tB
1\tpièces\tpièce\tNC\tN\tNP-E\t_\t_\tI
2\t,\t,\tPONCT\tPONCT\t_\t1\tponct\tI
3\tmondialement\tmondialement\tADV\tADV\tAP-B\t4\tmod\tB
4\tconnues\tconnu\tADJ\tA\tAP-E\t1\tmod\tI
5\t,\t,\tPONCT\tPONCT\t_\t4\tponct\tE

"""


def test_parse_pieces_prefix():
    docs = parse_corpus(PREFIX)
    assert len(docs) == 1
    (sent,) = docs[0].sentences
    assert docs[0].doc_id == "pieces"
    assert sent.gold_labels == [B, I, I, B, I, E]
    assert sent.tokens[0].chunk_path == (ChunkElement("NP", ChunkPosition.BEGIN),)
    assert sent.tokens[1].head is None and sent.tokens[1].deprel is None
    assert sent.tokens[4].head == 1


def test_empty_stream():
    assert parse_corpus("") == []
    assert parse_corpus(io.StringIO("\n\n")) == []


def _line_error(text):
    with pytest.raises(CorpusFormatError) as info:
        parse_corpus(text, source="bad.tsv")
    return info.value


def test_self_loop_reports_line():
    text = "# doc = d\n0\ta\ta\tX\tX\t_\t_\t_\tB\n1\tb\tb\tX\tX\t_\t1\tdep\tE\n"
    err = _line_error(text)
    assert err.line == 3
    assert "bad.tsv:3" in str(err)


@pytest.mark.parametrize(
    "line, fragment",
    [
        ("0\ta\ta\tX\tX\t_\t_\t_", "columns"),
        ("0\ta\ta\tX\tX\t_\t_\t_\tQ", "boundary label"),
        ("0\ta\ta\tX\tX\tNP-Z\t_\t_\tBE", "chunk position"),
        ("0\ta\ta\tX\tX\t_\t7\tdep\tBE", "out of range"),
        ("0\ta\ta\tX\tX\tnp-B\t_\t_\tBE", "chunk tag"),
    ],
)
def test_malformed_lines(line, fragment):
    err = _line_error("# doc = d\n" + line + "\n")
    assert err.line == 2
    assert fragment in str(err)


def test_dependency_cycle_rejected():
    text = "0\ta\ta\tX\tX\t_\t1\tdep\tB\n1\tb\tb\tX\tX\t_\t0\tdep\tE\n"
    assert "cycle" in str(_line_error(text))


def test_duplicate_doc_id():
    text = PREFIX + PREFIX
    assert "duplicate" in str(_line_error(text))


def test_document_without_sentences():
    with pytest.raises(CorpusFormatError):
        parse_corpus("# doc = a\n# doc = b\n0\ta\ta\tX\tX\t_\t_\t_\tBE\n")


def test_round_trip_prefix():
    docs = parse_corpus(PREFIX)
    assert write_corpus(docs) == PREFIX
    assert parse_corpus(write_corpus(docs)) == docs


def test_placeholder_boundary_written():
    sent = make_sentence(["a", "b"])
    text = write_corpus([Document("d", (sent,))])
    rows = [line.split("\t") for line in text.splitlines() if line and not line.startswith("#")]
    assert [r[-1] for r in rows] == ["_", "_"]
    (doc,) = parse_corpus(text)
    assert doc.sentences[0].gold_labels is None


def test_pieces_boundary_column(pieces_doc):
    text = write_corpus([pieces_doc])
    column = [line.split("\t")[8] for line in text.splitlines() if line and not line.startswith("#")]
    assert " ".join(column) == "B I I B I E B I I E I I I I I E"
    assert [line.split("\t")[1] for line in text.splitlines()[1:17]] == PIECES_FORMS


def test_round_trip_synthetic():
    docs = generate_synthetic(seed=11, num_docs=3, sentences_per_doc=4)
    text = write_corpus(docs)
    again = parse_corpus(text)
    assert again == docs
    assert write_corpus(again) == text


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip_property(seed):
    docs = generate_synthetic(seed=seed, num_docs=1, sentences_per_doc=2)
    assert parse_corpus(write_corpus(docs)) == docs


def test_column_whitespace_normalized():
    text = PREFIX.replace("\n", "\r\n")
    assert write_corpus(parse_corpus(text)) == PREFIX


def test_stats_pieces(pieces_doc):
    stats = corpus_stats([pieces_doc])
    assert stats.n_segments == 3
    assert stats.n_nested == 2
    assert stats.nested_proportion == pytest.approx(2 / 3)
    assert sum(stats.label_counts.values()) == stats.n_tokens == 16


def test_stats_single_token():
    doc = Document("d", (make_sentence(["oui"], "BE"),))
    stats = corpus_stats([doc])
    assert (stats.n_segments, stats.n_nested) == (1, 0)


def test_stats_requires_gold():
    doc = Document("d", (make_sentence(["a", "b"]),))
    with pytest.raises(UnannotatedCorpusError, match="unannotated corpus"):
        corpus_stats([doc])


def _recount(text):
    """Independent recount straight from the serialized file."""
    labels = Counter()
    segments = nested = 0
    depth = 0
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        code = line.rsplit("\t", 1)[1]
        labels[code] += 1
        if code == "B":
            depth += 1
            segments += 1
            nested += depth >= 2
        elif code == "BE":
            segments += 1
            nested += depth >= 1
        elif code == "E":
            depth -= 1
    return labels, segments, nested


def test_stats_match_independent_recount():
    docs = generate_synthetic(seed=42, num_docs=47)
    stats = corpus_stats(docs)
    labels, segments, nested = _recount(write_corpus(docs))
    assert {lab.code: c for lab, c in stats.label_counts.items()} == dict(labels)
    assert stats.n_segments == segments
    assert stats.n_nested == nested


def test_read_word_list(tmp_path):
    path = tmp_path / "markers.txt"
    path.write_text("# comment\nDonc\n\nparce  que\ndonc\n", encoding="utf-8")
    assert read_word_list(path) == ["donc", "parce que"]


def test_label_codes():
    assert parse_labels("B E BE I") == [B, E, BE, I]
    with pytest.raises(ValueError):
        BoundaryLabel.from_code("X")
