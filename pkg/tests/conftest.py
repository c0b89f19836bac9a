import pytest

from nestseg.corpus import BoundaryLabel, ChunkElement, Document, Sentence, Token
from nestseg.segment import parse_labels
from nestseg.synthetic import generate_synthetic, synthetic_lexicons

# "[Ces pièces, [mondialement connues,] [donc difficilement écoulables,]
#  avaient été repérées chez un riche amateur nippon]" has sixteen tokens
# with two multiword tokens so that the span arithmetic matches (0,15),
# (3,5), (6,9).
PIECES_FORMS = [
    "Ces", "pièces", ",", "mondialement", "connues", ",", "donc", "difficilement",
    "écoulables", ",", "avaient_été", "repérées", "chez", "un_riche", "amateur", "nippon",
]
PIECES_LABELS = "B I I B I E B I I E I I I I I E"

# Gloss used for the repair trace; labels index these 19 tokens.
REPAIR_FORMS = [
    "the", "pieces", ",", "worldwide", "famous", ",", "thus", "hard", "to", "resell", ",",
    "had", "been", "located", "at", "a", "rich", "japanese", "lover's",
]
REPAIR_INPUT = "B I E I I E I I I E I I I B I I I I E"
REPAIR_REPAIRED = "B I E B I E B I I E B I E B I I I I E"


def make_sentence(forms, labels=None, chunks=None, heads=None, sentence_id=0, pos=None):
    """Build a sentence with placeholder annotations.

    ``labels`` is a code string or list; ``chunks`` a list of chunk strings
    like ``"NP-B,PP-I"`` or ``None``; ``heads`` defaults to all ROOT.
    """
    n = len(forms)
    if isinstance(labels, str):
        labels = parse_labels(labels)
    labels = labels or [None] * n
    chunks = chunks or [None] * n
    heads = heads or [None] * n
    pos = pos or ["X"] * n
    tokens = []
    for i, form in enumerate(forms):
        path = ()
        if chunks[i]:
            path = tuple(ChunkElement.parse(c) for c in chunks[i].split(","))
        tokens.append(
            Token(
                index=i, form=form, lemma=form.lower(), pos=pos[i], category=pos[i][:1],
                chunk_path=path, head=heads[i], deprel=None if heads[i] is None else "dep",
                gold=labels[i],
            )
        )
    return Sentence(tuple(tokens), sentence_id)


@pytest.fixture
def pieces():
    heads = [1, 11, 1, 4, 1, 4, 8, 8, 1, 8, 11, None, 11, 14, 12, 14]
    return make_sentence(PIECES_FORMS, PIECES_LABELS, heads=heads)


@pytest.fixture
def pieces_doc(pieces):
    return Document("pieces", (pieces,))


@pytest.fixture(scope="session")
def synthetic_small():
    return generate_synthetic(seed=3, num_docs=8, sentences_per_doc=10)


@pytest.fixture(scope="session")
def lexicons():
    return synthetic_lexicons()


L = BoundaryLabel


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
