"""Annotated corpus data model and the tab-separated corpus format.

A corpus file holds one token per line with nine tab-separated columns::

    INDEX  FORM  LEMMA  POS  CAT  CHUNKS  HEAD  DEPREL  BOUNDARY

``# doc = <id>`` starts a new document, a blank line ends a sentence and
``_`` is the placeholder for "no chunks", ROOT heads/relations and
unannotated boundaries.
"""

from __future__ import annotations

import enum
import io
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO, Union

__all__ = [
    "BoundaryLabel",
    "LABEL_ORDER",
    "ChunkPosition",
    "ChunkElement",
    "Token",
    "Sentence",
    "Document",
    "CorpusFormatError",
    "UnannotatedCorpusError",
    "CorpusStats",
    "parse_corpus",
    "read_corpus",
    "write_corpus",
    "corpus_stats",
    "read_word_list",
    "iter_sentences",
]

PLACEHOLDER = "_"
N_COLUMNS = 9
_DOC_HEADER = re.compile(r"^#\s*doc\s*=\s*(\S.*?)\s*$")
_CHUNK_TAG = re.compile(r"^[A-Z][A-Z0-9_]*$")


class BoundaryLabel(enum.Enum):
    """Per-token segment boundary outcome."""

    BEGIN = "B"
    END = "E"
    BEGIN_END = "BE"
    INSIDE = "I"

    @property
    def code(self) -> str:
        return self.value

    @classmethod
    def from_code(cls, code: str) -> "BoundaryLabel":
        try:
            return cls(code)
        except ValueError:
            raise ValueError(f"unknown boundary label {code!r}") from None

    def __str__(self) -> str:
        return self.value


#: Fixed label order; indexes the weight matrix columns and breaks ties.
LABEL_ORDER = (
    BoundaryLabel.BEGIN,
    BoundaryLabel.END,
    BoundaryLabel.BEGIN_END,
    BoundaryLabel.INSIDE,
)
LABEL_INDEX = {label: i for i, label in enumerate(LABEL_ORDER)}


class ChunkPosition(enum.Enum):
    BEGIN = "B"
    INSIDE = "I"
    END = "E"
    SINGLETON = "S"


@dataclass(frozen=True)
class ChunkElement:
    tag: str
    position: ChunkPosition

    def __post_init__(self):
        if not _CHUNK_TAG.match(self.tag):
            raise ValueError(f"invalid chunk tag {self.tag!r}")

    def __str__(self) -> str:
        return f"{self.tag}-{self.position.value}"

    @classmethod
    def parse(cls, text: str) -> "ChunkElement":
        tag, sep, code = text.rpartition("-")
        if not sep:
            raise ValueError(f"malformed chunk element {text!r}")
        try:
            position = ChunkPosition(code)
        except ValueError:
            raise ValueError(f"unknown chunk position code {code!r} in {text!r}") from None
        return cls(tag, position)


@dataclass(frozen=True)
class Token:
    """One analyzed word. ``head`` and ``deprel`` are ``None`` for ROOT."""

    index: int
    form: str
    lemma: str
    pos: str
    category: str
    chunk_path: tuple[ChunkElement, ...] = ()
    head: Optional[int] = None
    deprel: Optional[str] = None
    gold: Optional[BoundaryLabel] = None

    def __post_init__(self):
        if not self.form or not self.lemma:
            raise ValueError(f"token {self.index}: form and lemma must be non-empty")
        if self.head is not None and self.head == self.index:
            raise ValueError(f"token {self.index}: head points to itself")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    sentence_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        _check_sentence(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    @property
    def gold_labels(self) -> Optional[list[BoundaryLabel]]:
        """Gold labels, or ``None`` when any token is unannotated."""
        labels = [t.gold for t in self.tokens]
        if any(label is None for label in labels):
            return None
        return labels

    def with_labels(self, labels: Iterable[Optional[BoundaryLabel]]) -> "Sentence":
        labels = list(labels)
        if len(labels) != len(self.tokens):
            raise ValueError(
                f"label count {len(labels)} does not match sentence length {len(self.tokens)}"
            )
        tokens = tuple(_replace_gold(t, lab) for t, lab in zip(self.tokens, labels))
        return Sentence(tokens, self.sentence_id)


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if not self.sentences:
            raise ValueError(f"document {self.doc_id!r} has no sentences")


def _replace_gold(token: Token, label: Optional[BoundaryLabel]) -> Token:
    return Token(
        token.index, token.form, token.lemma, token.pos, token.category,
        token.chunk_path, token.head, token.deprel, label,
    )


def _check_sentence(tokens: tuple[Token, ...]) -> None:
    if not tokens:
        raise ValueError("empty sentence")
    n = len(tokens)
    for i, tok in enumerate(tokens):
        if tok.index != i:
            raise ValueError(f"token indices must be 0..{n - 1}, found {tok.index} at position {i}")
        if tok.head is not None and not 0 <= tok.head < n:
            raise ValueError(f"token {i}: head index {tok.head} out of range")
    cycle = _find_cycle(tokens)
    if cycle is not None:
        raise ValueError(f"token {cycle}: dependency cycle (no path to ROOT)")


def _find_cycle(tokens) -> Optional[int]:
    # 0 unvisited, 1 on current path, 2 reaches ROOT
    state = [0] * len(tokens)
    for start in range(len(tokens)):
        path = []
        i = start
        while i is not None and state[i] == 0:
            state[i] = 1
            path.append(i)
            i = tokens[i].head
        if i is not None and state[i] == 1:
            return i
        for j in path:
            state[j] = 2
    return None


def iter_sentences(docs: Iterable[Document]):
    for doc in docs:
        yield from doc.sentences


# --------------------------------------------------------------------------
# Reading and writing


class CorpusFormatError(ValueError):
    def __init__(self, message: str, source: str = "<stream>", line: Optional[int] = None):
        self.source = source
        self.line = line
        location = source if line is None else f"{source}:{line}"
        super().__init__(f"{location}: {message}")


class UnannotatedCorpusError(ValueError):
    pass


def _parse_chunks(text: str) -> tuple[ChunkElement, ...]:
    if text == PLACEHOLDER:
        return ()
    return tuple(ChunkElement.parse(part) for part in text.split(","))


def _parse_token(cols: list[str]) -> Token:
    index_text, form, lemma, pos, cat, chunks, head, deprel, boundary = cols
    try:
        index = int(index_text)
    except ValueError:
        raise ValueError(f"token index {index_text!r} is not an integer") from None
    if head == PLACEHOLDER:
        head_index = None
    else:
        try:
            head_index = int(head)
        except ValueError:
            raise ValueError(f"head {head!r} is not an integer") from None
        if head_index < 0:
            raise ValueError(f"head index {head_index} out of range")
    gold = None if boundary == PLACEHOLDER else BoundaryLabel.from_code(boundary)
    return Token(
        index=index,
        form=form,
        lemma=lemma,
        pos=pos,
        category=cat,
        chunk_path=_parse_chunks(chunks),
        head=head_index,
        deprel=None if deprel == PLACEHOLDER else deprel,
        gold=gold,
    )


def parse_corpus(stream: Union[TextIO, str], source: Optional[str] = None) -> list[Document]:
    """Parse a corpus stream (or string) into documents.

    Raises :class:`CorpusFormatError` with the offending line number on the
    first malformed line.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    if source is None:
        source = getattr(stream, "name", "<stream>")

    docs: list[Document] = []
    seen_ids: set[str] = set()
    doc_id: Optional[str] = None
    doc_line = 0
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    token_lines: list[int] = []

    def close_sentence():
        if not tokens:
            return
        try:
            sentences.append(Sentence(tuple(tokens), len(sentences)))
        except ValueError as exc:
            line = _blame_line(str(exc), token_lines)
            raise CorpusFormatError(str(exc), source, line) from None
        tokens.clear()
        token_lines.clear()

    def close_document():
        close_sentence()
        if doc_id is None:
            return
        if not sentences:
            raise CorpusFormatError(f"document {doc_id!r} has no sentences", source, doc_line)
        docs.append(Document(doc_id, tuple(sentences)))
        sentences.clear()

    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            close_sentence()
            continue
        if line.startswith("#"):
            m = _DOC_HEADER.match(line)
            if m:
                close_document()
                doc_id = m.group(1)
                doc_line = lineno
                if doc_id in seen_ids:
                    raise CorpusFormatError(f"duplicate document id {doc_id!r}", source, lineno)
                seen_ids.add(doc_id)
            continue
        cols = line.split("\t")
        if len(cols) != N_COLUMNS:
            raise CorpusFormatError(
                f"expected {N_COLUMNS} tab-separated columns, found {len(cols)}", source, lineno
            )
        if doc_id is None:
            doc_id = f"doc{len(docs)}"
            doc_line = lineno
            seen_ids.add(doc_id)
        try:
            tok = _parse_token(cols)
        except ValueError as exc:
            raise CorpusFormatError(str(exc), source, lineno) from None
        tokens.append(tok)
        token_lines.append(lineno)
    close_document()
    return docs


def _blame_line(message: str, token_lines: list[int]) -> Optional[int]:
    m = re.match(r"token (\d+):", message)
    if m and int(m.group(1)) < len(token_lines):
        return token_lines[int(m.group(1))]
    m = re.search(r"at position (\d+)", message)
    if m and int(m.group(1)) < len(token_lines):
        return token_lines[int(m.group(1))]
    return token_lines[0] if token_lines else None


def read_corpus(path) -> list[Document]:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, source=str(path))


def _format_token(tok: Token, label: Optional[BoundaryLabel]) -> str:
    chunks = ",".join(str(c) for c in tok.chunk_path) or PLACEHOLDER
    cols = [
        str(tok.index),
        tok.form,
        tok.lemma,
        tok.pos,
        tok.category,
        chunks,
        PLACEHOLDER if tok.head is None else str(tok.head),
        tok.deprel if tok.deprel is not None else PLACEHOLDER,
        label.code if label is not None else PLACEHOLDER,
    ]
    return "\t".join(cols)


def write_corpus(docs: Iterable[Document], stream: Optional[TextIO] = None, labels=None) -> str:
    """Serialize documents; returns the text and also writes it to ``stream``.

    ``labels``, when given, is a per-sentence list of label sequences that
    replaces the BOUNDARY column (used for prediction files).
    """
    out = io.StringIO()
    label_iter = iter(labels) if labels is not None else None
    for doc in docs:
        out.write(f"# doc = {doc.doc_id}\n")
        for sent in doc.sentences:
            sent_labels = next(label_iter) if label_iter is not None else [t.gold for t in sent]
            if len(sent_labels) != len(sent):
                raise ValueError("label sequence length does not match sentence length")
            for tok, lab in zip(sent.tokens, sent_labels):
                out.write(_format_token(tok, lab))
                out.write("\n")
            out.write("\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def read_word_list(path_or_lines) -> list[str]:
    """Read a lexicon file: one entry per line, ``#`` comments ignored.

    Entries are lowercased and whitespace-normalized; duplicates keep the
    first occurrence.
    """
    if isinstance(path_or_lines, (list, tuple)):
        lines = path_or_lines
    else:
        with open(path_or_lines, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    entries = []
    seen = set()
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        entry = " ".join(line.lower().split())
        if entry not in seen:
            seen.add(entry)
            entries.append(entry)
    return entries


# --------------------------------------------------------------------------
# Statistics


@dataclass
class CorpusStats:
    n_documents: int
    n_sentences: int
    n_tokens: int
    label_counts: dict
    n_segments: int
    n_nested: int

    @property
    def nested_proportion(self) -> float:
        return self.n_nested / self.n_segments if self.n_segments else 0.0

    @property
    def segments_per_document(self) -> float:
        return self.n_segments / self.n_documents if self.n_documents else 0.0

    def format(self) -> str:
        lines = [
            f"documents\t{self.n_documents}",
            f"sentences\t{self.n_sentences}",
            f"tokens\t{self.n_tokens}",
        ]
        for label in LABEL_ORDER:
            lines.append(f"label {label.code}\t{self.label_counts.get(label, 0)}")
        lines += [
            f"segments\t{self.n_segments}",
            f"segments/doc\t{self.segments_per_document:.2f}",
            f"nested segments\t{self.n_nested}",
            f"nested proportion\t{self.nested_proportion:.4f}",
        ]
        return "\n".join(lines) + "\n"


def corpus_stats(docs: Iterable[Document]) -> CorpusStats:
    from .segment import segment_depths

    docs = list(docs)
    counts: Counter = Counter({label: 0 for label in LABEL_ORDER})
    n_sent = n_tok = n_seg = n_nested = 0
    for doc in docs:
        for sent in doc.sentences:
            labels = sent.gold_labels
            if labels is None:
                raise UnannotatedCorpusError(
                    f"unannotated corpus: document {doc.doc_id!r}, sentence {sent.sentence_id} "
                    "has no gold boundary labels"
                )
            n_sent += 1
            n_tok += len(labels)
            counts.update(labels)
            depths = segment_depths(labels)
            n_seg += len(depths)
            n_nested += sum(1 for d in depths.values() if d >= 2)
    return CorpusStats(len(docs), n_sent, n_tok, dict(counts), n_seg, n_nested)
