"""Sparse indicator features for token-level boundary classification.

Feature names follow ``template[offset]=value`` (e.g. ``pos[-1]=DET``) so
that model files stay readable and portable across runs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import ChunkPosition, Document, Sentence, read_word_list

__all__ = [
    "FeatureSpace",
    "Lexicons",
    "extract_features",
    "feature_names",
    "sentence_feature_names",
    "build_feature_space",
    "FeatureExtractor",
    "vectorize",
]

WINDOW = 3
NGRAM_MIN, NGRAM_MAX = 2, 6
DEP_PATH_MAX = 3
PROJECTION_TAGS = ("NP", "VP", "PP")
PAD = "<PAD>"

_STARTS = {ChunkPosition.BEGIN, ChunkPosition.SINGLETON}
_ENDS = {ChunkPosition.END, ChunkPosition.SINGLETON}


class FeatureSpace:
    """Bijection between feature names and dense ids ``0..m-1``.

    While unfrozen, looking up a new name registers it; once frozen,
    unknown names map to ``None`` and the space never grows.
    """

    def __init__(self, names: Iterable[str] = (), frozen: bool = False):
        self._names: list[str] = list(dict.fromkeys(names))
        self._ids: dict[str, int] = {name: i for i, name in enumerate(self._names)}
        self.frozen = frozen

    def add(self, name: str) -> Optional[int]:
        fid = self._ids.get(name)
        if fid is None and not self.frozen:
            fid = len(self._names)
            self._ids[name] = fid
            self._names.append(name)
        return fid

    def get(self, name: str) -> Optional[int]:
        return self._ids.get(name)

    def name(self, fid: int) -> str:
        return self._names[fid]

    @property
    def names(self) -> list[str]:
        return list(self._names)

    def freeze(self) -> "FeatureSpace":
        self.frozen = True
        return self

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name) -> bool:
        return name in self._ids

    def __eq__(self, other) -> bool:
        return isinstance(other, FeatureSpace) and self._names == other._names

    def __repr__(self) -> str:
        return f"FeatureSpace(size={len(self)}, frozen={self.frozen})"


@dataclass(frozen=True)
class Lexicons:
    """Discourse marker sequences and indirect speech verb lemmas (lowercase)."""

    markers: tuple[tuple[str, ...], ...] = ()
    speech_verbs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        markers = []
        seen = set()
        for m in self.markers:
            seq = tuple(m.split()) if isinstance(m, str) else tuple(m)
            seq = tuple(w.lower() for w in seq)
            if not seq:
                raise ValueError("empty discourse marker")
            if seq not in seen:
                seen.add(seq)
                markers.append(seq)
        object.__setattr__(self, "markers", tuple(markers))
        object.__setattr__(self, "speech_verbs", frozenset(v.lower() for v in self.speech_verbs))

    @classmethod
    def from_files(cls, markers_path=None, verbs_path=None) -> "Lexicons":
        markers = read_word_list(markers_path) if markers_path else []
        verbs = read_word_list(verbs_path) if verbs_path else []
        return cls(tuple(markers), frozenset(verbs))

    @property
    def max_marker_length(self) -> int:
        return max((len(m) for m in self.markers), default=0)


# ---------------------------------------------------------------------------
# Per-sentence context shared by all token positions


class _SentenceContext:
    def __init__(self, sentence: Sentence, lexicons: Lexicons):
        tokens = sentence.tokens
        n = len(tokens)
        self.n = n
        self.lemmas = [t.lemma for t in tokens]
        self.pos = [t.pos for t in tokens]
        self.chunk = [t.chunk_path[0].tag if t.chunk_path else "_" for t in tokens]
        self.marker_start, self.marker_in = _match_markers(
            [t.form.lower() for t in tokens], lexicons
        )
        self.inbound: list[set[str]] = [set() for _ in range(n)]
        for t in tokens:
            if t.head is not None:
                self.inbound[t.head].add(t.deprel or "_")
        self.dep_paths = [_dep_path(tokens, i) for i in range(n)]


def _match_markers(forms: list[str], lexicons: Lexicons):
    """Leftmost-longest, non-overlapping marker matching."""
    n = len(forms)
    starts = [False] * n
    inside = [False] * n
    if not lexicons.markers:
        return starts, inside
    markers = set(lexicons.markers)
    longest = lexicons.max_marker_length
    i = 0
    while i < n:
        match = 0
        for k in range(min(longest, n - i), 0, -1):
            if tuple(forms[i:i + k]) in markers:
                match = k
                break
        if match:
            starts[i] = True
            for j in range(i, i + match):
                inside[j] = True
            i += match
        else:
            i += 1
    return starts, inside


def _dep_path(tokens, i: int) -> list[str]:
    path = []
    node: Optional[int] = i
    while node is not None and len(path) < DEP_PATH_MAX:
        tok = tokens[node]
        if tok.head is None:
            path.append("ROOT")
            break
        path.append(tok.deprel or "_")
        node = tok.head
    return path


def _off(k: int) -> str:
    return f"{k:+d}" if k else "0"


def _bucket(numerator: int, n: int) -> int:
    return -(-100 * numerator // n)


def _atomic(ctx: _SentenceContext, sentence: Sentence, j: int, tag: str) -> list[str]:
    """Templates replicated over the +/-3 window: lexical, position, chunk edges."""
    tok = sentence.tokens[j]
    feats = [
        f"lem[{tag}]={tok.lemma}",
        f"pos[{tag}]={tok.pos}",
        f"cat[{tag}]={tok.category}",
    ]
    suffix = "" if tag == "0" else f"[{tag}]"
    feats.append(f"distL{suffix}={_bucket(j + 1, ctx.n)}")
    feats.append(f"distR{suffix}={_bucket(ctx.n - j, ctx.n)}")
    if tok.chunk_path:
        inner = tok.chunk_path[0].position
        if inner in _STARTS:
            feats.append(f"chunkStart{suffix}=1")
        if inner in _ENDS:
            feats.append(f"chunkEnd{suffix}=1")
    return feats


def _names_at(ctx: _SentenceContext, sentence: Sentence, i: int, lexicons: Lexicons) -> list[str]:
    tok = sentence.tokens[i]
    n = ctx.n
    feats = _atomic(ctx, sentence, i, "0")

    if ctx.marker_start[i]:
        feats.append("markerStart=1")
    if ctx.marker_in[i]:
        feats.append("markerIn=1")
    if tok.lemma.lower() in lexicons.speech_verbs:
        feats.append("speechVerb=1")

    path = ctx.dep_paths[i]
    for k in range(1, len(path) + 1):
        feats.append(f"depPath[{k}]=" + ">".join(path[:k]))
    for rel in sorted(ctx.inbound[i]):
        feats.append(f"inDep={rel}")

    counts = Counter()
    for el in tok.chunk_path:
        if el.tag in PROJECTION_TAGS:
            if el.position in _STARTS:
                counts[el.tag, "start"] += 1
            if el.position in _ENDS:
                counts[el.tag, "end"] += 1
            if el.position is ChunkPosition.INSIDE:
                counts[el.tag, "middle"] += 1
    for tag in PROJECTION_TAGS:
        for where in ("start", "middle", "end"):
            feats.append(f"proj[{tag},{where}]={min(counts[tag, where], 2)}")

    for name, seq in (("lem", ctx.lemmas), ("pos", ctx.pos)):
        before = [seq[j] if j >= 0 else PAD for j in range(i - 3, i)]
        after = [seq[j] if j < n else PAD for j in range(i + 1, i + 4)]
        feats.append(f"{name}3[-]=" + "|".join(before))
        feats.append(f"{name}3[+]=" + "|".join(after))

    feats.append("chunkSeq=" + (">".join(el.tag for el in tok.chunk_path) or "_"))

    for size in range(NGRAM_MIN, NGRAM_MAX + 1):
        for start in range(max(0, i - size + 1), min(i, n - size) + 1):
            rel = f"{start - i}:{size}"
            stop = start + size
            feats.append(f"ngLem[{rel}]=" + "|".join(ctx.lemmas[start:stop]))
            feats.append(f"ngPos[{rel}]=" + "|".join(ctx.pos[start:stop]))
            feats.append(f"ngChunk[{rel}]=" + "|".join(ctx.chunk[start:stop]))

    for k in range(-WINDOW, WINDOW + 1):
        if k == 0:
            continue
        j = i + k
        if 0 <= j < n:
            feats.extend(_atomic(ctx, sentence, j, _off(k)))
        else:
            feats.append(f"pad[{_off(k)}]=1")
    return feats


def feature_names(sentence: Sentence, index: int, lexicons: Lexicons) -> list[str]:
    """All feature names emitted for one token (before id mapping)."""
    if not 0 <= index < len(sentence):
        raise IndexError(f"token index {index} out of range for sentence of length {len(sentence)}")
    return _names_at(_SentenceContext(sentence, lexicons), sentence, index, lexicons)


def sentence_feature_names(sentence: Sentence, lexicons: Lexicons) -> tuple[tuple[str, ...], ...]:
    """Feature names for every token of a sentence (memoized)."""
    return _cached_sentence_names(sentence, lexicons)


@lru_cache(maxsize=16384)
def _cached_sentence_names(sentence: Sentence, lexicons: Lexicons):
    ctx = _SentenceContext(sentence, lexicons)
    return tuple(tuple(_names_at(ctx, sentence, i, lexicons)) for i in range(len(sentence)))


def _to_vector(names: Iterable[str], space: FeatureSpace) -> tuple[int, ...]:
    if space.frozen:
        get = space._ids.get
        ids = {fid for fid in map(get, names) if fid is not None}
    else:
        ids = {space.add(name) for name in names}
    return tuple(sorted(ids))


def extract_features(
    sentence: Sentence, index: int, lexicons: Lexicons, space: FeatureSpace
) -> tuple[int, ...]:
    """Sorted tuple of feature ids for token ``index``.

    Unknown names are registered in an unfrozen space and dropped by a
    frozen one.
    """
    return _to_vector(feature_names(sentence, index, lexicons), space)


def build_feature_space(
    corpus: Sequence, lexicons: Lexicons, min_count: int = 1
) -> FeatureSpace:
    """Frozen space of every feature name seen at least ``min_count`` times.

    ``corpus`` may hold documents or sentences.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts: Counter = Counter()
    for sent in _sentences(corpus):
        for names in sentence_feature_names(sent, lexicons):
            counts.update(names)
    # Counter preserves first-insertion order, which keeps ids reproducible
    return FeatureSpace((name for name, c in counts.items() if c >= min_count), frozen=True)


def _sentences(corpus) -> list[Sentence]:
    out = []
    for item in corpus:
        if isinstance(item, Document):
            out.extend(item.sentences)
        else:
            out.append(item)
    return out


class FeatureExtractor(TransformerMixin, BaseEstimator):
    """Turn sentences into a binary CSR matrix, one row per token.

    Parameters
    ----------
    lexicons : Lexicons, optional
    min_count : int, default=1
        Features seen fewer times than this while fitting are discarded.
    """

    def __init__(self, lexicons: Optional[Lexicons] = None, min_count: int = 1):
        self.lexicons = lexicons
        self.min_count = min_count

    def fit(self, X, y=None):
        sentences = _sentences(X)
        if not sentences:
            raise ValueError("cannot fit a feature space on an empty corpus")
        self.space_ = build_feature_space(sentences, self._lexicons(), self.min_count)
        self.n_features_ = len(self.space_)
        return self

    def transform(self, X) -> sp.csr_matrix:
        check_is_fitted(self, "space_")
        return vectorize(_sentences(X), self._lexicons(), self.space_)

    def _lexicons(self) -> Lexicons:
        return self.lexicons if self.lexicons is not None else Lexicons()


def vectorize(sentences: Sequence[Sentence], lexicons: Lexicons, space: FeatureSpace) -> sp.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    for sent in sentences:
        for names in sentence_feature_names(sent, lexicons):
            indices.extend(_to_vector(names, space))
            indptr.append(len(indices))
    data = np.ones(len(indices), dtype=np.float64)
    return sp.csr_matrix(
        (data, np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(indptr) - 1, len(space)),
    )
