"""Synthetic annotated corpus with nested segments and controllable cues.

Sentences are built from top-level segments of the shape::

    [marker] subject-NP [nested segments] VP object [PP] ,

Non-initial top-level segments open with a discourse marker (probability
``marker_cue_prob``); nested segments sit after the subject and open with
a relative pronoun. Chunk and dependency columns are generated alongside,
including occasional chunker errors that swallow a segment boundary
inside a chunk (``chunk_error_prob``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .corpus import BoundaryLabel, ChunkElement, ChunkPosition, Document, Sentence, Token
from .features import Lexicons

__all__ = ["generate_synthetic", "synthetic_lexicons", "DISCOURSE_MARKERS", "RELATIVE_MARKERS", "SPEECH_VERBS"]

B, E, BE, I = (BoundaryLabel.BEGIN, BoundaryLabel.END, BoundaryLabel.BEGIN_END, BoundaryLabel.INSIDE)
CB, CI, CE, CS = (ChunkPosition.BEGIN, ChunkPosition.INSIDE, ChunkPosition.END, ChunkPosition.SINGLETON)

DISCOURSE_MARKERS = (
    "donc", "mais", "puis", "ensuite", "car", "alors", "cependant", "pourtant",
    "parce que", "bien que", "alors que", "tandis que", "en effet", "par contre",
)
RELATIVE_MARKERS = ("qui", "dont", "lequel", "où")
SPEECH_MARKER = "que"

DETERMINERS = ("le", "la", "les", "un", "une", "des", "ce", "cette")
NOUNS = (
    "pièce", "amateur", "ville", "collection", "musée", "marché", "prix", "artiste",
    "oeuvre", "galerie", "vente", "acheteur", "région", "année", "projet", "équipe",
    "rapport", "conseil", "maire", "école", "journal", "public", "tableau", "expert",
)
ADJECTIVES = (
    "riche", "célèbre", "ancien", "grand", "nouveau", "japonais", "rare", "important",
    "local", "connu", "difficile", "récent",
)
VERBS = (
    ("vend", "vendre"), ("achète", "acheter"), ("expose", "exposer"), ("organise", "organiser"),
    ("présente", "présenter"), ("découvre", "découvrir"), ("ouvre", "ouvrir"),
    ("prépare", "préparer"), ("repère", "repérer"), ("restaure", "restaurer"),
    ("finance", "financer"), ("visite", "visiter"),
)
SPEECH_VERBS = (
    ("dit", "dire"), ("affirme", "affirmer"), ("déclare", "déclarer"),
    ("annonce", "annoncer"), ("explique", "expliquer"),
)
AUXILIARIES = (("a", "avoir"), ("est", "être"), ("ont", "avoir"), ("sont", "être"))
ADVERBS = ("difficilement", "rapidement", "hier", "souvent", "aussi", "encore", "déjà", "mondialement")
PREPOSITIONS = ("à", "de", "chez", "dans", "pour", "sur", "avec", "par")
SINGLETONS = ("bref", "certes", "enfin")


def synthetic_lexicons() -> Lexicons:
    """Marker and speech-verb lexicons matching the generator's vocabulary."""
    markers = DISCOURSE_MARKERS + RELATIVE_MARKERS + (SPEECH_MARKER,)
    return Lexicons(markers, frozenset(lemma for _, lemma in SPEECH_VERBS))


@dataclass
class _Tok:
    form: str
    lemma: str
    pos: str
    cat: str
    chunks: list = field(default_factory=list)
    head: Optional[int] = None
    deprel: Optional[str] = None
    label: BoundaryLabel = I


class _SentenceBuilder:
    def __init__(self, rng: random.Random, cfg: "_Config"):
        self.rng = rng
        self.cfg = cfg
        self.toks: list[_Tok] = []

    def add(self, form, lemma, pos, cat, head=None, deprel=None) -> int:
        self.toks.append(_Tok(form, lemma, pos, cat, head=head, deprel=deprel))
        return len(self.toks) - 1

    def chunk(self, tag: str, start: int, stop: int) -> None:
        """Record a chunk over tokens ``start..stop-1`` (outer chunks added last)."""
        if stop - start == 1:
            self.toks[start].chunks.append(ChunkElement(tag, CS))
            return
        for i in range(start, stop):
            pos = CB if i == start else CE if i == stop - 1 else CI
            self.toks[i].chunks.append(ChunkElement(tag, pos))

    # -- phrases; each returns the index of its head token

    def noun_phrase(self) -> int:
        rng = self.rng
        start = len(self.toks)
        det = self.add(rng.choice(DETERMINERS), None, "DET", "D")
        self.toks[det].lemma = self.toks[det].form
        pre_adj = rng.random() < 0.45
        if pre_adj:
            adj = rng.choice(ADJECTIVES)
            a1 = self.add(adj, adj, "ADJ", "A")
        noun = rng.choice(NOUNS)
        n = self.add(noun, noun, "NC", "N")
        self.toks[det].head, self.toks[det].deprel = n, "det"
        if pre_adj:
            self.toks[a1].head, self.toks[a1].deprel = n, "mod"
        if rng.random() < 0.4:
            adj = rng.choice(ADJECTIVES)
            self.add(adj, adj, "ADJ", "A", head=n, deprel="mod")
        self.chunk("NP", start, len(self.toks))
        return n

    def prep_phrase(self) -> int:
        start = len(self.toks)
        prep = self.rng.choice(PREPOSITIONS)
        p = self.add(prep, prep, "P", "P")
        n = self.noun_phrase()
        self.toks[n].head, self.toks[n].deprel = p, "obj"
        self.chunk("PP", start, len(self.toks))
        return p

    def verb_phrase(self, speech: bool = False) -> int:
        rng = self.rng
        start = len(self.toks)
        aux = None
        if rng.random() < 0.4:
            form, lemma = rng.choice(AUXILIARIES)
            aux = self.add(form, lemma, "V", "V")
        form, lemma = rng.choice(SPEECH_VERBS if speech else VERBS)
        v = self.add(form, lemma, "V" if aux is None else "VPP", "V")
        if aux is not None:
            self.toks[aux].head, self.toks[aux].deprel = v, "aux"
        self.chunk("VP", start, len(self.toks))
        return v

    def marker(self, text: str, head_deprel="mark") -> list[int]:
        out = []
        for w in text.split():
            out.append(self.add(w, w, "CS" if len(out) == 0 else "ADV", "C", deprel=head_deprel))
        for j in out[1:]:
            self.toks[j].head, self.toks[j].deprel = out[0], "dep"
        return out

    def punct(self, form: str) -> int:
        return self.add(form, form, "PONCT", "PONCT", deprel="ponct")

    # -- segments

    def nested(self, outer_head: int, singleton: bool = False) -> None:
        rng = self.rng
        first = len(self.toks)
        if singleton:
            w = rng.choice(SINGLETONS)
            self.add(w, w, "ADV", "ADV", head=outer_head, deprel="mod")
            self.toks[first].label = BE
            return
        openers = []
        if rng.random() < self.cfg.marker_cue_prob:
            openers = self.marker(rng.choice(RELATIVE_MARKERS))
        if openers or rng.random() < 0.5:
            v = self.verb_phrase()
            obj = self.noun_phrase()
            self.toks[obj].head, self.toks[obj].deprel = v, "obj"
        else:
            # apposition: "mondialement connues ,"
            start = len(self.toks)
            adv = rng.choice(ADVERBS)
            a = self.add(adv, adv, "ADV", "ADV")
            adj = rng.choice(ADJECTIVES)
            v = self.add(adj, adj, "ADJ", "A")
            self.toks[a].head, self.toks[a].deprel = v, "mod"
            self.chunk("AP", start, len(self.toks))
        for j in openers:
            if self.toks[j].head is None:
                self.toks[j].head = v
        self.toks[v].head, self.toks[v].deprel = outer_head, "mod_rel"
        c = self.punct(",")
        self.toks[c].head = v
        self.toks[first].label = B
        self.toks[c].label = E

    def top_segment(self, k: int, last: bool, prev_verb: Optional[int], after_speech: bool):
        rng = self.rng
        cfg = self.cfg
        first = len(self.toks)
        openers = []
        if after_speech:
            openers = self.marker(SPEECH_MARKER)
        elif k > 0 and rng.random() < cfg.marker_cue_prob:
            openers = self.marker(rng.choice(DISCOURSE_MARKERS))
        subj = self.noun_phrase()
        if rng.random() < cfg.nesting_prob:
            if rng.random() < 0.5:
                self.punct(",")
                self.toks[-1].head = subj
            self.nested(subj)
            while rng.random() < cfg.extra_nested_prob:
                self.nested(subj)
        elif cfg.nesting_prob > 0 and rng.random() < cfg.singleton_prob:
            # a singleton sits inside the segment, so it is nested too
            self.nested(subj, singleton=True)
        speech = not last and rng.random() < cfg.speech_prob
        v = self.verb_phrase(speech=speech)
        self.toks[subj].head, self.toks[subj].deprel = v, "suj"
        for j in openers:
            if self.toks[j].head is None:
                self.toks[j].head = v
        if not speech:
            obj = self.noun_phrase() if rng.random() < 0.6 else self.prep_phrase()
            self.toks[obj].head, self.toks[obj].deprel = v, "obj"
            if rng.random() < 0.5:
                p = self.prep_phrase()
                self.toks[p].head, self.toks[p].deprel = v, "mod"
            if rng.random() < 0.2:
                adv = rng.choice(ADVERBS)
                a = self.add(adv, adv, "ADV", "ADV", head=v, deprel="mod")
                self.chunk("ADVP", a, a + 1)
        if prev_verb is None:
            self.toks[v].head, self.toks[v].deprel = None, None
        else:
            self.toks[v].head = prev_verb
            self.toks[v].deprel = "obj" if after_speech else "coord"
        c = self.punct("." if last else ",")
        self.toks[c].head = v
        self.toks[first].label = B
        self.toks[c].label = E
        return v, speech, c

    def chunk_error(self, end_tok: int) -> None:
        """Merge the boundary between two top-level segments into one chunk."""
        toks = self.toks
        nxt = end_tok + 1
        if nxt + 1 >= len(toks):
            return
        if self.rng.random() < 0.5:
            # segment end swallowed: [prev , next]
            span = (end_tok - 1, end_tok, nxt)
        else:
            # segment start swallowed: [, next next+1]
            span = (end_tok, nxt, nxt + 1)
        for j in span:
            toks[j].chunks = [el for el in toks[j].chunks if el.tag != "XP"]
        a, m, b = span
        toks[a].chunks = toks[a].chunks + [ChunkElement("XP", CB)]
        toks[m].chunks = [ChunkElement("XP", CI)]
        toks[b].chunks = toks[b].chunks + [ChunkElement("XP", CE)]

    def sentence(self) -> list[_Tok]:
        rng = self.rng
        n_top = 1
        while n_top < self.cfg.max_top_segments and rng.random() < self.cfg.continue_prob:
            n_top += 1
        prev_verb = None
        after_speech = False
        ends = []
        for k in range(n_top):
            last = k == n_top - 1
            v, speech, end_tok = self.top_segment(k, last, prev_verb, after_speech)
            prev_verb, after_speech = v, speech
            if not last:
                ends.append(end_tok)
        for end_tok in ends:
            if rng.random() < self.cfg.chunk_error_prob:
                self.chunk_error(end_tok)
        return self.toks


@dataclass
class _Config:
    nesting_prob: float
    marker_cue_prob: float
    chunk_error_prob: float
    continue_prob: float
    extra_nested_prob: float = 0.25
    singleton_prob: float = 0.01
    speech_prob: float = 0.1
    max_top_segments: int = 6


def generate_synthetic(
    seed: int = 42,
    num_docs: int = 47,
    sentences_per_doc: int = 13,
    nesting_prob: float = 0.085,
    marker_cue_prob: float = 1.0,
    chunk_error_prob: float = 0.15,
    continue_prob: float = 0.6,
) -> list[Document]:
    """Generate gold-annotated documents.

    Defaults give about 33 segments per document, roughly 10% of them
    nested. ``marker_cue_prob=1`` makes every segment opening after the
    first one carry a lexical cue.
    """
    for name, p in (("nesting_prob", nesting_prob), ("marker_cue_prob", marker_cue_prob),
                    ("chunk_error_prob", chunk_error_prob), ("continue_prob", continue_prob)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {p}")
    if continue_prob >= 1.0:
        raise ValueError("continue_prob must be < 1")
    if num_docs < 1 or sentences_per_doc < 1:
        raise ValueError("num_docs and sentences_per_doc must be >= 1")
    rng = random.Random(seed)
    cfg = _Config(nesting_prob, marker_cue_prob, chunk_error_prob, continue_prob)
    docs = []
    for d in range(num_docs):
        sentences = []
        for s in range(sentences_per_doc):
            toks = _SentenceBuilder(rng, cfg).sentence()
            tokens = tuple(
                Token(
                    index=i, form=t.form, lemma=t.lemma, pos=t.pos, category=t.cat,
                    chunk_path=tuple(t.chunks), head=t.head, deprel=t.deprel, gold=t.label,
                )
                for i, t in enumerate(toks)
            )
            sentences.append(Sentence(tokens, s))
        docs.append(Document(f"synth{d:03d}", tuple(sentences)))
    return docs
