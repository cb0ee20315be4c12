"""Inflection-in-context data construction and the copy baseline."""

from collections import defaultdict
from dataclasses import dataclass, field

from .data import (
    ABSENT,
    MSD,
    AnnotatedSentence,
    FormatError,
    Token,
    _decode,
    _lines,
    normalize_lemma,
)


@dataclass
class MsdMappingTable:
    """UD -> UniMorph conversion rules.

    ``entries`` maps ``"Key=Value"`` to ``(tag, rank)``, where a tag of None
    means the feature is dropped. ``pos_entries`` maps UD POS to a UniMorph
    POS tag.
    """

    entries: dict = field(default_factory=dict)
    pos_entries: dict = field(default_factory=dict)

    @classmethod
    def loads(cls, source):
        table = cls()
        for lineno, line in enumerate(_lines(_decode(source)), 1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if cols[0].startswith("POS:"):
                if len(cols) != 2:
                    raise FormatError("POS rows need 2 columns", lineno)
                table.pos_entries[cols[0][4:]] = cols[1]
                continue
            if len(cols) != 3 or "=" not in cols[0]:
                raise FormatError("feature rows need KEY=VALUE, tag and rank", lineno)
            try:
                rank = int(cols[2])
            except ValueError as exc:
                raise FormatError(f"bad rank {cols[2]!r}", lineno) from exc
            tag = None if cols[1] == "-" else cols[1]
            table.entries[cols[0]] = (tag, rank)
        return table

    @classmethod
    def load(cls, path):
        with open(path, "rb") as f:
            return cls.loads(f)


def convert_msd(ud_pos, ud_feats, table):
    """UD POS + FEATS column -> UniMorph MSD in canonical tag order."""
    if ud_pos not in table.pos_entries:
        raise ValueError(f"UD POS {ud_pos!r} has no UniMorph mapping")
    ranked = []
    if ud_feats and ud_feats != ABSENT:
        for feat in ud_feats.split("|"):
            tag, rank = table.entries.get(feat, (None, 0))
            if tag is not None:
                ranked.append((rank, tag))
    tags = [table.pos_entries[ud_pos]]
    for _, tag in sorted(ranked):
        if tag not in tags:
            tags.append(tag)
    return MSD(tuple(tags))


def read_conllu(source, table, language=""):
    """Convert CoNLL-U text into fully annotated UniMorph sentences.

    Only FORM, LEMMA, UPOS and FEATS are kept. Multiword-token ranges and
    empty nodes are skipped; lemmas are normalized for ``language``.
    """
    sentences = []
    tokens = []
    for lineno, line in enumerate(_lines(_decode(source)), 1):
        if not line.strip():
            if tokens:
                sentences.append(AnnotatedSentence(tokens))
                tokens = []
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise FormatError(f"expected 10 CoNLL-U columns, found {len(cols)}", lineno)
        if "-" in cols[0] or "." in cols[0]:
            continue
        try:
            msd = convert_msd(cols[3], cols[5], table)
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from exc
        tokens.append(Token(cols[1], normalize_lemma(cols[2], language), msd))
    if tokens:
        sentences.append(AnnotatedSentence(tokens))
    return sentences


class Lexicon:
    """Membership index over UniMorph (form, lemma, MSD) triples."""

    def __init__(self, dataset):
        self.tables = defaultdict(set)
        for t in dataset:
            self.tables[(t.lemma, t.msd)].add(t.form)

    def __contains__(self, item):
        form, lemma, msd = item
        return form in self.tables.get((lemma, msd), ())

    def forms(self, lemma, msd):
        return frozenset(self.tables.get((lemma, msd), ()))


def select_candidates(sentences, lexicon):
    """Sentences with at least one token found in the lexicon, and where."""
    out = []
    for sent in sentences:
        positions = [
            i
            for i, tok in enumerate(sent.tokens)
            if tok.lemma is not None
            and tok.msd is not None
            and (tok.surface, tok.lemma, tok.msd) in lexicon
        ]
        if positions:
            out.append((sent, positions))
    return out


def make_target(sentence, index, plausible_forms=None):
    """Blank out token ``index`` as the inflection target."""
    tokens = list(sentence.tokens)
    tok = tokens[index]
    tokens[index] = Token(ABSENT, tok.lemma, None)
    if plausible_forms is not None:
        plausible_forms = frozenset(plausible_forms) | {tok.surface}
    return AnnotatedSentence(tokens, index, plausible_forms, tok.surface)


def copy_baseline(sentence, language=""):
    if sentence.target_index is None:
        raise ValueError("sentence has no target token")
    return normalize_lemma(sentence.target.lemma, language)


def strip_to_track2(sentence):
    """Drop all MSDs and every lemma except the target's."""
    tokens = tuple(
        Token(tok.surface, tok.lemma if i == sentence.target_index else None, None)
        for i, tok in enumerate(sentence.tokens)
    )
    return AnnotatedSentence(
        tokens, sentence.target_index, sentence.plausible_forms, sentence.gold_form
    )
