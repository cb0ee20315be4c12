"""Domain types and readers for UniMorph triple files and context corpora.

Triple files hold one ``lemma<TAB>MSD<TAB>form`` row per line. Context
corpora are blank-line separated sentence blocks with ``FORM<TAB>LEMMA<TAB>MSD``
token rows, ``_`` marking an absent field. The inflection target is the row
whose form is ``_`` but whose lemma is present.
"""

import io
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

ABSENT = "_"


class FormatError(ValueError):
    """Raised for malformed input files."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class MSD:
    """An ordered UniMorph feature bundle; the first tag is the part of speech."""

    tags: tuple

    def __post_init__(self):
        tags = tuple(self.tags)
        if not tags:
            raise ValueError("MSD must contain at least one tag")
        for tag in tags:
            if not tag or ";" in tag or any(c.isspace() for c in tag):
                raise ValueError(f"invalid MSD tag {tag!r}")
        object.__setattr__(self, "tags", tags)

    @classmethod
    def parse(cls, text):
        return cls(tuple(text.split(";")))

    @property
    def pos(self):
        return self.tags[0]

    def __str__(self):
        return ";".join(self.tags)

    def __lt__(self, other):
        return str(self) < str(other)


@dataclass(frozen=True)
class Triple:
    lemma: str
    msd: MSD
    form: Optional[str] = None  # None in covered test data

    @property
    def covered(self):
        return self.form is None


@dataclass(frozen=True)
class Dataset:
    language: str
    triples: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(self.triples))

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def __getitem__(self, index):
        return self.triples[index]

    @property
    def lemmas(self):
        return [t.lemma for t in self.triples]

    @property
    def forms(self):
        return [t.form for t in self.triples]


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: Optional[str] = None
    msd: Optional[MSD] = None


@dataclass(frozen=True)
class AnnotatedSentence:
    """A context sentence with at most one inflection target.

    ``gold_form`` is the original form of the target token, when known;
    ``plausible_forms`` is the set of contextually acceptable alternatives.
    """

    tokens: tuple
    target_index: Optional[int] = None
    plausible_forms: Optional[frozenset] = None
    gold_form: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.target_index is not None:
            if not 0 <= self.target_index < len(self.tokens):
                raise ValueError("target_index out of range")
            if self.tokens[self.target_index].lemma is None:
                raise ValueError("target token has no lemma")
        if self.plausible_forms is not None:
            forms = frozenset(self.plausible_forms)
            if not forms:
                raise ValueError("plausible_forms must be non-empty")
            if self.gold_form is not None and self.gold_form not in forms:
                raise ValueError("plausible_forms must contain the gold form")
            object.__setattr__(self, "plausible_forms", forms)

    @property
    def target(self):
        if self.target_index is None:
            return None
        return self.tokens[self.target_index]


def _decode(source):
    """Accept bytes, str, or a text/binary file object; return str."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            return bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"invalid UTF-8 at byte {exc.start}") from exc
    return source


def _lines(text):
    # splitlines() also breaks on U+2028 and friends, which may occur in forms
    for line in io.StringIO(text, newline=None):
        yield line.rstrip("\n")


def parse_triples(source, mode="train", language=""):
    """Read a UniMorph triple file.

    In ``"test"`` mode rows may have two or three columns; any third column
    is ignored and every form is ``None``.
    """
    if mode not in ("train", "test"):
        raise ValueError(f"unknown mode {mode!r}")
    triples = []
    for lineno, line in enumerate(_lines(_decode(source)), 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if mode == "train" and len(cols) != 3:
            raise FormatError(f"expected 3 columns, found {len(cols)}", lineno)
        if mode == "test" and len(cols) not in (2, 3):
            raise FormatError(f"expected 2 or 3 columns, found {len(cols)}", lineno)
        lemma, msd = cols[0], cols[1]
        if not lemma:
            raise FormatError("empty lemma", lineno)
        try:
            msd = MSD.parse(msd)
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from exc
        form = None
        if mode == "train":
            form = cols[2]
            if not form:
                raise FormatError("empty form", lineno)
        triples.append(Triple(lemma, msd, form))
    return Dataset(language, triples)


def format_triples(dataset):
    lines = []
    for t in dataset:
        if t.form is None:
            lines.append(f"{t.lemma}\t{t.msd}")
        else:
            lines.append(f"{t.lemma}\t{t.msd}\t{t.form}")
    return "".join(line + "\n" for line in lines)


def read_triples(path, mode="train", language=None):
    if language is None:
        language = language_from_path(path)
    with open(path, "rb") as f:
        return parse_triples(f, mode, language)


def language_from_path(path):
    """``.../finnish-train-low`` -> ``finnish``."""
    import os

    name = os.path.basename(str(path))
    return name.split("-")[0].split(".")[0]


def normalize_lemma(lemma, language):
    """Per-language lemma cleanup applied to context-corpus lemmas."""
    lang = language.lower()
    if lang in ("fi", "fin", "finnish"):
        return lemma.replace("#", "")
    if lang in ("ru", "rus", "russian"):
        return lemma.lower()
    return lemma


def _field(value):
    return None if value == ABSENT else value


def parse_context_corpus(source, track=1):
    """Read a context corpus into a list of :class:`AnnotatedSentence`.

    Comment lines starting with ``#`` are skipped, except the metadata
    comments ``# gold = FORM`` and ``# plausible = F1|F2|...`` which attach
    the target's original form and its plausible alternatives.
    """
    if track not in (1, 2):
        raise ValueError(f"track must be 1 or 2, not {track!r}")
    sentences = []
    block = []
    meta = {}
    start = None

    def flush():
        if block:
            sentences.append(_build_sentence(block, meta, track, start))
        block.clear()
        meta.clear()

    for lineno, line in enumerate(_lines(_decode(source)), 1):
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep and key.strip() in ("gold", "plausible"):
                meta[key.strip()] = (value.strip(), lineno)
            continue
        if not block:
            start = lineno
        block.append((lineno, line))
    flush()
    return sentences


def _build_sentence(rows, meta, track, start):
    tokens = []
    target = None
    for lineno, line in rows:
        cols = line.split("\t")
        if len(cols) != 3:
            raise FormatError(f"expected 3 columns, found {len(cols)}", lineno)
        surface, lemma, msd = cols[0], _field(cols[1]), _field(cols[2])
        is_target = cols[0] == ABSENT and lemma is not None
        if is_target:
            if target is not None:
                raise FormatError("second target slot in sentence", lineno)
            target = len(tokens)
        if msd is not None:
            if track == 2:
                raise FormatError("MSD present in a track-2 corpus", lineno)
            try:
                msd = MSD.parse(msd)
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from exc
        elif track == 1 and not is_target:
            raise FormatError("track-1 token lacks an MSD", lineno)
        if track == 1 and not is_target and lemma is None:
            raise FormatError("track-1 token lacks a lemma", lineno)
        tokens.append(Token(surface, lemma, msd))

    gold = meta.get("gold", (None, None))[0]
    plausible = None
    if "plausible" in meta:
        value, lineno = meta["plausible"]
        plausible = frozenset(f for f in value.split("|") if f)
        if gold is not None:
            plausible = plausible | {gold}
        if not plausible:
            raise FormatError("empty plausible set", lineno)
    try:
        return AnnotatedSentence(tokens, target, plausible, gold)
    except ValueError as exc:
        raise FormatError(str(exc), start) from exc


def format_context_corpus(sentences: Iterable[AnnotatedSentence]) -> str:
    out = []
    for sent in sentences:
        if sent.gold_form is not None:
            out.append(f"# gold = {sent.gold_form}")
        if sent.plausible_forms is not None:
            out.append("# plausible = " + "|".join(sorted(sent.plausible_forms)))
        for tok in sent.tokens:
            msd = ABSENT if tok.msd is None else str(tok.msd)
            lemma = ABSENT if tok.lemma is None else tok.lemma
            out.append(f"{tok.surface}\t{lemma}\t{msd}")
        out.append("")
    return "".join(line + "\n" for line in out)


def gold_forms(sentences: Sequence[AnnotatedSentence]):
    return [s.gold_form for s in sentences]


__all__ = [
    "ABSENT",
    "AnnotatedSentence",
    "Dataset",
    "FormatError",
    "MSD",
    "Token",
    "Triple",
    "format_context_corpus",
    "format_triples",
    "gold_forms",
    "language_from_path",
    "normalize_lemma",
    "parse_context_corpus",
    "parse_triples",
    "read_triples",
]
