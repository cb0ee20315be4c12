"""Rule-based inflection baseline.

Each training pair (lemma, form) is aligned character by character. From the
alignment we read off suffix rewrite rules for every lemma suffix, e.g. for
koti -> kodista::

    $ -> sta$    i$ -> ista$    ti$ -> dista$    oti$ -> odista$    koti$ -> kodista$

plus prefix rules when the word start changes. At prediction time the longest
matching suffix rule for the requested MSD is applied, then the longest prefix
rule that fits in the untouched part of the lemma. Ties go to the rule seen
most often, then to the lexicographically smallest replacement.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass

from .data import MSD, Dataset, FormatError, _decode, _lines

SUFFIX = "suffix"
PREFIX = "prefix"
KINDS = (SUFFIX, PREFIX)


@dataclass(frozen=True)
class Rule:
    kind: str
    lhs: str
    rhs: str

    def __str__(self):
        if self.kind == SUFFIX:
            return f"{self.lhs}$ -> {self.rhs}$"
        return f"^{self.lhs} -> ^{self.rhs}"


def _edit_table(a, b):
    """cost[i][j] = edit distance between a[i:] and b[j:]."""
    n, m = len(a), len(b)
    cost = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n, -1, -1):
        row = cost[i]
        for j in range(m, -1, -1):
            if i == n:
                row[j] = m - j
            elif j == m:
                row[j] = n - i
            else:
                below = cost[i + 1]
                row[j] = min(
                    below[j + 1] + (a[i] != b[j]),
                    below[j] + 1,
                    row[j + 1] + 1,
                )
    return cost


def align(lemma, form):
    """Minimum edit-cost alignment as a list of (lemma_part, form_part) pairs.

    The cheapest path is read off from the start of both strings, preferring
    match, then substitution, then deletion, then insertion. This pushes
    insertions towards the end of the word, which suits suffixing languages.
    """
    cost = _edit_table(lemma, form)
    n, m = len(lemma), len(form)
    pairs = []
    i = j = 0
    while i < n or j < m:
        here = cost[i][j]
        if i < n and j < m and cost[i + 1][j + 1] + (lemma[i] != form[j]) == here:
            pairs.append((lemma[i], form[j]))
            i += 1
            j += 1
        elif i < n and cost[i + 1][j] + 1 == here:
            pairs.append((lemma[i], ""))
            i += 1
        else:
            pairs.append(("", form[j]))
            j += 1
    return pairs


def alignment_cost(pairs):
    return sum(a != b for a, b in pairs)


def _split_points(pairs):
    """split[c] = first pair index at which c lemma characters are consumed."""
    split = [0]
    for idx, (a, _) in enumerate(pairs):
        if a:
            split.append(idx + 1)
    return split


def extract_rules(triple):
    """All suffix and prefix rules witnessed by one training triple."""
    lemma, form = triple.lemma, triple.form
    pairs = align(lemma, form)
    split = _split_points(pairs)
    n = len(lemma)
    outs = [b for _, b in pairs]

    rules = []
    for k in range(n + 1):
        rules.append(Rule(SUFFIX, lemma[n - k:], "".join(outs[split[n - k]:])))

    changed = 0
    while changed < len(pairs) and pairs[changed][0] != pairs[changed][1]:
        changed += 1
    if changed:
        consumed = sum(1 for a, _ in pairs[:changed] if a)
        for j in range(min(consumed + 1, n) + 1):
            rules.append(Rule(PREFIX, lemma[:j], "".join(outs[:split[j]])))
    return rules


class RuleTable:
    """Counts of (MSD, kind, lhs) -> {rhs: count}."""

    def __init__(self, language=""):
        self.language = language
        self.rules = defaultdict(Counter)

    def add(self, msd, rule, count=1):
        if count < 1:
            raise ValueError("rule counts must be positive")
        self.rules[(msd, rule.kind, rule.lhs)][rule.rhs] += count

    def __contains__(self, msd):
        return (msd, SUFFIX, "") in self.rules

    def __len__(self):
        return sum(len(rhs) for rhs in self.rules.values())

    def __eq__(self, other):
        return isinstance(other, RuleTable) and self.rules == other.rules

    def msds(self):
        return {msd for msd, _, _ in self.rules}

    def items(self):
        """Yield (msd, kind, lhs, rhs, count) in serialization order."""
        rows = [
            (str(msd), kind, lhs, rhs, count)
            for (msd, kind, lhs), counts in self.rules.items()
            for rhs, count in counts.items()
        ]
        rows.sort()
        for msd, kind, lhs, rhs, count in rows:
            yield MSD.parse(msd), kind, lhs, rhs, count

    def best(self, msd, kind, word):
        """Longest-lhs rule of ``kind`` matching ``word``; None if none does."""
        # suffix rules match word ends, prefix rules word starts
        for size in range(len(word), -1, -1):
            lhs = word[len(word) - size:] if kind == SUFFIX else word[:size]
            counts = self.rules.get((msd, kind, lhs))
            if counts:
                rhs = min(counts, key=lambda r: (-counts[r], r))
                return Rule(kind, lhs, rhs)
        return None

    def dumps(self):
        lines = sorted(
            f"{msd}\t{kind}\t{lhs}\t{rhs}\t{count}\n"
            for msd, kind, lhs, rhs, count in self.items()
        )
        return "".join(lines)

    @classmethod
    def loads(cls, source, language=""):
        table = cls(language)
        for lineno, line in enumerate(_lines(_decode(source)), 1):
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise FormatError(f"expected 5 columns, found {len(cols)}", lineno)
            msd, kind, lhs, rhs, count = cols
            if kind not in KINDS:
                raise FormatError(f"unknown rule kind {kind!r}", lineno)
            try:
                table.add(MSD.parse(msd), Rule(kind, lhs, rhs), int(count))
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from exc
        return table


def train(dataset: Dataset) -> RuleTable:
    if not len(dataset):
        raise ValueError("cannot train on an empty dataset")
    table = RuleTable(dataset.language)
    for triple in dataset:
        if triple.form is None:
            raise ValueError(f"training triple for {triple.lemma!r} has no form")
        for rule in extract_rules(triple):
            table.add(triple.msd, rule)
    return table


def explain(table, lemma, msd):
    """The (suffix_rule, prefix_rule) pair ``apply`` would use."""
    if msd not in table:
        return None, None
    suffix = table.best(msd, SUFFIX, lemma)
    stem = lemma[: len(lemma) - len(suffix.lhs)]
    prefix = table.best(msd, PREFIX, stem)
    return suffix, prefix


def apply(table, lemma, msd):
    """Inflect ``lemma`` for ``msd``; unseen MSDs return the lemma unchanged."""
    suffix, prefix = explain(table, lemma, msd)
    if suffix is None:
        return lemma
    stem = lemma[: len(lemma) - len(suffix.lhs)]
    if prefix is not None:
        stem = prefix.rhs + stem[len(prefix.lhs):]
    return stem + suffix.rhs


def predict(table, dataset):
    return [apply(table, t.lemma, t.msd) for t in dataset]
