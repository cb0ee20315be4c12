"""Scoring and analysis: accuracy, Levenshtein distance, oracles, sign tests."""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from statistics import mean
from typing import Dict, List, Optional


def levenshtein(a, b):
    """Unit-cost edit distance over code points."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class PredictionSet:
    system_id: str
    predictions: tuple

    def __post_init__(self):
        object.__setattr__(self, "predictions", tuple(self.predictions))

    def __len__(self):
        return len(self.predictions)


def _gold(gold):
    """Gold forms from a Dataset, a list of sentences, or a list of strings."""
    out = []
    for item in gold:
        if isinstance(item, str):
            out.append(item)
        elif hasattr(item, "gold_form"):
            out.append(item.gold_form)
        else:
            out.append(item.form)
    if any(f is None for f in out):
        raise ValueError("gold data lacks target forms")
    return out


def _predictions(preds):
    return list(preds.predictions if isinstance(preds, PredictionSet) else preds)


def _check_length(gold, preds):
    if len(gold) != len(preds):
        raise ValueError(f"length mismatch: {len(gold)} gold items, {len(preds)} predictions")


def correctness(gold, preds):
    gold, preds = _gold(gold), _predictions(preds)
    _check_length(gold, preds)
    return [g == p for g, p in zip(gold, preds)]


def score(gold, preds):
    """(accuracy in percent, mean Levenshtein distance)."""
    gold, preds = _gold(gold), _predictions(preds)
    _check_length(gold, preds)
    if not gold:
        raise ValueError("cannot score an empty gold set")
    hits = sum(g == p for g, p in zip(gold, preds))
    dist = mean(levenshtein(p, g) for g, p in zip(gold, preds))
    return 100.0 * hits / len(gold), float(dist)


def score_relaxed(gold, preds):
    """Percentage of predictions that fall in their sentence's plausible set."""
    preds = _predictions(preds)
    _check_length(gold, preds)
    if not gold:
        raise ValueError("cannot score an empty gold set")
    hits = 0
    for idx, (sent, pred) in enumerate(zip(gold, preds)):
        if sent.plausible_forms is None:
            raise ValueError(f"sentence {idx} has no plausible-form set")
        hits += pred in sent.plausible_forms
    return 100.0 * hits / len(gold)


def filter_plausible(items, max_alternatives=5):
    kept = []
    for item in items:
        if item.plausible_forms is None:
            raise ValueError("item has no plausible-form set")
        if len(item.plausible_forms) <= max_alternatives:
            kept.append(item)
    return kept


def ensemble_correctness(gold, systems):
    if not systems:
        raise ValueError("oracle_ensemble needs at least one system")
    vectors = [correctness(gold, s) for s in systems]
    return [any(col) for col in zip(*vectors)]


def oracle_ensemble(gold, systems):
    """Accuracy of an oracle that is right whenever any system is right."""
    hits = ensemble_correctness(gold, systems)
    return 100.0 * sum(hits) / len(hits)


def feature_combination_correctness(train, test):
    seen = {t.msd for t in train}
    return [t.msd in seen for t in test]


def oracle_feature_combination(train, test):
    """Percentage of test items whose exact MSD bundle occurs in training."""
    hits = feature_combination_correctness(train, test)
    if not hits:
        raise ValueError("cannot score an empty test set")
    return 100.0 * sum(hits) / len(hits)


def sign_test_counts(wins_a, wins_b):
    """Two-sided exact binomial sign test on discordant counts."""
    n = wins_a + wins_b
    if n == 0:
        return 1.0
    k = min(wins_a, wins_b)
    p = 2 * sum(comb(n, i) for i in range(k + 1)) / 2**n
    return min(p, 1.0)


def _wins(ca, cb):
    _check_length(ca, cb)
    wins_a = sum(1 for x, y in zip(ca, cb) if x and not y)
    wins_b = sum(1 for x, y in zip(ca, cb) if y and not x)
    return wins_a, wins_b


def sign_test_vectors(ca, cb):
    return sign_test_counts(*_wins(ca, cb))


def sign_test(gold, a, b):
    """p-value for the per-item correctness of systems ``a`` and ``b``.

    Items both systems get right, or both get wrong, are discarded.
    """
    return sign_test_vectors(correctness(gold, a), correctness(gold, b))


@dataclass
class Marks:
    bold: bool = False
    dagger: bool = False
    double_dagger: bool = False

    def __str__(self):
        names = [n for n in ("bold", "dagger", "double_dagger") if getattr(self, n)]
        return ",".join(names) or "-"


def significance_marks(gold, systems, oracles, alpha=0.05):
    """Table marks for each system.

    ``oracles`` maps ``"e"`` and/or ``"fc"`` to per-item correctness vectors.
    bold: best system or not significantly worse than it; dagger:
    significantly better than the feature-combination oracle; double dagger:
    not significantly different from the ensemble oracle.
    """
    vectors = {s.system_id: correctness(gold, s) for s in systems}
    if not vectors:
        return {}
    best = max(vectors, key=lambda sid: sum(vectors[sid]))
    marks = {}
    for sid, vec in vectors.items():
        m = Marks()
        m.bold = sid == best or sign_test_vectors(vec, vectors[best]) >= alpha
        if "fc" in oracles:
            wins, losses = _wins(vec, oracles["fc"])
            m.dagger = wins > losses and sign_test_counts(wins, losses) < alpha
        if "e" in oracles:
            m.double_dagger = sign_test_vectors(vec, oracles["e"]) >= alpha
        marks[sid] = m
    return marks


@dataclass
class EvalReport:
    """Per-language scores for one or more systems.

    ``per_language[system][language] = (accuracy, avg_levenshtein)``; a
    system missing a language is left out of that language and gets no
    aggregate.
    """

    per_language: Dict[str, Dict[str, tuple]] = field(default_factory=dict)
    languages: List[str] = field(default_factory=list)
    oracle_e: Dict[str, float] = field(default_factory=dict)
    oracle_fc: Dict[str, float] = field(default_factory=dict)
    significance: Dict[str, Dict[tuple, float]] = field(default_factory=dict)
    marks: Dict[str, Dict[str, Marks]] = field(default_factory=dict)
    relaxed: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def aggregate(self, system) -> Optional[tuple]:
        """Unweighted mean over languages; None for partial submissions."""
        scores = self.per_language.get(system, {})
        if not scores or set(scores) != set(self.languages):
            return None
        return (
            mean(acc for acc, _ in scores.values()),
            mean(dist for _, dist in scores.values()),
        )

    def to_tsv(self):
        header = "# sign test: two-sided exact binomial, ties on correctness discarded\n"
        lines = ["system\tlanguage\taccuracy\tavg_levenshtein\tmarks"]
        for system in self.per_language:
            for lang in self.languages:
                if lang not in self.per_language[system]:
                    continue
                acc, dist = self.per_language[system][lang]
                mark = self.marks.get(lang, {}).get(system, "-")
                lines.append(f"{system}\t{lang}\t{acc:.2f}\t{dist:.2f}\t{mark}")
            agg = self.aggregate(system)
            if agg is not None and len(self.languages) > 1:
                lines.append(f"{system}\tALL\t{agg[0]:.2f}\t{agg[1]:.2f}\t-")
        for lang in self.languages:
            if lang in self.oracle_fc:
                lines.append(f"oracle-fc\t{lang}\t{self.oracle_fc[lang]:.2f}\t-\t-")
            if lang in self.oracle_e:
                lines.append(f"oracle-e\t{lang}\t{self.oracle_e[lang]:.2f}\t-\t-")
        return header + "\n".join(lines) + "\n"

    def to_json(self):
        data = {
            "languages": self.languages,
            "systems": {
                system: {
                    "per_language": {
                        lang: {"accuracy": acc, "avg_levenshtein": dist}
                        for lang, (acc, dist) in scores.items()
                    },
                    "aggregate": (
                        None
                        if self.aggregate(system) is None
                        else dict(zip(("accuracy", "avg_levenshtein"), self.aggregate(system)))
                    ),
                }
                for system, scores in self.per_language.items()
            },
            "relaxed_accuracy": self.relaxed,
            "oracle_e": self.oracle_e,
            "oracle_fc": self.oracle_fc,
            "significance": {
                lang: [
                    {"system_a": a, "system_b": b, "p_value": p}
                    for (a, b), p in sorted(pairs.items())
                ]
                for lang, pairs in self.significance.items()
            },
            "marks": {
                lang: {sid: str(m) for sid, m in marks.items()}
                for lang, marks in self.marks.items()
            },
        }
        return json.dumps(data, indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def _score_language(gold, systems, train, alpha):
    per_system = {s.system_id: score(gold, s) for s in systems}
    relaxed = {}
    if gold and all(getattr(g, "plausible_forms", None) is not None for g in gold):
        relaxed = {s.system_id: score_relaxed(gold, s) for s in systems}
    oracles = {}
    if systems:
        oracles["e"] = ensemble_correctness(gold, systems)
    if train is not None:
        oracles["fc"] = feature_combination_correctness(train, gold)
    pairs = {}
    for i, a in enumerate(systems):
        for b in systems[i + 1:]:
            pairs[(a.system_id, b.system_id)] = sign_test(gold, a, b)
    marks = significance_marks(gold, systems, oracles, alpha)
    return per_system, relaxed, oracles, pairs, marks


def build_report(gold_by_language, systems_by_language, train_by_language=None, alpha=0.05, jobs=1):
    """Score every system on every language it covers.

    ``systems_by_language[lang]`` is a list of PredictionSet; oracles and
    pairwise sign tests are computed per language, optionally in parallel.
    """
    train_by_language = train_by_language or {}
    languages = list(gold_by_language)

    def work(lang):
        return _score_language(
            gold_by_language[lang],
            list(systems_by_language.get(lang, [])),
            train_by_language.get(lang),
            alpha,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, languages))
    else:
        results = [work(lang) for lang in languages]

    report = EvalReport(languages=languages)
    for lang, (per_system, relaxed, oracles, pairs, marks) in zip(languages, results):
        for sid, result in per_system.items():
            report.per_language.setdefault(sid, {})[lang] = result
        for sid, acc in relaxed.items():
            report.relaxed.setdefault(sid, {})[lang] = acc
        for key, target in (("e", report.oracle_e), ("fc", report.oracle_fc)):
            if key in oracles:
                target[lang] = 100.0 * sum(oracles[key]) / len(oracles[key])
        report.significance[lang] = pairs
        report.marks[lang] = marks
    return report
