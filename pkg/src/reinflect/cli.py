"""Command-line front end.

    reinflect sample   --in POOL --out DIR [--weights W] [--seed N]
    reinflect train    --in TRAIN --out RULES
    reinflect predict  --rules RULES --in TEST [--out PREDS]
    reinflect predict  --track 1|2 --in CORPUS [--out PREDS]     (copy baseline)
    reinflect evaluate --gold G [--gold G2 ...] --preds [SYS=]PATH ... --out PREFIX
    reinflect oracle   --train T --gold G --preds [SYS=]PATH ...
    reinflect compare  --gold G --preds [SYS=]PATH ... [--train T] --out PREFIX

Exit status: 0 success, 1 usage error, 2 data error.
"""

import argparse
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

from . import context, evaluate, rules, sampler
from .data import FormatError, format_triples, language_from_path, parse_context_corpus, parse_triples

log = logging.getLogger("reinflect")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextmanager
def _atomic_outputs():
    """Collect (path, text) writes; rename them into place only on success."""
    pending = []

    def write(path, text):
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        pending.append((tmp, path))

    try:
        yield write
    except BaseException:
        for tmp, _ in pending:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise
    for tmp, path in pending:
        os.replace(tmp, path)


def _read_bytes(path):
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")
    with open(path, "rb") as f:
        return f.read()


def _read_predictions(path):
    text = _read_bytes(path).decode("utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r") for line in lines]


def _language(args, path):
    return args.language or language_from_path(path)


def _load_gold(args, path):
    data = _read_bytes(path)
    if args.track:
        sents = parse_context_corpus(data, args.track)
        if any(s.gold_form is None for s in sents):
            raise FormatError(f"{path}: context gold file lacks '# gold' forms")
        return sents
    return parse_triples(data, "train", _language(args, path))


def _parse_preds_specs(specs):
    out = []
    for i, spec in enumerate(specs):
        name, sep, path = spec.partition("=")
        if not sep:
            name, path = os.path.basename(spec.rstrip("/")) or f"system{i + 1}", spec
        out.append((name, path))
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise UsageError("system names given to --preds must be unique")
    return out


def _resolve_preds(path, gold_path, lang):
    """A prediction path is a file, or a directory holding one file per language."""
    if not os.path.isdir(path):
        return path
    for name in (os.path.basename(gold_path), lang):
        candidate = os.path.join(path, name)
        if os.path.isfile(candidate):
            return candidate
    return None


def cmd_sample(args, write):
    language = _language(args, args.input)
    dataset = parse_triples(_read_bytes(args.input), "train", language)
    weights = sampler.read_weights(_read_bytes(args.weights)) if args.weights else None
    pool = sampler.build_pool(dataset, weights)
    spec = sampler.SplitSpec(args.low, args.medium, args.high, args.dev, args.test, args.seed)
    splits = sampler.sample_splits(pool, spec, args.scale_down, language)
    names = {
        "low": "train-low",
        "medium": "train-medium",
        "high": "train-high",
        "dev": "dev",
        "test": "test",
    }
    for key, suffix in names.items():
        if splits[key] is None:
            log.info("omitting %s regime: pool too small", key)
            continue
        write(os.path.join(args.out, f"{language}-{suffix}"), format_triples(splits[key]))


def cmd_train(args, write):
    dataset = parse_triples(_read_bytes(args.input), "train", _language(args, args.input))
    write(args.out, rules.train(dataset).dumps())


def cmd_predict(args, write):
    language = _language(args, args.input)
    if args.track:
        sents = parse_context_corpus(_read_bytes(args.input), args.track)
        preds = [context.copy_baseline(s, language) for s in sents]
    else:
        if not args.rules:
            raise UsageError("predict needs --rules (or --track for the copy baseline)")
        table = rules.RuleTable.loads(_read_bytes(args.rules), language)
        test = parse_triples(_read_bytes(args.input), "test", language)
        preds = rules.predict(table, test)
    text = "".join(p + "\n" for p in preds)
    if args.out:
        write(args.out, text)
    else:
        sys.stdout.write(text)


def _collect(args):
    if not args.gold:
        raise UsageError("--gold is required")
    if not args.preds and args.command != "oracle":
        raise UsageError("--preds is required")
    specs = _parse_preds_specs(args.preds or [])
    trains = {}
    for path in args.train or []:
        trains[_language(args, path)] = parse_triples(_read_bytes(path), "train", _language(args, path))

    def load(gold_path):
        lang = _language(args, gold_path)
        gold = _load_gold(args, gold_path)
        systems = []
        for name, path in specs:
            resolved = _resolve_preds(path, gold_path, lang)
            if resolved is None:
                log.warning("%s has no output for %s; excluded", name, lang)
                continue
            preds = _read_predictions(resolved)
            if len(preds) != len(gold):
                raise FormatError(
                    f"{resolved}: {len(preds)} predictions for {len(gold)} gold items"
                )
            systems.append(evaluate.PredictionSet(name, preds))
        return lang, gold, systems

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        loaded = list(pool.map(load, args.gold))
    golds = {lang: gold for lang, gold, _ in loaded}
    if len(golds) != len(loaded):
        raise UsageError("two --gold files map to the same language; use distinct names")
    systems = {lang: s for lang, _, s in loaded}
    return golds, systems, trains


def cmd_evaluate(args, write):
    golds, systems, trains = _collect(args)
    report = evaluate.build_report(golds, systems, trains, args.alpha, jobs=args.jobs)
    prefix = args.out
    if prefix:
        write(prefix + ".tsv", report.to_tsv())
        write(prefix + ".json", report.to_json())
    else:
        sys.stdout.write(report.to_tsv())


def cmd_oracle(args, write):
    if not args.train:
        raise UsageError("oracle needs --train")
    golds, systems, trains = _collect(args)
    lines = ["language\toracle-e\toracle-fc"]
    for lang, gold in golds.items():
        e = "-"
        if systems[lang]:
            e = f"{evaluate.oracle_ensemble(gold, systems[lang]):.2f}"
        fc = "-"
        if lang in trains:
            fc = f"{evaluate.oracle_feature_combination(trains[lang], gold):.2f}"
        lines.append(f"{lang}\t{e}\t{fc}")
    text = "\n".join(lines) + "\n"
    if args.out:
        write(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_compare(args, write):
    golds, systems, trains = _collect(args)
    report = evaluate.build_report(golds, systems, trains, args.alpha, jobs=args.jobs)
    lines = []
    for lang in report.languages:
        ids = [s.system_id for s in systems[lang]]
        pvals = report.significance[lang]
        lines.append(f"# {lang}: two-sided exact sign test p-values, alpha={args.alpha}")
        lines.append("\t".join(["system", "accuracy", "marks"] + ids))
        for a in ids:
            acc = report.per_language[a][lang][0]
            row = [a, f"{acc:.2f}", str(report.marks[lang][a])]
            for b in ids:
                p = 1.0 if a == b else pvals.get((a, b), pvals.get((b, a)))
                row.append(f"{p:.6g}")
            lines.append("\t".join(row))
        lines.append("")
    text = "\n".join(lines)
    if args.out:
        write(args.out + ".tsv", text)
        write(args.out + ".json", report.to_json())
    else:
        sys.stdout.write(text)


COMMANDS = {
    "sample": cmd_sample,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
}


def build_parser():
    parser = _Parser(prog="reinflect", description="Morphological reinflection toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--language", help="language id (default: from file name)")
        p.add_argument("--out")
        return p

    p = common(sub.add_parser("sample", help="draw nested train/dev/test splits"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--weights")
    p.add_argument("--seed", type=int, default=0)
    for name, default in (("low", 100), ("medium", 1000), ("high", 10000), ("dev", 1000), ("test", 1000)):
        p.add_argument(f"--{name}", type=int, default=default)
    p.add_argument("--scale-down", action="store_true", help="shrink splits for small pools")

    p = common(sub.add_parser("train", help="extract a rule table"))
    p.add_argument("--in", dest="input", required=True)

    p = common(sub.add_parser("predict", help="run the rule or copy baseline"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--rules")
    p.add_argument("--track", type=int, choices=(1, 2))

    for name in ("evaluate", "oracle", "compare"):
        p = common(sub.add_parser(name))
        p.add_argument("--gold", action="append")
        p.add_argument("--preds", action="append", help="[SYSTEM=]FILE_OR_DIR")
        p.add_argument("--train", action="append")
        p.add_argument("--track", type=int, choices=(1, 2))
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--jobs", type=int, default=1)
    return parser


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    if args.command in ("train",) and not args.out:
        parser.error("train needs --out")
    if args.command == "sample" and not args.out:
        parser.error("sample needs --out")
    try:
        with _atomic_outputs() as write:
            COMMANDS[args.command](args, write)
    except UsageError as exc:
        print(f"reinflect: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, ValueError, OSError, UnicodeDecodeError) as exc:
        print(f"reinflect: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
