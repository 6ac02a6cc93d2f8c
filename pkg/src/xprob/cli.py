"""Command-line surface: train, explain, eval, stability.

Progress and diagnostics go to standard error; machine-readable output
goes to files or standard output, so the commands pipe cleanly.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import evaluation
from .blackbox import open_classifier, train_builtin
from .config import RunConfig, timeout_from_env
from .corpus import downsample_corpus, load_corpus, load_labeled, tokenize
from .errors import ConfigError, XprobError
from .explanation import render
from .pipeline import Explainer


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True, help="prototype corpus, one text per line")
    parser.add_argument(
        "--classifier", required=True, help="builtin:<model-path> or cmd:<command line>"
    )
    parser.add_argument("--n", type=int, default=1, help="context length (default 1)")
    parser.add_argument("--prototypes", type=int, default=80, help="initial prototypes k")
    parser.add_argument("--population", type=int, default=400, help="neighborhood population p")
    parser.add_argument("--sigma", type=float, default=1.0, help="locality kernel width")
    parser.add_argument(
        "--lambda", dest="balance", type=float, default=0.5,
        help="closeness/diversity balance for instance selection",
    )
    parser.add_argument("--ridge", type=float, default=1e-3, help="surrogate ridge term")
    parser.add_argument("--threshold", type=float, default=0.1, help="attribution threshold")
    parser.add_argument("--instances", type=int, default=5, help="factuals/counterfactuals per class")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-rounds", type=int, default=32, help="editing round cap")
    parser.add_argument("--jobs", type=int, default=1, help="parallel explicands in batch modes")


def _config_from_args(args, method: str | None = None, fmt: str | None = None) -> RunConfig:
    return RunConfig(
        corpus_path=args.corpus,
        classifier_spec=args.classifier,
        n=args.n,
        prototypes=args.prototypes,
        population=args.population,
        sigma=args.sigma,
        balance=args.balance,
        ridge=args.ridge,
        threshold=args.threshold,
        instances=args.instances,
        seed=args.seed,
        format=fmt or "json",
        method=method or "xprob",
        jobs=args.jobs,
        corpus_sizes=[int(s) for s in getattr(args, "corpus_size", "").split(",") if s]
        if getattr(args, "corpus_size", None)
        else [],
        max_rounds=args.max_rounds,
        timeout_secs=timeout_from_env(),
    ).validate()


def _open_session(config: RunConfig):
    corpus = load_corpus(config.corpus_path)
    classifier = open_classifier(config.classifier_spec, timeout=config.timeout_secs)
    return corpus, classifier


def cmd_train(args) -> int:
    labeled = load_labeled(args.data)
    model = train_builtin(labeled)
    model.save(args.out)
    _progress(f"trained on {len(labeled)} examples; model written to {args.out}")
    if args.val:
        pairs = load_labeled(args.val)
        label_of = {label: idx for idx, label in enumerate(model.labels)}
        predictions = model.classify_batch([tokenize(text) for _, text in pairs])
        hits = sum(
            1
            for (label, _), probs in zip(pairs, predictions)
            if max(range(len(probs)), key=probs.__getitem__) == label_of.get(label, -1)
        )
        print(f"validation accuracy: {hits / len(pairs):.4f} ({hits}/{len(pairs)})")
    return 0


def _render_to(outcome, config, destination) -> None:
    payload = render(outcome.report, config.format)
    if destination is None:
        sys.stdout.write(payload.decode("utf-8"))
    else:
        Path(destination).write_bytes(payload)


def cmd_explain(args) -> int:
    config = _config_from_args(args, method=args.method, fmt=args.format)
    if (args.text is None) == (args.file is None):
        _progress("explain: provide exactly one of --text or --file")
        return 2
    corpus, classifier = _open_session(config)
    extension = {"json": "json", "html": "html", "text": "txt"}[config.format]
    with classifier:
        explainer = Explainer(corpus, classifier, config)
        texts = (
            [args.text]
            if args.text is not None
            else [l for l in Path(args.file).read_text("utf-8").splitlines() if l.strip()]
        )
        if args.out and len(texts) > 1:
            Path(args.out).mkdir(parents=True, exist_ok=True)
        failures = 0
        for idx, text in enumerate(texts):
            try:
                outcome = explainer.explain_text(text, seed=config.seed + idx)
            except XprobError as exc:
                failures += 1
                _progress(f"text #{idx} failed: {exc}")
                continue
            if args.out is None:
                _render_to(outcome, config, None)
            elif len(texts) == 1:
                _render_to(outcome, config, args.out)
            else:
                _render_to(outcome, config, Path(args.out) / f"report_{idx:04d}.{extension}")
        if failures:
            _progress(f"{failures}/{len(texts)} texts could not be explained")
    return 0


def _evaluate_batch(explainer, texts, method, config):
    def one(item):
        idx, tokens = item
        try:
            record, _ = explainer.evaluate_tokens(tokens, method=method, seed=config.seed + idx)
            return idx, record, None
        except XprobError as exc:
            return idx, None, str(exc)

    items = list(enumerate(texts))
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(one, items))
    else:
        results = [one(item) for item in items]
    return results


def cmd_eval(args) -> int:
    methods = args.method or ["xprob", "drop"]
    config = _config_from_args(args, method=methods[0])
    pairs = load_labeled(args.test)
    texts = [tokenize(text) for _, text in pairs]
    corpus, classifier = _open_session(config)
    sizes = config.corpus_sizes or [len(corpus.documents)]
    out_path = Path(args.out)
    with classifier:
        for size in sizes:
            sampled = downsample_corpus(corpus, size, config.seed)
            explainer = Explainer(sampled, classifier, config)
            rows = []
            by_method: dict[str, list[evaluation.MetricRecord]] = {}
            for method in methods:
                _progress(f"evaluating {len(texts)} texts with {method} (|X_p|={len(sampled)})")
                for idx, record, error in _evaluate_batch(explainer, texts, method, config):
                    if error is not None:
                        _progress(f"text #{idx} ({method}) failed: {error}")
                        continue
                    rows.append((idx, method, record))
                    by_method.setdefault(method, []).append(record)
            rows.sort(key=lambda r: (r[0], methods.index(r[1])))
            target = (
                out_path
                if len(sizes) == 1
                else out_path.with_name(f"{out_path.stem}_{len(sampled)}{out_path.suffix}")
            )
            with open(target, "w", encoding="utf-8") as fh:
                evaluation.write_results_csv(fh, rows)
            print(f"== corpus size {len(sampled)} ==")
            print(evaluation.format_metric_summary(by_method))
    return 0


def cmd_stability(args) -> int:
    config = _config_from_args(args, method=args.method or "xprob")
    corpus, classifier = _open_session(config)
    with classifier:
        explainer = Explainer(corpus, classifier, config)
        negative, positive, nouns = evaluation.select_stability_words(classifier)
        cases = evaluation.gen_stability_cases(negative + positive, nouns)
        _progress(
            f"{len(cases)} cases ({len(negative)}+{len(positive)} adjectives x {len(nouns)} nouns), "
            f"{sum(len(c.texts) for c in cases)} texts, method={config.method}"
        )
        counter = iter(range(10**9))

        def explain(tokens):
            return explainer.attribution_or_none(
                tokens, method=config.method, seed=config.seed + next(counter)
            )

        results = evaluation.score_stability_cases(cases, explain, classifier)
        with open(args.out, "w", encoding="utf-8") as fh:
            evaluation.write_stability_csv(fh, results)
        print(evaluation.format_stability_summary(evaluation.stability_stats(results)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xprob",
        description="Explain text classifier decisions by probability-based editing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the builtin classifier on a TSV file")
    p_train.add_argument("--data", required=True, help="label<TAB>text training file")
    p_train.add_argument("--out", required=True, help="model output path")
    p_train.add_argument("--val", help="optional validation TSV for an accuracy report")
    p_train.set_defaults(func=cmd_train)

    p_explain = sub.add_parser("explain", help="explain one text or a file of texts")
    _add_common(p_explain)
    p_explain.add_argument("--text", help="a single text to explain")
    p_explain.add_argument("--file", help="file with one text per line")
    p_explain.add_argument("--format", choices=("json", "html", "text"), default="json")
    p_explain.add_argument("--method", choices=("xprob", "drop"), default="xprob")
    p_explain.add_argument("--out", help="output file (single text) or directory (file input)")
    p_explain.set_defaults(func=cmd_explain)

    p_eval = sub.add_parser("eval", help="run the metric suite over a labeled test file")
    _add_common(p_eval)
    p_eval.add_argument("--test", required=True, help="label<TAB>text test file")
    p_eval.add_argument(
        "--method", action="append", choices=("xprob", "drop"),
        help="repeatable; default runs both methods",
    )
    p_eval.add_argument("--corpus-size", help="comma-separated sizes for a dependency sweep")
    p_eval.add_argument("--out", required=True, help="metrics CSV path")
    p_eval.set_defaults(func=cmd_eval)

    p_stab = sub.add_parser("stability", help="run the 200-case template stability study")
    _add_common(p_stab)
    p_stab.add_argument("--method", choices=("xprob", "drop"), default="xprob")
    p_stab.add_argument("--out", required=True, help="stability CSV path")
    p_stab.set_defaults(func=cmd_stability)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _progress(f"configuration error: {exc}")
        return 2
    except XprobError as exc:
        _progress(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
