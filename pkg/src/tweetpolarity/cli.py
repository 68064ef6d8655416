"""Command-line interface: ``train``, ``predict``, ``evaluate``, ``inspect-resources``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import resources as res
from .evaluation import BASELINES, baseline_report, evaluate, format_table
from .pipeline import (ConfigError, RunConfig, featurizer_for_model, format_prediction,
                       parse_resource_spec, predict_tweets, train)
from .svm import ModelFormatError, load_model, save_model
from .text import TweetFormatError, read_tagged, read_tweet_tsv

log = logging.getLogger("tweetpolarity")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON key-value file with run settings (flags override it)")
    p.add_argument("--lang", choices=["en", "ar"], help="language profile (default en)")
    p.add_argument("--lexicon", action="append", default=[], metavar="[NAME=]PATH",
                   help="sentiment lexicon TSV; repeatable")
    p.add_argument("--clusters", action="append", default=[], metavar="[NAME=]PATH",
                   help="word cluster TSV; repeatable")
    p.add_argument("--embeddings", action="append", default=[], metavar="[NAME=]PATH",
                   help="word2vec text embeddings; repeatable")
    p.add_argument("--tagged", action="store_true", default=None,
                   help="input is pre-tagged (surface<TAB>pos lines, blank line between tweets)")
    p.add_argument("--skip-bad", action="store_true", default=None,
                   help="skip malformed input lines instead of failing")
    p.add_argument("--jobs", type=int, help="worker processes for feature extraction")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tweetpolarity",
                                     description="Tweet polarity classification with a linear SVM.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from labeled tweets")
    p.add_argument("train_file")
    p.add_argument("model_out")
    _add_common(p)
    p.add_argument("--features", help="comma list of: bow,bonw,pos,bitagged,lexicons,clusters,embeddings")
    p.add_argument("--c", type=float, dest="C", help="SVM cost parameter (default 0.5)")
    p.add_argument("--tol", type=float, help="solver stopping tolerance (default 1e-3)")
    p.add_argument("--max-epochs", type=int, help="solver epoch limit (default 1000)")
    p.add_argument("--seed", type=int, help="coordinate permutation seed (default 42)")
    p.add_argument("--negation-words", help="comma list replacing the language's negation triggers")
    p.add_argument("--negation-suffix", help="suffix for negated tokens")
    p.add_argument("--dev", help="labeled development file to score after training")

    p = sub.add_parser("predict", help="label tweets with a trained model")
    p.add_argument("model_file")
    p.add_argument("input_file")
    p.add_argument("-o", "--output", help="write predictions here instead of stdout")
    _add_common(p)

    p = sub.add_parser("evaluate", help="score a model on labeled tweets, with baselines")
    p.add_argument("model_file")
    p.add_argument("labeled_file")
    p.add_argument("--json", action="store_true", help="print a JSON report instead of a table")
    _add_common(p)

    p = sub.add_parser("inspect-resources", help="load resources and print a summary")
    _add_common(p)
    return parser


def _config_from_args(args) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {}
    for key in ("lang", "C", "tol", "max_epochs", "seed", "negation_suffix", "tagged", "skip_bad", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    for key in ("lexicon", "clusters", "embeddings"):
        if getattr(args, key):
            overrides[key if key != "lexicon" else "lexicons"] = getattr(args, key)
    if getattr(args, "features", None):
        overrides["features"] = args.features
    if getattr(args, "negation_words", None):
        overrides["negation_words"] = [w.strip() for w in args.negation_words.split(",") if w.strip()]
    return config.updated(overrides)


def _read_tweets(path, config: RunConfig):
    def report(exc):
        log.warning("skipping malformed input: %s", exc)
    with open(path, encoding="utf-8") as fh:
        reader = read_tagged if config.tagged else read_tweet_tsv
        return reader(fh, skip_bad=config.skip_bad, on_error=report)


def _dev_report(model, config, path, out):
    tweets = _read_tweets(path, config)
    labeled = [t for t in tweets if t.label is not None]
    if not labeled:
        raise ConfigError(f"{path}: no labeled tweets for dev scoring")
    fz = featurizer_for_model(model, config)
    preds = predict_tweets(model, fz, labeled, config.tagged, config.jobs)
    rep = evaluate([t.label for t in labeled], [p.label for p in preds])
    print(f"dev ({len(labeled)} tweets): rho={rep.rho:.3f} f1_pn={rep.f1_pn:.3f} acc={rep.acc:.3f}", file=out)


def cmd_train(args, out=None) -> int:
    out = out or sys.stdout
    config = _config_from_args(args)
    config.validate()
    tweets = _read_tweets(args.train_file, config)
    model, summary = train(config, tweets)
    save_model(model, args.model_out)
    for line in summary.lines():
        print(line, file=out)
    print(f"model written to {args.model_out}", file=out)
    if args.dev:
        _dev_report(model, config, args.dev, out)
    return EXIT_OK


def _load_for_prediction(args):
    config = _config_from_args(args)
    model = load_model(args.model_file)
    return config, model, featurizer_for_model(model, config)


def cmd_predict(args, out=None) -> int:
    out = out or sys.stdout
    config, model, fz = _load_for_prediction(args)
    tweets = _read_tweets(args.input_file, config)
    preds = predict_tweets(model, fz, tweets, config.tagged, config.jobs)
    lines = "".join(format_prediction(p) + "\n" for p in preds)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(lines)
    else:
        out.write(lines)
    return EXIT_OK


def cmd_evaluate(args, out=None) -> int:
    out = out or sys.stdout
    config, model, fz = _load_for_prediction(args)
    tweets = [t for t in _read_tweets(args.labeled_file, config) if t.label is not None]
    if not tweets:
        raise ConfigError(f"{args.labeled_file}: no labeled tweets to evaluate")
    gold = [t.label for t in tweets]
    preds = predict_tweets(model, fz, tweets, config.tagged, config.jobs)
    system = evaluate(gold, [p.label for p in preds])
    rows = [("system", system)] + [(name, rep) for (name, _), rep in zip(BASELINES, baseline_report(gold))]
    if args.json:
        json.dump({name: rep.to_dict() for name, rep in rows}, out, indent=2, sort_keys=True)
        out.write("\n")
    else:
        print(format_table(rows), file=out)
    return EXIT_OK


def cmd_inspect(args, out=None) -> int:
    out = out or sys.stdout
    config = _config_from_args(args)
    if not (config.lexicons or config.clusters or config.embeddings):
        raise ConfigError("nothing to inspect: pass --lexicon, --clusters or --embeddings")
    for spec in config.lexicons:
        name, path = parse_resource_spec(spec)
        lex = res.load_lexicon(path, name)
        npos = sum(1 for s in lex.scores.values() if s > 0)
        print(f"lexicon {name}: {len(lex)} terms ({npos} positive, {len(lex) - npos} negative) "
              f"sha256={res.fingerprint(path)['sha256'][:12]}", file=out)
    for spec in config.clusters:
        name, path = parse_resource_spec(spec)
        cm = res.load_clusters(path)
        print(f"clusters {name}: {len(cm)} words in {len(set(cm.assignment.values()))} clusters "
              f"sha256={res.fingerprint(path)['sha256'][:12]}", file=out)
    for spec in config.embeddings:
        name, path = parse_resource_spec(spec)
        emb = res.load_embeddings(path)
        print(f"embeddings {name}: {len(emb)} words, d={emb.dim} (pooled width {4 * emb.dim}) "
              f"sha256={res.fingerprint(path)['sha256'][:12]}", file=out)
    return EXIT_OK


COMMANDS = {"train": cmd_train, "predict": cmd_predict, "evaluate": cmd_evaluate,
            "inspect-resources": cmd_inspect}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, TweetFormatError, res.ResourceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
