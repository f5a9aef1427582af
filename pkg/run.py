#!/usr/bin/env python3
"""
================================================================================
DESCRIPTIVE KEYPHRASES - UNIFIED RUNNER
================================================================================
Single entry point for the whole pipeline.

Usage:
    python run.py index-background            # Count background n-grams
    python run.py featurize                   # Filter responses, sample, featurize
    python run.py train                       # Fit the configured model, rank candidates
    python run.py eval [--extended]           # Five configurations + 2..20 bin sweep
    python run.py analyze                     # Corpus and response statistics
    python run.py status                      # Which artifacts exist

Global options (before the subcommand):
    --config run.json                         # Declarative run configuration
    --set features.commonness_bins=10         # Override any setting
================================================================================
"""

import sys
import argparse
import logging
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional

from analysis import (
    commonness_histogram,
    extractive_fraction,
    first_sentence_stats,
    grammatical_category_fractions,
    keyphrase_count_histogram,
    long_phrase_percentage,
    phrase_length_histogram,
    sentence_count_summary,
    write_histogram,
)
from candidates import build_examples, filter_funnel, load_blocklist, load_responses
from commonness import build_index, load_index, save_index
from core import (
    Config,
    ArtifactError,
    KeyphraseError,
    ConfigError,
    LogContext,
    apply_overrides,
    ensure_directory,
    get_file_hash,
    get_logger,
    log_execution_time,
    read_provenance,
    save_json,
    sanitize_filename,
    write_jsonl,
    write_provenance,
)
from corpus_ingest import Corpus, load_corpus
from evaluation import compare_models, split_frame, write_curve, write_table
from feature_pipeline import (
    FLOAT_FORMAT,
    default_spec,
    experiment_specs,
    featurize,
    load_matrix,
    save_matrix,
)
from model import top_k_rankings, train

logger = get_logger("run")


# ==================== HELPERS ====================

def _provenance_file(config: Config) -> Path:
    return config.paths.output / "featurize_provenance.json"


def _load_foreground(config: Config) -> Corpus:
    corpus = load_corpus(config.paths.foreground_dir, "foreground", config.workers)
    annotations = Path(config.paths.annotations_dir)
    if annotations.is_dir():
        return corpus.with_annotations(annotations)
    logger.warning(f"Annotation directory {annotations} not found; grammatical features will be 0")
    return corpus


def _load_featurized(config: Config):
    read_provenance(_provenance_file(config), expected_hash=config.featurize_hash())
    return load_matrix(config.paths.features_file)


# ==================== COMMANDS ====================

@log_execution_time(logger)
def cmd_index(config: Config) -> Path:
    """Build and persist the background n-gram index"""
    background = load_corpus(config.paths.background_dir, "background", config.workers)
    index = build_index(background, config.candidates.n_max, config.workers)
    path = save_index(index, config.paths.index_file, config.index_hash())
    logger.info(f"Index written to {path} (N={index.num_documents}, T_ref={index.total_tokens})",
                extra={"artifact": str(path)})
    return path


@log_execution_time(logger)
def cmd_featurize(config: Config) -> Path:
    """Filter responses, sample negatives and write the feature matrix"""
    features = config.features
    index = None
    if features.frequency or features.commonness:
        index = load_index(config.paths.index_file, expected_config_hash=config.index_hash())

    corpus = _load_foreground(config)
    responses = load_responses(config.paths.responses_file)
    blocklist = load_blocklist(config.paths.blocklist_file)

    c = config.candidates
    examples, funnel = build_examples(
        corpus, responses, blocklist,
        max_words=c.max_phrase_words, ratio=c.negative_ratio, seed=config.seed, n_max=c.n_max,
        positive_weight=c.positive_weight, negative_weight=c.negative_weight,
    )
    for stage, count in funnel.items():
        logger.info(f"{stage}: {count}", extra={"count": count})

    output = ensure_directory(config.paths.output)
    write_jsonl((e.to_dict() for e in examples), config.paths.examples_file)
    save_json(corpus.to_manifest(), output / "corpus_manifest.json")

    frame = featurize(examples, corpus, index, features, config.workers)
    path = save_matrix(frame, config.paths.features_file)
    write_provenance(
        _provenance_file(config), "features.csv", config.featurize_hash(),
        seed=config.seed,
        funnel=funnel,
        columns=list(frame.columns),
        index_config_hash=config.index_hash() if index is not None else None,
        inputs={
            "responses": get_file_hash(config.paths.responses_file),
            "blocklist": get_file_hash(config.paths.blocklist_file),
        },
    )
    logger.info(f"Feature matrix written to {path}", extra={"artifact": str(path)})
    return path


@log_execution_time(logger)
def cmd_train(config: Config) -> Path:
    """Fit the configured feature set and write the model plus top-k rankings"""
    frame = _load_featurized(config)
    spec = default_spec(config.features)
    train_rows, _ = split_frame(frame, config.training, config.seed)

    model = train(train_rows, spec, config.training, config.featurize_hash())
    model.save(config.paths.model_file)

    rankings = top_k_rankings(model, frame, config.training.top_k)
    rankings.to_csv(config.paths.output / "rankings.csv", index=False,
                    float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Model written to {config.paths.model_file}",
                extra={"artifact": str(config.paths.model_file)})
    return config.paths.model_file


@log_execution_time(logger)
def cmd_eval(config: Config, extended: bool = False) -> Path:
    """Compare the model configurations and write curves plus the AUC table"""
    frame = _load_featurized(config)
    specs = []
    for spec in experiment_specs(extended):
        missing = [name for name in spec.features if name not in frame.columns]
        if missing:
            logger.warning(f"Skipping '{spec.name}': feature matrix lacks {', '.join(missing)}")
            continue
        specs.append(spec)
    if not specs:
        raise ConfigError("no model configuration can run on this feature matrix", stage="eval")

    comparison = compare_models(specs, frame, config.training, config.seed, config.featurize_hash())

    curves_dir = ensure_directory(config.paths.output / "curves")
    for name, curve in comparison.curves.items():
        write_curve(curve, curves_dir / f"{sanitize_filename(name)}.csv")
    table_path = write_table(comparison.table, config.paths.output / "auc_table.csv")
    write_provenance(
        config.paths.output / "eval_provenance.json", "auc_table.csv", config.featurize_hash(),
        seed=config.seed,
        split_mode=config.training.split_mode,
        models=[spec.name for spec in specs],
    )
    logger.info(f"{len(specs)} models compared; table at {table_path}", extra={"count": len(specs)})
    return table_path


@log_execution_time(logger)
def cmd_analyze(config: Config) -> Path:
    """Write response and corpus statistics"""
    corpus = _load_foreground(config)
    responses = load_responses(config.paths.responses_file)
    blocklist = load_blocklist(config.paths.blocklist_file)
    kept, funnel = filter_funnel(responses, blocklist, corpus, config.candidates.max_phrase_words)

    out = ensure_directory(config.paths.output / "analysis")
    write_histogram(phrase_length_histogram(responses), out / "phrase_length.csv")
    write_histogram(keyphrase_count_histogram(responses), out / "keyphrase_count.csv")

    first = first_sentence_stats(responses, corpus)
    categories = grammatical_category_fractions(kept, corpus)
    summary = {
        "responses": len(responses),
        "funnel": funnel,
        "long_phrase_percentage": long_phrase_percentage(responses, config.candidates.max_phrase_words),
        "extractive_percentage": extractive_fraction(responses, corpus),
        "first_sentence": asdict(first),
        "grammatical_categories": asdict(categories),
        "sentences_per_document": sentence_count_summary(corpus),
    }

    index_file = config.paths.index_file
    if index_file.exists():
        index = load_index(index_file, expected_config_hash=config.index_hash())
        totals = {}
        for cutoff in config.features.commonness_cutoffs:
            histogram = commonness_histogram(kept, index, cutoff, config.features.histogram_bins)
            write_histogram(histogram, out / f"commonness_cutoff_{cutoff:02d}.csv")
            totals[str(cutoff)] = histogram.total
        summary["commonness_histogram_totals"] = totals
    else:
        logger.warning(f"No index at {index_file}; commonness histograms skipped")

    save_json(summary, out / "summary.json")
    logger.info(f"Analysis written to {out}", extra={"artifact": str(out)})
    return out


def cmd_status(config: Config) -> None:
    """Print which pipeline artifacts exist"""
    out = config.paths.output
    print("\n" + "=" * 60)
    print("📊 DESCRIPTIVE KEYPHRASES — ARTIFACTS")
    print("=" * 60)
    for label, path in [
        ("index", config.paths.index_file),
        ("examples", config.paths.examples_file),
        ("features", config.paths.features_file),
        ("provenance", _provenance_file(config)),
        ("model", config.paths.model_file),
        ("rankings", out / "rankings.csv"),
        ("auc table", out / "auc_table.csv"),
        ("analysis", out / "analysis" / "summary.json"),
    ]:
        status = "✅" if path.exists() else "❌"
        print(f"   {status} {label:<11} {path}")
    print("=" * 60)


# ==================== MAIN ====================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Descriptive Keyphrases - Unified Runner",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    python run.py --config fixtures/run_config.json index-background
    python run.py --config fixtures/run_config.json featurize
    python run.py --set training.split_mode=holdout eval --extended
        """
    )
    parser.add_argument("--config", help="JSON run configuration file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="Override a configuration value")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--output", help="Output directory")
    parser.add_argument("--workers", type=int, help="Worker threads")
    parser.add_argument("--debug", action="store_true", help="Verbose logging")

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.add_parser("index-background", help="Build the background n-gram index")
    sub.add_parser("featurize", help="Filter responses, sample negatives, write features")
    sub.add_parser("train", help="Train the configured model and rank candidates")
    eval_parser = sub.add_parser("eval", help="Compare model configurations")
    eval_parser.add_argument("--extended", action="store_true",
                             help="Also run single-feature and POS-grammar models")
    sub.add_parser("analyze", help="Response and corpus statistics")
    sub.add_parser("status", help="Show which artifacts exist")
    return parser


def load_config(args: argparse.Namespace) -> Config:
    config = Config.from_file(args.config) if args.config else Config.from_env()
    config = apply_overrides(config, args.overrides)
    flags = {}
    if args.seed is not None:
        flags["seed"] = args.seed
    if args.workers is not None:
        flags["workers"] = args.workers
    if args.debug:
        flags["debug"] = True
    if args.output:
        flags["paths"] = {"output_dir": args.output}
    return config.with_overrides(flags).require_valid()


def run_command(command: str, config: Config, args: Optional[argparse.Namespace] = None):
    if command == "index-background":
        return cmd_index(config)
    if command == "featurize":
        return cmd_featurize(config)
    if command == "train":
        return cmd_train(config)
    if command == "eval":
        return cmd_eval(config, extended=bool(args and getattr(args, "extended", False)))
    if command == "analyze":
        return cmd_analyze(config)
    if command == "status":
        return cmd_status(config)
    raise ConfigError(f"unknown command {command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        print("\n💡 Tip: run 'status' to see which artifacts exist")
        return 0

    try:
        config = load_config(args)
        if config.debug:
            logging.getLogger("keyphrase").setLevel(logging.DEBUG)
        with LogContext(logger, stage=args.command):
            run_command(args.command, config, args)
    except KeyphraseError as e:
        logger.error(str(e))
        return 1
    except OSError as e:
        error = ArtifactError(f"could not access {e.filename}: {e.strerror}", stage=args.command)
        logger.error(str(error))
        return 1
    except Exception as e:
        logger.exception(f"[{args.command}] unexpected failure: {e}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
