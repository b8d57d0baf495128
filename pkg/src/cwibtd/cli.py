"""Command-line driver: prepare / train / infer / benchmark / eval.

Every flag can also come from a JSON config file (--config); explicit
flags win over the file, the file wins over built-in defaults. Exit
codes: 0 success, 1 usage error, 2 data error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import benchmark as bench
from .corpus import (
    PreprocessConfig,
    corpus_stats,
    encode_corpus,
    load_labeled_corpus,
    make_imbalanced_subset,
    preprocess_corpus,
    tokenize,
)
from .errors import CwibtdError, NumericalError, UnknownClass, VocabularyMismatch
from .inference import format_inference_line, infer_corpus
from .metrics import scoped_metrics
from .sampler import MODEL_KINDS, ModelParams, train_model
from .storage import (
    file_sha256,
    load_corpus_artifact,
    load_model_artifact,
    save_corpus_artifact,
    save_model_artifact,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv(value: str) -> list[str]:
    return [v for v in (s.strip() for s in value.split(",")) if v]


def _load_config(path: str | None, parser: _Parser, valid: set[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file {path}: {exc}")
    if not isinstance(config, dict):
        parser.error(f"config file {path} must hold a JSON object")
    unknown = set(config) - valid
    if unknown:
        parser.error(f"unknown config keys: {sorted(unknown)}")
    return config


def _merge(args: argparse.Namespace, config: dict, defaults: dict) -> argparse.Namespace:
    """Flags (non-None) beat config values beat hard defaults."""
    for key, hard in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, config.get(key, hard))
    return args


def _stopword_set(source: str | None) -> frozenset | None:
    """None/'builtin' -> bundled list; 'none' -> empty; else a file path
    with one stopword per line."""
    if source is None or source == "builtin":
        return None
    if source == "none":
        return frozenset()
    with open(source, "r", encoding="utf-8") as fh:
        return frozenset(w.strip() for w in fh if w.strip())


def _preprocess_config(args) -> PreprocessConfig:
    return PreprocessConfig(
        min_count=args.min_count,
        lowercase=not args.no_lowercase,
        stopwords=_stopword_set(args.stopwords),
    )


def _add_preprocess_flags(p: _Parser) -> dict:
    p.add_argument("--min-count", type=int, dest="min_count")
    p.add_argument("--no-lowercase", action="store_const", const=True,
                   dest="no_lowercase")
    p.add_argument("--stopwords", help="stopword file, or 'builtin'/'none'")
    return {"min_count": 2, "no_lowercase": False, "stopwords": None}


def _add_imbalance_flags(p: _Parser) -> dict:
    p.add_argument("--large-classes", dest="large_classes",
                   help="comma-separated class names")
    p.add_argument("--per-large", type=int, dest="per_large")
    p.add_argument("--rare-subset-classes", dest="rare_subset_classes",
                   help="comma-separated class names for the rare side of the subset")
    p.add_argument("--per-rare", type=int, dest="per_rare")
    return {"large_classes": None, "per_large": None,
            "rare_subset_classes": None, "per_rare": None}


def _class_ids_by_name(names: list[str], class_names: tuple[str, ...]) -> list[int]:
    ids = []
    for name in names:
        if name not in class_names:
            raise UnknownClass(f"class {name!r} not present in the corpus")
        ids.append(class_names.index(name))
    return ids


def _imbalance_request(args):
    """Validated (large, per_large, rare, per_rare) from the subset flags,
    or None when no subset was requested."""
    wants = [args.large_classes, args.per_large, args.rare_subset_classes, args.per_rare]
    if all(v is None for v in wants):
        return None
    large = _csv(args.large_classes) if args.large_classes else []
    rare = _csv(args.rare_subset_classes) if args.rare_subset_classes else []
    if large and args.per_large is None:
        raise CwibtdError("--large-classes requires --per-large")
    if rare and args.per_rare is None:
        raise CwibtdError("--rare-subset-classes requires --per-rare")
    return large, args.per_large or 0, rare, args.per_rare or 0


def _apply_imbalance(corpus, args):
    request = _imbalance_request(args)
    if request is None:
        return corpus
    large, per_large, rare, per_rare = request
    return make_imbalanced_subset(
        corpus,
        _class_ids_by_name(large, corpus.class_names),
        per_large,
        _class_ids_by_name(rare, corpus.class_names),
        per_rare,
    )


# ---------------------------------------------------------------- prepare

def _cmd_prepare(args) -> int:
    config = _preprocess_config(args)
    texts, labels, class_names = load_labeled_corpus(args.input, args.format)
    corpus = preprocess_corpus(texts, labels, class_names, config)
    corpus = _apply_imbalance(corpus, args)
    stats = corpus_stats(corpus)
    save_corpus_artifact(
        args.output,
        corpus,
        preprocess_manifest=config.manifest(),
        source={
            "path": str(args.input),
            "format": args.format,
            "sha256": file_sha256(args.input),
        },
        stats=stats,
    )
    print(f"wrote {args.output}")
    for key in ("n_documents", "vocabulary_size", "n_classes",
                "len_mean", "len_max", "n_empty_documents"):
        print(f"  {key}: {stats[key]}")
    return EXIT_OK


# ------------------------------------------------------------------ train

def _cmd_train(args) -> int:
    corpus, corpus_payload = load_corpus_artifact(args.corpus)
    params = ModelParams(
        n_topics=args.topics,
        alpha=args.alpha,
        beta=args.beta,
        iterations=args.iterations,
        seed=args.seed,
        window_size=args.window_size,
        window_mode=args.window_mode,
        pmi_scale=args.pmi_scale,
    )
    started = time.monotonic()
    model = train_model(args.model, corpus, params)
    elapsed = time.monotonic() - started
    model.preprocess = corpus_payload.get("preprocess")
    save_model_artifact(args.output, model)

    manifest = {
        "params": model.params,
        "corpus": str(args.corpus),
        "corpus_sha256": file_sha256(args.corpus),
        "vocabulary_sha256": model.vocab_hash,
        "network_stats": model.network_stats,
        "wall_time_s": round(elapsed, 3),
        "artifact": str(args.output),
        "artifact_sha256": file_sha256(args.output),
    }
    manifest_path = f"{args.output}.manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")

    print(f"wrote {args.output} ({args.model}, seed {model.params['seed']}, "
          f"{model.params['iterations']} iterations, {elapsed:.1f}s)")
    if model.network_stats:
        print(f"  network: {model.network_stats}")
    return EXIT_OK


# ------------------------------------------------------------------ infer

def _cmd_infer(args) -> int:
    model = load_model_artifact(args.model)
    if args.format == "prepared":
        corpus, _ = load_corpus_artifact(args.input)
        if corpus.vocab.sha256() != model.vocab_hash:
            raise VocabularyMismatch(
                f"{args.input} was prepared with a different vocabulary "
                f"than the model"
            )
    else:
        texts, labels, class_names = load_labeled_corpus(args.input, args.format)
        pc = model.preprocess or {}
        config = PreprocessConfig(
            min_count=pc.get("min_count", 2),
            lowercase=pc.get("lowercase", True),
        )
        token_docs = [tokenize(text, config) for text in texts]
        corpus = encode_corpus(token_docs, labels, model.vocab, class_names)

    labels_arr, coverage, probs = infer_corpus(model, corpus)
    lines = [
        format_inference_line(i, int(labels_arr[i]), float(coverage[i]), probs[i])
        for i in range(corpus.n_docs)
    ]
    text = "".join(line + "\n" for line in lines)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -------------------------------------------------------------- benchmark

def _cmd_benchmark(args) -> int:
    params: dict[str, ModelParams] = {}
    for kind in MODEL_KINDS:
        params[kind] = ModelParams(
            n_topics=args.topics,
            alpha=getattr(args, f"{kind}_alpha"),
            beta=getattr(args, f"{kind}_beta"),
            iterations=args.iterations,
            window_size=args.window_size,
            window_mode=args.window_mode,
            pmi_scale=args.pmi_scale,
        )
    imbalance = None
    request = _imbalance_request(args)
    if request is not None:
        large, per_large, rare, per_rare = request
        imbalance = bench.ImbalanceRecipe(
            large_classes=tuple(large),
            per_large=per_large,
            rare_classes=tuple(rare),
            per_rare=per_rare,
        )
    plan = bench.BenchmarkPlan(
        corpus_path=args.input,
        corpus_format=args.format,
        preprocess=_preprocess_config(args),
        models=tuple(_csv(args.models)),
        runs=args.runs,
        base_seed=args.base_seed,
        rare_classes=tuple(_csv(args.rare_classes or "")),
        params=params,
        imbalance=imbalance,
        include_uncovered=args.include_uncovered,
        output_dir=args.output_dir,
    )
    progress = (lambda msg: print(msg, file=sys.stderr)) if not args.quiet else None
    result = bench.run_benchmark(plan, progress=progress)
    sys.stdout.write(bench.render_report(result))
    if args.output_dir and not args.quiet:
        print(f"reports written to {args.output_dir}", file=sys.stderr)
    return EXIT_OK


# ------------------------------------------------------------------- eval

def _read_labels(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def _cmd_eval(args) -> int:
    pred = _read_labels(args.pred)
    truth = _read_labels(args.truth)
    rare = _csv(args.rare_classes or "")
    # string labels are fine: metrics remap through np.unique
    all_rep, rare_rep = scoped_metrics(
        np.asarray(pred), np.asarray(truth), rare
    )
    print(f"documents: {all_rep.n_documents}")
    print(f"all   purity {all_rep.purity:.4f}  nmi {all_rep.nmi:.4f}")
    if not rare_rep.is_empty:
        print(f"rare  purity {rare_rep.purity:.4f}  nmi {rare_rep.nmi:.4f}  "
              f"({rare_rep.n_documents} documents)")
    return EXIT_OK


# ------------------------------------------------------------------ wiring

def _build() -> tuple[_Parser, dict[str, dict]]:
    parser = _Parser(prog="cwibtd",
                     description="Short-text topic models over word "
                                 "co-occurrence networks, with benchmark harness.")
    sub = parser.add_subparsers(dest="command", required=True)
    defaults: dict[str, dict] = {}

    p = sub.add_parser("prepare", help="preprocess a corpus file")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=("labeled", "plain"))
    p.add_argument("--config", help="JSON file supplying any flag")
    d = {"format": "labeled"}
    d.update(_add_preprocess_flags(p))
    d.update(_add_imbalance_flags(p))
    p.set_defaults(func=_cmd_prepare)
    defaults["prepare"] = d

    p = sub.add_parser("train", help="train one model on a prepared corpus")
    p.add_argument("corpus")
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--config")
    p.add_argument("--topics", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--window-size", type=int, dest="window_size")
    p.add_argument("--window-mode", choices=("sliding", "document"),
                   dest="window_mode")
    p.add_argument("--pmi-scale", type=float, dest="pmi_scale")
    p.set_defaults(func=_cmd_train)
    defaults["train"] = {
        "topics": None, "alpha": None, "beta": None, "iterations": 2000,
        "seed": 0, "window_size": 10, "window_mode": "sliding",
        "pmi_scale": 10.0,
    }

    p = sub.add_parser("infer", help="batch inference with a trained model")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("--format", choices=("labeled", "plain", "prepared"))
    p.add_argument("-o", "--output")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_infer)
    defaults["infer"] = {"format": "plain", "output": None}

    p = sub.add_parser("benchmark",
                       help="train all models across seeds and report metrics")
    p.add_argument("input")
    p.add_argument("--format", choices=("labeled",))
    p.add_argument("-o", "--output-dir", dest="output_dir")
    p.add_argument("--config")
    p.add_argument("--models", help="comma-separated subset of lda,wntm,cwibtd")
    p.add_argument("--runs", type=int)
    p.add_argument("--base-seed", type=int, dest="base_seed")
    p.add_argument("--topics", type=int)
    p.add_argument("--rare-classes", dest="rare_classes",
                   help="class names for the rare evaluation scope")
    p.add_argument("--iterations", type=int)
    p.add_argument("--window-size", type=int, dest="window_size")
    p.add_argument("--window-mode", choices=("sliding", "document"),
                   dest="window_mode")
    p.add_argument("--pmi-scale", type=float, dest="pmi_scale")
    for kind in MODEL_KINDS:
        p.add_argument(f"--{kind}-alpha", type=float, dest=f"{kind}_alpha")
        p.add_argument(f"--{kind}-beta", type=float, dest=f"{kind}_beta")
    p.add_argument("--include-uncovered", action="store_const", const=True,
                   dest="include_uncovered")
    p.add_argument("--quiet", action="store_const", const=True)
    d = {
        "format": "labeled", "output_dir": None, "models": "lda,wntm,cwibtd",
        "runs": 10, "base_seed": 0, "topics": None, "rare_classes": None,
        "iterations": 2000, "window_size": 10, "window_mode": "sliding",
        "pmi_scale": 10.0, "include_uncovered": False, "quiet": False,
    }
    for kind in MODEL_KINDS:
        d[f"{kind}_alpha"] = None
        d[f"{kind}_beta"] = None
    d.update(_add_preprocess_flags(p))
    d.update(_add_imbalance_flags(p))
    p.set_defaults(func=_cmd_benchmark)
    defaults["benchmark"] = d

    p = sub.add_parser("eval", help="score externally produced label files")
    p.add_argument("--pred", required=True, help="predicted labels, one per line")
    p.add_argument("--truth", required=True, help="gold labels, one per line")
    p.add_argument("--rare-classes", dest="rare_classes")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_eval)
    defaults["eval"] = {"rare_classes": None}

    return parser, defaults


def main(argv=None) -> int:
    parser, defaults = _build()
    args = parser.parse_args(argv)
    d = defaults[args.command]
    config = _load_config(getattr(args, "config", None), parser, set(d))
    _merge(args, config, d)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream consumer closed the pipe (cwibtd infer ... | head);
        # silence the flush-at-exit complaint and leave quietly
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except NumericalError as exc:
        print(f"cwibtd: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CwibtdError, OSError) as exc:
        print(f"cwibtd: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        # parameter validation from plan/config objects (bad model name,
        # runs < 1, ...) is a usage problem, not a data problem
        print(f"cwibtd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
