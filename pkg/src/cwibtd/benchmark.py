"""End-to-end benchmark harness: train every model over several seeded
runs, label the corpus, score both evaluation scopes and aggregate means.

The run schedule is deterministic (seed_i = base_seed + i) and the report
files contain nothing non-reproducible, so an identical plan produces
byte-identical reports. A failing run aborts the benchmark; whatever was
already measured is written out with a FAILED marker so partial numbers
can never be mistaken for a completed comparison.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import (
    LabeledCorpus,
    PreprocessConfig,
    corpus_stats,
    load_labeled_corpus,
    make_imbalanced_subset,
    preprocess_corpus,
)
from .errors import LabelMismatch, UnknownClass
from .inference import predict_corpus
from .metrics import MetricReport, scoped_metrics
from .sampler import MODEL_KINDS, ModelParams, train_model

REPORT_TEXT = "report.txt"
REPORT_JSON = "report.json"


@dataclass(frozen=True)
class ImbalanceRecipe:
    """Class-name based subset instruction applied after preprocessing."""

    large_classes: tuple[str, ...]
    per_large: int
    rare_classes: tuple[str, ...]
    per_rare: int


@dataclass
class BenchmarkPlan:
    corpus_path: str
    corpus_format: str = "labeled"
    preprocess: PreprocessConfig = PreprocessConfig()
    models: tuple[str, ...] = ("lda", "wntm", "cwibtd")
    runs: int = 10
    base_seed: int = 0
    rare_classes: tuple[str, ...] = ()
    params: dict[str, ModelParams] = field(default_factory=dict)
    imbalance: ImbalanceRecipe | None = None
    include_uncovered: bool = False
    output_dir: str | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.models:
            raise ValueError("model list must not be empty")
        for m in self.models:
            if m not in MODEL_KINDS:
                raise ValueError(f"unknown model kind {m!r}")

    def model_params(self, kind: str, seed: int) -> ModelParams:
        base = self.params.get(kind, ModelParams())
        return dataclasses.replace(base, seed=seed)

    def manifest(self) -> dict:
        return {
            "corpus_path": self.corpus_path,
            "corpus_format": self.corpus_format,
            "preprocess": self.preprocess.manifest(),
            "models": list(self.models),
            "runs": self.runs,
            "base_seed": self.base_seed,
            "rare_classes": list(self.rare_classes),
            "params": {
                k: dataclasses.asdict(v) for k, v in sorted(self.params.items())
            },
            "imbalance": None
            if self.imbalance is None
            else dataclasses.asdict(self.imbalance),
            "include_uncovered": self.include_uncovered,
        }


@dataclass
class RunRecord:
    model: str
    run_index: int
    seed: int
    n_evaluated: int
    n_skipped: int
    all_purity: float
    all_nmi: float
    rare_purity: float | None
    rare_nmi: float | None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class BenchmarkResult:
    plan_manifest: dict
    corpus_stats: dict
    reports: dict[str, dict[str, MetricReport]]  # model -> scope -> report
    run_records: list[RunRecord]
    network_stats: dict[str, dict | None]
    status: str = "ok"
    failure: str | None = None


def _class_ids(corpus: LabeledCorpus, names: tuple[str, ...]) -> list[int]:
    ids = []
    for name in names:
        if name not in corpus.class_names:
            raise UnknownClass(f"class {name!r} not present in the corpus")
        ids.append(corpus.class_names.index(name))
    return ids


def load_plan_corpus(plan: BenchmarkPlan) -> LabeledCorpus:
    """Ingest, preprocess and (optionally) subset the plan's corpus."""
    texts, labels, class_names = load_labeled_corpus(
        plan.corpus_path, plan.corpus_format
    )
    if labels is None:
        raise LabelMismatch("benchmark needs a labeled corpus to evaluate against")
    corpus = preprocess_corpus(texts, labels, class_names, plan.preprocess)
    if plan.imbalance is not None:
        corpus = make_imbalanced_subset(
            corpus,
            _class_ids(corpus, plan.imbalance.large_classes),
            plan.imbalance.per_large,
            _class_ids(corpus, plan.imbalance.rare_classes),
            plan.imbalance.per_rare,
        )
    return corpus


def evaluate_run(
    model_kind: str,
    corpus: LabeledCorpus,
    params: ModelParams,
    rare_ids: list[int],
    include_uncovered: bool = False,
):
    """Train once, label every document, score both scopes.

    Documents with no topic signal (empty after encoding, or no word in
    the model's network) are skipped by default: the model genuinely has
    nothing to say about them, and a uniform guess would only add noise
    to the comparison.
    """
    model = train_model(model_kind, corpus, params)
    labels, coverage = predict_corpus(model, corpus)
    lengths = np.array([d.length for d in corpus.docs])
    mask = lengths > 0
    if not include_uncovered:
        mask &= coverage > 0.0
    all_report, rare_report = scoped_metrics(
        labels[mask], corpus.labels[mask], rare_ids
    )
    return model, all_report, rare_report, int(mask.sum()), int((~mask).sum())


def run_benchmark(plan: BenchmarkPlan, progress=None) -> BenchmarkResult:
    corpus = load_plan_corpus(plan)
    rare_ids = _class_ids(corpus, plan.rare_classes)

    result = BenchmarkResult(
        plan_manifest=plan.manifest(),
        corpus_stats=corpus_stats(corpus),
        reports={},
        run_records=[],
        network_stats={},
    )
    try:
        for kind in plan.models:
            all_runs: list[MetricReport] = []
            rare_runs: list[MetricReport] = []
            for i in range(plan.runs):
                seed = plan.base_seed + i
                if progress is not None:
                    progress(f"{kind}: run {i + 1}/{plan.runs} (seed {seed})")
                try:
                    model, all_rep, rare_rep, n_eval, n_skip = evaluate_run(
                        kind, corpus, plan.model_params(kind, seed),
                        rare_ids, plan.include_uncovered,
                    )
                except Exception as exc:
                    # keep the exception type (the CLI maps types to exit
                    # codes) but make the message pin the failing run
                    result.failure = f"model {kind!r} run {i} (seed {seed}): {exc}"
                    exc.args = (result.failure,)
                    raise
                all_runs.append(all_rep)
                rare_runs.append(rare_rep)
                result.network_stats[kind] = model.network_stats
                result.run_records.append(
                    RunRecord(
                        model=kind, run_index=i, seed=seed,
                        n_evaluated=n_eval, n_skipped=n_skip,
                        all_purity=all_rep.purity_runs[0],
                        all_nmi=all_rep.nmi_runs[0],
                        rare_purity=None if rare_rep.is_empty else rare_rep.purity_runs[0],
                        rare_nmi=None if rare_rep.is_empty else rare_rep.nmi_runs[0],
                    )
                )
            result.reports[kind] = {
                "all": MetricReport.merge(all_runs),
                "rare": MetricReport.merge(rare_runs),
            }
    except Exception as exc:
        result.status = "failed"
        if result.failure is None:
            result.failure = str(exc)
        raise
    finally:
        _write_outputs(plan, result)
    return result


def render_report(result: BenchmarkResult) -> str:
    """Aligned plain-text table: one Purity and one NMI row per model,
    one column per scope, means over all runs."""
    has_rare = any(
        not scopes["rare"].is_empty for scopes in result.reports.values()
    )
    runs = result.plan_manifest["runs"]
    header = ["Model", "Metric", "all"] + (["rare"] if has_rare else [])
    rows: list[list[str]] = []
    for kind, scopes in result.reports.items():
        for metric in ("Purity", "NMI"):
            cells = [kind if metric == "Purity" else "", metric]
            for scope in ("all", "rare") if has_rare else ("all",):
                rep = scopes[scope]
                if rep.is_empty:
                    cells.append("n/a")
                else:
                    value = rep.purity if metric == "Purity" else rep.nmi
                    cells.append(f"{value:.4f}")
            rows.append(cells)

    widths = [
        max([len(header[c])] + [len(r[c]) for r in rows])
        for c in range(len(header))
    ]
    lines = [
        f"Benchmark means over {runs} run(s); seeds "
        f"{result.plan_manifest['base_seed']}.."
        f"{result.plan_manifest['base_seed'] + runs - 1}",
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for r in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(r)).rstrip())
    if result.status != "ok":
        lines.append("")
        lines.append(f"FAILED: {result.failure}")
        lines.append("Partial results above; do not compare across models.")
    return "\n".join(lines) + "\n"


def report_payload(result: BenchmarkResult) -> dict:
    return {
        "plan": result.plan_manifest,
        "corpus_stats": result.corpus_stats,
        "network_stats": result.network_stats,
        "status": result.status,
        "failure": result.failure,
        "models": {
            kind: {scope: rep.to_dict() for scope, rep in scopes.items()}
            for kind, scopes in result.reports.items()
        },
        "runs": [r.to_dict() for r in result.run_records],
    }


def _write_outputs(plan: BenchmarkPlan, result: BenchmarkResult) -> None:
    if plan.output_dir is None:
        return
    out = Path(plan.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / REPORT_TEXT).write_text(render_report(result), encoding="utf-8")
    with open(out / REPORT_JSON, "w", encoding="utf-8") as fh:
        json.dump(report_payload(result), fh, sort_keys=True, indent=1)
        fh.write("\n")
