"""Short-text topic modeling over word co-occurrence networks.

Three model kinds share one collapsed Gibbs sampler:

  lda:    the sampler on the documents themselves.
  wntm:   pseudo-documents from the raw co-occurrence network.
  cwibtd: pseudo-documents from the PMI-weighted, pruned network,
          built for rare-topic discovery in imbalanced corpora.

See the `cwibtd` command-line tool for the end-to-end pipeline.
"""

from .conet import (
    PrunedCoNetwork,
    RawCoNetwork,
    accumulate_pair_counts,
    enumerate_windows,
    pmi_degree,
    prune,
)
from .corpus import (
    Document,
    LabeledCorpus,
    PreprocessConfig,
    Vocabulary,
    build_vocabulary,
    corpus_stats,
    encode_corpus,
    load_labeled_corpus,
    make_imbalanced_subset,
    preprocess_corpus,
    tokenize,
)
from .inference import (
    DocTopicDistribution,
    assign_cluster,
    infer_corpus,
    infer_doc_topics,
    predict_corpus,
)
from .metrics import ContingencyTable, MetricReport, nmi, purity, scoped_metrics
from .pseudodoc import PseudoDocumentSet, build_pseudo_docs
from .sampler import (
    ModelParams,
    SamplerConfig,
    TopicModelState,
    TrainedModel,
    estimate_phi,
    estimate_theta,
    gibbs_sweep,
    init_state,
    train,
    train_model,
)
from .storage import (
    load_corpus_artifact,
    load_model_artifact,
    save_corpus_artifact,
    save_model_artifact,
)

__version__ = "0.1.0"

__all__ = [
    "Document",
    "DocTopicDistribution",
    "ContingencyTable",
    "LabeledCorpus",
    "MetricReport",
    "ModelParams",
    "PreprocessConfig",
    "PrunedCoNetwork",
    "PseudoDocumentSet",
    "RawCoNetwork",
    "SamplerConfig",
    "TopicModelState",
    "TrainedModel",
    "Vocabulary",
    "accumulate_pair_counts",
    "assign_cluster",
    "build_pseudo_docs",
    "build_vocabulary",
    "corpus_stats",
    "encode_corpus",
    "enumerate_windows",
    "estimate_phi",
    "estimate_theta",
    "gibbs_sweep",
    "infer_corpus",
    "infer_doc_topics",
    "init_state",
    "load_corpus_artifact",
    "load_labeled_corpus",
    "load_model_artifact",
    "make_imbalanced_subset",
    "nmi",
    "pmi_degree",
    "predict_corpus",
    "preprocess_corpus",
    "prune",
    "purity",
    "save_corpus_artifact",
    "save_model_artifact",
    "scoped_metrics",
    "tokenize",
    "train",
    "train_model",
]
