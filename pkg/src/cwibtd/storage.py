"""On-disk artifact formats: prepared corpora and trained models.

Both artifacts are single JSON files with a versioned header. Floats are
serialized with Python's shortest round-trip repr, so probabilities
survive a save/load cycle bit-exactly; artifact bytes are deterministic
(sorted keys, no timestamps), which is what makes rerun checksums
comparable. Wall-clock timing and other non-reproducible facts belong in
the side-car manifests the CLI writes, never in the artifact itself.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .corpus import Document, LabeledCorpus, Vocabulary
from .errors import ParseError
from .sampler import SamplerConfig, TrainedModel

CORPUS_FORMAT = "cwibtd-corpus"
MODEL_FORMAT = "cwibtd-model"
FORMAT_VERSION = 1


def _dump(payload: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def _load(path: str | Path, expected_format: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, f"not valid JSON: {exc.msg}") from exc
    if not isinstance(payload, dict) or payload.get("format") != expected_format:
        raise ParseError(path, 1, f"not a {expected_format} file")
    if payload.get("version") != FORMAT_VERSION:
        raise ParseError(
            path, 1,
            f"unsupported {expected_format} version {payload.get('version')!r}",
        )
    return payload


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def save_corpus_artifact(
    path: str | Path,
    corpus: LabeledCorpus,
    preprocess_manifest: dict,
    source: dict | None = None,
    stats: dict | None = None,
) -> None:
    payload = {
        "format": CORPUS_FORMAT,
        "version": FORMAT_VERSION,
        "preprocess": preprocess_manifest,
        "source": source or {},
        "stats": stats or {},
        "vocabulary": list(corpus.vocab.words),
        "vocabulary_sha256": corpus.vocab.sha256(),
        "class_names": list(corpus.class_names),
        "labels": None if corpus.labels is None else corpus.labels.tolist(),
        "documents": [d.tokens.tolist() for d in corpus.docs],
    }
    _dump(payload, path)


def load_corpus_artifact(path: str | Path) -> tuple[LabeledCorpus, dict]:
    """Returns the corpus and the full artifact payload (for manifests)."""
    payload = _load(path, CORPUS_FORMAT)
    words = tuple(payload["vocabulary"])
    vocab = Vocabulary(words=words, index={w: i for i, w in enumerate(words)})
    docs = [Document(np.array(t, dtype=np.int32)) for t in payload["documents"]]
    labels = payload.get("labels")
    corpus = LabeledCorpus(
        docs=docs,
        vocab=vocab,
        labels=None if labels is None else np.array(labels, dtype=np.int32),
        class_names=tuple(payload.get("class_names", ())),
    )
    return corpus, payload


def save_model_artifact(path: str | Path, model: TrainedModel) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "params": model.params,
        "preprocess": model.preprocess,
        "vocabulary": list(model.vocab.words),
        "vocabulary_sha256": model.vocab_hash,
        "phi": model.phi.tolist(),
        "theta": model.theta.tolist(),
        "theta_rows": model.theta_rows,
        "row_word": None if model.row_word is None else model.row_word.tolist(),
        "network_stats": model.network_stats,
    }
    _dump(payload, path)


def load_model_artifact(path: str | Path) -> TrainedModel:
    payload = _load(path, MODEL_FORMAT)
    words = tuple(payload["vocabulary"])
    vocab = Vocabulary(words=words, index={w: i for i, w in enumerate(words)})
    params = payload["params"]
    config = SamplerConfig(
        n_topics=params["n_topics"],
        alpha=params["alpha"],
        beta=params["beta"],
        iterations=params["iterations"],
        seed=params["seed"],
    )
    row_word = payload.get("row_word")
    return TrainedModel(
        kind=payload["kind"],
        config=config,
        vocab=vocab,
        phi=np.array(payload["phi"], dtype=np.float64),
        theta=np.array(payload["theta"], dtype=np.float64),
        theta_rows=payload["theta_rows"],
        row_word=None if row_word is None else np.array(row_word, dtype=np.int32),
        network_stats=payload.get("network_stats"),
        params=params,
        preprocess=payload.get("preprocess"),
    )
