"""Turn structured use descriptions into unit vectors.

Two providers: a self-contained TF-IDF built over the corpus itself (the
default; fully deterministic, no network), and an external embedding
endpoint for denser semantics. Both yield L2-normalized rows so downstream
cosine math is a plain dot product.
"""

from __future__ import annotations

import logging
import re
import time
from dataclasses import dataclass, field

import numpy as np
import requests

from .errors import InputError, ProtocolError, TransportError
from .model import COMPONENT_FIELDS, UseRecord

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_BATCH_SIZE = 32
_RETRY_BACKOFF_SECONDS = 0.05

PROVIDERS = ("tfidf", "external")


@dataclass(frozen=True)
class EmbeddingConfig:
    provider: str = "tfidf"
    external_url: str | None = None
    dimensions: int | None = None  # external: expected provider dims; tfidf: derived
    text_fields: tuple[str, ...] = COMPONENT_FIELDS
    timeout: float = 30.0
    max_retries: int = 3

    def validate(self) -> None:
        if self.provider not in PROVIDERS:
            raise InputError(f"unknown embedding provider {self.provider!r}")
        if not self.text_fields:
            raise InputError("text_fields must not be empty")
        unknown = [f for f in self.text_fields if f not in COMPONENT_FIELDS]
        if unknown:
            raise InputError(f"unknown text fields: {unknown}")
        if len(set(self.text_fields)) != len(self.text_fields):
            raise InputError("text_fields must not repeat")
        if self.provider == "external" and not self.external_url:
            raise InputError("external provider needs external_url")
        if self.dimensions is not None and self.dimensions < 1:
            raise InputError("dimensions must be positive when given")
        if self.max_retries < 1:
            raise InputError("max_retries must be at least 1")

    @classmethod
    def from_dict(cls, d: dict) -> "EmbeddingConfig":
        kwargs = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        if "text_fields" in kwargs:
            kwargs["text_fields"] = tuple(kwargs["text_fields"])
        config = cls(**kwargs)
        config.validate()
        return config


@dataclass
class EmbeddingMatrix:
    row_ids: list[str]
    vectors: np.ndarray  # N x D float64, unit rows

    @property
    def dims(self) -> int:
        return int(self.vectors.shape[1]) if self.vectors.size else 0

    def validate(self) -> None:
        if self.vectors.ndim != 2:
            raise InputError(f"vectors must be 2-D, got shape {self.vectors.shape}")
        if len(self.row_ids) != self.vectors.shape[0]:
            raise InputError(
                f"{len(self.row_ids)} row ids for {self.vectors.shape[0]} vectors"
            )
        if len(set(self.row_ids)) != len(self.row_ids):
            raise InputError("row_ids must be unique")
        if self.vectors.size:
            if not np.all(np.isfinite(self.vectors)):
                raise InputError("vectors contain non-finite values")
            norms = np.linalg.norm(self.vectors, axis=1)
            if not np.allclose(norms, 1.0, atol=1e-9):
                raise InputError("vector rows must be L2-normalized")

    def to_dict(self) -> dict:
        return {
            "row_ids": list(self.row_ids),
            "dims": self.dims,
            "vectors": [[float(v) for v in row] for row in self.vectors],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EmbeddingMatrix":
        rows = d.get("vectors", [])
        dims = int(d.get("dims", len(rows[0]) if rows else 0))
        vectors = np.asarray(rows, dtype=np.float64).reshape(len(rows), dims)
        return cls(row_ids=list(d["row_ids"]), vectors=vectors)


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric runs; punctuation separates tokens."""
    return _TOKEN_RE.findall(text.lower())


def build_document(use: UseRecord, text_fields: tuple[str, ...] = COMPONENT_FIELDS) -> str:
    """Join the selected components with '. ' and lowercase the result."""
    return ". ".join(getattr(use, name) for name in text_fields).lower()


@dataclass
class TfidfModel:
    """TF-IDF fitted on a corpus; vocabulary ordered by first appearance.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1 with raw term counts, rows
    L2-normalized. Terms outside the vocabulary are ignored at query time.
    """

    vocabulary: dict[str, int] = field(default_factory=dict)
    idf: np.ndarray = field(default_factory=lambda: np.zeros(0))
    matrix: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    doc_tokens: list[set[str]] = field(default_factory=list)

    def transform(self, text: str) -> np.ndarray:
        """Embed free text into the fitted space; unknown terms contribute nothing."""
        vector = np.zeros(len(self.vocabulary))
        for token in tokenize(text):
            index = self.vocabulary.get(token)
            if index is not None:
                vector[index] += 1.0
        vector *= self.idf
        norm = np.linalg.norm(vector)
        if norm > 0.0:
            vector /= norm
        return vector


def fit_tfidf(documents: list[str], row_ids: list[str] | None = None) -> TfidfModel:
    names = row_ids or [str(i) for i in range(len(documents))]
    token_lists = []
    for name, doc in zip(names, documents):
        tokens = tokenize(doc)
        if not tokens:
            raise InputError(f"document {name!r} has no tokens")
        token_lists.append(tokens)

    vocabulary: dict[str, int] = {}
    for tokens in token_lists:
        for token in tokens:
            if token not in vocabulary:
                vocabulary[token] = len(vocabulary)

    n_docs = len(documents)
    n_terms = len(vocabulary)
    counts = np.zeros((n_docs, n_terms))
    for row, tokens in enumerate(token_lists):
        for token in tokens:
            counts[row, vocabulary[token]] += 1.0

    df = (counts > 0).sum(axis=0)
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    weighted = counts * idf
    norms = np.linalg.norm(weighted, axis=1, keepdims=True)
    matrix = weighted / norms
    return TfidfModel(vocabulary, idf, matrix, [set(t) for t in token_lists])


def embed_tfidf(documents: list[str], row_ids: list[str]) -> EmbeddingMatrix:
    if len(documents) != len(row_ids):
        raise InputError(f"{len(row_ids)} row ids for {len(documents)} documents")
    if not documents:
        return EmbeddingMatrix([], np.zeros((0, 0)))
    model = fit_tfidf(documents, row_ids)
    return EmbeddingMatrix(list(row_ids), model.matrix)


def _post_embeddings(batch: list[str], config: EmbeddingConfig) -> list[list[float]]:
    body = {"inputs": batch}
    last_error: Exception | None = None
    for attempt in range(config.max_retries):
        try:
            response = requests.post(config.external_url, json=body, timeout=config.timeout)
            if response.status_code >= 500:
                raise requests.ConnectionError(f"server error {response.status_code}")
            if response.status_code >= 400:
                raise TransportError(
                    f"embedding endpoint rejected the request: {response.status_code}"
                )
            payload = response.json()
            break
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_error = exc
            logger.warning(
                "embedding endpoint attempt %d/%d failed: %s",
                attempt + 1, config.max_retries, exc,
            )
            time.sleep(_RETRY_BACKOFF_SECONDS)
    else:
        raise TransportError(
            f"embedding endpoint unreachable after {config.max_retries} attempts: {last_error}"
        )
    if not isinstance(payload, dict) or not isinstance(payload.get("embeddings"), list):
        raise ProtocolError("embedding response missing 'embeddings' list")
    embeddings = payload["embeddings"]
    if len(embeddings) != len(batch):
        raise ProtocolError(
            f"embedding endpoint returned {len(embeddings)} rows for a batch of {len(batch)}"
        )
    return embeddings


def embed_external(
    documents: list[str], row_ids: list[str], config: EmbeddingConfig
) -> EmbeddingMatrix:
    """Embed via the configured endpoint in batches, normalizing each row.

    The endpoint must return one finite, non-zero vector per input, all of
    one dimensionality; anything else is reported against the offending row.
    """
    config.validate()
    if len(documents) != len(row_ids):
        raise InputError(f"{len(row_ids)} row ids for {len(documents)} documents")
    if not documents:
        return EmbeddingMatrix([], np.zeros((0, 0)))

    rows: list[list[float]] = []
    for start in range(0, len(documents), _BATCH_SIZE):
        rows.extend(_post_embeddings(documents[start : start + _BATCH_SIZE], config))

    dims = len(rows[0])
    if config.dimensions is not None and dims != config.dimensions:
        raise ProtocolError(
            f"endpoint reported {dims}-d vectors, config expects {config.dimensions}"
        )
    vectors = np.zeros((len(rows), dims))
    for i, (row_id, row) in enumerate(zip(row_ids, rows)):
        if len(row) != dims:
            raise ProtocolError(
                f"row {row_id!r}: dimension {len(row)} differs from first row's {dims}"
            )
        vector = np.asarray(row, dtype=np.float64)
        if not np.all(np.isfinite(vector)):
            raise ProtocolError(f"row {row_id!r}: non-finite embedding values")
        norm = np.linalg.norm(vector)
        if norm == 0.0:
            raise ProtocolError(f"row {row_id!r}: endpoint returned a zero vector")
        vectors[i] = vector / norm
    return EmbeddingMatrix(list(row_ids), vectors)


def embed_uses(uses: list[UseRecord], config: EmbeddingConfig) -> EmbeddingMatrix:
    """Provider dispatch over the documents built from each use."""
    config.validate()
    documents = [build_document(u, config.text_fields) for u in uses]
    row_ids = [u.use_id for u in uses]
    if config.provider == "tfidf":
        return embed_tfidf(documents, row_ids)
    return embed_external(documents, row_ids, config)
