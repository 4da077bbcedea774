"""Rationale embedding and cosine k-means with medoid summaries.

Free-text rationales are embedded into fixed-dimension vectors, grouped by
spherical k-means (Lloyd iterations on unit vectors, cosine similarity), and
each cluster is summarized by its medoid: the verbatim member text closest to
the rest of the cluster.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .aggregation import ClusterSummary
from .errors import EmbeddingDimMismatch, RemoteEmbedderUnavailable, ZeroVector
from .model import ClusterConfig

DEFAULT_EMBEDDING_DIM = 384


@dataclass(frozen=True)
class Embedding:
    """A unit-normalizable dense vector tied to its source text index."""

    vector: np.ndarray
    source_index: int

    def __post_init__(self) -> None:
        v = np.asarray(self.vector, dtype=np.float64)
        if v.ndim != 1:
            raise EmbeddingDimMismatch(f"expected 1-D vector, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ZeroVector("embedding has non-finite components")
        if float(np.linalg.norm(v)) == 0.0:
            raise ZeroVector("zero embedding cannot enter cosine arithmetic")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @property
    def dim(self) -> int:
        return int(self.vector.shape[0])


class Embedder(Protocol):
    """Pluggable text-to-vector contract. Same text must give the same
    vector within one implementation."""

    dim: int

    def embed(self, text: str) -> np.ndarray: ...

    def embed_many(self, texts: Sequence[str]) -> list[np.ndarray]: ...


class HashingEmbedder:
    """Deterministic offline embedder: whitespace tokens hashed into a
    fixed-size count vector, L2-normalized. No model, no network."""

    def __init__(self, dim: int = DEFAULT_EMBEDDING_DIM):
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        tokens = text.split()
        if not tokens:
            raise ZeroVector(f"no tokens to embed in {text!r}")
        v = np.zeros(self.dim, dtype=np.float64)
        for tok in tokens:
            digest = hashlib.md5(tok.encode("utf-8")).digest()
            v[int.from_bytes(digest[:8], "big") % self.dim] += 1.0
        return v / np.linalg.norm(v)

    def embed_many(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


class RemoteEmbedder:
    """Client for a remote embedding service.

    Wire contract: POST {"texts": [...]} -> {"vectors": [[...], ...]}.
    Transient failures are retried a bounded number of times before
    RemoteEmbedderUnavailable is raised.
    """

    def __init__(self, endpoint: str, dim: int = DEFAULT_EMBEDDING_DIM,
                 timeout: float = 10.0, retries: int = 3, transport=None):
        import httpx

        self.endpoint = endpoint
        self.dim = dim
        self.retries = retries
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def embed(self, text: str) -> np.ndarray:
        return self.embed_many([text])[0]

    def embed_many(self, texts: Sequence[str]) -> list[np.ndarray]:
        import httpx

        if not texts:
            return []
        last_error: Exception | None = None
        for attempt in range(self.retries):
            try:
                resp = self._client.post(self.endpoint, json={"texts": list(texts)})
                if resp.status_code >= 500:
                    # Server-side trouble may heal; retry.
                    last_error = RemoteEmbedderUnavailable(
                        f"server returned {resp.status_code}")
                    time.sleep(0.05 * (attempt + 1))
                    continue
                if resp.status_code != 200:
                    # A rejected request will not heal on retry.
                    raise RemoteEmbedderUnavailable(
                        f"embedding endpoint returned {resp.status_code}")
                try:
                    vectors = resp.json()["vectors"]
                except (ValueError, KeyError, TypeError) as exc:
                    raise RemoteEmbedderUnavailable(
                        f"malformed embedding response: {exc}") from exc
                if len(vectors) != len(texts):
                    raise EmbeddingDimMismatch(
                        f"asked for {len(texts)} vectors, got {len(vectors)}")
                return [np.asarray(v, dtype=np.float64) for v in vectors]
            except (httpx.TransportError, httpx.TimeoutException) as exc:
                last_error = exc
                time.sleep(0.05 * (attempt + 1))
        raise RemoteEmbedderUnavailable(
            f"embedding endpoint {self.endpoint} unreachable: {last_error}")

    def close(self) -> None:
        self._client.close()


def embed_all(texts: Sequence[str], embedder: Embedder) -> list[Embedding]:
    """Embed texts in order, enforcing the embedder's declared dimension."""
    vectors = embedder.embed_many(texts)
    out = []
    for i, v in enumerate(vectors):
        e = Embedding(v, i)
        if e.dim != embedder.dim:
            raise EmbeddingDimMismatch(
                f"text {i}: got dimension {e.dim}, expected {embedder.dim}")
        out.append(e)
    return out


@dataclass
class KMeansResult:
    assignments: list[int]
    centroids: np.ndarray
    effective_k: int
    iterations: int
    # Mean cosine dissimilarity to the assigned centroid, recorded after each
    # assignment step; non-increasing by construction.
    objective_history: list[float]


def _unit_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    return x / norms


def _seed_centroids(unique: np.ndarray, k: int, seed: int) -> np.ndarray:
    """k-means++-style seeding over the distinct unit vectors."""
    rng = np.random.default_rng(seed)
    n = unique.shape[0]
    chosen = [int(rng.integers(n))]
    while len(chosen) < k:
        sims = unique @ unique[chosen].T
        dissim = 1.0 - sims.max(axis=1)
        dissim[dissim < 0.0] = 0.0
        weights = dissim ** 2
        total = weights.sum()
        if total <= 0.0:
            # All remaining points coincide with a centroid already.
            remaining = [i for i in range(n) if i not in chosen]
            chosen.append(remaining[0])
            continue
        chosen.append(int(rng.choice(n, p=weights / total)))
    return unique[chosen].copy()


def kmeans_cosine(embeddings: Sequence[Embedding], cfg: ClusterConfig) -> KMeansResult:
    """Spherical k-means: assign by max cosine, recenter by normalized mean.

    The effective cluster count is capped at the number of distinct vectors;
    a cluster that empties is re-seeded from the point farthest from its
    current centroid. Deterministic under cfg.seed.
    """
    if not embeddings:
        raise ValueError("kmeans_cosine needs at least one embedding")
    x = _unit_rows(np.stack([e.vector for e in embeddings]))
    n = x.shape[0]
    unique = np.unique(x.round(12), axis=0)
    k = min(cfg.k, unique.shape[0])

    if k == unique.shape[0]:
        centroids = unique.copy()
    else:
        centroids = _seed_centroids(unique, k, cfg.seed)

    assignments = np.full(n, -1, dtype=np.int64)
    history: list[float] = []
    iterations = 0
    for _ in range(cfg.max_iterations):
        iterations += 1
        sims = x @ centroids.T
        new_assign = sims.argmax(axis=1)

        # Re-seed any empty cluster from the globally farthest point.
        costs = 1.0 - sims[np.arange(n), new_assign]
        for cluster in range(k):
            if not np.any(new_assign == cluster):
                far = int(costs.argmax())
                centroids[cluster] = x[far]
                new_assign[far] = cluster
                costs[far] = 0.0

        history.append(float(costs.mean()))
        if np.array_equal(new_assign, assignments):
            break
        assignments = new_assign

        for cluster in range(k):
            members = x[assignments == cluster]
            mean = members.mean(axis=0)
            norm = float(np.linalg.norm(mean))
            if norm > 1e-12:
                centroids[cluster] = mean / norm
            # else: antipodal cancellation; keep the previous centroid

    return KMeansResult(
        assignments=[int(a) for a in assignments],
        centroids=centroids,
        effective_k=k,
        iterations=iterations,
        objective_history=history,
    )


def summarize(
    reasons: Sequence[str],
    assignments: Sequence[int],
    embeddings: Sequence[Embedding],
) -> list[ClusterSummary]:
    """Per cluster, pick the medoid (max summed cosine similarity to
    co-members, earliest submission on ties) and order clusters by size."""
    if not (len(reasons) == len(assignments) == len(embeddings)):
        raise ValueError("reasons, assignments, embeddings must align")
    if not reasons:
        return []
    x = _unit_rows(np.stack([e.vector for e in embeddings]))
    clusters: dict[int, list[int]] = {}
    for i, c in enumerate(assignments):
        clusters.setdefault(c, []).append(i)

    summaries = []
    for cluster_id, idx in clusters.items():
        members = x[idx]
        total_sim = (members @ members.T).sum(axis=1)
        medoid = idx[int(total_sim.argmax())]
        summaries.append(ClusterSummary(
            representative_text=reasons[medoid],
            member_count=len(idx),
            cluster_index=cluster_id,
        ))
    # Largest clusters first; earliest-seen cluster wins ties.
    first_seen = {c: min(i) for c, i in clusters.items()}
    summaries.sort(key=lambda s: (-s.member_count, first_seen[s.cluster_index]))
    return summaries


class RationaleClusterer:
    """The aggregation hook: embeds a label bucket's rationales, clusters
    them, and returns medoid summaries."""

    def __init__(self, embedder: Embedder | None = None,
                 cfg: ClusterConfig | None = None):
        self.cfg = cfg or ClusterConfig()
        self.embedder = embedder or HashingEmbedder(self.cfg.embedding_dim)

    def summarize(self, texts: Sequence[str]) -> list[ClusterSummary]:
        if not texts:
            return []
        embeddings = embed_all(texts, self.embedder)
        result = kmeans_cosine(embeddings, self.cfg)
        return summarize(texts, result.assignments, embeddings)
