"""Group free-text annotation rationales into themes.

Each rationale is hashed into a 384-dimensional unit vector and clustered
by cosine k-means; every cluster is summarized by its medoid, the member
sentence closest to the cluster center.

Run:  python3 demos/02_rationale_clusters.py
"""
from __future__ import annotations

from crowdmark import ClusterConfig, HashingEmbedder, embed_all, kmeans_cosine
from crowdmark.clustering import summarize

REASONS = [
    "the jawline shimmers whenever she turns her head",
    "edges around the jaw look smeared in motion",
    "jaw boundary flickers between frames",
    "lips do not match the audio at all",
    "mouth movement lags the spoken words",
    "the voice says one thing and the lips another",
    "lighting on the left cheek never changes with the lamp",
    "shadows stay fixed while the light source moves",
    "eye blink looks painted on",
]


def main() -> None:
    cfg = ClusterConfig(k=4, seed=7)
    embeddings = embed_all(REASONS, HashingEmbedder(cfg.embedding_dim))
    result = kmeans_cosine(embeddings, cfg)
    summaries = summarize(REASONS, result.assignments, embeddings)

    print(f"{len(REASONS)} rationales -> {result.effective_k} themes "
          f"(k-means converged in {result.iterations} iterations)\n")
    for s in summaries:
        members = [REASONS[i] for i, c in enumerate(result.assignments)
                   if c == s.cluster_index]
        print(f"theme {s.cluster_index} ({s.member_count} rationales)")
        for text in members:
            marker = "*" if text == s.representative_text else " "
            print(f"   {marker} {text}")
        print()
    print("(* marks each theme's representative rationale)")


if __name__ == "__main__":
    main()
