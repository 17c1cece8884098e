"""Day-level semantic vocabulary and per-frame semantic feature vectors.

The stages, in pipeline order:

1. build a complete tag-similarity graph over the day's unique tags,
   scoring each pair by the best similarity over all meaning pairs,
2. group the tags into at most ``k`` concept clusters by spectral
   clustering of that graph,
3. per frame, sum detection confidences into the clusters and rescale the
   whole matrix into [0, 1],
4. smooth each concept column along time with a density-estimation kernel,
5. drop concepts whose confidence barely varies across the day.

Everything here is a pure function of its inputs; clustering additionally
takes a seed and is deterministic given it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import convolve1d

from .datamodel import ConceptDetections, ValidationError


class UnknownTagError(ValidationError):
    """A detected tag is missing from the similarity provider."""

    def __init__(self, tag: str):
        super().__init__(f"tag {tag!r} has no meanings in the similarity provider")
        self.tag = tag


class SimilarityProvider:
    """Answers ``meanings(tag)`` and ``similarity(meaning_a, meaning_b)``.

    Implementations must keep similarity symmetric, within [0, 1], and equal
    to 1 for identical meanings.
    """

    def meanings(self, tag: str) -> list[str]:
        raise NotImplementedError

    def similarity(self, meaning_a: str, meaning_b: str) -> float:
        raise NotImplementedError


class FileSimilarityProvider(SimilarityProvider):
    """Similarity table backed by a JSON file, so runs are hermetic.

    Schema: ``{"meanings": {tag: [meaning, ...]}, "sims": [[meaning_a,
    meaning_b, value], ...]}``. Pairs not listed default to 0; identical
    meanings score 1.
    """

    def __init__(self, meanings: dict[str, list[str]], sims: dict[tuple[str, str], float]):
        self._meanings = {t: list(ms) for t, ms in meanings.items()}
        self._sims = {}
        for (a, b), v in sims.items():
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"similarity {v} for ({a!r}, {b!r}) outside [0, 1]")
            self._sims[(a, b)] = v
            self._sims[(b, a)] = v

    @classmethod
    def from_file(cls, path: str | Path) -> "FileSimilarityProvider":
        with Path(path).open() as fh:
            obj = json.load(fh)
        sims = {(str(a), str(b)): float(v) for a, b, v in obj.get("sims", [])}
        return cls(obj.get("meanings", {}), sims)

    def meanings(self, tag: str) -> list[str]:
        return self._meanings.get(tag, [])

    def similarity(self, meaning_a: str, meaning_b: str) -> float:
        if meaning_a == meaning_b:
            return 1.0
        return self._sims.get((meaning_a, meaning_b), 0.0)


class ExactMatchProvider(SimilarityProvider):
    """Degenerate provider: every tag is its own single meaning.

    Useful default when no lexical database export is available; the
    vocabulary then falls back to one cluster per distinct tag.
    """

    def meanings(self, tag: str) -> list[str]:
        return [tag]

    def similarity(self, meaning_a: str, meaning_b: str) -> float:
        return 1.0 if meaning_a == meaning_b else 0.0


@dataclass(frozen=True)
class ConceptGraph:
    """Complete weighted graph over the day's unique tags.

    ``weights`` is symmetric with a zero diagonal; entry (i, j) is the
    strength of the semantic relationship between ``tags[i]`` and
    ``tags[j]``.
    """

    tags: tuple[str, ...]
    weights: np.ndarray

    @property
    def num_tags(self) -> int:
        return len(self.tags)


@dataclass(frozen=True)
class ConceptCluster:
    representative: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class SemanticVocabulary:
    """The day's concept clusters, one semantic feature column per cluster."""

    clusters: tuple[ConceptCluster, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for cl in self.clusters:
            if cl.representative not in cl.members:
                raise ValidationError(
                    f"representative {cl.representative!r} not a member of its cluster"
                )
            for m in cl.members:
                if m in seen:
                    raise ValidationError(f"tag {m!r} appears in more than one cluster")
                seen.add(m)

    @property
    def size(self) -> int:
        return len(self.clusters)

    def tag_to_cluster(self) -> dict[str, int]:
        return {m: j for j, cl in enumerate(self.clusters) for m in cl.members}

    def save(self, path: str | Path) -> None:
        obj = {
            "clusters": [
                {"representative": cl.representative, "members": list(cl.members)}
                for cl in self.clusters
            ]
        }
        with Path(path).open("w") as fh:
            json.dump(obj, fh, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "SemanticVocabulary":
        with Path(path).open() as fh:
            obj = json.load(fh)
        return cls(tuple(
            ConceptCluster(c["representative"], tuple(c["members"]))
            for c in obj["clusters"]
        ))


def build_concept_graph(det: ConceptDetections, provider: SimilarityProvider) -> ConceptGraph:
    """Score every pair of observed tags by their best meaning-pair similarity.

    Raises :class:`UnknownTagError` for any tag the provider has no
    meanings for.
    """
    tags = det.unique_tags()
    if not tags:
        raise ValidationError("no tags observed, cannot build a concept graph")
    meanings = {}
    for tag in tags:
        ms = provider.meanings(tag)
        if not ms:
            raise UnknownTagError(tag)
        meanings[tag] = ms
    v = len(tags)
    weights = np.zeros((v, v), dtype=np.float64)
    for i in range(v):
        for j in range(i + 1, v):
            best = max(
                provider.similarity(ma, mb)
                for ma in meanings[tags[i]]
                for mb in meanings[tags[j]]
            )
            weights[i, j] = weights[j, i] = best
    return ConceptGraph(tags=tuple(tags), weights=weights)


def _farthest_point_kmeans(points: np.ndarray, k: int, seed) -> tuple[np.ndarray, float]:
    """Seeded greedy max-min init, then Lloyd iterations. Returns labels and distortion."""
    n = points.shape[0]
    rng = np.random.default_rng(seed)
    centers = [points[int(rng.integers(n))]]
    while len(centers) < k:
        d = np.min([((points - c) ** 2).sum(axis=1) for c in centers], axis=0)
        centers.append(points[int(np.argmax(d))])
    centers = np.asarray(centers)
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(100):
        dists = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(dists, axis=1)
        new_centers = centers.copy()
        for j in range(k):
            mask = labels == j
            if mask.any():
                new_centers[j] = points[mask].mean(axis=0)
        if np.allclose(new_centers, centers):
            centers = new_centers
            break
        centers = new_centers
    distortion = float(((points - centers[labels]) ** 2).sum())
    return labels, distortion


def _spectral_labels(weights: np.ndarray, k: int, seed: int, restarts: int = 10) -> np.ndarray:
    """Normalized-Laplacian embedding followed by seeded k-means."""
    v = weights.shape[0]
    degree = weights.sum(axis=1)
    inv_sqrt = np.zeros_like(degree)
    pos = degree > 0
    inv_sqrt[pos] = 1.0 / np.sqrt(degree[pos])
    lap = np.eye(v) - (weights * inv_sqrt[:, None]) * inv_sqrt[None, :]
    _, eigvecs = np.linalg.eigh(lap)
    embedding = eigvecs[:, :k]
    norms = np.linalg.norm(embedding, axis=1)
    nz = norms > 0
    embedding[nz] = embedding[nz] / norms[nz, None]

    best_labels, best_distortion = None, np.inf
    for r in range(restarts):
        labels, distortion = _farthest_point_kmeans(embedding, k, seed=[seed, r])
        if distortion < best_distortion:
            best_labels, best_distortion = labels, distortion
    return best_labels


def _pick_representative(members: list[str], tag_index: dict[str, int],
                         weights: np.ndarray) -> str:
    # highest within-cluster similarity sum, ties broken by tag order
    idx = [tag_index[m] for m in members]
    sums = weights[np.ix_(idx, idx)].sum(axis=1)
    best = min(zip(-sums, members))
    return best[1]


def cluster_concepts(graph: ConceptGraph, k: int, seed: int = 0) -> SemanticVocabulary:
    """Partition the tag graph into at most ``min(k, |V|)`` concept clusters.

    When ``k`` is at least the vertex count every tag becomes its own
    cluster. Cluster order is by representative tag, so the semantic
    feature columns are stable across runs.
    """
    if k < 1:
        raise ValidationError(f"cluster count must be >= 1, got {k}")
    tags = graph.tags
    if k >= len(tags):
        clusters = [ConceptCluster(t, (t,)) for t in sorted(tags)]
        return SemanticVocabulary(tuple(clusters))

    labels = _spectral_labels(graph.weights, k, seed)
    tag_index = {t: i for i, t in enumerate(tags)}
    groups: dict[int, list[str]] = {}
    for tag, lab in zip(tags, labels):
        groups.setdefault(int(lab), []).append(tag)
    clusters = []
    for members in groups.values():
        members = sorted(members)
        rep = _pick_representative(members, tag_index, graph.weights)
        clusters.append(ConceptCluster(rep, tuple(members)))
    clusters.sort(key=lambda c: c.representative)
    return SemanticVocabulary(tuple(clusters))


def assemble_semantic_features(det: ConceptDetections, vocab: SemanticVocabulary) -> np.ndarray:
    """Per-frame concept confidences, shape (n, vocabulary size).

    Cell (i, j) sums the confidences of frame i's tags that belong to
    cluster j; the whole matrix is then rescaled by its global maximum so
    values lie in [0, 1]. An all-zero matrix stays all-zero.
    """
    mapping = vocab.tag_to_cluster()
    out = np.zeros((det.n, vocab.size), dtype=np.float64)
    for i, frame in enumerate(det.frames):
        for tag, conf in frame:
            j = mapping.get(tag)
            if j is None:
                raise ValidationError(f"frame {i}: tag {tag!r} not in the vocabulary")
            out[i, j] += conf
    peak = out.max() if out.size else 0.0
    if peak > 0:
        out /= peak
    return out


def smooth_temporal(matrix: np.ndarray, bandwidth: float = 3.0) -> np.ndarray:
    """Kernel-smooth each concept column along the frame axis.

    Discrete Gaussian of standard deviation ``bandwidth`` frames, truncated
    at 3 bandwidths and renormalized at the sequence ends so a constant
    column passes through unchanged. Output is clamped to [0, 1].
    """
    if bandwidth <= 0:
        raise ValidationError(f"bandwidth must be positive, got {bandwidth}")
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValidationError("expected an (n, concepts) matrix")
    n = m.shape[0]
    radius = int(np.ceil(3.0 * bandwidth))
    offsets = np.arange(-radius, radius + 1)
    kernel = np.exp(-0.5 * (offsets / bandwidth) ** 2)
    kernel /= kernel.sum()
    smoothed = convolve1d(m, kernel, axis=0, mode="constant", cval=0.0)
    coverage = convolve1d(np.ones(n), kernel, mode="constant", cval=0.0)
    smoothed /= coverage[:, None]
    return np.clip(smoothed, 0.0, 1.0)


def prune_low_variance(matrix: np.ndarray, threshold: float = 0.05
                       ) -> tuple[np.ndarray, list[int]]:
    """Drop concept columns whose temporal standard deviation is below threshold.

    Returns the surviving columns (order preserved) and their original
    indices, so vocabulary columns stay traceable. May return an (n, 0)
    matrix; callers then proceed on contextual features alone.
    """
    if threshold < 0:
        raise ValidationError(f"threshold must be >= 0, got {threshold}")
    m = np.asarray(matrix, dtype=np.float64)
    stds = m.std(axis=0)
    kept = [j for j in range(m.shape[1]) if stds[j] >= threshold]
    return m[:, kept], kept
