"""Bottom-up agglomerative clustering of frames over fused features.

Frames start as singleton clusters; each step merges the closest pair
under the chosen linkage, with cluster distances maintained through the
Lance-Williams update formulas. Cosine distance is used throughout since
the fused vectors live in a high-dimensional, mostly positive space.

The dendrogram is cut where the merge distance reaches the cutoff, frames
inherit their cluster's label, and the output segmentation places a
boundary wherever consecutive frames carry different labels. Labels are
not forced to be temporally contiguous; a cluster that recurs later in
the day simply contributes several segments.

Ward, centroid and median linkage are formally defined for Euclidean
distances; they are applied to the cosine-distance matrix through the
standard update coefficients anyway, matching common toolkit behaviour.
Centroid and median can produce inversions (a later merge below an
earlier one), so the cut uses the largest merge distance inside each
candidate subtree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datamodel import Segmentation, ValidationError

LINKAGES = ("ward", "centroid", "complete", "weighted", "single", "median", "average")

# linkages whose merge heights never invert, so a larger cutoff can only
# coarsen the flat clustering
MONOTONE_LINKAGES = ("single", "complete", "average", "weighted")


@dataclass(frozen=True)
class AggloParams:
    linkage: str = "average"
    cutoff: float = 0.4

    def __post_init__(self):
        if self.linkage not in LINKAGES:
            raise ValidationError(
                f"linkage must be one of {LINKAGES}, got {self.linkage!r}"
            )
        if self.cutoff <= 0:
            raise ValidationError(f"cutoff must be > 0, got {self.cutoff}")


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - cos(a, b), in [0, 2]. Defined as 1 when either vector is zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 1.0
    return 1.0 - float(np.dot(a, b) / (na * nb))


def cosine_distance_matrix(rows: np.ndarray) -> np.ndarray:
    """Full pairwise cosine-distance matrix with the zero-vector convention."""
    m = np.asarray(rows, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1)
    unit = np.zeros_like(m)
    nz = norms > 0
    unit[nz] = m[nz] / norms[nz, None]
    dist = 1.0 - unit @ unit.T
    # rows or columns for zero vectors: similarity 0, distance 1
    dist[~nz, :] = 1.0
    dist[:, ~nz] = 1.0
    np.fill_diagonal(dist, 0.0)
    return dist


def _lw_update(linkage: str, d_ki: np.ndarray, d_kj: np.ndarray, d_ij: float,
               n_i: float, n_j: float, n_k: np.ndarray) -> np.ndarray:
    if linkage == "single":
        return np.minimum(d_ki, d_kj)
    if linkage == "complete":
        return np.maximum(d_ki, d_kj)
    if linkage == "average":
        return (n_i * d_ki + n_j * d_kj) / (n_i + n_j)
    if linkage == "weighted":
        return 0.5 * (d_ki + d_kj)
    if linkage == "centroid":
        t = (n_i * d_ki ** 2 + n_j * d_kj ** 2) / (n_i + n_j) \
            - (n_i * n_j * d_ij ** 2) / (n_i + n_j) ** 2
        return np.sqrt(np.maximum(t, 0.0))
    if linkage == "median":
        t = 0.5 * d_ki ** 2 + 0.5 * d_kj ** 2 - 0.25 * d_ij ** 2
        return np.sqrt(np.maximum(t, 0.0))
    if linkage == "ward":
        t = ((n_k + n_i) * d_ki ** 2 + (n_k + n_j) * d_kj ** 2 - n_k * d_ij ** 2) \
            / (n_i + n_j + n_k)
        return np.sqrt(np.maximum(t, 0.0))
    raise ValidationError(f"unknown linkage {linkage!r}")


def linkage_merge_sequence(dist: np.ndarray, linkage: str) -> np.ndarray:
    """Agglomerate a precomputed distance matrix into a merge table.

    Returns an (n-1, 4) array of [node_a, node_b, merge_distance, size],
    with leaves numbered 0..n-1 and the i-th merge creating node n+i.
    When several pairs tie at the minimum distance, the lexicographically
    smallest (node_a, node_b) pair merges first.
    """
    d0 = np.asarray(dist, dtype=np.float64)
    n = d0.shape[0]
    if n == 1:
        return np.zeros((0, 4))
    total = 2 * n - 1
    work = np.full((total, total), np.inf)
    work[:n, :n] = d0
    np.fill_diagonal(work, np.inf)
    size = np.zeros(total)
    size[:n] = 1.0
    active = np.zeros(total, dtype=bool)
    active[:n] = True
    merges = np.zeros((n - 1, 4))
    for step in range(n - 1):
        flat = int(np.argmin(work))                 # row-major: smallest (i, j) wins ties
        i, j = divmod(flat, total)
        height = work[i, j]
        new = n + step
        active[i] = active[j] = False
        others = np.nonzero(active)[0]
        if others.size:
            updated = _lw_update(linkage, work[others, i], work[others, j], height,
                                 size[i], size[j], size[others])
            work[others, new] = updated
            work[new, others] = updated
        active[new] = True
        size[new] = size[i] + size[j]
        work[i, :] = np.inf
        work[:, i] = np.inf
        work[j, :] = np.inf
        work[:, j] = np.inf
        merges[step] = (i, j, height, size[new])
    return merges


def cut_merge_sequence(merges: np.ndarray, n: int, cutoff: float) -> np.ndarray:
    """Flat cluster labels from cutting the merge table at ``cutoff``.

    A cluster is a maximal subtree in which every merge distance is below
    the cutoff (the subtree maximum, so inversions cannot stitch together
    groups that already separated).
    """
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    subtree_max = np.zeros(2 * n - 1)
    for step, (a, b, height, _) in enumerate(merges):
        subtree_max[n + step] = max(height, subtree_max[int(a)], subtree_max[int(b)])
    return _label_valid_subtrees(merges, n, subtree_max, cutoff)


def _label_valid_subtrees(merges: np.ndarray, n: int, subtree_max: np.ndarray,
                          cutoff: float) -> np.ndarray:
    children: dict[int, tuple[int, int]] = {}
    for step, (a, b, _, _) in enumerate(merges):
        children[n + step] = (int(a), int(b))
    labels = np.full(n, -1, dtype=np.int64)
    next_label = 0
    root = 2 * n - 2 if len(merges) else 0

    stack = [root]
    while stack:
        node = stack.pop()
        if node < n and labels[node] == -1:
            labels[node] = next_label
            next_label += 1
            continue
        if node >= n and subtree_max[node] < cutoff:
            next_label = _assign(node, children, labels, next_label, n)
        elif node >= n:
            a, b = children[node]
            stack.extend((b, a))
    return labels


def _assign(node: int, children: dict[int, tuple[int, int]], labels: np.ndarray,
            label: int, n: int) -> int:
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur < n:
            labels[cur] = label
        else:
            stack.extend(children[cur])
    return label + 1


def cluster_frames(stream: np.ndarray, params: AggloParams) -> Segmentation:
    """Agglomerate fused frame vectors and cut at the configured distance.

    Returns the segmentation induced by label changes between consecutive
    frames.
    """
    rows = np.asarray(stream, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValidationError("expected a non-empty (n, d) feature matrix")
    n = rows.shape[0]
    if n == 1:
        return Segmentation(1, (0,))
    dist = cosine_distance_matrix(rows)
    merges = linkage_merge_sequence(dist, params.linkage)
    labels = cut_merge_sequence(merges, n, params.cutoff)
    return Segmentation.from_labels(labels)
