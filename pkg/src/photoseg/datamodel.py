"""Core types shared by every pipeline stage, plus all on-disk formats.

Values are immutable after construction and safe to share across threads.
Loaders are single threaded and validate eagerly, so a value that exists
is a value that satisfies its invariants.

File formats
------------
contextual features   CSV (one frame per row) or JSON lines
                      ``{"id": ..., "vector": [...]}``
concept detections    JSON lines ``{"id": ..., "tags": [{"tag": ...,
                      "confidence": ...}]}``
segmentation          JSON ``{"n": ..., "starts": [...]}``
evaluation report     JSON object or a CSV row (see ``report_csv_row``)
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np


class ValidationError(ValueError):
    """An input file or constructed value violates its contract."""


@dataclass(frozen=True)
class Frame:
    """One position in a photo stream.

    ``index`` is the 0-based position, ``id`` an opaque identifier such as
    the original filename, ``timestamp`` optional seconds since epoch.
    """

    index: int
    id: str = ""
    timestamp: Optional[float] = None


@dataclass(frozen=True)
class Segmentation:
    """An ordered partition of ``{0, ..., n-1}`` into contiguous segments.

    Stored as segment start indices: segment ``k`` spans
    ``[starts[k], starts[k+1] - 1]`` and the last segment ends at ``n - 1``.
    ``starts[0]`` is always 0, so the partition invariant is structural.
    """

    n: int
    starts: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"segmentation needs n >= 1, got n={self.n}")
        starts = tuple(int(s) for s in self.starts)
        object.__setattr__(self, "starts", starts)
        if not starts or starts[0] != 0:
            raise ValidationError(f"first segment must start at 0, got starts={starts[:3]}...")
        for a, b in zip(starts, starts[1:]):
            if b <= a:
                raise ValidationError(f"starts must be strictly increasing, got {a} then {b}")
        if starts[-1] >= self.n:
            raise ValidationError(f"start {starts[-1]} out of range for n={self.n}")

    @property
    def boundaries(self) -> tuple[int, ...]:
        """Internal boundaries, i.e. every start except frame 0."""
        return self.starts[1:]

    @property
    def num_segments(self) -> int:
        return len(self.starts)

    def segments(self) -> list[tuple[int, int]]:
        """Inclusive (first, last) frame index per segment."""
        ends = list(self.starts[1:]) + [self.n]
        return [(s, e - 1) for s, e in zip(self.starts, ends)]

    def labels(self) -> np.ndarray:
        """Per-frame segment index, shape (n,)."""
        lab = np.zeros(self.n, dtype=np.int64)
        for k, s in enumerate(self.starts):
            lab[s:] = k
        return lab

    def segment_containing(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.n:
            raise ValidationError(f"frame index {i} out of range for n={self.n}")
        k = int(np.searchsorted(np.asarray(self.starts), i, side="right")) - 1
        segs = self.segments()
        return segs[k]

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Segmentation":
        """Boundaries wherever consecutive entries differ."""
        lab = np.asarray(labels)
        if lab.size == 0:
            raise ValidationError("cannot build a segmentation from zero frames")
        starts = [0] + [i for i in range(1, lab.size) if lab[i] != lab[i - 1]]
        return cls(int(lab.size), tuple(starts))

    @classmethod
    def from_boundaries(cls, n: int, boundaries: Iterable[int]) -> "Segmentation":
        return cls(n, tuple([0] + sorted(set(int(b) for b in boundaries))))


@dataclass(frozen=True)
class ConceptDetections:
    """Per-frame (tag, confidence) pairs from an external tagger.

    Frames with zero tags are permitted. Within one frame tags are unique
    and confidences lie in [0, 1].
    """

    frames: tuple[tuple[tuple[str, float], ...], ...]
    ids: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        frames = tuple(tuple((str(t), float(c)) for t, c in fr) for fr in self.frames)
        object.__setattr__(self, "frames", frames)
        for i, fr in enumerate(frames):
            seen = set()
            for tag, conf in fr:
                if tag in seen:
                    raise ValidationError(f"frame {i}: duplicate tag {tag!r}")
                seen.add(tag)
                if not 0.0 <= conf <= 1.0:
                    raise ValidationError(
                        f"frame {i}: confidence {conf} for tag {tag!r} outside [0, 1]"
                    )
        if self.ids is not None and len(self.ids) != len(frames):
            raise ValidationError("ids and frames length mismatch")

    @property
    def n(self) -> int:
        return len(self.frames)

    def unique_tags(self) -> list[str]:
        """All distinct tags observed in the stream, sorted."""
        return sorted({tag for fr in self.frames for tag, _ in fr})


@dataclass
class FeatureStream:
    """Ordered per-frame feature vectors for one day-long sequence.

    ``contextual`` is required, shape (n, d_c). ``semantic`` and ``fused``
    are filled in by later pipeline stages.
    """

    contextual: np.ndarray
    semantic: Optional[np.ndarray] = None
    fused: Optional[np.ndarray] = None
    frames: Optional[tuple[Frame, ...]] = None

    def __post_init__(self):
        self.contextual = np.asarray(self.contextual, dtype=np.float64)
        if self.contextual.ndim != 2:
            raise ValidationError("contextual features must be a 2-d array")
        if self.contextual.shape[0] == 0:
            raise ValidationError("feature stream is empty")
        for name in ("semantic", "fused"):
            block = getattr(self, name)
            if block is None:
                continue
            block = np.asarray(block, dtype=np.float64)
            setattr(self, name, block)
            if block.ndim != 2 or block.shape[0] != self.n:
                raise ValidationError(f"{name} block must have one row per frame")
        if self.semantic is not None and self.semantic.size:
            if self.semantic.min() < 0.0 or self.semantic.max() > 1.0:
                raise ValidationError("semantic entries must lie in [0, 1]")
        if self.frames is not None:
            if len(self.frames) != self.n:
                raise ValidationError("frames length must equal row count")
            for k, fr in enumerate(self.frames):
                if fr.index != k:
                    raise ValidationError("frame indices must be consecutive from 0")
            stamps = [f.timestamp for f in self.frames if f.timestamp is not None]
            if any(b < a for a, b in zip(stamps, stamps[1:])):
                raise ValidationError("timestamps must be non-decreasing")

    @property
    def n(self) -> int:
        return self.contextual.shape[0]

    @property
    def contextual_dim(self) -> int:
        return self.contextual.shape[1]


@dataclass
class EvalReport:
    """Boundary detection scores plus segmentation consistency errors.

    ``gce``/``lce`` are None when only the F-measure half was computed.
    """

    precision: float
    recall: float
    fmeasure: float
    tp: int
    fp: int
    fn: int
    gce: Optional[float] = None
    lce: Optional[float] = None

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValidationError("boundary counts must be non-negative")
        if self.gce is not None and self.lce is not None:
            if self.lce > self.gce + 1e-9:
                raise ValidationError(
                    f"lce={self.lce} cannot exceed gce={self.gce}"
                )

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "fmeasure": self.fmeasure,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "gce": self.gce,
            "lce": self.lce,
        }


# ---------------------------------------------------------------- loaders

def _parse_float(cell: str, row: int, col: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ValidationError(f"row {row}, column {col}: non-numeric cell {cell!r}") from None


def load_feature_stream(path: str | Path, format: str = "csv") -> FeatureStream:
    """Load contextual feature vectors, one frame per row.

    ``format`` is ``"csv"`` (numeric columns) or ``"jsonl"`` (objects with
    an ``id`` and a ``vector``). Row order defines frame order. Raises
    :class:`ValidationError` on an empty file, a non-numeric cell, or rows
    of differing dimension.
    """
    path = Path(path)
    if format in ("csv",):
        rows: list[list[float]] = []
        with path.open(newline="") as fh:
            for r, record in enumerate(csv.reader(fh)):
                if not record:
                    continue
                rows.append([_parse_float(c, r, j) for j, c in enumerate(record)])
        frames = None
    elif format in ("jsonl", "json-lines"):
        rows = []
        ids = []
        with path.open() as fh:
            for r, line in enumerate(fh):
                if not line.strip():
                    continue
                obj = json.loads(line)
                vec = obj.get("vector")
                if vec is None:
                    raise ValidationError(f"row {r}: missing 'vector' field")
                rows.append([_parse_float(str(c), r, j) for j, c in enumerate(vec)])
                ids.append(str(obj.get("id", r)))
        frames = tuple(Frame(index=k, id=i) for k, i in enumerate(ids))
    else:
        raise ValidationError(f"unknown feature format {format!r}")

    if not rows:
        raise ValidationError(f"empty feature file: {path}")
    width = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ValidationError(f"row {r} has {len(row)} columns, expected {width}")
    return FeatureStream(contextual=np.asarray(rows, dtype=np.float64), frames=frames)


def save_feature_stream(stream: FeatureStream, path: str | Path, format: str = "csv") -> None:
    path = Path(path)
    if format == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            for row in stream.contextual:
                writer.writerow([repr(float(x)) for x in row])
    elif format in ("jsonl", "json-lines"):
        with path.open("w") as fh:
            for k, row in enumerate(stream.contextual):
                fid = stream.frames[k].id if stream.frames else str(k)
                fh.write(json.dumps({"id": fid, "vector": [float(x) for x in row]}) + "\n")
    else:
        raise ValidationError(f"unknown feature format {format!r}")


def load_concept_detections(path: str | Path) -> ConceptDetections:
    """Load per-frame tag detections from a JSON-lines file.

    One object per frame: ``{"id": ..., "tags": [{"tag": ..., "confidence":
    ...}]}``. Frames with an empty tag list are accepted.
    """
    frames: list[tuple[tuple[str, float], ...]] = []
    ids: list[str] = []
    with Path(path).open() as fh:
        for r, line in enumerate(fh):
            if not line.strip():
                continue
            obj = json.loads(line)
            tags = obj.get("tags", [])
            frames.append(tuple((str(t["tag"]), float(t["confidence"])) for t in tags))
            ids.append(str(obj.get("id", r)))
    return ConceptDetections(frames=tuple(frames), ids=tuple(ids))


def save_concept_detections(det: ConceptDetections, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for k, fr in enumerate(det.frames):
            fid = det.ids[k] if det.ids else str(k)
            obj = {
                "id": fid,
                "tags": [{"tag": t, "confidence": c} for t, c in fr],
            }
            fh.write(json.dumps(obj) + "\n")


def save_segmentation(seg: Segmentation, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        json.dump({"n": seg.n, "starts": list(seg.starts)}, fh)
        fh.write("\n")


def load_segmentation(path: str | Path) -> Segmentation:
    with Path(path).open() as fh:
        obj = json.load(fh)
    try:
        return Segmentation(n=int(obj["n"]), starts=tuple(obj["starts"]))
    except KeyError as exc:
        raise ValidationError(f"segmentation file missing field {exc}") from None


def save_report(report: EvalReport, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        json.dump(report.to_dict(), fh, sort_keys=True)
        fh.write("\n")


def load_report(path: str | Path) -> EvalReport:
    with Path(path).open() as fh:
        obj = json.load(fh)
    return EvalReport(**{k: obj[k] for k in REPORT_CSV_FIELDS})


REPORT_CSV_FIELDS = ("precision", "recall", "fmeasure", "tp", "fp", "fn", "gce", "lce")


def report_csv_header() -> str:
    return ",".join(REPORT_CSV_FIELDS)


def report_csv_row(report: EvalReport) -> str:
    d = report.to_dict()
    return ",".join("" if d[k] is None else repr(d[k]) if isinstance(d[k], float) else str(d[k])
                    for k in REPORT_CSV_FIELDS)
