"""End-to-end segmentation pipeline and hyper-parameter grid search.

Stage order: semantic vocabulary from the day's detections, per-frame
concept confidences, temporal smoothing, low-variance pruning, fusion
with the normalized contextual features, the two candidate segmenters
(agglomerative and adaptive windowing), and finally the energy-based
arbitration between them.

Every stage is deterministic given the configuration, so a pipeline run
is reproducible byte for byte. Stage failures carry the stage name.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .adwin import AdwinParams, detect_changes, rescale_to_unit
from .agglo import AggloParams, cluster_frames
from .datamodel import (
    ConceptDetections,
    EvalReport,
    FeatureStream,
    Segmentation,
    ValidationError,
    save_segmentation,
)
from .evaluate import MatchParams, f_measure
from .fusion import fuse, signed_root_normalize
from .graphcut import GcParams, build_label_space, minimize, unary_energies
from .semantic import (
    ExactMatchProvider,
    SemanticVocabulary,
    SimilarityProvider,
    assemble_semantic_features,
    build_concept_graph,
    cluster_concepts,
    prune_low_variance,
    smooth_temporal,
)


class StageError(ValidationError):
    """A pipeline stage failed; carries which one."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class PipelineConfig:
    """All knobs of the pipeline in one place.

    ``grid`` optionally maps flat parameter names (see ``GRID_PARAMS``) to
    candidate value lists for :func:`grid_search`.
    """

    vocab_size: int = 100
    seed: int = 0
    bandwidth: float = 3.0
    variance_threshold: float = 0.05
    blend: float = 0.5
    semantic_enabled: bool = True
    agglo: AggloParams = field(default_factory=AggloParams)
    adwin: AdwinParams = field(default_factory=AdwinParams)
    gc: GcParams = field(default_factory=GcParams)
    tolerance: int = 5
    grid: Optional[dict] = None

    _FLAT_AGGLO = ("linkage", "cutoff")
    _FLAT_ADWIN = ("delta", "p", "min_subwindow")
    _FLAT_GC = ("unary_mix", "pairwise_weight", "radius", "softmax_temp")

    @classmethod
    def from_dict(cls, flat: dict) -> "PipelineConfig":
        flat = dict(flat)
        agglo = AggloParams(**{k: flat.pop(k) for k in cls._FLAT_AGGLO if k in flat})
        adwin = AdwinParams(**{k: flat.pop(k) for k in cls._FLAT_ADWIN if k in flat})
        gc = GcParams(**{k: flat.pop(k) for k in cls._FLAT_GC if k in flat})
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(flat) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(agglo=agglo, adwin=adwin, gc=gc, **flat)

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        with Path(path).open() as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        out = {
            "vocab_size": self.vocab_size,
            "seed": self.seed,
            "bandwidth": self.bandwidth,
            "variance_threshold": self.variance_threshold,
            "blend": self.blend,
            "semantic_enabled": self.semantic_enabled,
            "linkage": self.agglo.linkage,
            "cutoff": self.agglo.cutoff,
            "delta": self.adwin.delta,
            "p": self.adwin.p,
            "min_subwindow": self.adwin.min_subwindow,
            "unary_mix": self.gc.unary_mix,
            "pairwise_weight": self.gc.pairwise_weight,
            "radius": self.gc.radius,
            "softmax_temp": self.gc.softmax_temp,
            "tolerance": self.tolerance,
        }
        if self.grid:
            out["grid"] = self.grid
        return out

    def override(self, **flat) -> "PipelineConfig":
        """A copy with flat parameter overrides applied."""
        merged = self.to_dict()
        merged.pop("grid", None)
        merged.update(flat)
        return PipelineConfig.from_dict(merged)


# declared order for grid expansion and tie-breaking
GRID_PARAMS = ("linkage", "cutoff", "delta", "unary_mix", "pairwise_weight",
               "blend", "bandwidth", "variance_threshold", "softmax_temp", "radius")


@dataclass
class PipelineResult:
    """Final segmentation plus every intermediate worth inspecting."""

    segmentation: Segmentation
    seg_ac: Segmentation
    seg_adw: Segmentation
    fused: np.ndarray
    semantic: Optional[np.ndarray] = None
    kept_concepts: Optional[list[int]] = None
    vocabulary: Optional[SemanticVocabulary] = None


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except ValidationError as exc:
        raise StageError(name, str(exc)) from exc


def run_pipeline(features: FeatureStream,
                 detections: Optional[ConceptDetections],
                 config: PipelineConfig = PipelineConfig(),
                 provider: Optional[SimilarityProvider] = None,
                 dump_dir: Optional[str | Path] = None) -> PipelineResult:
    """Segment one day-long stream.

    ``detections`` may be None (or semantic processing disabled in the
    config); the pipeline then runs on contextual features alone. The
    similarity provider defaults to exact tag matching, which degrades the
    vocabulary to one cluster per distinct tag.
    """
    n = features.n
    semantic_matrix = None
    kept: Optional[list[int]] = None
    vocab: Optional[SemanticVocabulary] = None

    use_semantic = config.semantic_enabled and detections is not None
    if use_semantic and detections.n != n:
        raise StageError(
            "semantic", f"feature stream has {n} frames but detections have {detections.n}"
        )
    if use_semantic and not any(detections.frames):
        use_semantic = False

    if use_semantic:
        prov = provider if provider is not None else ExactMatchProvider()
        graph = _stage("vocabulary", build_concept_graph, detections, prov)
        vocab = _stage("vocabulary", cluster_concepts, graph, config.vocab_size,
                       seed=config.seed)
        raw = _stage("semantic", assemble_semantic_features, detections, vocab)
        smoothed = _stage("smoothing", smooth_temporal, raw, config.bandwidth)
        semantic_matrix, kept = _stage("pruning", prune_low_variance, smoothed,
                                       config.variance_threshold)
    else:
        semantic_matrix = np.zeros((n, 0))
        kept = []

    contextual = _stage("fusion", signed_root_normalize, features.contextual)
    fused = _stage("fusion", fuse, contextual, semantic_matrix, config.blend)

    seg_ac = _stage("agglomerative", cluster_frames, fused, config.agglo)
    seg_adw = _stage("adwin", lambda: detect_changes(rescale_to_unit(fused), config.adwin))

    ls = _stage("graphcut", build_label_space, seg_ac, seg_adw, fused)
    unary_ac, unary_adw = _stage("graphcut", unary_energies, ls, fused, config.gc)
    final = _stage("graphcut", minimize, ls, unary_ac, unary_adw, fused, config.gc)

    result = PipelineResult(
        segmentation=final,
        seg_ac=seg_ac,
        seg_adw=seg_adw,
        fused=fused,
        semantic=semantic_matrix if use_semantic else None,
        kept_concepts=kept if use_semantic else None,
        vocabulary=vocab,
    )
    if dump_dir is not None:
        _dump_intermediates(result, config, Path(dump_dir))
    return result


def _dump_intermediates(result: PipelineResult, config: PipelineConfig,
                        out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    stamped = {"format_version": 1, **config.to_dict()}
    with (out / "config.json").open("w") as fh:
        json.dump(stamped, fh, sort_keys=True, indent=2)
        fh.write("\n")
    save_segmentation(result.seg_ac, out / "candidate_agglomerative.json")
    save_segmentation(result.seg_adw, out / "candidate_adwin.json")
    save_segmentation(result.segmentation, out / "segmentation.json")
    np.savetxt(out / "fused_features.csv", result.fused, delimiter=",")
    if result.semantic is not None:
        np.savetxt(out / "semantic_features.csv", result.semantic, delimiter=",")
        with (out / "kept_concepts.json").open("w") as fh:
            json.dump(result.kept_concepts, fh)
            fh.write("\n")
    if result.vocabulary is not None:
        result.vocabulary.save(out / "vocabulary.json")


@dataclass
class GridRow:
    params: dict
    report: EvalReport

    @property
    def fmeasure(self) -> float:
        return self.report.fmeasure


def grid_search(features: FeatureStream,
                detections: Optional[ConceptDetections],
                gt: Segmentation,
                config: PipelineConfig,
                provider: Optional[SimilarityProvider] = None) -> list[GridRow]:
    """Evaluate the Cartesian product of the configured grid lists.

    Rows come back sorted by F-measure descending; ties keep the row-major
    enumeration order over ``GRID_PARAMS``, so results are reproducible.
    """
    if not config.grid:
        raise ValidationError("configuration declares no grid")
    unknown = set(config.grid) - set(GRID_PARAMS)
    if unknown:
        raise ValidationError(f"grid keys not sweepable: {sorted(unknown)}")
    names = [p for p in GRID_PARAMS if p in config.grid]
    if any(len(config.grid[p]) == 0 for p in names):
        raise ValidationError("empty grid value list")

    rows: list[GridRow] = []
    match = MatchParams(tolerance=config.tolerance)
    for combo in itertools.product(*(config.grid[p] for p in names)):
        overrides = dict(zip(names, combo))
        run_config = config.override(**overrides)
        result = run_pipeline(features, detections, run_config, provider=provider)
        report = f_measure(result.segmentation, gt, match)
        rows.append(GridRow(params=overrides, report=report))
    rows.sort(key=lambda r: -r.fmeasure)   # stable: ties keep declared order
    return rows


def grid_rows_to_csv(rows: list[GridRow]) -> str:
    """Plot-ready CSV table of a grid search, one row per configuration."""
    if not rows:
        return ""
    names = list(rows[0].params)
    lines = [",".join(names + ["precision", "recall", "fmeasure", "tp", "fp", "fn"])]
    for row in rows:
        r = row.report
        lines.append(",".join(
            [str(row.params[p]) for p in names]
            + [repr(r.precision), repr(r.recall), repr(r.fmeasure),
               str(r.tp), str(r.fp), str(r.fn)]
        ))
    return "\n".join(lines) + "\n"
