"""Scoring segmentations: boundary F-measure, GCE and LCE.

The F-measure matches predicted boundaries to ground truth within a
5-frame tolerance. The consistency errors compare two segmentations as
peer annotations: a segmentation that merely refines another scores
zero, so disagreement about granularity is not punished, only genuine
overlap conflicts. GCE forces the refinement direction to be global,
LCE lets it flip per frame, hence LCE <= GCE always.
"""

from photoseg import (
    MatchParams,
    Segmentation,
    evaluate_pair,
    f_measure,
    gce,
    lce,
    trivial_segmentations,
)

n = 120
annotator_a = Segmentation(n, (0, 30, 60, 90))
annotator_b = Segmentation(n, (0, 30, 45, 60, 90, 105))   # refines a
annotator_c = Segmentation(n, (0, 25, 70))                # genuinely disagrees

print("B refines A frame-for-frame:")
print(f"  GCE(A,B) = {gce(annotator_a, annotator_b):.3f}"
      f"   LCE(A,B) = {lce(annotator_a, annotator_b):.3f}   (both zero)")

print("\nC overlaps A inconsistently:")
print(f"  GCE(A,C) = {gce(annotator_a, annotator_c):.3f}"
      f"   LCE(A,C) = {lce(annotator_a, annotator_c):.3f}   (LCE <= GCE)")

whole, per_frame = trivial_segmentations(n)
print("\ndegenerate segmentations fool the consistency errors:")
print(f"  GCE(one-segment, A)    = {gce(whole, annotator_a):.3f}")
print(f"  GCE(frame-per-seg, A)  = {gce(per_frame, annotator_a):.3f}")
print("  ...so they complement rather than replace the F-measure:")
print(f"  FM(one-segment, A)     = {f_measure(whole, annotator_a).fmeasure:.3f}")
print(f"  FM(frame-per-seg, A)   = "
      f"{f_measure(per_frame, annotator_a).fmeasure:.3f}")

print("\nboundary tolerance in action (truth at 60):")
truth = Segmentation(n, (0, 60))
for predicted in (60, 63, 65, 66):
    rep = f_measure(Segmentation(n, (0, predicted)), truth, MatchParams(tolerance=5))
    print(f"  predicted {predicted}: TP={rep.tp} FP={rep.fp} FM={rep.fmeasure:.2f}")

print("\ncombined report between two annotators:")
report = evaluate_pair(annotator_b, annotator_a)
for key, value in report.to_dict().items():
    print(f"  {key:9s} {value}")
