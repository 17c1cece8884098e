"""The two candidate segmenters and their opposite failure modes.

Agglomerative clustering reacts to every local appearance change, so
noise splinters its segments (high recall, low precision). The adaptive
windowing detector demands statistical evidence before declaring a
change, so short events vanish into their neighbours (high precision,
low recall). The fixture here has a 10-frame event wedged between long
segments, plus enough feature noise to make clustering jumpy.
"""

from photoseg import (
    AdwinParams,
    AggloParams,
    PipelineConfig,
    cluster_frames,
    detect_changes,
    f_measure,
    rescale_to_unit,
    run_pipeline,
    block_spec,
    generate,
)

spec = block_spec(num_segments=5, segment_length=(35, 35, 10, 35, 35),
                  contextual_dim=20, noise_sigma=0.11, seed=1)
stream, detections, gt = generate(spec)
print("ground truth boundaries:", gt.boundaries)

# run the shared feature stages once, then each candidate on the result
result = run_pipeline(stream, detections, PipelineConfig())
fused = result.fused

seg_ac = cluster_frames(fused, AggloParams(linkage="average", cutoff=0.4))
print("\nagglomerative clustering (cutoff 0.4):")
print("  boundaries:", seg_ac.boundaries)
print("  F-measure:", round(f_measure(seg_ac, gt).fmeasure, 3),
      " <- spurious splits from noise")

seg_adw = detect_changes(rescale_to_unit(fused), AdwinParams(delta=0.1))
print("\nadaptive windowing (delta 0.1):")
print("  boundaries:", seg_adw.boundaries)
print("  F-measure:", round(f_measure(seg_adw, gt).fmeasure, 3),
      " <- the 10-frame event is missed entirely")

# sensitivity to delta: higher confidence budget, easier to fire
print("\nadaptive windowing boundary count by delta:")
for delta in (0.01, 0.05, 0.1, 0.3):
    seg = detect_changes(rescale_to_unit(fused), AdwinParams(delta=delta))
    print(f"  delta={delta:<5} boundaries={list(seg.boundaries)}")

# cutoff sweep: the dendrogram cut controls granularity
print("\nagglomerative segment count by cutoff:")
for cutoff in (0.2, 0.4, 0.6, 0.8, 1.0, 1.2):
    seg = cluster_frames(fused, AggloParams(linkage="average", cutoff=cutoff))
    print(f"  cutoff={cutoff:<4} segments={seg.num_segments}")
