"""keysched: keyframe-aware audio-to-visual animation scheduling toolkit.

Deterministic building blocks for keyframe-driven video generation
pipelines: optical-flow motion scoring, motion-curve extrema detection,
keyframe selection, audio feature geometry, conditioning layouts, reference
guidance kernels, and keypoint evaluation.
"""

from .audiofeat import (
    MelSpectrogram,
    gather_keyframe_rows,
    interp_pos_embeddings,
    l1_loss,
    mel_filterbank,
    mel_spectrogram,
    patch_token_count,
    segment_features,
)
from .errors import KeyschedError
from .evaluate import (
    IntensityBuckets,
    KeypointInstance,
    average_precision,
    intensity_buckets,
    match_keypoints,
)
from .flow import FlowField, FlowParams, estimate_flow, motion_curve, motion_score
from .ingest import (
    AudioClip,
    Frame,
    FrameSequence,
    load_frame_sequence,
    load_wav,
    read_schedule_json,
    read_scores_csv,
    write_schedule_json,
    write_scores_csv,
)
from .motion import (
    Extrema,
    MotionCurve,
    detect_extrema,
    detect_peaks,
    detect_valleys,
    normalize,
    peak_prominences,
    smooth,
)
from .refops import FusionWeights, GuidanceScales, attention, cfg_combine, fuse_features
from .schedule import (
    ConditionLayout,
    WindowPlan,
    firstframe_layout,
    frame_index_embedding,
    freenoise_windows,
    interpolation_layout,
)
from .selection import (
    KeyframeSchedule,
    SelectionParams,
    choose_peaks,
    select_keyframes,
    valley_between,
)

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "ConditionLayout",
    "Extrema",
    "FlowField",
    "FlowParams",
    "Frame",
    "FrameSequence",
    "FusionWeights",
    "GuidanceScales",
    "IntensityBuckets",
    "KeyframeSchedule",
    "KeypointInstance",
    "KeyschedError",
    "MelSpectrogram",
    "MotionCurve",
    "SelectionParams",
    "WindowPlan",
    "attention",
    "average_precision",
    "cfg_combine",
    "choose_peaks",
    "detect_extrema",
    "detect_peaks",
    "detect_valleys",
    "estimate_flow",
    "firstframe_layout",
    "frame_index_embedding",
    "freenoise_windows",
    "fuse_features",
    "gather_keyframe_rows",
    "intensity_buckets",
    "interp_pos_embeddings",
    "interpolation_layout",
    "l1_loss",
    "load_frame_sequence",
    "load_wav",
    "match_keypoints",
    "mel_filterbank",
    "mel_spectrogram",
    "motion_curve",
    "motion_score",
    "normalize",
    "patch_token_count",
    "peak_prominences",
    "read_schedule_json",
    "read_scores_csv",
    "segment_features",
    "select_keyframes",
    "smooth",
    "valley_between",
    "write_schedule_json",
    "write_scores_csv",
]
