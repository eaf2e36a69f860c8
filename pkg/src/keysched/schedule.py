"""Conditioning layouts for the interpolator and generator.

interpolation_layout(): keyframe features placed at their frame slots with
zero rows everywhere else. firstframe_layout(): one feature row repeated
across the clip. freenoise_windows(): overlapping fixed-size windows that
cover the clip, clamping the final window to the clip end. A deterministic
sinusoidal frame-index embedding stands in for the learnable one, since this
toolkit ships no trainable parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audiofeat import as_feature_matrix
from .errors import (
    BadGeometryError,
    CountMismatchError,
    IndexOutOfRangeError,
    InvariantViolationError,
    OddDimError,
    ShapeMismatchError,
)
from .selection import KeyframeSchedule

FREENOISE_WINDOW = 12
FREENOISE_STRIDE = 6


@dataclass
class ConditionLayout:
    """Length-T feature rows plus the 0/1 mask of conditioned slots."""

    total_frames: int
    mask: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=np.int64)
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.mask.shape != (self.total_frames,):
            raise InvariantViolationError("mask length must equal total_frames")
        if not np.all((self.mask == 0) | (self.mask == 1)):
            raise InvariantViolationError("mask entries must be 0 or 1")
        if self.features.shape[0] != self.total_frames:
            raise InvariantViolationError("features must carry one row per frame")
        unmasked = self.features[self.mask == 0]
        if unmasked.size and np.any(unmasked != 0.0):
            raise InvariantViolationError("unmasked rows must be exactly zero")

    def to_dict(self) -> dict:
        return {
            "total_frames": self.total_frames,
            "mask": self.mask.tolist(),
            "features": self.features.tolist(),
        }


@dataclass
class WindowPlan:
    """Ordered [start, end) windows covering [0, total_frames)."""

    total_frames: int
    window: int
    stride: int
    windows: list[tuple[int, int]]

    def __post_init__(self):
        self.windows = [(int(s), int(e)) for s, e in self.windows]
        if not self.windows:
            raise InvariantViolationError("window plan must contain at least one window")
        covered = set()
        for s, e in self.windows:
            if not 0 <= s < e <= self.total_frames:
                raise InvariantViolationError(f"window [{s}, {e}) out of range")
            covered.update(range(s, e))
        if covered != set(range(self.total_frames)):
            raise InvariantViolationError("windows must cover every frame index")

    def to_dict(self) -> dict:
        return {
            "total_frames": self.total_frames,
            "window": self.window,
            "stride": self.stride,
            "windows": [list(w) for w in self.windows],
        }


def interpolation_layout(keyframe_feats, schedule: KeyframeSchedule) -> ConditionLayout:
    """Scatter keyframe feature rows to their frame indices, zeros between."""
    feats = as_feature_matrix(keyframe_feats, "keyframe_feats")
    if feats.shape[0] != len(schedule.keyframes):
        raise CountMismatchError(
            f"{feats.shape[0]} feature rows for {len(schedule.keyframes)} keyframes"
        )
    total = schedule.total_frames
    if any(i >= total for i in schedule.keyframes):
        raise IndexOutOfRangeError("keyframe index beyond total_frames")
    features = np.zeros((total, feats.shape[1]))
    mask = np.zeros(total, dtype=np.int64)
    for row, idx in enumerate(schedule.keyframes):
        features[idx] = feats[row]
        mask[idx] = 1
    return ConditionLayout(total_frames=total, mask=mask, features=features)


def firstframe_layout(first_feat, total_frames: int) -> ConditionLayout:
    """Repeat a single feature row across every frame slot."""
    feat = as_feature_matrix(first_feat, "first_feat")
    if feat.shape[0] != 1:
        raise ShapeMismatchError(f"need exactly one feature row, got {feat.shape[0]}")
    if total_frames < 1:
        raise InvariantViolationError("total_frames must be >= 1")
    features = np.tile(feat[0], (total_frames, 1))
    mask = np.ones(total_frames, dtype=np.int64)
    return ConditionLayout(total_frames=total_frames, mask=mask, features=features)


def freenoise_windows(total_frames: int, window: int = FREENOISE_WINDOW,
                      stride: int = FREENOISE_STRIDE) -> WindowPlan:
    """Overlapping window layout: starts step by ``stride`` while a full
    window fits; a trailing clamped window closes any uncovered tail."""
    if stride < 1 or stride > window or window > total_frames:
        raise BadGeometryError(
            f"need 1 <= stride <= window <= total_frames, got "
            f"({total_frames}, {window}, {stride})"
        )
    windows = []
    start = 0
    while start + window <= total_frames:
        windows.append((start, start + window))
        start += stride
    if windows[-1][1] != total_frames:
        clamped = (total_frames - window, total_frames)
        if clamped != windows[-1]:
            windows.append(clamped)
    return WindowPlan(total_frames=total_frames, window=window, stride=stride, windows=windows)


def frame_index_embedding(indices, channels: int) -> np.ndarray:
    """Sinusoidal embedding of absolute frame indices.

    Row p interleaves sin(p / 10000^(2k/c)) and cos(p / 10000^(2k/c)) for
    k = 0 .. c/2 - 1, giving every index a distinct, reproducible row with
    squared norm c/2.
    """
    if channels < 2 or channels % 2 != 0:
        raise OddDimError(f"channels must be even and >= 2, got {channels}")
    idx = np.asarray([int(i) for i in indices], dtype=np.float64)
    if np.any(idx < 0):
        raise InvariantViolationError("frame indices must be >= 0")
    k = np.arange(channels // 2)
    rates = 1.0 / np.power(10000.0, 2.0 * k / channels)
    phase = idx[:, None] * rates[None, :]
    out = np.empty((idx.size, channels))
    out[:, 0::2] = np.sin(phase)
    out[:, 1::2] = np.cos(phase)
    return out
