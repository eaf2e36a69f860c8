"""Audio feature geometry: log-mel spectrograms and the token bookkeeping
that maps encoder patches onto video time steps and keyframe indices.

The spectrogram uses a 25 ms periodic Hann window with a 10 ms hop at
16 kHz, 128 Slaney-style mel filters over 0-8000 Hz, log(1+x) compression,
and a fixed 196-frame time axis, sized so a kernel-16 patchifier yields 19
tokens at stride 10 and 46 at stride 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    IndexOutOfRangeError,
    InvariantViolationError,
    KernelTooLargeError,
    ShapeMismatchError,
    TooShortError,
    WrongSampleRateError,
)
from .ingest import AudioClip, PIPELINE_SAMPLE_RATE
from .selection import KeyframeSchedule

N_MELS = 128
WINDOW_SIZE = 400   # 25 ms at 16 kHz
HOP_SIZE = 160      # 10 ms
FMAX = 8000.0
TARGET_FRAMES = 196
PATCH_KERNEL = 16


@dataclass
class MelSpectrogram:
    """128-band log-mel matrix, band-major (bands x frames)."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != N_MELS:
            raise InvariantViolationError(f"expected {N_MELS} x frames matrix")
        if self.values.shape[1] < 1:
            raise InvariantViolationError("spectrogram needs at least one frame")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise InvariantViolationError("log-mel values must be finite and >= 0")

    @property
    def bands(self) -> int:
        return N_MELS

    @property
    def frames(self) -> int:
        return int(self.values.shape[1])


def as_feature_matrix(x, name: str = "matrix") -> np.ndarray:
    """Coerce to a validated rows-by-channels float matrix."""
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatchError(f"{name} must be a non-empty 2-D matrix, got shape {m.shape}")
    return m


def _hz_to_mel(freq: float) -> float:
    # Slaney scale: linear to 1 kHz, logarithmic above
    if freq < 1000.0:
        return freq * 3.0 / 200.0
    return 15.0 + math.log(freq / 1000.0) / (math.log(6.4) / 27.0)


def _mel_to_hz(mel: float) -> float:
    if mel < 15.0:
        return mel * 200.0 / 3.0
    return 1000.0 * math.exp((math.log(6.4) / 27.0) * (mel - 15.0))


def mel_filterbank(n_fft: int = WINDOW_SIZE, sample_rate: int = PIPELINE_SAMPLE_RATE,
                   n_mels: int = N_MELS, fmax: float = FMAX) -> np.ndarray:
    """Area-normalized triangular filters on the Slaney mel scale."""
    n_bins = n_fft // 2 + 1
    fft_freqs = np.arange(n_bins) * (sample_rate / n_fft)
    mel_pts = np.linspace(_hz_to_mel(0.0), _hz_to_mel(fmax), n_mels + 2)
    hz_pts = np.array([_mel_to_hz(m) for m in mel_pts])
    bank = np.zeros((n_mels, n_bins))
    for i in range(n_mels):
        lo, mid, hi = hz_pts[i], hz_pts[i + 1], hz_pts[i + 2]
        rising = (fft_freqs - lo) / (mid - lo)
        falling = (hi - fft_freqs) / (hi - mid)
        bank[i] = np.maximum(0.0, np.minimum(rising, falling)) * (2.0 / (hi - lo))
    return bank


def mel_spectrogram(clip: AudioClip) -> MelSpectrogram:
    """Log-mel spectrogram with the time axis fixed to 196 frames.

    Framing is left-aligned with no centering; a longer clip is right-cropped
    and a shorter one zero-padded (silence) to the target frame count.
    """
    if clip.sample_rate != PIPELINE_SAMPLE_RATE:
        raise WrongSampleRateError(
            f"need {PIPELINE_SAMPLE_RATE} Hz audio, got {clip.sample_rate}"
        )
    samples = clip.samples
    if samples.size < WINDOW_SIZE:
        raise TooShortError(f"need >= {WINDOW_SIZE} samples, got {samples.size}")
    n_frames = (samples.size - WINDOW_SIZE) // HOP_SIZE + 1
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(WINDOW_SIZE) / WINDOW_SIZE)
    starts = np.arange(n_frames) * HOP_SIZE
    frames = samples[starts[:, None] + np.arange(WINDOW_SIZE)] * window
    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    mel = mel_filterbank() @ power.T
    mel = np.log1p(mel)
    if mel.shape[1] >= TARGET_FRAMES:
        mel = mel[:, :TARGET_FRAMES]
    else:
        mel = np.pad(mel, ((0, 0), (0, TARGET_FRAMES - mel.shape[1])))
    return MelSpectrogram(values=mel)


def write_mel_csv(spec: MelSpectrogram, path) -> None:
    """Dump a spectrogram as plain CSV, one band per row."""
    lines = [",".join(f"{v:.9f}" for v in row) for row in spec.values]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def patch_token_count(frame_count: int, kernel: int, stride: int) -> int:
    """Number of temporal patches a strided 1-D patchifier produces."""
    if stride < 1:
        raise InvariantViolationError(f"stride must be >= 1, got {stride}")
    if kernel > frame_count:
        raise KernelTooLargeError(f"kernel {kernel} exceeds {frame_count} frames")
    return (frame_count - kernel) // stride + 1


def interp_pos_embeddings(embeddings, n_new: int) -> np.ndarray:
    """Resample position embeddings to a new sequence length.

    Each channel is linearly interpolated over normalized positions, so the
    first and last rows are preserved exactly; a single input row broadcasts.
    """
    emb = as_feature_matrix(embeddings, "embeddings")
    if n_new < 1:
        raise InvariantViolationError(f"n_new must be >= 1, got {n_new}")
    n = emb.shape[0]
    if n == 1:
        return np.tile(emb[0], (n_new, 1))
    src = np.linspace(0.0, 1.0, n)
    dst = np.linspace(0.0, 1.0, n_new)
    out = np.empty((n_new, emb.shape[1]))
    for c in range(emb.shape[1]):
        out[:, c] = np.interp(dst, src, emb[:, c])
    return out


def segment_features(tokens, time_steps: int) -> np.ndarray:
    """Assign one nearest token row to each of ``time_steps`` video steps."""
    mat = as_feature_matrix(tokens, "tokens")
    if time_steps < 1:
        raise InvariantViolationError(f"time_steps must be >= 1, got {time_steps}")
    n = mat.shape[0]
    if time_steps == 1:
        return mat[[0], :].copy()
    rows = [int(math.floor(s * (n - 1) / (time_steps - 1) + 0.5)) for s in range(time_steps)]
    return mat[rows, :].copy()


def gather_keyframe_rows(perstep, indices) -> np.ndarray:
    """Pick the rows at the schedule's keyframe indices, in schedule order."""
    mat = as_feature_matrix(perstep, "perstep")
    if isinstance(indices, KeyframeSchedule):
        idx = indices.keyframes
    else:
        idx = [int(i) for i in indices]
    for i in idx:
        if not 0 <= i < mat.shape[0]:
            raise IndexOutOfRangeError(f"row {i} outside matrix with {mat.shape[0]} rows")
    return mat[idx, :].copy()


def l1_loss(pred, gt) -> float:
    """Mean absolute difference over all entries."""
    p = as_feature_matrix(pred, "pred")
    g = as_feature_matrix(gt, "gt")
    if p.shape != g.shape:
        raise ShapeMismatchError(f"shape mismatch: {p.shape} vs {g.shape}")
    return float(np.mean(np.abs(p - g)))
