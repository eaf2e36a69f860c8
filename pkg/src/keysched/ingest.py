"""File ingestion and serialization.

Frames arrive as binary PGM (P5, maxval 255), audio as RIFF/WAVE PCM16 mono.
Motion curves round-trip through ``index,score`` CSV and keyframe schedules
through a small JSON schema; both writers emit byte-stable output.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyDirectoryError,
    InvariantViolationError,
    MalformedPgmError,
    ParseError,
    UnsupportedChannelsError,
    UnsupportedEncodingError,
    UnsupportedRateError,
)
from .motion import MotionCurve, STAGE_RAW
from .selection import KeyframeSchedule

PIPELINE_SAMPLE_RATE = 16000


@dataclass
class Frame:
    """Single grayscale frame; pixels are row-major luminance in [0, 1]."""

    height: int
    width: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        if self.pixels.shape != (self.height, self.width):
            raise InvariantViolationError(
                f"pixel array {self.pixels.shape} does not match {self.height}x{self.width}"
            )
        if self.pixels.size and (self.pixels.min() < 0.0 or self.pixels.max() > 1.0):
            raise InvariantViolationError("pixel values must lie in [0, 1]")


@dataclass
class FrameSequence:
    """Ordered frames of identical dimensions; fps is carried as metadata."""

    frames: list[Frame]
    fps: float = 24.0

    def __post_init__(self):
        if not self.frames:
            raise InvariantViolationError("frame sequence must contain at least one frame")
        h, w = self.frames[0].height, self.frames[0].width
        for i, f in enumerate(self.frames):
            if (f.height, f.width) != (h, w):
                raise DimensionMismatchError(
                    f"frame {i} is {f.height}x{f.width}, expected {h}x{w}"
                )

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def width(self) -> int:
        return self.frames[0].width


@dataclass
class AudioClip:
    """Mono PCM samples scaled to [-1, 1]."""

    samples: np.ndarray
    sample_rate: int = PIPELINE_SAMPLE_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise InvariantViolationError("audio clip needs at least one mono sample")
        if self.samples.size and (self.samples.min() < -1.0 or self.samples.max() > 1.0):
            raise InvariantViolationError("sample values must lie in [-1, 1]")

    def __len__(self) -> int:
        return int(self.samples.size)


# --- PGM ---

def _read_pgm_tokens(data: bytes, count: int, pos: int):
    """Read whitespace-separated header tokens, skipping '#' comments."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise MalformedPgmError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(path: str | Path) -> Frame:
    """Parse one binary PGM (P5, maxval 255) into a Frame.

    Pixel values are exactly byte/255, preserving bit-level content.
    """
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise MalformedPgmError(f"{path}: not a binary PGM (bad magic)")
    try:
        (w_tok, h_tok, maxval_tok), pos = _read_pgm_tokens(data, 3, 2)
        width, height, maxval = int(w_tok), int(h_tok), int(maxval_tok)
    except (ValueError, MalformedPgmError) as exc:
        raise MalformedPgmError(f"{path}: {exc}") from exc
    if maxval != 255:
        raise MalformedPgmError(f"{path}: maxval must be 255, got {maxval}")
    if width < 1 or height < 1:
        raise MalformedPgmError(f"{path}: non-positive dimensions {width}x{height}")
    pos += 1  # single whitespace byte separates header and raster
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise MalformedPgmError(f"{path}: raster truncated")
    pixels = np.frombuffer(raster, dtype=np.uint8).astype(np.float64) / 255.0
    return Frame(height=height, width=width, pixels=pixels.reshape(height, width))


def write_pgm(frame: Frame, path: str | Path) -> None:
    """Write a Frame as binary PGM, quantizing pixels back to 8 bits."""
    raster = np.clip(np.rint(frame.pixels * 255.0), 0, 255).astype(np.uint8)
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + raster.tobytes())


def load_frame_sequence(directory: str | Path, fps: float = 24.0) -> FrameSequence:
    """Load every ``*.pgm`` in the directory, ordered by filename."""
    directory = Path(directory)
    paths = sorted(p for p in directory.iterdir() if p.is_file() and p.suffix == ".pgm")
    if not paths:
        raise EmptyDirectoryError(f"no PGM files in {directory}")
    return FrameSequence(frames=[read_pgm(p) for p in paths], fps=fps)


# --- WAV ---

def load_wav(path: str | Path, strict_rate: bool = False) -> AudioClip:
    """Parse a RIFF/WAVE PCM16 mono file; samples map to value/32768.

    With ``strict_rate`` any rate other than 16 kHz is rejected; otherwise
    the actual rate is passed through for the caller to validate.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise UnsupportedEncodingError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt = None
    payload = None
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4:pos + 8])
        body = data[pos + 8:pos + 8 + size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise UnsupportedEncodingError(f"{path}: short fmt chunk")
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None or payload is None:
        raise UnsupportedEncodingError(f"{path}: missing fmt or data chunk")
    audio_format, channels, rate, _, _, bits = fmt
    if audio_format != 1 or bits != 16:
        raise UnsupportedEncodingError(f"{path}: need PCM16, got format {audio_format}/{bits}-bit")
    if channels != 1:
        raise UnsupportedChannelsError(f"{path}: need mono, got {channels} channels")
    if strict_rate and rate != PIPELINE_SAMPLE_RATE:
        raise UnsupportedRateError(f"{path}: need {PIPELINE_SAMPLE_RATE} Hz, got {rate}")
    raw = np.frombuffer(payload[:len(payload) - (len(payload) % 2)], dtype="<i2")
    if raw.size < 1:
        raise UnsupportedEncodingError(f"{path}: empty data chunk")
    return AudioClip(samples=raw.astype(np.float64) / 32768.0, sample_rate=rate)


def write_wav(clip: AudioClip, path: str | Path) -> None:
    """Write a clip as RIFF/WAVE PCM16 mono."""
    pcm = np.clip(np.rint(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    body = pcm.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(body)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, 1, 1, clip.sample_rate, clip.sample_rate * 2, 2, 16
    )
    header += b"data" + struct.pack("<I", len(body))
    Path(path).write_bytes(header + body)


# --- scores CSV ---

CSV_HEADER = "index,score"


def write_scores_csv(curve: MotionCurve, path: str | Path) -> None:
    """Write one ``index,score`` row per frame with 9-decimal scores."""
    lines = [CSV_HEADER]
    lines.extend(f"{i},{v:.9f}" for i, v in enumerate(curve.values))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_scores_csv(path: str | Path) -> MotionCurve:
    """Read a scores CSV back into a raw-stage MotionCurve."""
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ParseError(f"{path}: missing '{CSV_HEADER}' header row")
    values = []
    for row, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"{path}: row {row} is not 'index,score'")
        try:
            idx = int(parts[0])
            score = float(parts[1])
        except ValueError as exc:
            raise ParseError(f"{path}: row {row}: {exc}") from exc
        if idx != row:
            raise ParseError(f"{path}: row {row} carries index {idx}")
        values.append(score)
    if not values:
        raise ParseError(f"{path}: no score rows")
    return MotionCurve(np.array(values), stage=STAGE_RAW)


# --- schedule JSON ---

def schedule_to_dict(schedule: KeyframeSchedule) -> dict:
    return {
        "total_frames": schedule.total_frames,
        "keyframes": list(schedule.keyframes),
        "peaks": list(schedule.peaks_used),
        "valleys": list(schedule.valleys_used),
        "fill": list(schedule.fill),
    }


def write_schedule_json(schedule: KeyframeSchedule, path: str | Path) -> None:
    text = json.dumps(schedule_to_dict(schedule), sort_keys=True, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def read_schedule_json(path: str | Path) -> KeyframeSchedule:
    """Read a schedule JSON, re-validating every schedule invariant."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top-level JSON value must be an object")
    try:
        fields = {
            "total_frames": obj["total_frames"],
            "keyframes": obj["keyframes"],
            "peaks_used": obj.get("peaks", []),
            "valleys_used": obj.get("valleys", []),
            "fill": obj.get("fill", []),
        }
    except KeyError as exc:
        raise ParseError(f"{path}: missing field {exc}") from exc
    try:
        return KeyframeSchedule(**fields)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
