"""Keyframe selection: first frame + ranked peaks + inter-peak valleys,
topped up by proportional fill over the remaining gaps.

The fill stage apportions the remaining budget across gaps between already
selected frames with the largest-remainder method (gap weight = interior
frame count) and spreads each gap's share evenly inside it. All rounding is
half away from zero so schedules are bit-identical across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    BadIntervalError,
    InconsistentExtremaError,
    InvalidKError,
    InvariantViolationError,
)
from .motion import Extrema, MotionCurve, detect_valleys, peak_prominences

MODE_BY_PROMINENCE = "by_prominence"
MODE_SEEDED_RANDOM = "seeded_random"

_MASK64 = (1 << 64) - 1


@dataclass
class KeyframeSchedule:
    """Selected frame indices plus the provenance of each one."""

    total_frames: int
    keyframes: list[int]
    peaks_used: list[int] = field(default_factory=list)
    valleys_used: list[int] = field(default_factory=list)
    fill: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.total_frames = int(self.total_frames)
        self.keyframes = [int(i) for i in self.keyframes]
        self.peaks_used = sorted(int(i) for i in self.peaks_used)
        self.valleys_used = sorted(int(i) for i in self.valleys_used)
        self.fill = sorted(int(i) for i in self.fill)
        kf = self.keyframes
        if any(not 0 <= i < self.total_frames for i in kf):
            raise InvariantViolationError("keyframe index out of [0, total_frames)")
        if any(b <= a for a, b in zip(kf, kf[1:])):
            raise InvariantViolationError("keyframes must be strictly increasing")
        if not kf or kf[0] != 0:
            raise InvariantViolationError("keyframes must include frame 0")
        parts = [set(self.peaks_used), set(self.valleys_used), set(self.fill)]
        if sum(len(p) for p in parts) != len(set().union(*parts)):
            raise InvariantViolationError("peak/valley/fill subsets must be disjoint")
        if set().union(*parts) | {0} != set(kf):
            raise InvariantViolationError("provenance subsets plus frame 0 must cover keyframes")


@dataclass
class SelectionParams:
    """Target keyframe count and the peak-choice policy."""

    target_count: int = 12
    mode: str = MODE_BY_PROMINENCE
    seed: int = 0

    def __post_init__(self):
        self.target_count = int(self.target_count)
        if self.target_count < 2:
            raise InvalidKError(f"target keyframe count must be >= 2, got {self.target_count}")
        if self.mode not in (MODE_BY_PROMINENCE, MODE_SEEDED_RANDOM):
            raise InvariantViolationError(f"unknown selection mode {self.mode!r}")


def _round_half_away(x: float) -> int:
    if x >= 0:
        return int(math.floor(x + 0.5))
    return int(math.ceil(x - 0.5))


def _splitmix64(state: int):
    """SplitMix64 step: returns (next state, 64-bit output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def choose_peaks(
    peaks: list[int],
    prominences: list[float],
    limit: int,
    params: SelectionParams | None = None,
) -> list[int]:
    """Pick up to ``limit`` peaks, returned in ascending index order.

    by_prominence ranks by descending prominence (ties toward the lower
    index); seeded_random draws a uniform sample without replacement via a
    Fisher-Yates shuffle driven by SplitMix64 on ``params.seed``.
    """
    if limit < 0:
        raise InvariantViolationError("peak limit must be >= 0")
    if len(peaks) != len(prominences):
        raise InconsistentExtremaError("peaks and prominences differ in length")
    peaks = [int(p) for p in peaks]
    if len(peaks) <= limit:
        return sorted(peaks)
    mode = params.mode if params is not None else MODE_BY_PROMINENCE
    if mode == MODE_SEEDED_RANDOM:
        pool = list(peaks)
        state = int(params.seed) & _MASK64
        for j in range(len(pool) - 1, 0, -1):
            state, z = _splitmix64(state)
            i = z % (j + 1)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:limit])
    ranked = sorted(range(len(peaks)), key=lambda i: (-prominences[i], peaks[i]))
    return sorted(peaks[i] for i in ranked[:limit])


def valley_between(curve: MotionCurve, p1: int, p2: int) -> int | None:
    """One valley index strictly inside (p1, p2), or None if the interval is empty.

    Prefers the detected valley with the lowest curve value (ties toward the
    lower index); absent any detected valley the interval argmin stands in,
    so consecutive peaks always contribute a separator when room exists.
    """
    p1, p2 = int(p1), int(p2)
    if p1 >= p2:
        raise BadIntervalError(f"need p1 < p2, got ({p1}, {p2})")
    if p2 - p1 < 2:
        return None
    x = curve.values
    inside = [v for v in detect_valleys(curve) if p1 < v < p2]
    if inside:
        return min(inside, key=lambda v: (x[v], v))
    interior = range(p1 + 1, p2)
    return min(interior, key=lambda v: (x[v], v))


def _largest_remainder(weights: list[int], total: int) -> list[int]:
    """Integer allocation proportional to ``weights`` summing to ``total``.

    Floors the ideal shares and hands the remainder to the largest fractional
    parts (ties toward the lower slot index). Each slot is capped at its
    weight; overflow moves to the slot with the most spare capacity.
    """
    wsum = sum(weights)
    if total == 0:
        return [0] * len(weights)
    if wsum == 0:
        raise InvariantViolationError("cannot apportion over all-zero weights")
    ideal = [total * w / wsum for w in weights]
    alloc = [math.floor(s) for s in ideal]
    remainder = total - sum(alloc)
    order = sorted(range(len(weights)), key=lambda i: (-(ideal[i] - alloc[i]), i))
    for i in order[:remainder]:
        alloc[i] += 1
    # capacity repair: weights double as per-slot capacity
    over = [i for i in range(len(alloc)) if alloc[i] > weights[i]]
    while over:
        i = over.pop()
        excess = alloc[i] - weights[i]
        alloc[i] = weights[i]
        spare = sorted(
            (j for j in range(len(alloc)) if alloc[j] < weights[j]),
            key=lambda j: (-(weights[j] - alloc[j]), j),
        )
        for j in spare:
            if excess == 0:
                break
            take = min(excess, weights[j] - alloc[j])
            alloc[j] += take
            excess -= take
    return alloc


def _place_in_gap(a: int, b: int, count: int, used: set[int]) -> list[int]:
    """Spread ``count`` indices evenly over the open interval (a, b)."""
    placed = []
    span = b - a
    for j in range(1, count + 1):
        idx = a + _round_half_away(j * span / (count + 1))
        idx = min(max(idx, a + 1), b - 1)
        if idx in used:
            # nearest unused interior index, preferring the lower one
            for off in range(1, span):
                if idx - off > a and idx - off not in used:
                    idx = idx - off
                    break
                if idx + off < b and idx + off not in used:
                    idx = idx + off
                    break
        used.add(idx)
        placed.append(idx)
    return placed


def select_keyframes(
    curve: MotionCurve,
    extrema: Extrema,
    params: SelectionParams,
) -> KeyframeSchedule:
    """Assemble exactly ``params.target_count`` keyframes for the curve.

    Frame 0 is always included. Up to target_count/2 - 1 peaks are chosen
    (all of them when fewer exist), one valley is inserted between each pair
    of consecutive chosen peaks, and the remaining budget is spread over the
    gaps between selected frames proportionally to gap size, with the final
    gap running to the virtual clip boundary.
    """
    total = len(curve)
    t_k = params.target_count
    if t_k >= total:
        raise InvalidKError(f"need target count < frame count, got {t_k} >= {total}")
    for name, idx in (("peaks", extrema.peaks), ("valleys", extrema.valleys)):
        if any(not 0 <= i < total for i in idx):
            raise InconsistentExtremaError(f"{name} fall outside the curve range")

    peak_limit = t_k // 2 - 1
    proms = peak_prominences(curve, extrema.peaks)
    chosen_peaks = choose_peaks(extrema.peaks, proms, peak_limit, params)

    chosen_valleys = []
    for a, b in zip(chosen_peaks, chosen_peaks[1:]):
        v = valley_between(curve, a, b)
        if v is not None:
            chosen_valleys.append(v)

    selected = sorted({0} | set(chosen_peaks) | set(chosen_valleys))
    remaining = t_k - len(selected)

    # gaps between consecutive selections; the last gap ends at the virtual
    # boundary ``total`` so fill can land near the clip end
    bounds = selected + [total]
    gaps = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
    capacities = [b - a - 1 for a, b in gaps]
    alloc = _largest_remainder(capacities, remaining)

    used = set(selected)
    fill: list[int] = []
    for (a, b), k in zip(gaps, alloc):
        if k:
            fill.extend(_place_in_gap(a, b, k, used))

    return KeyframeSchedule(
        total_frames=total,
        keyframes=sorted(used),
        peaks_used=chosen_peaks,
        valleys_used=chosen_valleys,
        fill=fill,
    )
