"""Dense optical flow and the per-frame motion score built on it.

The estimator is a classical pyramidal Horn-Schunck solver: coarse-to-fine
over a blurred 2x-decimated pyramid, one backward warp per level, and Jacobi
iterations of the regularized brightness-constancy update at each level. It
is deterministic and tuned for motion-magnitude ranking rather than
benchmark endpoint accuracy.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvariantViolationError, TooShortError, TooSmallError
from .ingest import Frame, FrameSequence
from .motion import MotionCurve, STAGE_RAW

# classical smoothness weight assumes 0..255 intensities; pixels here are
# unit-range, so the solver rescales alpha by 1/255 internally
DEFAULT_ALPHA = 15.0
DEFAULT_ITERATIONS = 100
DEFAULT_PYRAMID_LEVELS = 3
DEFAULT_CONVERGENCE_EPS = 1e-4

MIN_COARSE_SIZE = 8

# weighted neighbor average used by the Jacobi update
_AVG_KERNEL = np.array(
    [[1 / 12, 1 / 6, 1 / 12], [1 / 6, 0.0, 1 / 6], [1 / 12, 1 / 6, 1 / 12]]
)
_BLUR_KERNEL = np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]]) / 16.0


@dataclass
class FlowField:
    """Per-pixel displacement in pixels/frame; u horizontal, v vertical."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=np.float64)
        if self.u.ndim != 2 or self.u.shape != self.v.shape:
            raise InvariantViolationError("u and v must be 2-D arrays of identical shape")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise InvariantViolationError("flow components must be finite")

    @property
    def height(self) -> int:
        return self.u.shape[0]

    @property
    def width(self) -> int:
        return self.u.shape[1]


@dataclass
class FlowParams:
    alpha: float = DEFAULT_ALPHA
    iterations: int = DEFAULT_ITERATIONS
    pyramid_levels: int = DEFAULT_PYRAMID_LEVELS
    convergence_eps: float = DEFAULT_CONVERGENCE_EPS

    def __post_init__(self):
        if self.alpha <= 0:
            raise InvariantViolationError("alpha must be > 0")
        if self.iterations < 1:
            raise InvariantViolationError("iterations must be >= 1")
        if self.pyramid_levels < 1:
            raise InvariantViolationError("pyramid_levels must be >= 1")
        if self.convergence_eps < 0:
            raise InvariantViolationError("convergence_eps must be >= 0")


def _conv3(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """3x3 convolution with replicate borders."""
    p = np.pad(x, 1, mode="edge")
    out = np.zeros_like(x)
    h, w = x.shape
    for dy in range(3):
        for dx in range(3):
            k = kernel[dy, dx]
            if k:
                out += k * p[dy:dy + h, dx:dx + w]
    return out


def _gradients(img: np.ndarray):
    """Central differences over a replicate-padded image."""
    p = np.pad(img, 1, mode="edge")
    ix = (p[1:-1, 2:] - p[1:-1, :-2]) / 2.0
    iy = (p[2:, 1:-1] - p[:-2, 1:-1]) / 2.0
    return ix, iy


def _bilinear_sample(img: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample img at fractional coordinates, clamping to the border."""
    h, w = img.shape
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def _resize_bilinear(img: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    h, w = shape
    sh, sw = img.shape
    ys = np.linspace(0.0, sh - 1.0, h) if h > 1 else np.zeros(1)
    xs = np.linspace(0.0, sw - 1.0, w) if w > 1 else np.zeros(1)
    gx, gy = np.meshgrid(xs, ys)
    return _bilinear_sample(img, gx, gy)


def _downsample(img: np.ndarray) -> np.ndarray:
    return _conv3(img, _BLUR_KERNEL)[::2, ::2]


def hs_energy(a: np.ndarray, b_warped: np.ndarray, u: np.ndarray, v: np.ndarray,
              alpha: float) -> float:
    """Discrete Horn-Schunck energy for an increment (u, v) at one level.

    Brightness-constancy residual is linearized around the warped second
    frame; smoothness uses forward differences. Exposed so callers can
    monitor convergence of the Jacobi iterations.
    """
    avg = (a + b_warped) / 2.0
    ix, iy = _gradients(avg)
    it = b_warped - a
    data = (ix * u + iy * v + it) ** 2
    smooth = np.zeros_like(u)
    smooth[:, :-1] += np.diff(u, axis=1) ** 2 + np.diff(v, axis=1) ** 2
    smooth[:-1, :] += np.diff(u, axis=0) ** 2 + np.diff(v, axis=0) ** 2
    return float(np.sum(data) + alpha ** 2 * np.sum(smooth))


def _solve_level(a: np.ndarray, b: np.ndarray, u: np.ndarray, v: np.ndarray,
                 alpha: float, iterations: int, eps: float):
    """Warp b by the current flow, then Jacobi-iterate the increment."""
    h, w = a.shape
    gy, gx = np.mgrid[0:h, 0:w].astype(np.float64)
    b_warped = _bilinear_sample(b, gx + u, gy + v)
    avg = (a + b_warped) / 2.0
    ix, iy = _gradients(avg)
    it = b_warped - a
    denom = alpha ** 2 + ix ** 2 + iy ** 2
    du = np.zeros_like(u)
    dv = np.zeros_like(v)
    for _ in range(iterations):
        ubar = _conv3(du, _AVG_KERNEL)
        vbar = _conv3(dv, _AVG_KERNEL)
        shared = (ix * ubar + iy * vbar + it) / denom
        ndu = ubar - ix * shared
        ndv = vbar - iy * shared
        delta = max(float(np.mean(np.abs(ndu - du))), float(np.mean(np.abs(ndv - dv))))
        du, dv = ndu, ndv
        if delta < eps:
            break
    return u + du, v + dv


def estimate_flow(a: Frame, b: Frame, params: FlowParams | None = None) -> FlowField:
    """Dense flow from frame a to frame b, coarse-to-fine.

    The returned (u, v) displace content of ``a`` onto ``b``: content moving
    one pixel right yields u near +1.
    """
    params = params or FlowParams()
    if (a.height, a.width) != (b.height, b.width):
        raise DimensionMismatchError(
            f"frames differ: {a.height}x{a.width} vs {b.height}x{b.width}"
        )
    coarse_h = a.height >> (params.pyramid_levels - 1)
    coarse_w = a.width >> (params.pyramid_levels - 1)
    if coarse_h < MIN_COARSE_SIZE or coarse_w < MIN_COARSE_SIZE:
        raise TooSmallError(
            f"{a.height}x{a.width} leaves {coarse_h}x{coarse_w} at the coarsest of "
            f"{params.pyramid_levels} levels (need >= {MIN_COARSE_SIZE})"
        )
    alpha = params.alpha / 255.0
    pyr_a = [a.pixels]
    pyr_b = [b.pixels]
    for _ in range(params.pyramid_levels - 1):
        pyr_a.append(_downsample(pyr_a[-1]))
        pyr_b.append(_downsample(pyr_b[-1]))
    u = np.zeros_like(pyr_a[-1])
    v = np.zeros_like(pyr_a[-1])
    for level in range(params.pyramid_levels - 1, -1, -1):
        if level != params.pyramid_levels - 1:
            ch, cw = u.shape
            fh, fw = pyr_a[level].shape
            u = _resize_bilinear(u, (fh, fw)) * (fw / cw)
            v = _resize_bilinear(v, (fh, fw)) * (fh / ch)
        u, v = _solve_level(
            pyr_a[level], pyr_b[level], u, v,
            alpha, params.iterations, params.convergence_eps,
        )
    return FlowField(u=u, v=v)


def motion_score(flow: FlowField, normalize: bool = True) -> float:
    """Sum of |u| + |v| over all pixels; mean per pixel when ``normalize``."""
    total = float(np.sum(np.abs(flow.u)) + np.sum(np.abs(flow.v)))
    if normalize:
        total /= flow.height * flow.width
    return total


def motion_curve(
    seq: FrameSequence,
    params: FlowParams | None = None,
    normalize: bool = True,
    workers: int = 1,
) -> MotionCurve:
    """Motion score of each consecutive frame pair, one entry per frame.

    Entry t scores the transition t -> t+1; the final entry duplicates its
    predecessor so every frame index carries a score. Frame pairs are
    independent, so ``workers`` > 1 fans them out over a thread pool without
    changing the result.
    """
    total = len(seq)
    if total < 2:
        raise TooShortError(f"need at least 2 frames, got {total}")
    pairs = list(zip(seq.frames, seq.frames[1:]))

    def score(pair):
        return motion_score(estimate_flow(pair[0], pair[1], params), normalize=normalize)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(score, pairs))
    else:
        values = [score(p) for p in pairs]
    values.append(values[-1])
    return MotionCurve(np.array(values), stage=STAGE_RAW)
