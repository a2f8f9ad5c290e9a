"""Stereo stream merging: timestamp pairing and frame composition.

Color convention for anaglyphs: the LEFT eye feed lands in the blue
channel and the RIGHT eye feed in the red channel (green is zero).  Pick
glasses accordingly; this is the reverse of the common red-left habit.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .ppmio import read_manifest, read_ppm


class MergeError(ValueError):
    """Raised for unsorted streams, dimension mismatches, or bad frames."""


@dataclass(eq=False)
class Frame:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8
    timestamp: float  # ms
    source: str  # "left" | "right" for captures; composers mark their output

    def __post_init__(self):
        if self.pixels.dtype != np.uint8:
            raise MergeError(f"pixels must be uint8, got {self.pixels.dtype}")
        if self.pixels.shape != (self.height, self.width, 3):
            raise MergeError(
                f"pixel buffer {self.pixels.shape} does not match "
                f"{self.width}x{self.height}x3"
            )

    @classmethod
    def from_pixels(cls, pixels: np.ndarray, timestamp: float, source: str) -> "Frame":
        h, w = pixels.shape[:2]
        return cls(width=w, height=h, pixels=pixels, timestamp=timestamp, source=source)


@dataclass(frozen=True)
class FramePair:
    left: Frame
    right: Frame
    timestamp_skew: float


@dataclass
class PairingResult:
    pairs: list[FramePair] = field(default_factory=list)
    dropped_left: list[Frame] = field(default_factory=list)
    dropped_right: list[Frame] = field(default_factory=list)


def _check_sorted(frames: list[Frame], name: str) -> None:
    for i in range(1, len(frames)):
        if frames[i].timestamp < frames[i - 1].timestamp:
            raise MergeError(
                f"{name} stream not timestamp-sorted at index {i}: "
                f"{frames[i].timestamp} after {frames[i - 1].timestamp}"
            )


def pair_frames(
    left_stream: list[Frame], right_stream: list[Frame], tolerance: float
) -> PairingResult:
    """Greedy nearest-timestamp pairing.

    Walking the left stream in order, each frame takes the not-yet-matched
    right frame closest in time within the tolerance (earlier frame wins a
    tie).  Unmatched frames on either side are reported, never silently
    discarded.
    """
    if tolerance < 0:
        raise MergeError(f"tolerance must be non-negative, got {tolerance}")
    _check_sorted(left_stream, "left")
    _check_sorted(right_stream, "right")

    right_ts = [f.timestamp for f in right_stream]
    taken = [False] * len(right_stream)
    result = PairingResult()
    for lf in left_stream:
        pos = bisect.bisect_left(right_ts, lf.timestamp)
        best = -1
        best_key = None
        # nearest unmatched neighbor; scan outward from the insertion point
        for j in range(pos - 1, -1, -1):
            if lf.timestamp - right_ts[j] > tolerance:
                break
            if not taken[j]:
                best = j
                best_key = (lf.timestamp - right_ts[j], right_ts[j])
                break
        for j in range(pos, len(right_ts)):
            if right_ts[j] - lf.timestamp > tolerance:
                break
            if not taken[j]:
                key = (right_ts[j] - lf.timestamp, right_ts[j])
                if best_key is None or key < best_key:
                    best, best_key = j, key
                break
        if best >= 0:
            taken[best] = True
            result.pairs.append(
                FramePair(lf, right_stream[best], abs(lf.timestamp - right_ts[best]))
            )
        else:
            result.dropped_left.append(lf)
    result.dropped_right = [f for f, t in zip(right_stream, taken) if not t]
    return result


def _check_dims(pair: FramePair) -> None:
    l, r = pair.left, pair.right
    if (l.width, l.height) != (r.width, r.height):
        raise MergeError(
            f"dimension mismatch: left {l.width}x{l.height} vs right {r.width}x{r.height}"
        )


def side_by_side(pair: FramePair) -> Frame:
    """Double-width frame: left view in columns [0, w), right in [w, 2w)."""
    _check_dims(pair)
    px = _kernels.sbs_pixels(pair.left.pixels, pair.right.pixels)
    return Frame.from_pixels(px, pair.left.timestamp, "sbs")


def anaglyph(pair: FramePair) -> Frame:
    """Blue = left luminance, red = right luminance, green = 0 (BT.601)."""
    _check_dims(pair)
    px = _kernels.anaglyph_pixels(pair.left.pixels, pair.right.pixels)
    return Frame.from_pixels(px, pair.left.timestamp, "anaglyph")


def merge_pairs(pairs: list[FramePair], mode: str) -> list[Frame]:
    if mode == "sbs":
        return [side_by_side(p) for p in pairs]
    if mode == "anaglyph":
        return [anaglyph(p) for p in pairs]
    raise MergeError(f"merge mode must be 'sbs' or 'anaglyph', got {mode!r}")


def load_stream(manifest_path: str, source: str) -> list[Frame]:
    frames = []
    for ts, ppm_path in read_manifest(manifest_path):
        px = read_ppm(ppm_path)
        frames.append(Frame.from_pixels(px, ts, source))
    return frames
