"""Benchmark the pixel kernels: numba JIT path vs pure-numpy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--size 1920x1080] [--repeat 20]

Prints per-frame times for both backends of each kernel and the speedup.
The JIT path is warmed up before timing so compilation cost is excluded.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from stereorig import _kernels


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from exc


def _time_per_frame(fn, left, right, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(left, right)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=_parse_size, default=(1920, 1080),
                        metavar="WxH", help="frame size (default 1920x1080)")
    parser.add_argument("--repeat", type=int, default=20,
                        help="timing repetitions; best run wins (default 20)")
    args = parser.parse_args()

    w, h = args.size
    rng = np.random.default_rng(0)
    left = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
    right = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)

    print(f"frame size {w}x{h}, {args.repeat} repetitions, best-of timing")
    if not _kernels.numba_available():
        print("numba unavailable: timing the numpy fallback only")

    kernels = [
        ("anaglyph", _kernels.anaglyph_numpy, _kernels.anaglyph_numba),
        ("side-by-side", _kernels.sbs_numpy, _kernels.sbs_numba),
    ]
    for name, numpy_fn, numba_fn in kernels:
        np_ms = _time_per_frame(numpy_fn, left, right, args.repeat) * 1e3
        line = f"{name:>13}: numpy {np_ms:8.3f} ms/frame"
        if _kernels.numba_available():
            numba_fn(left, right)  # warm-up: trigger JIT compilation
            nb_ms = _time_per_frame(numba_fn, left, right, args.repeat) * 1e3
            line += f"   numba {nb_ms:8.3f} ms/frame   speedup {np_ms / nb_ms:5.2f}x"
            if not (numpy_fn(left, right) == numba_fn(left, right)).all():
                print(f"{name}: BACKEND MISMATCH - outputs differ")
                return 1
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
