"""Built-in reference processors for harness validation.

Run as ``python -m gibbsim.processors identity`` (byte-level echo used
to validate the stream protocol) or ``... raw`` (composes the raw
magnitude reconstruction from whatever channels arrive, the no-op
baseline for evaluation harnesses).
"""

from __future__ import annotations

import sys

import numpy as np

from . import tensorfile

__all__ = ["raw_magnitude", "main"]


def raw_magnitude(batch: list[np.ndarray]) -> list[np.ndarray]:
    """Collapse processor inputs to the raw magnitude image.

    Complex arrays take their modulus; channel-stacked real arrays use
    the first two channels as real/imaginary parts; plain 2D real
    arrays pass through.
    """
    out = []
    for arr in batch:
        arr = np.asarray(arr)
        if np.iscomplexobj(arr):
            arr = np.abs(arr)
        if arr.ndim == 3:
            arr = np.hypot(arr[0], arr[1]) if arr.shape[0] >= 2 else arr[0]
        out.append(np.asarray(arr, dtype=np.float64))
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    mode = argv[0] if argv else "identity"
    if mode not in ("identity", "raw"):
        print(f"unknown processor mode {mode!r}", file=sys.stderr)
        return 2
    stdin = sys.stdin.buffer
    stdout = sys.stdout.buffer
    tensors = tensorfile.read_stream(stdin)
    if mode == "raw":
        tensors = raw_magnitude(tensors)
    tensorfile.write_stream(stdout, tensors)
    stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
