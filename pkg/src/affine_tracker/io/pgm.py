"""Binary PGM (P5, maxval 255) reading and writing.

The header is four whitespace-separated tokens (magic, width, height,
maxval); ``#`` starts a comment that runs to the end of its line.  A
single whitespace byte separates the header from the pixel data.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from affine_tracker.core.models import BoxState, Frame, round_half_up
from affine_tracker.errors import FormatError, InvalidInputError

logger = logging.getLogger(__name__)

_WHITESPACE = b" \t\n\r\x0b\x0c"


def read_pgm(path: str | Path, index: int = 1) -> Frame:
    """Read one P5 file into a ``Frame``.

    Raises:
        FormatError: Wrong magic, maxval other than 255, or truncated data.
    """
    path = Path(path)
    data = path.read_bytes()
    tokens, offset = _read_header(data, str(path))
    magic, width, height, maxval = tokens
    if magic != b"P5":
        raise FormatError(f"unsupported magic {magic.decode(errors='replace')!r}", str(path))
    try:
        w, h, m = int(width), int(height), int(maxval)
    except ValueError as exc:
        raise FormatError(f"non-numeric header field: {exc}", str(path)) from exc
    if m != 255:
        raise FormatError(f"maxval {m} not supported (expected 255)", str(path))
    if w < 1 or h < 1:
        raise FormatError(f"invalid size {w}x{h}", str(path))

    body = data[offset: offset + w * h]
    if len(body) != w * h:
        raise FormatError(f"expected {w * h} pixel bytes, found {len(body)}", str(path))
    pixels = np.frombuffer(body, dtype=np.uint8).reshape((h, w)).copy()
    return Frame(pixels=pixels, index=index, name=path.name)


def write_pgm(path: str | Path, pixels: np.ndarray) -> None:
    """Write a ``(height, width)`` uint8 array as P5."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise InvalidInputError(f"PGM pixels must be 2-D, got shape {pixels.shape}")
    if pixels.dtype != np.uint8:
        pixels = np.clip(pixels, 0, 255).astype(np.uint8)
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(pixels).tobytes())


def load_frames(dir_path: str | Path) -> list[Frame]:
    """All ``*.pgm`` files of a directory, in byte-wise name order, indexed from 1.

    Raises:
        FormatError: No frames, an unreadable frame, or frames of differing size.
    """
    directory = Path(dir_path)
    if not directory.is_dir():
        raise NotADirectoryError(f"Not a directory: {directory}")
    files = sorted(
        (p for p in directory.iterdir() if p.suffix == ".pgm" and p.is_file()),
        key=lambda p: p.name.encode("utf-8", "surrogateescape"),
    )
    if not files:
        raise FormatError("no .pgm files found", str(directory))

    frames = [read_pgm(p, index=i + 1) for i, p in enumerate(files)]
    size = frames[0].pixels.shape
    for frame, p in zip(frames, files):
        if frame.pixels.shape != size:
            raise FormatError(
                f"frame size {frame.width}x{frame.height} differs from "
                f"{size[1]}x{size[0]} of {files[0].name}",
                str(p),
            )
    logger.info("Loaded %d frames (%dx%d) from %s", len(frames), size[1], size[0], directory)
    return frames


def draw_box(pixels: np.ndarray, state: BoxState, value: int = 255) -> np.ndarray:
    """Copy of ``pixels`` with a 1-pixel outline of the box, clipped to the frame."""
    out = np.array(pixels, dtype=np.uint8, copy=True)
    height, width = out.shape
    x0, y0 = round_half_up(state.x), round_half_up(state.y)
    x1, y1 = x0 + state.width - 1, y0 + state.height - 1
    cx0, cx1 = max(x0, 0), min(x1, width - 1)
    cy0, cy1 = max(y0, 0), min(y1, height - 1)
    if cx0 > cx1 or cy0 > cy1:
        return out
    for row in (y0, y1):
        if 0 <= row < height:
            out[row, cx0: cx1 + 1] = value
    for col in (x0, x1):
        if 0 <= col < width:
            out[cy0: cy1 + 1, col] = value
    return out


def write_overlays(
    out_dir: str | Path, frames: Sequence[Frame], states: Sequence[BoxState]
) -> None:
    """Write each frame with its estimate outlined, named after the source file."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for frame, state in zip(frames, states):
        name = frame.name or f"frame_{frame.index:04d}.pgm"
        write_pgm(out_dir / name, draw_box(frame.pixels, state))
    logger.info("Wrote %d overlay frames to %s", len(frames), out_dir)


# ------------------------------------------------------------------
# Internal parsing helpers
# ------------------------------------------------------------------

def _read_header(data: bytes, source: str) -> tuple[list[bytes], int]:
    """Four header tokens and the offset of the first pixel byte."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        if pos >= len(data):
            raise FormatError("truncated header", source)
        byte = data[pos: pos + 1]
        if byte == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise FormatError("unterminated header comment", source)
            pos = end + 1
        elif byte in _WHITESPACE:
            pos += 1
        else:
            start = pos
            while pos < len(data) and data[pos: pos + 1] not in _WHITESPACE \
                    and data[pos: pos + 1] != b"#":
                pos += 1
            tokens.append(data[start:pos])
    if pos >= len(data) or data[pos: pos + 1] not in _WHITESPACE:
        raise FormatError("missing whitespace after maxval", source)
    return tokens, pos + 1
