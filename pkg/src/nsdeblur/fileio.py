"""File formats: PGM images (P2/P5, 8-bit), optional PNG via Pillow,
kernel tap files, and the plain-text kernel/report round trips.

Loading maps [0, 255] to [0, 1]; saving clamps to [0, 1] and rounds
half-to-even.  Kernel files store taps at 17 significant digits so a
write/read round trip is lossless for doubles.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import DimensionError, InputError
from .grid import to_luminance


def _tokens(data: bytes):
    """PGM header tokenizer: whitespace-separated, # comments to EOL."""
    pos = 0
    n = len(data)
    while pos < n:
        if data[pos:pos + 1].isspace():
            pos += 1
            continue
        if data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        yield data[start:pos], pos
    return


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit P2/P5 PGM into a float image in [0, 1]."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    toks = _tokens(raw)
    try:
        magic, _ = next(toks)
        (w_tok, _), (h_tok, _), (max_tok, end) = (next(toks) for _ in range(3))
        width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    except (StopIteration, ValueError) as exc:
        raise InputError(f"{path}: malformed PGM header") from exc
    if maxval != 255:
        raise InputError(f"{path}: only 8-bit PGM supported (maxval 255)")
    if width < 1 or height < 1:
        raise InputError(f"{path}: bad dimensions {width}x{height}")
    if magic == b"P5":
        data = raw[end + 1:end + 1 + width * height]
        if len(data) < width * height:
            raise InputError(f"{path}: truncated P5 payload")
        arr = np.frombuffer(data, dtype=np.uint8).astype(np.float64)
    elif magic == b"P2":
        vals = []
        for tok, _ in toks:
            vals.append(int(tok))
            if len(vals) == width * height:
                break
        if len(vals) < width * height:
            raise InputError(f"{path}: truncated P2 payload")
        arr = np.array(vals, dtype=np.float64)
    else:
        raise InputError(f"{path}: not a P2/P5 PGM file")
    if arr.min() < 0 or arr.max() > 255:
        raise InputError(f"{path}: sample out of 8-bit range")
    return (arr / 255.0).reshape(height, width)


def quantize(image: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1], scale to 8 bits, round half-to-even."""
    clipped = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    return np.rint(clipped * 255.0).astype(np.uint8)


def write_pgm(path, image, ascii_format: bool = False) -> None:
    """Write a float image in [0, 1] as an 8-bit PGM (binary by default)."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise DimensionError(f"image must be 2D, got {img.shape}")
    q = quantize(img)
    height, width = q.shape
    with open(path, "wb") as fh:
        if ascii_format:
            fh.write(f"P2\n{width} {height}\n255\n".encode("ascii"))
            for row in q:
                fh.write((" ".join(str(int(v)) for v in row) + "\n")
                         .encode("ascii"))
        else:
            fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            fh.write(q.tobytes())


def _png_module():
    try:
        from PIL import Image
    except ImportError as exc:
        raise InputError(
            "PNG support requires the optional pillow dependency "
            "(pip install nsdeblur[png])") from exc
    return Image


def read_image(path, channel: str = "luminance") -> np.ndarray:
    """Load PGM or PNG into a single-channel float image in [0, 1].

    Multi-channel files collapse to luminance by default; ``channel`` may
    instead pick one of "r", "g", "b".
    """
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".pgm":
        return read_pgm(path)
    if ext == ".png":
        image_mod = _png_module()
        try:
            with image_mod.open(path) as im:
                arr = np.asarray(im, dtype=np.float64)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        if arr.ndim == 3:
            if channel == "luminance":
                arr = to_luminance(arr)
            elif channel in ("r", "g", "b"):
                arr = arr[:, :, "rgb".index(channel)].astype(np.float64)
            else:
                raise InputError(f"unknown channel {channel!r}")
        return arr / 255.0
    raise InputError(f"unsupported image format {ext!r} (use .pgm or .png)")


def write_image(path, image) -> None:
    """Save to PGM or PNG (by extension), 8-bit grayscale."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".pgm":
        write_pgm(path, image)
        return
    if ext == ".png":
        image_mod = _png_module()
        image_mod.fromarray(quantize(image), mode="L").save(path)
        return
    raise InputError(f"unsupported image format {ext!r} (use .pgm or .png)")


def write_kernel(path, kernel) -> None:
    """Kernel tap file: "L M" header then L rows of M taps, 17 significant
    digits each."""
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim != 2:
        raise DimensionError(f"kernel must be 2D, got {k.shape}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{k.shape[0]} {k.shape[1]}\n")
        for row in k:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_kernel(path) -> np.ndarray:
    """Inverse of :func:`write_kernel` (bit-exact for doubles)."""
    try:
        with open(path, encoding="ascii") as fh:
            first = fh.readline().split()
            if len(first) != 2:
                raise InputError(f"{path}: malformed kernel header")
            l, m = int(first[0]), int(first[1])
            rows = []
            for _ in range(l):
                vals = [float(t) for t in fh.readline().split()]
                if len(vals) != m:
                    raise InputError(f"{path}: malformed kernel row")
                rows.append(vals)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: bad kernel value: {exc}") from exc
    return np.array(rows, dtype=np.float64)
