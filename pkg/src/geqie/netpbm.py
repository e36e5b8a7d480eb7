"""Minimal netpbm codec: PGM (P2/P5) and PPM (P3/P6), maxval 255 only.

8-bit data round-trips exactly: values are stored as ``round(255 v)`` and
read back as ``v / 255``.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, FormatError
from .model import ImageArray

_GRAY = {b"P2": False, b"P5": True}
_COLOR = {b"P3": False, b"P6": True}


def _tokens(blob: bytes):
    """Yield whitespace-separated header/ASCII tokens, skipping # comments."""
    pos = 0
    while pos < len(blob):
        char = blob[pos:pos + 1]
        if char.isspace():
            pos += 1
        elif char == b"#":
            end = blob.find(b"\n", pos)
            pos = len(blob) if end < 0 else end + 1
        else:
            end = pos
            while end < len(blob) and not blob[end:end + 1].isspace() and blob[end:end + 1] != b"#":
                end += 1
            yield pos, blob[pos:end]
            pos = end


def read_image(path) -> ImageArray:
    with open(path, "rb") as handle:
        blob = handle.read()
    stream = _tokens(blob)

    def next_token():
        try:
            return next(stream)
        except StopIteration:
            raise FormatError(f"{path}: truncated netpbm file") from None

    _, magic = next_token()
    if magic in _GRAY:
        channels, binary = 1, _GRAY[magic]
    elif magic in _COLOR:
        channels, binary = 3, _COLOR[magic]
    else:
        raise FormatError(f"{path}: unsupported netpbm magic {magic!r}")

    header = []
    for _ in range(3):
        offset, token = next_token()
        try:
            header.append(int(token))
        except ValueError:
            raise FormatError(f"{path}: non-numeric header token {token!r}") from None
    width, height, maxval = header
    if maxval != 255:
        raise FormatError(f"{path}: only maxval 255 is supported, got {maxval}")
    if width < 1 or height < 1:
        raise FormatError(f"{path}: bad image size {width}x{height}")
    count = width * height * channels

    if binary:
        # raster starts after exactly one whitespace byte past the maxval token
        start = offset + len(str(maxval)) + 1
        raster = blob[start:start + count]
        if len(raster) != count:
            raise FormatError(f"{path}: truncated raster, expected {count} bytes")
        samples = np.frombuffer(raster, dtype=np.uint8).astype(np.float64)
    else:
        samples = np.empty(count, dtype=np.float64)
        for index in range(count):
            _, token = next_token()
            try:
                value = int(token)
            except ValueError:
                raise FormatError(f"{path}: non-numeric sample {token!r}") from None
            if not 0 <= value <= 255:
                raise FormatError(f"{path}: sample {value} outside 0..255")
            samples[index] = value

    values = samples.reshape(height, width, channels) / 255.0
    return ImageArray(values)


def write_image(path, image: ImageArray, binary: bool = True) -> None:
    """Write PGM for 1-channel and PPM for 3-channel images."""
    if len(image.dims) != 2:
        raise DomainError(f"netpbm files are 2-D, got dims {image.dims}")
    if image.channels == 1:
        magic = b"P5" if binary else b"P2"
    elif image.channels == 3:
        magic = b"P6" if binary else b"P3"
    else:
        raise DomainError(f"netpbm supports 1 or 3 channels, got {image.channels}")
    height, width = image.dims
    samples = np.rint(image.values * 255.0).astype(np.uint8).reshape(-1)
    with open(path, "wb") as handle:
        handle.write(magic + b"\n%d %d\n255\n" % (width, height))
        if binary:
            handle.write(samples.tobytes())
        else:
            line = " ".join(str(int(s)) for s in samples)
            handle.write(line.encode("ascii") + b"\n")
