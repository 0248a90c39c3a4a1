"""Reading and writing Netpbm grayscale images (PGM, types P2 and P5).

The reader is bit-exact per the Netpbm convention: the header consists of
the magic, width, height and maxval tokens separated by whitespace, with
``#`` comments allowed anywhere in the header.  Binary (P5) payloads use one
byte per sample for maxval <= 255 and two bytes big-endian otherwise.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError, ParseError

_WHITESPACE = b" \t\r\n\v\f"


def _header_tokens(data: bytes, count: int):
    """Yield `count` header tokens and the offset one whitespace byte past the last."""
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1] in (b" ", b"\t", b"\r", b"\n", b"\v", b"\f"):
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i] not in (0x0A, 0x0D):
                i += 1
            continue
        if i >= n:
            raise ParseError("truncated header", line=1)
        start = i
        while i < n and data[i : i + 1] not in (b" ", b"\t", b"\r", b"\n", b"\v", b"\f", b"#"):
            i += 1
        tokens.append(data[start:i])
    # exactly one whitespace byte separates the header from a binary payload
    if i < n and data[i] in _WHITESPACE:
        i += 1
    return tokens, i


def read_pgm(source) -> np.ndarray:
    """Read a P2/P5 PGM from bytes, a path, or a binary file object.

    Returns the raw sample grid as an integer array of shape (height, width),
    row 0 being the top row of the image.
    """
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
        name = "<bytes>"
    elif hasattr(source, "read"):
        data = source.read()
        name = getattr(source, "name", "<stream>")
    else:
        name = str(source)
        with open(source, "rb") as fh:
            data = fh.read()

    if len(data) < 2 or data[:1] != b"P" or data[1:2] not in (b"2", b"5"):
        raise ParseError("not a P2/P5 PGM stream", line=1, source=name)
    binary = data[1:2] == b"5"

    try:
        (magic, w_tok, h_tok, max_tok), offset = _header_tokens(data, 4)
    except ParseError as exc:
        raise ParseError("truncated header", line=1, source=name) from exc
    try:
        width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    except ValueError:
        raise ParseError("non-numeric header field", line=1, source=name) from None
    if width <= 0 or height <= 0:
        raise ParseError(f"bad dimensions {width}x{height}", line=1, source=name)
    if not 0 < maxval <= 65535:
        raise ParseError(f"maxval {maxval} outside 1..65535", line=1, source=name)

    count = width * height
    if binary:
        payload = data[offset:]
        if maxval <= 255:
            if len(payload) < count:
                raise ParseError("truncated P5 payload", source=name)
            values = np.frombuffer(payload[:count], dtype=np.uint8).astype(np.int64)
        else:
            if len(payload) < 2 * count:
                raise ParseError("truncated P5 payload", source=name)
            values = (
                np.frombuffer(payload[: 2 * count], dtype=">u2").astype(np.int64)
            )
    else:
        text = data[offset - 1 :] if offset > 0 else data
        fields = []
        for raw_line in text.split(b"\n"):
            body = raw_line.split(b"#", 1)[0]
            fields.extend(body.split())
        if len(fields) < count:
            raise ParseError("truncated P2 payload", source=name)
        try:
            values = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError:
            raise ParseError("non-numeric P2 sample", source=name) from None

    if values.max(initial=0) > maxval:
        raise ParseError("sample exceeds declared maxval", source=name)
    return values.reshape(height, width)


def write_pgm(values: np.ndarray, path, maxval: int = 65535, binary: bool = True) -> None:
    """Write an integer sample grid (row 0 = top) as P5 (or P2) PGM."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ParameterError("PGM payload must be 2-D")
    if arr.min(initial=0) < 0 or arr.max(initial=0) > maxval:
        raise ParameterError(f"samples outside 0..{maxval}")
    h, w = arr.shape
    header = f"{'P5' if binary else 'P2'}\n{w} {h}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        if binary:
            dtype = ">u2" if maxval > 255 else "u1"
            fh.write(arr.astype(dtype).tobytes())
        else:
            for row in arr:
                fh.write((" ".join(str(int(v)) for v in row) + "\n").encode("ascii"))
