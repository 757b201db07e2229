"""Payload ingestion: raw byte streams and binary 8-bit PGM images.

A carrier exposes its content as a bitstring plus an eligibility mask
marking the positions a watermark may occupy without perceptible damage.
Raw streams make every bit eligible; PGM images admit only each pixel's
least significant bit, which bounds any watermark to one grey level per
pixel. Parsing is liberal about header whitespace and comments, emission is
canonical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    EmptyInput,
    MalformedHeader,
    MissingMeta,
    TruncatedPixelData,
    UnsupportedMaxval,
)

__all__ = [
    "RAW",
    "PGM_LSB",
    "CarrierPayload",
    "ImageMeta",
    "bytes_to_bits",
    "bits_to_bytes",
    "ingest_raw",
    "ingest_pgm",
    "emit",
]

RAW = "raw"
PGM_LSB = "pgm_lsb"

_WHITESPACE = b" \t\n\r\x0b\x0c"


def bytes_to_bits(data: bytes) -> str:
    """Big-endian bit expansion: 0xA5 -> '10100101'."""
    return "".join(f"{byte:08b}" for byte in data)


def bits_to_bytes(bits: str) -> bytes:
    """Inverse of bytes_to_bits; the length must be a whole number of bytes."""
    if len(bits) % 8:
        raise ValueError(f"bit length {len(bits)} is not a multiple of 8")
    return bytes(int(bits[i : i + 8], 2) for i in range(0, len(bits), 8))


@dataclass(frozen=True)
class CarrierPayload:
    """Payload bits plus the mask of positions allowed to carry the mark."""

    bits: str
    eligibility_mask: str
    format_tag: str

    def __post_init__(self) -> None:
        if self.format_tag not in (RAW, PGM_LSB):
            raise ValueError(f"unknown format tag {self.format_tag!r}")
        if len(self.eligibility_mask) != len(self.bits):
            raise ValueError(
                f"mask length {len(self.eligibility_mask)} does not match"
                f" payload length {len(self.bits)}"
            )


@dataclass(frozen=True)
class ImageMeta:
    """Dimensions of an ingested 8-bit greyscale image."""

    width: int
    height: int
    max_value: int = 255


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data):
        if data[pos] in _WHITESPACE:
            pos += 1
        elif data[pos] == 0x23:  # '#' comment runs to end of line
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
        else:
            break
    start = pos
    while pos < len(data) and data[pos] not in _WHITESPACE:
        pos += 1
    if start == pos:
        raise MalformedHeader("header ended before all fields were read")
    return data[start:pos], pos


def ingest_raw(data: bytes) -> CarrierPayload:
    """Expand raw bytes to bits with every position eligible.

    Callers accept that watermark flips may be perceptible anywhere in the
    stream; use an image format when that matters.
    """
    if not data:
        raise EmptyInput("raw payload is empty")
    bits = bytes_to_bits(data)
    return CarrierPayload(bits=bits, eligibility_mask="1" * len(bits), format_tag=RAW)


def ingest_pgm(data: bytes) -> tuple[CarrierPayload, ImageMeta]:
    """Parse a binary PGM (magic P5, 8-bit) into payload bits and image metadata.

    The eligibility mask admits only the least significant bit of each pixel
    byte. Header whitespace and '#' comments are accepted anywhere tokens may
    be separated.
    """
    if not data:
        raise EmptyInput("image payload is empty")
    magic, pos = _next_token(data, 0)
    if magic != b"P5":
        raise MalformedHeader(f"expected P5 magic, got {magic[:8]!r}")
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _next_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise MalformedHeader(f"{name} is not an integer: {token!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedHeader(f"image dimensions must be positive, got {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise MalformedHeader(f"maxval {maxval} is outside the legal range")
    if maxval != 255:
        raise UnsupportedMaxval(f"only 8-bit images are supported, maxval is {maxval}")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise MalformedHeader("missing single whitespace before pixel data")
    pos += 1
    expected = width * height
    pixels = data[pos : pos + expected]
    if len(pixels) < expected:
        raise TruncatedPixelData(f"need {expected} pixel bytes, found {len(pixels)}")
    if len(data) > pos + expected:
        raise MalformedHeader("trailing bytes after the pixel block")
    payload = CarrierPayload(
        bits=bytes_to_bits(pixels),
        eligibility_mask="00000001" * expected,
        format_tag=PGM_LSB,
    )
    return payload, ImageMeta(width=width, height=height, max_value=maxval)


def emit(payload: CarrierPayload, meta: ImageMeta | None = None) -> bytes:
    """Serialize a payload back to bytes; PGM payloads need their ImageMeta.

    Emission is canonical ("P5\\nW H\\nMAXVAL\\n" + pixels), so ingest of an
    emitted image and emission of an ingested canonical image are exact
    inverses.
    """
    if payload.format_tag == RAW:
        return bits_to_bytes(payload.bits)
    if meta is None:
        raise MissingMeta("PGM emission needs the ImageMeta from ingestion")
    pixels = bits_to_bytes(payload.bits)
    if len(pixels) != meta.width * meta.height:
        raise ValueError(
            f"payload describes {len(pixels)} pixels,"
            f" metadata says {meta.width * meta.height}"
        )
    header = f"P5\n{meta.width} {meta.height}\n{meta.max_value}\n".encode("ascii")
    return header + pixels
