"""Y4M and raw YUV 4:2:0 input, pair validation, and fixed-size chunking.

Only 8-bit 4:2:0 content is supported and only the luma plane is kept;
chroma bytes are read and discarded.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import BinaryIO, Iterator

import numpy as np

YUV420_8BIT = "yuv420p"

# Y4M chroma tags that mean 8-bit 4:2:0. Anything else is rejected.
_Y4M_420_TAGS = frozenset({"420", "420jpeg", "420mpeg2", "420paldv", "420paln"})

MIN_DIMENSION = 64


class VideoFormatError(ValueError):
    """Malformed or unsupported video container data."""


class PairMismatchError(ValueError):
    """Reference and distorted streams do not have the same geometry."""


@dataclass(frozen=True)
class StreamInfo:
    width: int
    height: int
    frame_rate: tuple[int, int] = (25, 1)
    pix_fmt: str = YUV420_8BIT
    frame_count: int | None = None

    def __post_init__(self) -> None:
        if self.width < MIN_DIMENSION or self.height < MIN_DIMENSION:
            raise VideoFormatError(
                f"frame size {self.width}x{self.height} below minimum "
                f"{MIN_DIMENSION}x{MIN_DIMENSION}"
            )
        num, den = self.frame_rate
        if num <= 0 or den <= 0:
            raise VideoFormatError(f"invalid frame rate {num}:{den}")
        if self.pix_fmt != YUV420_8BIT:
            raise VideoFormatError(f"unsupported pixel format {self.pix_fmt!r}")

    @property
    def luma_size(self) -> int:
        return self.width * self.height

    @property
    def frame_size(self) -> int:
        # luma + two quarter-size chroma planes
        return self.width * self.height * 3 // 2


@dataclass(frozen=True)
class Frame:
    """One decoded luma plane; `luma` is a (height, width) uint8 array."""

    luma: np.ndarray = field(repr=False)
    index: int = 0

    def __post_init__(self) -> None:
        if self.luma.ndim != 2:
            raise ValueError("luma plane must be a 2-D array")
        if self.luma.dtype != np.uint8:
            raise ValueError("luma plane must be 8-bit samples")


@dataclass(frozen=True)
class Chunk:
    frames: tuple[Frame, ...]
    index: int


def parse_y4m_header(stream: BinaryIO) -> StreamInfo:
    """Read the YUV4MPEG2 signature line, leaving the stream at the first FRAME."""
    line = stream.readline()
    if not line.startswith(b"YUV4MPEG2"):
        raise VideoFormatError("missing YUV4MPEG2 signature")
    width = height = None
    rate = (25, 1)
    chroma = "420"
    for token in line.decode("ascii", errors="replace").split()[1:]:
        key, value = token[0], token[1:]
        if key == "W":
            width = _parse_int(value, "width")
        elif key == "H":
            height = _parse_int(value, "height")
        elif key == "F":
            rate = _parse_rational(value)
        elif key == "C":
            chroma = value
        # I (interlacing), A (aspect) and X (comment) tokens are ignored
    if width is None:
        raise VideoFormatError("missing width (W) token in Y4M header")
    if height is None:
        raise VideoFormatError("missing height (H) token in Y4M header")
    if chroma not in _Y4M_420_TAGS:
        raise VideoFormatError(f"unsupported chroma tag C{chroma} (need 8-bit 4:2:0)")
    return StreamInfo(width=width, height=height, frame_rate=rate)


def _parse_int(text: str, what: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise VideoFormatError(f"malformed {what} token {text!r}") from None
    if value <= 0:
        raise VideoFormatError(f"non-positive {what} {value}")
    return value


def _parse_rational(text: str) -> tuple[int, int]:
    num, sep, den = text.partition(":")
    if not sep:
        raise VideoFormatError(f"malformed rational {text!r}")
    try:
        return int(num), int(den)
    except ValueError:
        raise VideoFormatError(f"malformed rational {text!r}") from None


def read_y4m_frame(stream: BinaryIO, info: StreamInfo, index: int) -> Frame | None:
    """Read one frame at a FRAME marker; returns None at end of stream."""
    marker = stream.readline()
    if marker == b"":
        return None
    if not marker.startswith(b"FRAME"):
        raise VideoFormatError(f"malformed FRAME marker at frame {index}")
    luma = stream.read(info.luma_size)
    chroma = stream.read(info.frame_size - info.luma_size)
    if len(luma) < info.luma_size or len(chroma) < info.frame_size - info.luma_size:
        raise VideoFormatError(f"truncated payload at frame {index}")
    plane = np.frombuffer(luma, dtype=np.uint8).reshape(info.height, info.width)
    return Frame(luma=plane, index=index)


def iter_y4m_frames(stream: BinaryIO, info: StreamInfo) -> Iterator[Frame]:
    index = 0
    while True:
        frame = read_y4m_frame(stream, info, index)
        if frame is None:
            return
        yield frame
        index += 1


def read_y4m(path: str | os.PathLike) -> tuple[StreamInfo, list[Frame]]:
    with open(path, "rb") as stream:
        info = parse_y4m_header(stream)
        frames = list(iter_y4m_frames(stream, info))
    info = StreamInfo(info.width, info.height, info.frame_rate, info.pix_fmt, len(frames))
    return info, frames


def read_yuv(
    path: str | os.PathLike, width: int, height: int, pix_fmt: str = YUV420_8BIT
) -> tuple[StreamInfo, list[Frame]]:
    """Read a headerless planar YUV 4:2:0 file; geometry must be supplied."""
    info = StreamInfo(width=width, height=height, pix_fmt=pix_fmt)
    size = os.path.getsize(path)
    if size % info.frame_size != 0:
        raise VideoFormatError(
            f"file size {size} is not a whole number of "
            f"{width}x{height} 4:2:0 frames (truncated payload?)"
        )
    frames = []
    with open(path, "rb") as stream:
        for index in range(size // info.frame_size):
            luma = stream.read(info.luma_size)
            stream.seek(info.frame_size - info.luma_size, os.SEEK_CUR)
            plane = np.frombuffer(luma, dtype=np.uint8).reshape(height, width)
            frames.append(Frame(luma=plane, index=index))
    info = StreamInfo(width, height, info.frame_rate, pix_fmt, len(frames))
    return info, frames


def write_y4m(path: str | os.PathLike, frames: list[Frame], info: StreamInfo) -> None:
    """Emit a Y4M file with the given luma planes and neutral (128) chroma."""
    num, den = info.frame_rate
    header = f"YUV4MPEG2 W{info.width} H{info.height} F{num}:{den} Ip A1:1 C420\n"
    chroma = bytes([128]) * (info.frame_size - info.luma_size)
    with open(path, "wb") as out:
        out.write(header.encode("ascii"))
        for frame in frames:
            out.write(b"FRAME\n")
            out.write(frame.luma.tobytes())
            out.write(chroma)


def read_video(
    path: str | os.PathLike,
    width: int | None = None,
    height: int | None = None,
    pix_fmt: str = YUV420_8BIT,
) -> tuple[StreamInfo, list[Frame]]:
    """Dispatch on extension: .y4m is self-describing, anything else is raw YUV."""
    if str(path).lower().endswith(".y4m"):
        return read_y4m(path)
    if width is None or height is None:
        raise VideoFormatError("raw YUV input requires explicit width and height")
    return read_yuv(path, width, height, pix_fmt)


def validate_pair(ref: StreamInfo, dist: StreamInfo) -> None:
    if (ref.width, ref.height) != (dist.width, dist.height):
        raise PairMismatchError(
            f"dimension mismatch: reference {ref.width}x{ref.height} "
            f"vs distorted {dist.width}x{dist.height}"
        )
    if ref.pix_fmt != dist.pix_fmt:
        raise PairMismatchError(
            f"pixel format mismatch: {ref.pix_fmt} vs {dist.pix_fmt}"
        )
    if (
        ref.frame_count is not None
        and dist.frame_count is not None
        and ref.frame_count != dist.frame_count
    ):
        raise PairMismatchError(
            f"frame count mismatch: {ref.frame_count} vs {dist.frame_count}"
        )


def chunk_segment(frames: list[Frame], chunk_size: int) -> list[Chunk]:
    """Split frames into consecutive chunks of exactly `chunk_size` frames.

    A trailing remainder shorter than `chunk_size` is dropped; an input
    shorter than one chunk is padded by repeating its last frame.
    """
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    if not frames:
        raise ValueError("cannot chunk an empty frame list")
    if len(frames) < chunk_size:
        padded = list(frames) + [frames[-1]] * (chunk_size - len(frames))
        return [Chunk(frames=tuple(padded), index=0)]
    return [
        Chunk(frames=tuple(frames[i * chunk_size : (i + 1) * chunk_size]), index=i)
        for i in range(len(frames) // chunk_size)
    ]
