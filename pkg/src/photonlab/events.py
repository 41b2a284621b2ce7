"""Photon event streams: integer-picosecond timestamps with origin tags.

All timing in the toolkit lives on a 1 ps integer lattice (int64), which is
finer than any bin width or detector response we model and immune to float
accumulation over hour-scale runs.  A stream also records the observation
window `duration_ps`; every timestamp lies in [0, duration_ps].

Serialization: a little-endian binary format (16-byte header: magic "PHTS",
u16 version, u16 channel id, u64 count, followed by u64 timestamps) and a
plain one-timestamp-per-line CSV.  Neither format stores tags or the
duration; loaders tag everything `signal` and infer the duration from the
last timestamp unless told otherwise.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvariantError

PS_PER_S = 10**12

_MAGIC = b"PHTS"
_FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHHQ")


class Tag(IntEnum):
    """Origin of an event: emitter photon, stray/background photon, dark count."""

    SIGNAL = 0
    BACKGROUND = 1
    DARK = 2


@dataclass
class EventStream:
    """Ordered event timestamps (int64 ps) with per-event tags.

    `times` must be nondecreasing and within [0, duration_ps]; `tags` has the
    same length.  Use `validate()` to assert the invariants on data that did
    not come out of a generator.
    """

    times: np.ndarray
    tags: np.ndarray
    duration_ps: int

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.int64)
        self.tags = np.asarray(self.tags, dtype=np.uint8)
        self.duration_ps = int(self.duration_ps)

    def __len__(self) -> int:
        return int(self.times.shape[0])

    @property
    def duration_s(self) -> float:
        return self.duration_ps / PS_PER_S

    def validate(self) -> "EventStream":
        if self.times.shape != self.tags.shape:
            raise InvariantError("times and tags length mismatch")
        if self.duration_ps < 0:
            raise InvariantError("negative duration")
        if len(self) > 0:
            if np.any(np.diff(self.times) < 0):
                raise InvariantError("timestamps not nondecreasing")
            if self.times[0] < 0 or self.times[-1] > self.duration_ps:
                raise InvariantError("timestamp outside [0, duration]")
        if len(self) and not np.all(np.isin(self.tags, list(Tag))):
            raise InvariantError("unknown event tag")
        return self

    def merged(self, other: "EventStream") -> "EventStream":
        """Merge two streams over the same window, keeping time order."""
        duration = max(self.duration_ps, other.duration_ps)
        times = np.concatenate([self.times, other.times])
        tags = np.concatenate([self.tags, other.tags])
        order = np.argsort(times, kind="stable")
        return EventStream(times[order], tags[order], duration)


def empty_stream(duration_ps: int = 0) -> EventStream:
    return EventStream(
        np.empty(0, dtype=np.int64), np.empty(0, dtype=np.uint8), duration_ps
    )


def stream_from_times(times: np.ndarray, duration_ps: int, tag: Tag = Tag.SIGNAL) -> EventStream:
    times = np.asarray(times, dtype=np.int64)
    tags = np.full(times.shape, int(tag), dtype=np.uint8)
    return EventStream(times, tags, duration_ps)


# ---------------------------------------------------------------------------
# binary timestamp format
# ---------------------------------------------------------------------------

def write_binary(stream: EventStream, path: str | Path, channel_id: int = 0) -> None:
    """Write timestamps as '<4sHHQ' header + little-endian u64 picoseconds."""
    times = stream.times
    if len(times) and times[0] < 0:
        raise InvariantError("negative timestamp cannot be stored as u64")
    header = _HEADER.pack(_MAGIC, _FORMAT_VERSION, channel_id, len(times))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(times.astype("<u8").tobytes())


def read_binary(path: str | Path) -> EventStream:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ConfigError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, _channel, count = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ConfigError(f"{path}: bad magic {magic!r}, expected {_MAGIC!r}")
    if version != _FORMAT_VERSION:
        raise ConfigError(f"{path}: unsupported format version {version}")
    body = raw[_HEADER.size:]
    if len(body) != 8 * count:
        raise ConfigError(
            f"{path}: header promises {count} timestamps, body holds {len(body) // 8}"
        )
    times = np.frombuffer(body, dtype="<u8").astype(np.int64)
    if np.any(np.diff(times) < 0):
        raise ConfigError(f"{path}: timestamps not sorted")
    duration = int(times[-1]) if count else 0
    return stream_from_times(times, duration)


# ---------------------------------------------------------------------------
# CSV format (one integer picosecond timestamp per line)
# ---------------------------------------------------------------------------

def write_timestamps_csv(stream: EventStream, path: str | Path) -> None:
    with open(path, "w") as fh:
        for t in stream.times:
            fh.write(f"{int(t)}\n")


def read_timestamps_csv(path: str | Path) -> EventStream:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(int(line))
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: not an integer timestamp: {line!r}") from exc
    times = np.asarray(values, dtype=np.int64)
    if np.any(np.diff(times) < 0):
        raise ConfigError(f"{path}: timestamps not sorted")
    if len(times) and times[0] < 0:
        raise ConfigError(f"{path}: negative timestamp")
    duration = int(times[-1]) if len(times) else 0
    return stream_from_times(times, duration)


def read_timestamps(path: str | Path) -> EventStream:
    """Load either format, sniffing the binary magic."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == _MAGIC:
        return read_binary(path)
    return read_timestamps_csv(path)
