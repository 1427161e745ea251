"""Run-length encoded recurrence rasters and the text exports built on them.

Layout, little-endian throughout::

    header  b"CHXR" | version u32 | n_lambda u32 | n_boxes u32 | a f64 | b f64
    row     lambda f64 | n_runs u32 | n_runs x (start u32, length u32)

A row lists the maximal runs of recurrent boxes at one parameter value.
"""
from __future__ import annotations

import csv
import io
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable

import numpy as np

from .errors import RasterFormatError

MAGIC = b"CHXR"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdd")
_ROW = struct.Struct("<dI")
_RUN = np.dtype([("start", "<u4"), ("length", "<u4")])


def encode_runs(boxes: np.ndarray) -> np.ndarray:
    """Sorted box indices -> (start, length) runs."""
    boxes = np.asarray(boxes, dtype=np.int64)
    if boxes.size == 0:
        return np.zeros(0, dtype=_RUN)
    cut = np.flatnonzero(np.diff(boxes) != 1) + 1
    starts = boxes[np.r_[0, cut]]
    ends = boxes[np.r_[cut - 1, boxes.size - 1]]
    out = np.empty(starts.size, dtype=_RUN)
    out["start"] = starts
    out["length"] = ends - starts + 1
    return out


def decode_runs(runs: np.ndarray) -> np.ndarray:
    if runs.size == 0:
        return np.zeros(0, dtype=np.int64)
    starts = runs["start"].astype(np.int64)
    lengths = runs["length"].astype(np.int64)
    offsets = np.repeat(starts - np.r_[0, np.cumsum(lengths)[:-1]], lengths)
    return np.arange(lengths.sum(), dtype=np.int64) + offsets


@dataclass
class Raster:
    n_boxes: int
    a: float
    b: float
    lams: list[float] = field(default_factory=list)
    rows: list[np.ndarray] = field(default_factory=list)  # recurrent box indices per lambda

    def add(self, lam: float, boxes: np.ndarray) -> None:
        boxes = np.asarray(boxes, dtype=np.int64)
        if boxes.size and (boxes.min() < 0 or boxes.max() >= self.n_boxes):
            raise ValueError("box index outside the partition")
        self.lams.append(float(lam))
        self.rows.append(np.sort(boxes))

    def __len__(self) -> int:
        return len(self.lams)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return ((self.n_boxes, self.a, self.b, self.lams) == (other.n_boxes, other.a, other.b, other.lams)
                and all(np.array_equal(r, s) for r, s in zip(self.rows, other.rows)))

    def write(self, fh: BinaryIO) -> None:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(self.lams), self.n_boxes, self.a, self.b))
        for lam, boxes in zip(self.lams, self.rows):
            runs = encode_runs(boxes)
            fh.write(_ROW.pack(lam, runs.size))
            fh.write(runs.tobytes())

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        self.write(buf)
        return buf.getvalue()

    def save(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            self.write(fh)

    @classmethod
    def read(cls, fh: BinaryIO) -> Raster:
        magic, version, n_lam, n_boxes, a, b = _HEADER.unpack(_take(fh, _HEADER.size, allow_short_magic=True))
        if magic != MAGIC:
            raise RasterFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise RasterFormatError(f"unsupported raster version {version}")
        r = cls(n_boxes, a, b)
        for _ in range(n_lam):
            lam, n_runs = _ROW.unpack(_take(fh, _ROW.size))
            runs = np.frombuffer(_take(fh, n_runs * _RUN.itemsize), dtype=_RUN)
            boxes = decode_runs(runs)
            if boxes.size and boxes.max() >= n_boxes:
                raise RasterFormatError("run extends past n_boxes")
            r.lams.append(lam)
            r.rows.append(boxes)
        if fh.read(1):
            raise RasterFormatError("trailing bytes after last raster row")
        return r

    @classmethod
    def load(cls, path: str | Path) -> Raster:
        with open(path, "rb") as fh:
            return cls.read(fh)

    @classmethod
    def from_bytes(cls, data: bytes) -> Raster:
        return cls.read(io.BytesIO(data))


def _take(fh: BinaryIO, n: int, allow_short_magic: bool = False) -> bytes:
    data = fh.read(n)
    if len(data) < n:
        # a file too short to hold even the magic is more likely not a raster
        if allow_short_magic and not MAGIC.startswith(data[:4]):
            raise RasterFormatError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
        raise RasterFormatError("unexpected EOF in raster")
    return data


# -- text exports ------------------------------------------------------------------


def write_plotdata(raster: Raster, fh) -> int:
    """One CSV row ``(lambda, box_lo, box_hi)`` per recurrent box; returns the row count."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["lambda", "box_lo", "box_hi"])
    width = (raster.b - raster.a) / raster.n_boxes
    count = 0
    for lam, boxes in zip(raster.lams, raster.rows):
        for i in boxes.tolist():
            w.writerow([repr(lam), repr(raster.a + i * width), repr(raster.a + (i + 1) * width)])
        count += boxes.size
    return count


def read_plotdata(fh) -> list[tuple[float, float, float]]:
    rows = list(csv.reader(fh))
    return [tuple(float(v) for v in r) for r in rows[1:]]


def write_covering_csv(rows: Iterable[tuple[float, float, float, int]], fh) -> None:
    """Rows ``(lambda, box_lo, box_hi, component_id)``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["lambda", "box_lo", "box_hi", "component_id"])
    for lam, lo, hi, comp in rows:
        w.writerow([repr(float(lam)), repr(float(lo)), repr(float(hi)), int(comp)])


def write_jsonl(records: Iterable[dict], fh) -> None:
    for r in records:
        fh.write(json.dumps(_plain(r), sort_keys=True, allow_nan=True) + "\n")


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v
