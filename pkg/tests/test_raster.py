from __future__ import annotations

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainrec.errors import RasterFormatError
from chainrec.raster import Raster, decode_runs, encode_runs, read_plotdata, write_plotdata


@given(st.sets(st.integers(0, 511)))
def test_runs_round_trip(boxes):
    arr = np.array(sorted(boxes), dtype=np.int64)
    assert np.array_equal(decode_runs(encode_runs(arr)), arr)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.floats(-10, 10, allow_nan=False), st.sets(st.integers(0, 255))), max_size=6))
def test_raster_round_trip(rows):
    r = Raster(256, -1.0, 2.0)
    for lam, boxes in rows:
        r.add(lam, np.array(sorted(boxes), dtype=np.int64))
    back = Raster.from_bytes(r.to_bytes())
    assert back == r
    assert back.to_bytes() == r.to_bytes()


def _sample():
    r = Raster(16, 0.0, 1.0)
    r.add(3.0, [1, 2, 3, 9])
    r.add(3.1, [])
    r.add(3.2, [15])
    return r


def test_header_layout():
    data = _sample().to_bytes()
    assert data[:4] == b"CHXR"
    assert int.from_bytes(data[4:8], "little") == 1
    assert int.from_bytes(data[8:12], "little") == 3
    assert int.from_bytes(data[12:16], "little") == 16


def test_truncated_raster():
    data = _sample().to_bytes()
    for cut in (2, 20, len(data) - 1):
        with pytest.raises(RasterFormatError, match="unexpected EOF in raster"):
            Raster.from_bytes(data[:cut])


def test_bad_magic_and_version():
    data = bytearray(_sample().to_bytes())
    with pytest.raises(RasterFormatError, match="magic"):
        Raster.from_bytes(b"XXXX" + bytes(data[4:]))
    data[4] = 7
    with pytest.raises(RasterFormatError, match="version"):
        Raster.from_bytes(bytes(data))


def test_plotdata_rows_equal_recurrent_boxes():
    r = _sample()
    buf = io.StringIO()
    assert write_plotdata(r, buf) == 5
    rows = read_plotdata(io.StringIO(buf.getvalue()))
    assert len(rows) == 5
    assert rows[0] == (3.0, 0.0625, 0.125)


def test_empty_raster_gives_header_only_csv():
    buf = io.StringIO()
    write_plotdata(Raster.from_bytes(Raster(8, 0.0, 1.0).to_bytes()), buf)
    assert buf.getvalue() == "lambda,box_lo,box_hi\n"


def test_box_outside_partition_is_rejected():
    with pytest.raises(ValueError):
        Raster(8, 0.0, 1.0).add(1.0, [8])
