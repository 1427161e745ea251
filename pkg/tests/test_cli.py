from __future__ import annotations

import json
from pathlib import Path

from chainrec import cli
from chainrec.errors import NumericalError
from chainrec.raster import Raster
from chainrec.scan import ExplosionEvent

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_chain_full_map(tmp_path, capsys):
    code, out, _ = run(capsys, "chain", "--config", CONFIGS / "logistic_4.ini", "--out", tmp_path)
    assert code == 0 and "components=1" in out
    rows = (tmp_path / "covering.csv").read_text().splitlines()
    assert rows[0] == "lambda,box_lo,box_hi,component_id"
    assert len(rows) - 1 >= 0.99 * 4096
    r = Raster.load(tmp_path / "covering.chxr")
    assert len(r) == 1 and r.rows[0].size == len(rows) - 1


def test_plotdata_round_trip(tmp_path, capsys):
    run(capsys, "chain", "--config", CONFIGS / "logistic_3_2.ini", "--out", tmp_path)
    code, out, _ = run(capsys, "plotdata", tmp_path / "covering.chxr")
    assert code == 0
    plot = out.splitlines()
    cover = (tmp_path / "covering.csv").read_text().splitlines()
    assert [r.rsplit(",", 1)[0] for r in cover[1:]] == plot[1:]


def test_plotdata_truncated(tmp_path, capsys):
    run(capsys, "chain", "--config", CONFIGS / "logistic_4.ini", "--out", tmp_path)
    bad = tmp_path / "bad.chxr"
    bad.write_bytes((tmp_path / "covering.chxr").read_bytes()[:40])
    code, _, err = run(capsys, "plotdata", bad)
    assert code == 1 and "unexpected EOF in raster" in err


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[family]\nkind = logistic\n[grid]\nvalues = 3.2\n[resolution]\nn_boxes = 1000\n")
    code, _, err = run(capsys, "chain", "--config", cfg)
    assert code == 1 and "n_boxes must be a power of two" in err


def test_tangency_records(capsys):
    code, out, _ = run(capsys, "tangency", "--config", CONFIGS / "logistic_4.ini", "--lambda", "4")
    (rec,) = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and (rec["w"], rec["L"], rec["x0"]) == (0.5, 2, 0.0)
    code, out, _ = run(capsys, "tangency", "--config", CONFIGS / "logistic_4.ini", "--lambda", "3.5")
    assert code == 0 and out == ""


def test_tangency_at_crossing_construction(capsys):
    from chainrec.corpus import FROZEN

    lam = repr(FROZEN["CF-1"][0])
    code, out, _ = run(capsys, "tangency", "--config", CONFIGS / "cf1.ini", "--lambda", lam)
    recs = [json.loads(l) for l in out.splitlines()]
    mine = [r for r in recs if abs(r["w"] - FROZEN["CF-1"][1]) < 1e-9]
    assert code == 0 and mine and mine[0]["crossing"] and mine[0]["verdict"] == "explosion_at_w"


def test_tangency_needs_lambda(capsys):
    code, _, err = run(capsys, "tangency", "--config", CONFIGS / "logistic_4.ini")
    assert code == 1 and "--lambda" in err


def test_hyperbolic_scan_writes_empty_events(tmp_path, capsys):
    code, out, _ = run(capsys, "scan", "--config", CONFIGS / "hyperbolic.ini", "--out", tmp_path)
    assert code == 0 and "0 event(s)" in out
    assert (tmp_path / "events.jsonl").read_text() == ""
    assert len(Raster.load(tmp_path / "scan.chxr")) == 21


def test_unclassified_event_exit_code(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(cli, "scan", lambda *a, **k: ([], [ExplosionEvent(0.5, 3.9, "below", 0.01)]))
    code, _, _ = run(capsys, "scan", "--config", CONFIGS / "hyperbolic.ini", "--out", tmp_path)
    assert code == 3
    assert json.loads((tmp_path / "events.jsonl").read_text())["cause"] == "unclassified"


def test_numerical_failure_exit_code(tmp_path, capsys, monkeypatch):
    def boom(*a, **k):
        raise NumericalError("did not converge")

    monkeypatch.setattr(cli, "scan", boom)
    code, _, err = run(capsys, "scan", "--config", CONFIGS / "hyperbolic.ini", "--out", tmp_path)
    assert code == 2 and "did not converge" in err


def test_scan_output_is_deterministic(tmp_path, capsys):
    cfg = tmp_path / "p3.ini"
    cfg.write_text("[family]\nkind = logistic\nwindow = 3.82, 3.84\n[grid]\nlo = 3.82\nhi = 3.84\ncount = 21\n")
    run(capsys, "scan", "--config", cfg, "--out", tmp_path / "a", "--workers", "1")
    run(capsys, "scan", "--config", cfg, "--out", tmp_path / "b", "--workers", "3")
    for name in ("events.jsonl", "scan.chxr"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
