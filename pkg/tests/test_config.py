from __future__ import annotations

import numpy as np
import pytest

from chainrec.config import DEFAULTS, load, parse
from chainrec.errors import ConfigError

GOOD = """\
[family]
kind = logistic
window = 3.8, 3.86

[grid]
lo = 3.8
hi = 3.86
count = 61
"""


def test_defaults_fill_missing_sections():
    cfg = parse(GOOD)
    assert cfg.n_boxes == DEFAULTS["resolution"]["n_boxes"]
    assert cfg.lams.size == 61 and cfg.lams[0] == 3.8
    s = cfg.scan_settings()
    assert s.n_boxes == 4096 and s.refine_levels == 2


def test_explicit_values_and_corpus_family():
    cfg = parse("[family]\nkind = corpus\nname = CF-1\n[grid]\nvalues = 1.486, 1.49\n"
                "[tolerances]\ntol_sn = 1e-4\n[scan]\nworkers = 3\n")
    assert np.array_equal(cfg.lams, [1.486, 1.49])
    assert cfg.tol_sn == 1e-4 and cfg.workers == 3
    assert cfg.family.family_id == "CF-1"


def test_polynomial_family():
    cfg = parse("[family]\nkind = polynomial\ncoefficients = [[0, 0], [0, 1], [0, -1]]\n"
                "domain = 0, 1\nwindow = 0, 4\n[grid]\nvalues = 3.2\n")
    assert cfg.family.eval(0.5, 4.0) == 1.0


@pytest.mark.parametrize("extra,match", [
    ("[resolution]\nn_boxes = 1000\n", r"cfg.ini:10: \[resolution\] n_boxes: n_boxes must be a power of two"),
    ("[scan]\nfoo = 1\n", r"cfg.ini:10: \[scan\] unknown key 'foo'"),
    ("[tolerances]\ntol_hyp = 0\n", r":10: \[tolerances\] tol_hyp: tolerances must be positive"),
    ("[bogus]\n", r"cfg.ini:9: unknown section \[bogus\]"),
])
def test_diagnostics_name_line_and_key(extra, match):
    with pytest.raises(ConfigError, match=match):
        parse(GOOD + extra, "cfg.ini")


def test_grid_outside_window():
    with pytest.raises(ConfigError, match=r"cfg.ini:7: \[grid\] hi: .*leaves the family window"):
        parse(GOOD.replace("hi = 3.86", "hi = 3.9"), "cfg.ini")


def test_bad_number_and_missing_key():
    with pytest.raises(ConfigError, match=r"\[grid\] count: cannot read 'x'"):
        parse(GOOD.replace("count = 61", "count = x"))
    with pytest.raises(ConfigError, match=r"\[family\] coefficients: missing required key"):
        parse("[family]\nkind = polynomial\n[grid]\nvalues = 1\n")


def test_missing_header_and_file():
    with pytest.raises(ConfigError, match=r":1: expected a \[section\] header"):
        parse("kind = logistic\n")
    with pytest.raises(ConfigError, match="cannot read config"):
        load("/nonexistent/cfg.ini")
