"""Run configuration: INI files with flat ``key = value`` sections.

Every default lives in :data:`DEFAULTS`. Errors carry the file, line and key
that caused them.

Example::

    [family]
    kind = logistic
    window = 3.8, 3.86

    [grid]
    lo = 3.8
    hi = 3.86
    count = 61

    [resolution]
    n_boxes = 4096
"""
from __future__ import annotations

import configparser
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corpus
from .errors import ConfigError
from .homoclinic import TOL_LAND
from .maps import TOL_HYP, TOL_ORBIT, MapFamily, logistic, polynomial, quadratic
from .scan import ScanSettings

# section -> key -> default (None = required or derived)
DEFAULTS: dict[str, dict[str, object]] = {
    "family": {
        "kind": None,            # logistic | quadratic | polynomial | corpus
        "name": None,            # corpus entry name, e.g. CF-1
        "coefficients": None,    # polynomial: JSON table C[i][j] of x^i lam^j
        "domain": None,          # "a, b"
        "window": None,          # "lo, hi"; the family's declared parameter window
    },
    "grid": {"lo": None, "hi": None, "count": None, "values": None},
    # refinement_levels: scan events must re-localize at n_boxes * 2**k, k = 1..levels
    "resolution": {"n_boxes": 4096, "eps_factor": 1.0, "refinement_levels": 2},
    "tolerances": {"tol_orbit": TOL_ORBIT, "tol_hyp": TOL_HYP, "tol_land": TOL_LAND, "tol_sn": 1e-3},
    "scan": {"delta_boxes": 8, "period_max": 8, "k_max": 8, "window_boxes": 48.0,
             "lam_xtol": 1e-8, "iterate_cap": 64, "workers": 1},
    "output": {"dir": "out"},
}


@dataclass
class RunConfig:
    family: MapFamily
    lams: np.ndarray
    n_boxes: int = 4096
    eps_factor: float = 1.0
    refinement_levels: int = 2
    tol_orbit: float = TOL_ORBIT
    tol_hyp: float = TOL_HYP
    tol_land: float = TOL_LAND
    tol_sn: float = 1e-3
    delta_boxes: int = 8
    period_max: int = 8
    k_max: int = 8
    window_boxes: float = 48.0
    lam_xtol: float = 1e-8
    iterate_cap: int = 64
    workers: int = 1
    out_dir: Path = field(default_factory=lambda: Path("out"))
    source: str = "<config>"

    def scan_settings(self) -> ScanSettings:
        return ScanSettings(n_boxes=self.n_boxes, eps_factor=self.eps_factor,
                            delta_boxes=self.delta_boxes, lam_xtol=self.lam_xtol,
                            period_max=self.period_max, tol_sn=self.tol_sn, tol_land=self.tol_land,
                            tol_orbit=self.tol_orbit, tol_hyp=self.tol_hyp,
                            window_boxes=self.window_boxes, k_max=self.k_max,
                            refine_levels=self.refinement_levels)


class _Reader:
    def __init__(self, text: str, source: str):
        self.source = source
        self.lines = text.splitlines()
        self.cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
        try:
            self.cp.read_string(text, source=source)
        except configparser.MissingSectionHeaderError as exc:
            raise ConfigError(f"{source}:{exc.lineno}: expected a [section] header, got {exc.line.strip()!r}") from None
        except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
            raise ConfigError(f"{source}:{exc.lineno}: {exc.message.split(': ', 1)[-1]}") from None
        except configparser.ParsingError as exc:
            lineno, line = exc.errors[0]
            raise ConfigError(f"{source}:{lineno}: cannot parse line {line.strip()!r}") from None
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc.message}") from None
        for sec in self.cp.sections():
            if sec not in DEFAULTS:
                raise ConfigError(f"{source}:{self._line(sec)}: unknown section [{sec}]")
            for key in self.cp[sec]:
                if key not in DEFAULTS[sec]:
                    raise ConfigError(f"{source}:{self._line(sec, key)}: [{sec}] unknown key {key!r}")

    def _line(self, sec: str, key: str | None = None) -> int | str:
        in_sec = False
        for i, raw in enumerate(self.lines, 1):
            s = raw.strip()
            m = re.fullmatch(r"\[(.+)\]", s)
            if m:
                in_sec = m.group(1).strip() == sec
                if in_sec and key is None:
                    return i
            elif in_sec and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", s, re.I):
                return i
        return "?"

    def fail(self, sec: str, key: str, msg: str):
        where = self._line(sec, key) if self.cp.has_option(sec, key) else self._line(sec)
        raise ConfigError(f"{self.source}:{where}: [{sec}] {key}: {msg}")

    def raw(self, sec: str, key: str) -> str | None:
        if self.cp.has_option(sec, key):
            return self.cp.get(sec, key)
        d = DEFAULTS[sec][key]
        return None if d is None else str(d)

    def get(self, sec: str, key: str, conv, required: bool = False):
        v = self.raw(sec, key)
        if v is None:
            if required:
                self.fail(sec, key, "missing required key")
            return None
        try:
            return conv(v)
        except (ValueError, TypeError, json.JSONDecodeError):
            self.fail(sec, key, f"cannot read {v!r} as {getattr(conv, '__name__', 'value')}")

    def pair(self, sec: str, key: str, required: bool = False):
        def conv(v):
            parts = [float(p) for p in v.split(",")]
            if len(parts) != 2:
                raise ValueError
            return parts[0], parts[1]
        conv.__name__ = "pair of numbers"
        return self.get(sec, key, conv, required)


def _family(r: _Reader) -> MapFamily:
    kind = r.get("family", "kind", str, required=True).strip().lower()
    window = r.pair("family", "window")
    domain = r.pair("family", "domain")
    if kind == "logistic":
        build = lambda: logistic(window or (0.0, 4.0))
    elif kind == "quadratic":
        build = lambda: quadratic(domain or (-1.5, 1.5), window or (-1.5, -0.75))
    elif kind == "polynomial":
        table = r.get("family", "coefficients", json.loads, required=True)
        if domain is None:
            r.fail("family", "domain", "missing required key")
        if window is None:
            r.fail("family", "window", "missing required key")
        build = lambda: polynomial(table, domain, window)
    elif kind == "corpus":
        name = r.get("family", "name", str, required=True).strip()
        if name not in corpus.BUILDERS:
            r.fail("family", "name", f"unknown corpus entry {name!r}")
        build = lambda: corpus.load(name).family
    else:
        r.fail("family", "kind", f"unknown family kind {kind!r}")
    try:
        return build()
    except (ConfigError, ValueError) as exc:
        raise ConfigError(f"{r.source}:{r._line('family')}: [family] {exc}") from None


def _grid(r: _Reader, fam: MapFamily) -> np.ndarray:
    values = r.get("grid", "values", lambda v: [float(p) for p in v.split(",") if p.strip()])
    if values is not None:
        lams = np.array(values, dtype=float)
        if np.any(np.diff(lams) < 0):
            r.fail("grid", "values", "values must be sorted")
    else:
        lo = r.get("grid", "lo", float, required=True)
        hi = r.get("grid", "hi", float, required=True)
        count = r.get("grid", "count", int, required=True)
        if count < 1:
            r.fail("grid", "count", "count must be positive")
        if hi < lo:
            r.fail("grid", "hi", "hi must not be below lo")
        lams = np.linspace(lo, hi, count)
    w_lo, w_hi = fam.window
    if lams.size and (lams[0] < w_lo or lams[-1] > w_hi):
        key = "values" if values is not None else ("lo" if lams[0] < w_lo else "hi")
        r.fail("grid", key, f"parameter grid leaves the family window [{w_lo}, {w_hi}]")
    return lams


def parse(text: str, source: str = "<config>") -> RunConfig:
    r = _Reader(text, source)
    fam = _family(r)
    lams = _grid(r, fam)
    cfg = RunConfig(fam, lams, source=source)
    n = r.get("resolution", "n_boxes", int)
    if n < 1 or n & (n - 1):
        r.fail("resolution", "n_boxes", "n_boxes must be a power of two")
    cfg.n_boxes = n
    cfg.eps_factor = r.get("resolution", "eps_factor", float)
    if cfg.eps_factor < 1:
        r.fail("resolution", "eps_factor", "eps_factor must be at least one box width")
    cfg.refinement_levels = r.get("resolution", "refinement_levels", int)
    if cfg.refinement_levels < 1:
        r.fail("resolution", "refinement_levels", "events need at least one refinement level")
    for key in DEFAULTS["tolerances"]:
        v = r.get("tolerances", key, float)
        if not v > 0:
            r.fail("tolerances", key, "tolerances must be positive")
        setattr(cfg, key, v)
    for key, conv in (("delta_boxes", int), ("period_max", int), ("k_max", int), ("iterate_cap", int),
                      ("workers", int), ("window_boxes", float), ("lam_xtol", float)):
        v = r.get("scan", key, conv)
        if not v > 0:
            r.fail("scan", key, "must be positive")
        setattr(cfg, key, v)
    cfg.out_dir = Path(r.get("output", "dir", str))
    return cfg


def load(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{p}: cannot read config ({exc.strerror})") from None
    return parse(text, str(p))
