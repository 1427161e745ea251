from __future__ import annotations

import math

import numpy as np
import pytest

from chainrec.maps import logistic
from chainrec.scan import (
    ABOVE,
    BELOW,
    CANTOR_LIKE,
    INTERVAL_CYCLE,
    PERIODIC,
    SADDLE_NODE,
    TANGENCY,
    UNCLASSIFIED,
    ExplosionEvent,
    ScanSettings,
    classify_omega,
    detect_explosions,
    empirical_explosion,
    find_barricades,
    merge_events,
    profile,
    scan,
    sweep,
)

FEIGENBAUM = 3.569945671870944901842


def test_profile_mask_and_measure():
    p = profile(logistic(), 4.0, 2**10)
    assert p.mask().all() and p.measure == pytest.approx(1.0)
    assert p.n_components == 1


def test_sweep_rejects_unsorted_grid():
    with pytest.raises(ValueError):
        sweep(logistic(), [3.2, 3.1, 3.3], 2**8)


def test_detection_needs_three_profiles():
    f = logistic()
    with pytest.raises(ValueError):
        detect_explosions(sweep(f, [3.2, 3.3], 2**8), f)


def test_hyperbolic_window_has_no_events():
    _, events = scan(logistic((3.1, 3.3)), np.linspace(3.1, 3.3, 21))
    assert events == []


def test_fold_of_period_three():
    fam = logistic((3.82, 3.84))
    _, events = scan(fam, np.linspace(3.82, 3.84, 21))
    (ev,) = events
    assert ev.cause == SADDLE_NODE and ev.side == ABOVE
    assert ev.lam0 == pytest.approx(1 + math.sqrt(8), abs=1e-9)
    assert ev.evidence["period"] == 3 and abs(ev.evidence["multiplier"] - 1) <= 1e-3
    lo, hi = ev.bracket
    assert hi - lo <= 1e-8
    assert len(ev.refined["jump_boxes"]) == 3


def test_interior_crisis_is_a_crossing_tangency():
    fam = logistic((3.85, 3.86))
    _, events = scan(fam, np.linspace(3.85, 3.86, 11))
    assert [e.cause for e in events] == [TANGENCY]
    ev = events[0]
    assert ev.side == BELOW and ev.lam0 == pytest.approx(3.8568006524777, abs=1e-9)
    assert ev.evidence["period"] == 3 and ev.evidence["crossing"]


def test_scan_is_independent_of_worker_count():
    fam = logistic((3.82, 3.84))
    lams = np.linspace(3.82, 3.84, 21)
    _, a = scan(fam, lams, workers=1)
    _, b = scan(fam, lams, workers=2)
    assert [e.to_json() for e in a] == [e.to_json() for e in b]


def test_merge_keeps_unclassified_events_apart():
    evs = [ExplosionEvent(0.1, 1.0, BELOW, 0.01, cause=TANGENCY),
           ExplosionEvent(0.2, 1.0, BELOW, 0.01, cause=TANGENCY),
           ExplosionEvent(0.3, 1.0, BELOW, 0.01),
           ExplosionEvent(0.4, 1.0, BELOW, 0.01)]
    out = merge_events(evs, 1e-6)
    assert [e.cause for e in out] == [TANGENCY, UNCLASSIFIED, UNCLASSIFIED]
    assert out[0].evidence["merged_points"] == [0.2]


def test_event_json_field_names():
    d = ExplosionEvent(0.1, 1.0, BELOW, 0.01, bracket=(0.9, 1.1)).to_json()
    assert d["lambda0"] == 1.0 and d["bracket"] == [0.9, 1.1] and "lam0" not in d


def test_empirical_verdict_at_full_map_tangency():
    exploded, info = empirical_explosion(logistic((3.9, 4.0)), 4.0, 0.5)
    assert not exploded and info["recurrent_at_lam0"] and info[ABOVE] is None


@pytest.mark.parametrize("lam,kind", [(3.2, PERIODIC), (4.0, INTERVAL_CYCLE), (FEIGENBAUM, CANTOR_LIKE)])
def test_omega_limit_classes(lam, kind):
    got, _ = classify_omega(logistic(), lam, 0.3)
    assert got == kind


def test_fold_orbit_is_a_certified_barricade():
    lam = 1 + math.sqrt(8)
    bars = find_barricades(logistic(), lam, 0.4886)
    assert bars and all(b.certified for b in bars)
    assert any(b.period == 3 and b.non_hyperbolic for b in bars)


def test_settings_are_frozen():
    with pytest.raises(Exception):
        ScanSettings().n_boxes = 8
