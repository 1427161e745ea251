from __future__ import annotations

from collections import Counter

import pytest

from chainrec import corpus
from chainrec.homoclinic import find_tangencies

ENTRIES = corpus.all_entries()


def test_corpus_composition():
    kinds = Counter(e.kind for e in ENTRIES)
    assert len(ENTRIES) >= 6
    assert kinds["crossing"] >= 2 and kinds["non_crossing"] >= 2
    assert kinds["branch_intersection"] >= 1 and kinds["negative_derivative"] >= 1


@pytest.mark.parametrize("e", ENTRIES, ids=lambda e: e.name)
def test_frozen_parameter_solves_landing_equation(e):
    assert abs(corpus.solve_lambda0(e) - e.lam0) <= 1e-13
    assert abs(e.residual(e.lam0)) <= 1e-13
    lo, hi = e.family.window
    assert lo <= e.lam0 <= hi


@pytest.mark.parametrize("e", ENTRIES, ids=lambda e: e.name)
def test_constructed_tangency_is_found(e):
    recs = [r for r in find_tangencies(e.family, e.lam0, period_max=1)
            if abs(r.w - e.w) <= 1e-6 and abs(r.x0 - e.x0) <= 1e-6]
    assert recs
    assert all(r.L == e.L for r in recs)
    if e.expected_crossing is not None:
        assert [r.crossing for r in recs] == [e.expected_crossing]
    verdicts = {r.verdict for r in recs}
    assert e.expected_verdict in verdicts
