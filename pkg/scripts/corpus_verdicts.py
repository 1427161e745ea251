"""Predicted versus observed explosion status on the curated corpus, plus the
barricades found at each tangency parameter."""
from __future__ import annotations

import warnings

from chainrec import corpus
from chainrec.scan import find_barricades
from chainrec.verdicts import compare_at


def main() -> None:
    warnings.simplefilter("ignore")
    n_rows = n_agree = 0
    for e in corpus.all_entries():
        for r in compare_at(e.family, e.lam0, e.w, e.x0):
            n_rows += 1
            n_agree += r.agrees
            print(f"{e.name:5s} {r.approach_branch:5s} crossing={r.crossing!s:5s} {r.prediction:28s} "
                  f"{r.point:5s} x={r.x:+.5f} predicted={r.expected_explosion!s:5s} "
                  f"observed={r.observed_explosion!s:5s} {'agree' if r.agrees else 'DISAGREE'}")
        for b in find_barricades(e.family, e.lam0, e.w):
            print(f"      barricade y={b.y:+.5f} period={b.period} multiplier={b.multiplier:.4g} "
                  f"non_hyperbolic={b.non_hyperbolic} critical_preimage={b.critical_preimage}")
    print(f"agreement {n_agree}/{n_rows}")


if __name__ == "__main__":
    main()
