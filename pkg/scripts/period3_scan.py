"""Scan the logistic map across the period-3 window and report the events."""
from __future__ import annotations

import argparse
import json
import math
import time

import numpy as np

from chainrec.maps import logistic
from chainrec.scan import ScanSettings, scan


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=3.8)
    ap.add_argument("--hi", type=float, default=3.86)
    ap.add_argument("--count", type=int, default=61)
    ap.add_argument("--n-boxes", type=int, default=2**12)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    fam = logistic((args.lo, args.hi))
    t0 = time.perf_counter()
    _, events = scan(fam, np.linspace(args.lo, args.hi, args.count), ScanSettings(n_boxes=args.n_boxes),
                     workers=args.workers)
    elapsed = time.perf_counter() - t0
    fold = 1 + math.sqrt(8)
    for e in events:
        print(json.dumps({"cause": e.cause, "side": e.side, "lambda0": e.lam0, "x": e.x,
                          "period": e.evidence.get("period"), "multiplier": e.evidence.get("multiplier"),
                          "jump_boxes": e.refined.get("jump_boxes")}))
    sn = [e for e in events if e.cause == "saddle_node"]
    if sn:
        print(f"fold: |lambda0 - (1+sqrt 8)| = {abs(sn[0].lam0 - fold):.2e}")
    print(f"{len(events)} event(s) in {elapsed:.1f} s")


if __name__ == "__main__":
    main()
