"""Recompute the corpus tangency parameters at 40 digits and compare them
with the frozen constants in ``chainrec.corpus.FROZEN``.

Needs mpmath (``pip install .[oracle]``). Exits non-zero on a mismatch.
"""
from __future__ import annotations

import sys

import mpmath as mp

from chainrec import corpus

mp.mp.dps = 40


def crit(s, b):
    d = mp.sqrt(4 * b * b + 12 * s)
    return sorted([(2 * b - d) / 6, (2 * b + d) / 6])


def f(x, s, b):
    return s * x + b * x * x - x**3


def zeros(s, b):
    d = mp.sqrt(b * b + 4 * s)
    return (b - d) / 2, (b + d) / 2


def f3_half(lam):
    x = mp.mpf(1) / 2
    for _ in range(3):
        x = lam * x * (1 - x)
    return x - (1 - 1 / lam)


def solve() -> dict[str, tuple]:
    # coefficients as the binary floats the families actually use
    out = {}
    s = mp.mpf(1.5)
    b = mp.findroot(lambda b: f(f(crit(s, b)[1], s, b), s, b) - zeros(s, b)[0], 1.49)
    out["CF-1"] = (b, crit(s, b)[1])
    s = mp.mpf(1.7)
    b = mp.findroot(lambda b: f(f(crit(s, b)[1], s, b), s, b) - zeros(s, b)[0], 1.315)
    out["CF-2"] = (b, -crit(s, b)[1])  # stored mirrored
    out["NC-1"] = (mp.mpf(4), mp.mpf(1) / 2)
    mu = mp.mpf(0.05)
    a = mp.findroot(lambda a: f(crit(a, mu)[1], a, mu) - zeros(a, mu)[1], 2.568)
    out["NC-2"] = (a, crit(a, mu)[1])
    s = mp.mpf(2.7)
    b = mp.findroot(lambda b: f(crit(s, b)[0], s, b) - zeros(s, b)[0], 0.1794)
    out["BI-1"] = (b, crit(s, b)[0])
    out["ND-1"] = (mp.findroot(f3_half, 3.6786), mp.mpf(1) / 2)
    return out


def main() -> int:
    bad = 0
    for name, (lam, w) in solve().items():
        lam_f, w_f = corpus.FROZEN[name]
        dl, dw = float(lam) - lam_f, float(w) - w_f
        ok = abs(dl) <= 1e-15 and abs(dw) <= 1e-15
        bad += not ok
        print(f"{name}: lambda0={mp.nstr(lam, 20)} w={mp.nstr(w, 20)} "
              f"d_lambda={dl:.1e} d_w={dw:.1e} {'ok' if ok else 'MISMATCH'}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
