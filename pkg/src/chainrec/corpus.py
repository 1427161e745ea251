"""Curated families with a constructed homoclinic tangency.

Each entry fixes a family, the tangency parameter, the tangency point ``w``
(a critical point), the landing time ``L`` and the repelling point ``x0``.
Tangency parameters and points are frozen constants, computed once at 40
digits with mpmath (``scripts/build_corpus.py``). :func:`solve_lambda0`
re-solves the landing equation with plain scipy code, independent of the
package root finders, so tests can check the frozen values.

Cubic entries use ``f(x) = s x + b x^2 - x^3``. Its zeros are ``0`` and
``r_pm = (b +- sqrt(b^2 + 4 s)) / 2``, so a critical value that lands on
``r_pm`` reaches the repelling fixed point ``0`` one step later.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .maps import MapFamily, logistic, polynomial

# frozen oracle values: (lambda0, w)
FROZEN = {
    "CF-1": (1.4898268194500333965, 1.3606809501872514342),
    "CF-2": (1.3152910824528644311, -1.3095720530545022994),
    "NC-1": (4.0, 0.5),
    "NC-2": (2.568263036497530162, 0.94206682692723623122),
    "BI-1": (0.17944906361774790063, -0.89075084259642154981),
    "ND-1": (3.6785735104283222651, 0.5),
}


def _cubic_crit(s: float, b: float) -> np.ndarray:
    return np.sort(np.roots([-3.0, 2.0 * b, s]).real)


def _cubic(x, s, b):
    return s * x + b * x * x - x**3


def _zeros(s, b):
    d = np.sqrt(b * b + 4.0 * s)
    return (b - d) / 2.0, (b + d) / 2.0


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    kind: str  # crossing | non_crossing | branch_intersection | negative_derivative
    family: MapFamily
    lam0: float
    w: float
    L: int
    x0: float
    expected_crossing: bool | None
    expected_verdict: str
    # landing residual as a function of the parameter, for the oracle
    residual: Callable[[float], float]
    bracket: tuple[float, float]
    note: str = ""


def solve_lambda0(entry: CorpusEntry) -> float:
    return brentq(entry.residual, *entry.bracket, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _cf1() -> CorpusEntry:
    s = 1.5

    def res(b):
        c2 = _cubic_crit(s, b)[1]
        return _cubic(_cubic(c2, s, b), s, b) - _zeros(s, b)[0]

    b, w = FROZEN["CF-1"]
    fam = polynomial([[0, 0], [s, 0], [0, 1], [-1, 0]], (-0.79, 2.29), (1.485, 1.495), "CF-1")
    return CorpusEntry("CF-1", "crossing", fam, b, w, 3, 0.0,
                       True, "explosion_at_w", res, (1.3, 1.7),
                       "maximum lands on the negative zero, approach right, image below")


def _cf2() -> CorpusEntry:
    # mirror image x -> -x of the s = 1.7 member of the CF-1 family
    s = 1.7

    def res(b):
        c2 = _cubic_crit(s, b)[1]
        return _cubic(_cubic(c2, s, b), s, b) - _zeros(s, b)[0]

    b, w = FROZEN["CF-2"]
    fam = polynomial([[0, 0], [s, 0], [0, -1], [-1, 0]], (-2.25, 0.94), (1.31, 1.32), "CF-2")
    return CorpusEntry("CF-2", "crossing", fam, b, w, 3, 0.0,
                       True, "explosion_at_w", lambda v: -res(v), (1.0, 1.6),
                       "mirror of a crossing cubic, approach left, image above")


def _nc1() -> CorpusEntry:
    def res(lam):
        return lam * 0.25 * (1 - lam * 0.25)

    return CorpusEntry("NC-1", "non_crossing", logistic((3.9, 4.0)), 4.0, 0.5, 2, 0.0,
                       False, "no_explosion_at_w", res, (3.99, 4.0),
                       "full logistic map, critical orbit 1/2 -> 1 -> 0")


def _nc2() -> CorpusEntry:
    mu = 0.05

    def res(a):
        c2 = _cubic_crit(a, mu)[1]
        return _cubic(c2, a, mu) - _zeros(a, mu)[1]

    a, w = FROZEN["NC-2"]
    fam = polynomial([[0, 0], [0, 1], [mu, 0], [-1, 0]], (-1.619, 1.707), (2.45, 2.65), "NC-2")
    return CorpusEntry("NC-2", "non_crossing", fam, a, w, 2, 0.0,
                       False, "no_explosion_at_w", res, (2.3, 2.8),
                       "asymmetric odd cubic, maximum lands on the positive zero")


def _bi1() -> CorpusEntry:
    s = 2.7

    def res(b):
        c1 = _cubic_crit(s, b)[0]
        return _cubic(c1, s, b) - _zeros(s, b)[0]

    b, w = FROZEN["BI-1"]
    fam = polynomial([[0, 0], [s, 0], [0, 1], [-1, 0]], (-1.565, 1.891), (0.17, 0.19), "BI-1")
    return CorpusEntry("BI-1", "branch_intersection", fam, b, w, 2, 0.0,
                       None, "explosion_at_preimages_only", res, (0.1, 0.3),
                       "minimum lands on the negative zero; w lies in both branches")


def _nd1() -> CorpusEntry:
    def res(lam):
        x = 0.5
        for _ in range(3):
            x = lam * x * (1 - x)
        return x - (1 - 1 / lam)

    lam = FROZEN["ND-1"][0]
    return CorpusEntry("ND-1", "negative_derivative", logistic((3.6, 3.75)), lam, 0.5, 3,
                       1 - 1 / lam, None, "no_explosion_at_w", res, (3.67, 3.69),
                       "band merging: f^3(1/2) is the interior fixed point")


BUILDERS = {"CF-1": _cf1, "CF-2": _cf2, "NC-1": _nc1, "NC-2": _nc2, "BI-1": _bi1, "ND-1": _nd1}


def load(name: str) -> CorpusEntry:
    return BUILDERS[name]()


def all_entries() -> list[CorpusEntry]:
    return [b() for b in BUILDERS.values()]
