"""Predicted versus numerically observed explosion status at tangency points.

For every tangency record through a given critical point, the prediction of
:func:`homoclinic.predict_explosion` is compared with the empirical one-sided
void test of :func:`scan.empirical_explosion`, at ``w`` and, when the record
predicts explosions at preimages only, at the first two backward-orbit
points past ``w`` (for non-crossing records those same points must stay
recurrent from both sides).
"""
from __future__ import annotations

from dataclasses import dataclass

from . import homoclinic as hc
from .errors import NoHomoclinicOrbitError
from .maps import MapFamily, find_periodic_orbits
from .scan import VerdictSettings, empirical_explosion


@dataclass(frozen=True)
class VerdictRow:
    family_id: str
    lam: float
    approach_branch: str
    crossing: bool
    prediction: str
    point: str        # "w" or "z_-k"
    x: float
    expected_explosion: bool
    observed_explosion: bool
    info: dict

    @property
    def agrees(self) -> bool:
        return self.expected_explosion == self.observed_explosion


def _records_through(family: MapFamily, lam: float, w: float, x0: float, period_max: int,
                     tol: float) -> list[hc.HomoclinicRecord]:
    recs = hc.find_tangencies(family, lam, period_max=period_max)
    return [r for r in recs if abs(r.w - w) <= tol and abs(r.x0 - x0) <= tol]


def compare_at(family: MapFamily, lam: float, w: float, x0: float, *, period_max: int = 1,
               preimages: int = 2, vs: VerdictSettings | None = None,
               tol: float = 1e-6) -> list[VerdictRow]:
    vs = vs or VerdictSettings()
    recs = _records_through(family, lam, w, x0, period_max, tol)
    if not recs:
        raise NoHomoclinicOrbitError(f"no tangency record through w={w:.12g} at lambda={lam:.12g}")
    orbit = min(find_periodic_orbits(family, lam, period_max), key=lambda o: o.distance_to(x0))
    branches = hc.compute_branches(family, lam, orbit, x0=x0)
    radius = vs.radius_frac * family.width
    at_w, at_w_info = empirical_explosion(family, lam, w, radius, vs)
    rows = []
    for r in recs:
        others = [o for o in recs if o is not r]
        pred = hc.predict_explosion(r, branches, others)
        rows.append(VerdictRow(family.family_id, lam, r.approach_branch, r.crossing, pred, "w", w,
                               pred == hc.EXPLOSION_AT_W, at_w, at_w_info))
        if r.in_left and r.in_right and r.derivative_sign > 0:
            back = hc.build_backward_orbit(family, lam, r, branches, r.L + preimages)
            for k in range(r.L + 1, r.L + preimages + 1):
                z = back[k]
                rad = min(radius, 0.5 * abs(z - x0))
                seen, info = empirical_explosion(family, lam, z, rad, vs)
                rows.append(VerdictRow(family.family_id, lam, r.approach_branch, r.crossing, pred,
                                       f"z_-{k}", z, pred == hc.PREIMAGES_ONLY, seen, info))
    return rows
