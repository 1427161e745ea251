"""Parameter sweeps, explosion detection and cause attribution.

An explosion is seen as a box that is recurrent on one side of a parameter
step while a whole neighbourhood of it is recurrence-free on the other side.
The parameter is then localized by bisection, and the cause is searched on
the recurrent side of the resolved parameter: first a fold of a periodic
orbit, then a crossing homoclinic tangency.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import homoclinic as hc
from .errors import EscapeError, NoBirthEventError, NumericalError
from .graph import BoxPartition, ChainSetApprox, build_graph, chain_recurrent_set
from .maps import (
    PERIOD_DOUBLING,
    TOL_HYP,
    TOL_ORBIT,
    MapFamily,
    PeriodicOrbit,
    find_critical_points,
    find_periodic_orbits,
    find_saddle_node_parameter,
    has_orbit,
)

SADDLE_NODE = "saddle_node"
TANGENCY = "tangency_crossing"
UNCLASSIFIED = "unclassified"
BELOW, ABOVE = "below", "above"


@dataclass(frozen=True)
class ScanSettings:
    """Knobs of the detection and attribution pipeline."""

    n_boxes: int = 2**12
    eps_factor: float = 1.0  # eps_num in box widths
    delta_boxes: int = 8
    lam_xtol: float = 1e-8
    period_max: int = 8
    tol_sn: float = 1e-3
    tol_orbit: float = TOL_ORBIT
    tol_hyp: float = TOL_HYP
    tol_land: float = hc.TOL_LAND
    # cause search window on the recurrent side, in box widths
    window_boxes: float = 48.0
    k_max: int = 8
    tangency_grid: int = 129
    # orbit periods tracked by the tangency search and how many nearest
    # landing brackets are polished before giving up
    tangency_period_max: int = 4
    tangency_tries: int = 32
    monotone_samples: int = 8
    merge_tol: float = 1e-6
    # every event must re-localize at n_boxes * 2**k for k = 1..refine_levels
    refine_levels: int = 2


# -- profiles -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RecurrenceProfile:
    lam: float
    n_boxes: int
    boxes: np.ndarray
    labels: np.ndarray
    h: float
    error: str | None = None

    @property
    def measure(self) -> float:
        return self.boxes.size * self.h

    @property
    def n_components(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def mask(self) -> np.ndarray:
        m = np.zeros(self.n_boxes, dtype=bool)
        m[self.boxes] = True
        return m


def covering(family: MapFamily, lam: float, n_boxes: int, eps_factor: float = 1.0) -> ChainSetApprox:
    part = BoxPartition.of(family, n_boxes)
    return chain_recurrent_set(build_graph(family, lam, part, eps_factor * part.h))


def profile(family: MapFamily, lam: float, n_boxes: int, eps_factor: float = 1.0) -> RecurrenceProfile:
    h = (family.domain[1] - family.domain[0]) / n_boxes
    try:
        a = covering(family, lam, n_boxes, eps_factor)
    except NumericalError as exc:
        empty = np.zeros(0, dtype=np.int64)
        return RecurrenceProfile(float(lam), n_boxes, empty, empty, h, str(exc))
    return RecurrenceProfile(float(lam), n_boxes, a.boxes, a.labels, h)


def _profile_task(args):
    return profile(*args)


def sweep(family: MapFamily, lams, n_boxes: int, eps_factor: float = 1.0,
          workers: int = 1) -> list[RecurrenceProfile]:
    """One profile per parameter, in the order of ``lams``."""
    lams = [float(v) for v in lams]
    if any(b < a for a, b in zip(lams, lams[1:])):
        raise ValueError("parameter grid must be sorted")
    tasks = [(family, lam, n_boxes, eps_factor) for lam in lams]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_profile_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [_profile_task(t) for t in tasks]


# -- events ---------------------------------------------------------------------


@dataclass
class ExplosionEvent:
    x: float
    lam0: float
    side: str
    delta: float
    cause: str = UNCLASSIFIED
    evidence: dict = field(default_factory=dict)
    lambda_resolved: float = math.nan
    bracket: tuple[float, float] = (math.nan, math.nan)
    n_boxes: int = 0
    flags: list[str] = field(default_factory=list)
    # transition re-localized at finer partitions: jump sizes and [n_boxes, lambda] pairs
    refined: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = asdict(self)
        d["lambda0"] = d.pop("lam0")
        d["bracket"] = list(d["bracket"])
        return d


def _dilate(mask: np.ndarray, r: int) -> np.ndarray:
    c = np.concatenate([[0], np.cumsum(mask, dtype=np.int64)])
    n = mask.size
    idx = np.arange(n)
    lo = np.clip(idx - r, 0, n)
    hi = np.clip(idx + r + 1, 0, n)
    return (c[hi] - c[lo]) > 0


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    d = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return list(zip(starts.tolist(), (ends - starts).tolist()))


def neighbourhood_recurrent(family: MapFamily, lam: float, x: float, radius: float,
                            n_boxes: int, eps_factor: float = 1.0) -> bool:
    """Whether some box meeting ``[x - radius, x + radius]`` is recurrent."""
    a = covering(family, lam, n_boxes, eps_factor)
    p = a.partition
    lo, hi = int(p.index_of(x - radius)), int(p.index_of(x + radius))
    i = np.searchsorted(a.boxes, lo)
    return bool(i < a.boxes.size and a.boxes[i] <= hi)


def candidates(profiles: list[RecurrenceProfile], family: MapFamily,
               settings: ScanSettings | None = None) -> list[tuple[float, float, float, str]]:
    """``(x, lam_a, lam_b, side)`` per adjacent pair and side: the centre of the
    longest run of boxes recurrent on one side whose ``delta``-neighbourhood
    is recurrence-free on the other."""
    s = settings or ScanSettings()
    part = BoxPartition.of(family, profiles[0].n_boxes)
    out = []
    for p, q in zip(profiles, profiles[1:]):
        if p.error or q.error:
            continue
        a, b = p.mask(), q.mask()
        for side, fresh, old in ((BELOW, b, a), (ABOVE, a, b)):
            cand = fresh & ~_dilate(old, s.delta_boxes)
            if cand.any():
                start, length = max(_runs(cand), key=lambda r: (r[1], -r[0]))
                out.append((float(part.center(start + length // 2)), p.lam, q.lam, side))
    return out


def _candidate_task(args) -> ExplosionEvent | None:
    family, (x, lam_a, lam_b, side), s, classify = args
    n = s.n_boxes
    delta = s.delta_boxes * family.width / n
    ev = _localize(family, x, lam_a, lam_b, side, delta, n, s)
    if ev is None or not persists_under_refinement(ev, family, s):
        return None
    if classify:
        classify_cause(ev, family, s)
    return ev


def detect_explosions(profiles: list[RecurrenceProfile], family: MapFamily,
                      settings: ScanSettings | None = None, classify: bool = True,
                      workers: int = 1) -> list[ExplosionEvent]:
    """Events from adjacent profile pairs, localized, re-verified and attributed.

    Candidates are independent, so they run concurrently; the merged list is
    sorted by ``(lam0, x)`` and does not depend on ``workers``.
    """
    if len(profiles) < 3:
        raise ValueError("need ≥ 3 profiles")
    s = settings or ScanSettings()
    if profiles[0].n_boxes != s.n_boxes:
        s = replace(s, n_boxes=profiles[0].n_boxes)
    tasks = [(family, c, s, classify) for c in candidates(profiles, family, s)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(_candidate_task, tasks))
    else:
        found = [_candidate_task(t) for t in tasks]
    events = merge_events([ev for ev in found if ev is not None], s.merge_tol)
    events.sort(key=lambda e: (e.lam0, e.x))
    return events


def _bisect_transition(family, x, void_end, rec_end, delta, n, s: ScanSettings):
    """Bracket of the parameter where ``B_delta(x)`` first holds a recurrent
    box, walking from ``void_end`` to ``rec_end``; None when the endpoints
    do not straddle a transition or the covering only shifts by a few boxes."""
    def rec(lam):
        return neighbourhood_recurrent(family, lam, x, delta, n, s.eps_factor)

    if rec(void_end) or not rec(rec_end):
        return None
    lo, hi = void_end, rec_end
    while abs(hi - lo) > s.lam_xtol:
        mid = 0.5 * (lo + hi)
        if rec(mid):
            hi = mid
        else:
            lo = mid
    # continuous motion of a recurrent point shifts the covering by a box or
    # two across the bracket; an explosion adds at least a neighbourhood
    at_void = covering(family, lo, n, s.eps_factor).mask()
    at_rec = covering(family, hi, n, s.eps_factor).mask()
    jump = int((at_rec & ~_dilate(at_void, 2)).sum())
    if jump * (family.width / n) < 2 * delta:
        return None
    return lo, hi, jump


def _localize(family, x, lam_a, lam_b, side, delta, n, s: ScanSettings) -> ExplosionEvent | None:
    void_end, rec_end = (lam_a, lam_b) if side == BELOW else (lam_b, lam_a)
    found = _bisect_transition(family, x, void_end, rec_end, delta, n, s)
    if found is None:
        return None
    lo, hi, jump = found
    lam_res = 0.5 * (lo + hi)

    def rec(lam, nb=n):
        return neighbourhood_recurrent(family, lam, x, delta, nb, s.eps_factor)

    flags: list[str] = []
    samples = np.linspace(void_end, lo, s.monotone_samples + 2)[1:-1]
    if any(rec(v) for v in samples):
        flags.append("resolution-limited")
        if any(rec(v, 2 * n) for v in samples):
            flags.append("non-monotone after refinement")
    bracket = (min(lo, hi), max(lo, hi))
    return ExplosionEvent(x, lam_res, side, delta, lambda_resolved=lam_res, bracket=bracket,
                          n_boxes=n, flags=flags, refined={"jump_boxes": [jump]})


def persists_under_refinement(event: ExplosionEvent, family: MapFamily,
                              settings: ScanSettings | None = None) -> bool:
    """Re-localize the transition with the same physical neighbourhood at
    finer partitions.

    Coarse coverings overestimate recurrence, so each finer transition lies on
    the recurrent side of the previous one; the search walks from there over
    ``window_boxes`` coarse boxes. Every level must show a transition whose
    jump still spans ``2 delta`` (checked inside the bisection).
    """
    s = settings or ScanSettings()
    h = family.width / event.n_boxes
    toward = 1.0 if event.side == BELOW else -1.0
    w_lo, w_hi = family.window
    start = event.bracket[0] if event.side == BELOW else event.bracket[1]
    jumps = list(event.refined.get("jump_boxes", []))
    resolved: list[list] = []
    for f in (2**k for k in range(1, s.refine_levels + 1)):
        far = min(w_hi, max(w_lo, start + toward * s.window_boxes * h))
        fine = _bisect_transition(family, event.x, start, far, event.delta, f * event.n_boxes, s)
        if fine is None:
            event.refined.update(jump_boxes=jumps, lambda_resolved_fine=resolved, failed_at=f * event.n_boxes)
            return False
        start = fine[0]
        jumps.append(fine[2])
        resolved.append([f * event.n_boxes, 0.5 * (fine[0] + fine[1])])
    event.refined.update(jump_boxes=jumps, lambda_resolved_fine=resolved)
    return True


def merge_events(events: list[ExplosionEvent], tol: float) -> list[ExplosionEvent]:
    """Collapse events attributed to the same cause at the same parameter."""
    out: list[ExplosionEvent] = []
    for ev in sorted(events, key=lambda e: (e.lam0, e.x)):
        dup = next((o for o in out if o.cause == ev.cause and o.cause != UNCLASSIFIED
                    and abs(o.lam0 - ev.lam0) <= tol), None)
        if dup is None:
            out.append(ev)
        else:
            dup.evidence.setdefault("merged_points", []).append(ev.x)
    return out


# -- cause attribution ----------------------------------------------------------------


def best_resolved(event: ExplosionEvent) -> float:
    fine = event.refined.get("lambda_resolved_fine")
    return fine[-1][1] if fine else event.lambda_resolved


def classify_cause(event: ExplosionEvent, family: MapFamily,
                   settings: ScanSettings | None = None) -> ExplosionEvent:
    """Fill ``cause``/``evidence`` and snap ``lam0`` to the cause parameter."""
    s = settings or ScanSettings()
    if "non-monotone after refinement" in event.flags:
        return event
    h = family.width / event.n_boxes
    lam_res = event.lambda_resolved
    # the finest localization is the best estimate; the coarse one bounds the void side
    lam_best = best_resolved(event)
    W = s.window_boxes * h
    wlo, whi = family.window
    slack = 2 * h
    if event.side == ABOVE:
        lo, hi = max(wlo, lam_best - W), min(whi, lam_res + slack)
        void_end = hi
    else:
        lo, hi = max(wlo, lam_res - slack), min(whi, lam_best + W)
        void_end = lo
    sn = _saddle_node_cause(family, lo, hi, void_end, lam_best, s)
    if sn is not None:
        event.cause = SADDLE_NODE
        event.lam0 = sn["lambda"]
        event.evidence = sn
        return event
    tg = _tangency_cause(family, event, lo, hi, s)
    if tg is not None:
        event.cause = TANGENCY
        event.lam0 = tg["lambda"]
        event.evidence = tg
    return event


def _saddle_node_cause(family, lo, hi, void_end, lam_res, s: ScanSettings) -> dict | None:
    rec_end = lo if void_end == hi else hi
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        orbits = find_periodic_orbits(family, void_end, s.period_max,
                                      tol_orbit=s.tol_orbit, tol_hyp=s.tol_hyp)
    cands = sorted((o for o in orbits if abs(o.multiplier - 1.0) <= 2.0),
                   key=lambda o: abs(o.multiplier - 1.0))
    r = 0.02 * family.width
    found = []
    tried: list[tuple[int, float]] = []
    for orb in cands:
        x = orb.points[0]
        if any(p == orb.period and abs(x - y) < r for p, y in tried):
            continue
        tried.append((orb.period, x))
        xr = (max(family.domain[0], x - r), min(family.domain[1], x + r))
        kw = dict(x_range=xr, grid=2**12)
        if has_orbit(family, rec_end, orb.period, **kw):
            continue
        try:
            lam_sn = find_saddle_node_parameter(family, orb.period, rec_end, void_end, **kw)
        except NoBirthEventError:
            continue
        ev = _fold_orbit(family, orb.period, lam_sn, rec_end, void_end, xr, s)
        if ev is not None:
            found.append(ev)
    if not found:
        return None
    best = min(found, key=lambda e: abs(e["lambda"] - lam_res))
    return best


def _fold_orbit(family, period, lam_sn, rec_end, void_end, xr, s: ScanSettings) -> dict | None:
    step = 1e-10 if void_end > rec_end else -1e-10
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for lam in (lam_sn, lam_sn + step, lam_sn + 2 * step):
            orbs = [o for o in find_periodic_orbits(family, lam, period, period_min=period,
                                                    x_range=xr, grid=2**12,
                                                    tol_orbit=s.tol_orbit, tol_hyp=s.tol_hyp)]
            if orbs:
                break
    if not orbs:
        return None
    o: PeriodicOrbit = min(orbs, key=lambda o: abs(o.multiplier - 1.0))
    if abs(o.multiplier - 1.0) > s.tol_sn or o.classification == PERIOD_DOUBLING:
        return None
    return {"kind": "periodic_orbit", "lambda": float(lam_sn), "period": o.period,
            "multiplier": float(o.multiplier), "points": list(o.points),
            "classification": o.classification}


def _tangency_cause(family, event: ExplosionEvent, lo, hi, s: ScanSettings) -> dict | None:
    try:
        brackets = hc.landing_brackets(family, lo, hi, n_grid=s.tangency_grid,
                                       period_max=s.tangency_period_max, k_max=s.k_max,
                                       positive_only=True)
    except NumericalError:
        return None
    target = best_resolved(event)
    brackets.sort(key=lambda b: (abs(0.5 * (b.lo + b.hi) - target), b.period, b.k))
    seen: list[float] = []
    for b in brackets[: s.tangency_tries]:
        p = b.bisect(family)
        if p is None or any(abs(p.lam - q) <= 1e-10 for q in seen):
            continue
        seen.append(p.lam)
        try:
            recs = hc.find_tangencies(family, p.lam, period_max=p.period, iterate_cap=s.k_max + p.period,
                                      tol_land=s.tol_land)
        except NumericalError:
            continue
        good = [r for r in recs if r.verdict in (hc.EXPLOSION_AT_W, hc.PREIMAGES_ONLY)]
        if not good:
            continue
        a = covering(family, p.lam, event.n_boxes, s.eps_factor)
        for r in good:
            if _same_component(a, event.x, event.delta, r.x0):
                ev = r.to_json()
                ev["kind"] = "homoclinic_record"
                return ev
    return None


def _same_component(a: ChainSetApprox, x: float, delta: float, x0: float) -> bool:
    comp0 = a.component_of(int(a.partition.index_of(x0)))
    if comp0 < 0:
        return False
    lo, hi = int(a.partition.index_of(x - delta)), int(a.partition.index_of(x + delta))
    i, j = np.searchsorted(a.boxes, [lo, hi + 1])
    return bool(np.any(a.labels[i:j] == comp0))


def scan(family: MapFamily, lams, settings: ScanSettings | None = None, workers: int = 1):
    """Sweep, detect and attribute. Returns ``(profiles, events)``."""
    s = settings or ScanSettings()
    profiles = sweep(family, lams, s.n_boxes, s.eps_factor, workers)
    if len(profiles) < 3:
        return profiles, []
    return profiles, detect_explosions(profiles, family, s, workers=workers)


# -- empirical verdicts ---------------------------------------------------------------


@dataclass(frozen=True)
class VerdictSettings:
    n_boxes: int = 2**18
    radius_frac: float = 0.01
    offsets: tuple[float, ...] = (1e-3, 3e-4, 1e-4)


def void_sides(family: MapFamily, lam0: float, x: float, radius: float,
               vs: VerdictSettings | None = None) -> dict[str, bool | None]:
    """For each parameter side, whether the ``radius``-neighbourhood of ``x``
    is recurrence-free at every offset of the ladder (None: side outside
    the family window)."""
    vs = vs or VerdictSettings()
    out: dict[str, bool | None] = {}
    for side, sign in ((BELOW, -1.0), (ABOVE, 1.0)):
        lams = [lam0 + sign * d for d in vs.offsets]
        if not all(family.window[0] <= v <= family.window[1] for v in lams):
            out[side] = None
            continue
        out[side] = not any(neighbourhood_recurrent(family, v, x, radius, vs.n_boxes)
                            for v in lams)
    return out


def empirical_explosion(family: MapFamily, lam0: float, x: float, radius: float | None = None,
                        vs: VerdictSettings | None = None) -> tuple[bool, dict]:
    """Numerical verdict on whether ``(x, lam0)`` is an explosion point."""
    vs = vs or VerdictSettings()
    if radius is None:
        radius = vs.radius_frac * family.width
    sides = void_sides(family, lam0, x, radius, vs)
    here = neighbourhood_recurrent(family, lam0, x, radius, vs.n_boxes)
    return bool(here and any(v for v in sides.values())), {"recurrent_at_lam0": here, **sides}


# -- limit sets and barricades ----------------------------------------------------


def interval_omega(family: MapFamily, lam: float, center: float, eps: float, part: BoxPartition,
                   horizon: int = 64) -> np.ndarray:
    """Boxes met by ``f^k(B_eps(center))`` for ``horizon/2 <= k <= horizon``.

    Images of an interval are intervals and are computed exactly, so this is
    a finite-horizon stand-in for the omega-limit of the set (not of its
    points). Box images would not do: their fattening spills across every
    repelling point, which is exactly the one-sidedness a barricade is about.
    """
    a, b = family.domain
    lo, hi = max(a, center - eps), min(b, center + eps)
    mask = np.zeros(part.n_boxes, dtype=bool)
    for k in range(1, horizon + 1):
        lo, hi = family.image_interval(lo, hi, lam)
        if 2 * k >= horizon:
            mask[part.index_of(lo):part.index_of(hi) + 1] = True
    return mask


@dataclass(frozen=True)
class Barricade:
    y: float
    z: float
    period: int
    multiplier: float
    non_hyperbolic: bool
    critical_preimage: bool
    comparison: dict

    @property
    def certified(self) -> bool:
        return self.non_hyperbolic or self.critical_preimage


def find_barricades(family: MapFamily, lam: float, z: float, eps_levels=None,
                    n_boxes: int = 2**12, period_max: int = 6, tol_land: float = 1e-9,
                    iterate_cap: int = 64, min_excess: int = 2) -> list[Barricade]:
    """Periodic barricades for ``z``.

    ``S`` and ``Z`` are omega-limit coverings of ``B_eps(z)`` and
    ``B_eps(y)`` (see :func:`interval_omega`) on the ``eps`` ladder; limits
    are read at the smallest ``eps``. A periodic point ``y`` in the limit of
    ``S``, or landed on by the orbit of ``z``, is a barricade when the limit
    of ``Z`` holds at least ``min_excess`` boxes outside a two-box fattening
    of ``S``.
    """
    part = BoxPartition.of(family, n_boxes)
    h = part.h
    eps_levels = sorted(eps_levels or (4 * h, 2 * h, h), reverse=True)
    if len(eps_levels) < 2:
        raise ValueError("need at least two eps levels")

    def omega(c, e):
        return interval_omega(family, lam, c, e, part, iterate_cap)

    S = [omega(z, e) for e in eps_levels]
    near = _dilate(S[-1], 2)
    z_orbit = family.orbit(z, lam, iterate_cap + 1)
    crit_orbits = [family.orbit(c.x, lam, iterate_cap + 1)[1:] for c in find_critical_points(family, lam)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        orbits = find_periodic_orbits(family, lam, period_max)
    out = []
    for o in orbits:
        pts = np.asarray(o.points)
        lands = bool(np.min(np.abs(z_orbit[:, None] - pts[None, :])) <= tol_land)
        inside = [y for y in pts if S[-1][part.index_of(y)]]
        if not inside and not lands:
            continue
        y = float(inside[0] if inside else pts[0])
        Z = [omega(y, e) for e in eps_levels]
        excess = Z[-1] & ~near
        if int(excess.sum()) < min_excess:
            continue
        crit_pre = any(np.min(np.abs(tr[:, None] - pts[None, :])) <= tol_land for tr in crit_orbits)
        out.append(Barricade(
            y, float(z), o.period, float(o.multiplier), not o.hyperbolic, bool(crit_pre),
            {"eps_levels": [float(e) for e in eps_levels],
             "S_boxes": [int(m.sum()) for m in S],
             "Z_boxes": [int(m.sum()) for m in Z],
             "excess_boxes": int(excess.sum()),
             "z_lands_on_orbit": lands},
        ))
    return out


PERIODIC, INTERVAL_CYCLE, CANTOR_LIKE = "periodic", "interval_cycle", "cantor_like"


def classify_omega(family: MapFamily, lam: float, z: float, transient: int = 10**4,
                   tail: int = 2**18, period_max: int = 64,
                   levels: tuple[int, ...] = (2**10, 2**12, 2**14),
                   density: float = 0.9) -> tuple[str, dict]:
    """Coarse type of the omega-limit set of ``z``."""
    coef = [float(c) for c in family.coefficients_at(lam)[::-1]]
    a, b = family.domain
    slack = 1e-9 * family.width

    def step(x):
        y = 0.0
        for c in coef:
            y = y * x + c
        return y

    x = float(z)
    for _ in range(transient):
        x = step(x)
        if not a - slack <= x <= b + slack:
            raise EscapeError(f"orbit of {z} left the domain")
    xs = np.empty(tail)
    for i in range(tail):
        xs[i] = x
        x = step(x)
        if not a - slack <= x <= b + slack:
            raise EscapeError(f"orbit of {z} left the domain")
    # periodic: the tail returns to itself within the finest box width
    hmin = family.width / levels[-1]
    probe = xs[-4 * period_max:]
    for p in range(1, period_max + 1):
        if np.all(np.abs(probe[p:] - probe[:-p]) <= hmin):
            return PERIODIC, {"period": p, "points": sorted(set(np.round(probe[-p:], 12)))}
    coarse = BoxPartition(a, b, levels[0])
    occ0 = np.zeros(levels[0], dtype=bool)
    occ0[coarse.index_of(xs)] = True
    ratios = []
    for n in levels[1:]:
        part = BoxPartition(a, b, n)
        occ = np.zeros(n, dtype=bool)
        occ[part.index_of(xs)] = True
        hull = np.repeat(occ0, n // levels[0])
        ratios.append(float(occ.sum() / hull.sum()))
    kind = INTERVAL_CYCLE if min(ratios) >= density else CANTOR_LIKE
    return kind, {"density": ratios, "pieces": len(_runs(occ0))}
