"""Homoclinic tangencies through critical points.

A tangency record ties a critical point ``w`` to a repelling periodic point
``x0`` with ``f^L(w) = x0``. With ``g = f^m`` (``m`` the period of ``x0``)
the two unstable branches are the limits of ``g^k`` applied to the one-sided
neighbourhoods ``[x0 - d, x0]`` and ``[x0, x0 + d]``. A record is crossing
when the image of a neighbourhood of ``w`` under ``f^L`` lies on the side of
``x0`` opposite to the branch along which the backward orbit of ``w``
returns to ``x0``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import (
    BranchNotStabilizedError,
    DegenerateTangencyError,
    NoHomoclinicOrbitError,
)
from .maps import (
    ATTRACTING,
    REPELLING,
    MapFamily,
    PeriodicOrbit,
    _grid_roots,
    find_critical_points,
    find_periodic_orbits,
    newton_track,
)

TOL_LAND = 1e-9
BRANCH_DEPTH = 64
BRANCH_TOL = 1e-9
FANOUT = 4

LEFT, RIGHT = "left", "right"
ABOVE, BELOW = "above", "below"

EXPLOSION_AT_W = "explosion_at_w"
NO_EXPLOSION_AT_W = "no_explosion_at_w"
PREIMAGES_ONLY = "explosion_at_preimages_only"

Interval = tuple[float, float]


@dataclass(frozen=True)
class UnstableBranches:
    x0: float
    period: int
    multiplier: float
    derivative_sign: int
    delta0: float
    U_left: Interval | None
    U_right: Interval | None
    depth: int
    # nested images g^k of the local one-sided neighbourhoods, k = 0..depth
    left_images: tuple[Interval, ...] = field(default=(), repr=False)
    right_images: tuple[Interval, ...] = field(default=(), repr=False)

    @property
    def branch_relation(self) -> str:
        return branch_relation(self.U_left, self.U_right)

    def contains(self, branch: str, x: float, tol: float = BRANCH_TOL) -> bool:
        u = self.U_left if branch == LEFT else self.U_right
        return u is not None and u[0] - tol <= x <= u[1] + tol

    def membership(self, x: float) -> tuple[bool, bool]:
        return self.contains(LEFT, x), self.contains(RIGHT, x)


def branch_relation(u: Interval | None, v: Interval | None, tol: float = BRANCH_TOL) -> str:
    """Relation of two branch intervals that share the endpoint-or-point x0.

    Besides the four nesting cases, two branches can overlap without either
    containing the other; that is reported as ``overlapping``.
    """
    if u is None or v is None:
        return "disjoint"
    if abs(u[0] - v[0]) <= tol and abs(u[1] - v[1]) <= tol:
        return "equal"
    inner = min(u[1], v[1]) - max(u[0], v[0])
    if inner <= tol:
        return "disjoint"
    if v[0] - tol <= u[0] and u[1] <= v[1] + tol:
        return "left_inside_right"
    if u[0] - tol <= v[0] and v[1] <= u[1] + tol:
        return "right_inside_left"
    return "overlapping"


def is_crossing(approach_branch: str, local_side: str) -> bool:
    return (approach_branch == LEFT and local_side == ABOVE) or (
        approach_branch == RIGHT and local_side == BELOW
    )


@dataclass(frozen=True)
class HomoclinicRecord:
    family_id: str
    lam: float
    x0: float
    period: int
    multiplier: float
    w: float
    L: int
    approach_branch: str
    local_side: str
    crossing: bool
    exclusive_branch: bool
    derivative_sign: int
    in_left: bool
    in_right: bool
    landing_residual: float
    verdict: str | None = None

    def to_json(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


# -- branches -----------------------------------------------------------------


def _linearization_radius(family: MapFamily, lam: float, x0: float, m: int, mu: float,
                          n_probe: int = 16) -> float:
    """Largest tested radius on which ``g = f^m`` expands away from x0 by at
    least ``1 + rho`` with ``rho = (|mu| - 1) / 2`` and has no critical point."""
    rho = (abs(mu) - 1.0) / 2.0
    d = 0.05 * family.width
    t = np.linspace(1.0 / n_probe, 1.0, n_probe)
    for _ in range(60):
        xs = np.concatenate([x0 - d * t, x0 + d * t])
        xs = xs[family.contains(xs)]
        gx, dg = family.iterate_with_derivative(xs, lam, m)
        ok = np.all(np.abs(gx - x0) >= (1.0 + rho) * np.abs(xs - x0)) and np.all(
            np.sign(dg) == np.sign(mu)
        )
        if ok:
            return d
        d /= 2.0
    raise BranchNotStabilizedError(f"no linearization zone found around x0={x0:.12g}")


def _grow(family: MapFamily, lam: float, start: Interval, n_steps: int, depth: int,
          tol: float) -> tuple[list[Interval], bool]:
    images = [start]
    cur = start
    for _ in range(depth + 1):
        lo, hi = family.image_interval_n(cur[0], cur[1], lam, n_steps)
        nxt = (min(lo, cur[0]), max(hi, cur[1]))
        images.append(nxt)
        cur = nxt
    last, prev = images[-1], images[-2]
    stable = abs(last[0] - prev[0]) <= tol and abs(last[1] - prev[1]) <= tol
    return images, stable


def compute_branches(family: MapFamily, lam: float, orbit: PeriodicOrbit, x0: float | None = None,
                     depth: int = BRANCH_DEPTH, tol: float = BRANCH_TOL) -> UnstableBranches:
    """U_left and U_right of the repelling periodic point ``x0`` of ``orbit``.

    For a negative multiplier the two one-sided neighbourhoods are swapped by
    ``g``, so both branches equal the image of the full neighbourhood.
    """
    if orbit.classification != REPELLING:
        raise ValueError(f"unstable branches need a repelling orbit, got {orbit.classification}")
    if x0 is None:
        x0 = orbit.points[0]
    m = orbit.period
    mu = orbit.multiplier
    d = _linearization_radius(family, lam, x0, m, mu)
    a, b = family.domain
    left0 = (max(x0 - d, a), x0)
    right0 = (x0, min(x0 + d, b))
    sign = 1 if mu > 0 else -1
    if sign < 0:
        both = (left0[0], right0[1])
        imgs, ok = _grow(family, lam, both, m, depth, tol)
        if not ok:
            raise BranchNotStabilizedError("branch not stabilized", partial=imgs[-1])
        return UnstableBranches(x0, m, mu, sign, d, imgs[-1], imgs[-1], depth,
                                tuple(imgs), tuple(imgs))
    out = {}
    for name, start in ((LEFT, left0), (RIGHT, right0)):
        if start[1] - start[0] <= 0.0:
            out[name] = (None, ())
            continue
        imgs, ok = _grow(family, lam, start, m, depth, tol)
        if not ok:
            raise BranchNotStabilizedError(f"{name} branch not stabilized", partial=imgs[-1])
        out[name] = (imgs[-1], tuple(imgs))
    return UnstableBranches(x0, m, mu, sign, d, out[LEFT][0], out[RIGHT][0], depth,
                            out[LEFT][1], out[RIGHT][1])


# -- local geometry -------------------------------------------------------------


def local_side(family: MapFamily, lam: float, w: float, L: int, x0: float,
               probes: tuple[float, ...] = (1e-3, 3e-4, 1e-4)) -> str:
    """Side of ``x0`` on which ``f^L`` maps a small neighbourhood of ``w``."""
    resid = abs(float(family.iterate(w, lam, L)) - x0)
    sides = set()
    for p in probes:
        hp = p * family.width
        v = family.iterate(np.array([w - hp, w + hp]), lam, L) - x0
        if np.sign(v[0]) != np.sign(v[1]) or np.any(np.abs(v) <= 10 * resid):
            raise DegenerateTangencyError(
                f"degenerate tangency: f^{L} is not locally one-sided at w={w:.12g}"
            )
        sides.add(ABOVE if v[0] > 0 else BELOW)
    if len(sides) != 1:
        raise DegenerateTangencyError(f"degenerate tangency: probe sides disagree at w={w:.12g}")
    return sides.pop()


def _preimages(family: MapFamily, lam: float, target: float, m: int, within: Interval,
               grid: int = 4096) -> np.ndarray:
    lo, hi = within
    if hi - lo <= 0:
        return np.zeros(0)
    xs = np.linspace(lo, hi, grid + 1)

    def g(x):
        return family.iterate(x, lam, m) - target

    def dg(x):
        return family.iterate_with_derivative(x, lam, m)[1]

    roots, _ = _grid_roots(g, dg, xs, tangent_tol=1e-12)
    return roots


def build_backward_orbit(family: MapFamily, lam: float, record: HomoclinicRecord,
                         branches: UnstableBranches, k_max: int, choice: int = 0) -> list[float]:
    """Backward orbit ``z_0 = x0, z_-1, ..., z_-L = w, ...`` of length ``k_max + 1``.

    Past ``w`` the orbit descends through the nested images of the approach
    branch's local neighbourhood, taking at each level the preimage nearest
    to x0 (``choice`` picks the alternative preimage at the first level for
    fan-out enumeration), then follows the local inverse of ``g = f^m`` down
    to x0.
    """
    m = record.period
    L = record.L
    stem = [float(v) for v in family.orbit(record.w, lam, L + 1)][::-1]
    stem[0] = record.x0
    if k_max <= L:
        return stem[: k_max + 1]
    imgs = branches.left_images if record.approach_branch == LEFT else branches.right_images
    if not imgs:
        raise NoHomoclinicOrbitError(f"no homoclinic orbit through w={record.w:.12g}")
    tol = BRANCH_TOL
    level = next((k for k, iv in enumerate(imgs) if iv[0] - tol <= record.w <= iv[1] + tol), None)
    if level is None:
        raise NoHomoclinicOrbitError(f"no homoclinic orbit through w={record.w:.12g}")
    out = list(stem)
    target = record.w
    first = True
    x0 = record.x0
    local = imgs[0]
    while len(out) <= k_max:
        if level > 0:
            cands = _preimages(family, lam, target, m, imgs[level - 1])
            level -= 1
        else:
            cands = _preimages(family, lam, target, m, local)
        if cands.size == 0:
            raise NoHomoclinicOrbitError(f"no preimage of {target:.12g} inside the branch")
        cands = cands[np.argsort(np.abs(cands - x0), kind="stable")]
        if level == 0 and len(out) > L + m:
            # inside the local zone take the root on the branch side
            side = cands[(cands - x0) * (1 if record.approach_branch == RIGHT else -1) >= 0]
            cands = side if side.size else cands
        pick = min(choice, cands.size - 1) if first else 0
        first = False
        y = float(cands[pick])
        seg = [float(v) for v in family.orbit(y, lam, m)][::-1]
        # seg[0] = f^(m-1)(y), ..., seg[-1] = y
        out.extend(seg)
        target = y
    return out[: k_max + 1]


def approach_branch_of(backward: list[float], x0: float, L: int) -> str | None:
    tail = np.asarray(backward[L + 1:]) - x0
    if tail.size == 0:
        return None
    s = np.sign(tail[-max(1, tail.size // 4):])
    if np.all(s > 0):
        return RIGHT
    if np.all(s < 0):
        return LEFT
    return None


# -- tangency detection ---------------------------------------------------------


def _normalize_landing(orbit: PeriodicOrbit, j: int, k: int) -> tuple[int, int]:
    """Smallest multiple ``L`` of the period with ``L >= k`` and the orbit
    index reached at step ``L`` when step ``k`` lands on ``points[j]``."""
    m = orbit.period
    L = m * math.ceil(k / m)
    return L, (j + L - k) % m


def find_tangencies(family: MapFamily, lam: float, period_max: int = 4, iterate_cap: int = 64,
                    tol_land: float = TOL_LAND, notes: list[str] | None = None,
                    orbits: list[PeriodicOrbit] | None = None) -> list[HomoclinicRecord]:
    """Homoclinic tangency records at ``lam``, one per branch containing w."""
    if notes is None:
        notes = []
    if orbits is None:
        orbits = find_periodic_orbits(family, lam, period_max)
    crit = find_critical_points(family, lam)
    records: list[HomoclinicRecord] = []
    for cp in crit:
        w = cp.x
        traj = family.orbit(w, lam, iterate_cap + 1)
        if not np.all(family.contains(traj, 1e-9 * family.width)):
            notes.append(f"orbit of w={w:.12g} escapes the domain")
            continue
        hit = None
        for k in range(1, iterate_cap + 1):
            for orb in orbits:
                dist = np.abs(np.asarray(orb.points) - traj[k])
                j = int(np.argmin(dist))
                if dist[j] <= tol_land:
                    hit = (k, orb, j)
                    break
            if hit:
                break
        if hit is None:
            continue
        k, orb, j = hit
        if orb.classification == ATTRACTING:
            # asymptotic convergence to an attractor, not a landing
            continue
        if orb.classification != REPELLING:
            notes.append(
                f"tangency to non-repelling orbit ({orb.classification}, period {orb.period}) "
                f"from w={w:.12g} after {k} steps"
            )
            continue
        L, jj = _normalize_landing(orb, j, k)
        x0 = orb.points[jj]
        resid = abs(float(family.iterate(w, lam, L)) - x0)
        br = compute_branches(family, lam, orb, x0)
        side = local_side(family, lam, w, L, x0)
        in_l, in_r = br.membership(w)
        if br.derivative_sign < 0:
            in_l = in_r = in_l or in_r
        if not (in_l or in_r):
            notes.append(f"w={w:.12g} lands on x0={x0:.12g} but lies in no unstable branch")
            continue
        for branch, member in ((LEFT, in_l), (RIGHT, in_r)):
            if not member:
                continue
            if br.derivative_sign < 0 and branch == RIGHT and in_l:
                # both branches coincide; one record suffices
                continue
            rec = HomoclinicRecord(
                family.family_id, float(lam), float(x0), orb.period, float(orb.multiplier),
                float(w), int(L), branch, side, is_crossing(branch, side),
                bool(in_l != in_r), br.derivative_sign, bool(in_l), bool(in_r), float(resid),
            )
            records.append(replace(rec, verdict=predict_explosion(rec, br)))
    return records


def predict_explosion(record: HomoclinicRecord, branches: UnstableBranches | None = None,
                      others: list[HomoclinicRecord] = ()) -> str:
    """Predicted explosion status of ``w`` (and its preimages) at ``lam``.

    ``others`` are further records through the same ``w`` (other branches or
    fan-out alternatives); any non-crossing one blocks an explosion at ``w``.
    """
    sign = branches.derivative_sign if branches is not None else record.derivative_sign
    if sign < 0:
        return NO_EXPLOSION_AT_W
    if record.in_left and record.in_right:
        # w itself is recurrent from both sides; the crossing orbit's
        # preimages past w are still explosion points
        return PREIMAGES_ONLY if record.crossing else NO_EXPLOSION_AT_W
    if not record.crossing or any(not r.crossing for r in others):
        return NO_EXPLOSION_AT_W
    return EXPLOSION_AT_W


# -- tangency parameters ---------------------------------------------------------


@dataclass(frozen=True)
class LandingParameter:
    lam: float
    critical_index: int
    period: int
    orbit_index: int
    k: int


def _track_orbits(family: MapFamily, lams: np.ndarray, period_max: int,
                  positive_only: bool = False) -> list[list]:
    """Repelling periodic points followed along ``lams`` by Newton continuation.

    Returns one list per orbit point: ``(period, values)`` with NaN where the
    continuation was lost.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        seeds = [o for o in find_periodic_orbits(family, lams[0], period_max)
                 if o.classification == REPELLING and (o.multiplier > 0 or not positive_only)]
    tracks = []
    for orb in seeds:
        for x in orb.points:
            vals = np.full(lams.size, np.nan)
            cur = x
            for i, lam in enumerate(lams):
                cur = newton_track(family, cur, lam, orb.period) if cur is not None else None
                if cur is None:
                    break
                vals[i] = cur
            tracks.append((orb.period, vals))
    return tracks


@dataclass(frozen=True)
class LandingBracket:
    """Grid interval on which ``f^k(c) - p`` changes sign."""
    lo: float
    hi: float
    critical_index: int
    c_ref: float
    p_ref: float
    period: int
    orbit_index: int
    k: int

    def bisect(self, family: MapFamily, xtol: float = 1e-14) -> LandingParameter | None:
        lam = _bisect_landing(family, self.lo, self.hi, self.c_ref, self.p_ref, self.period, self.k, xtol)
        if lam is None:
            return None
        return LandingParameter(lam, self.critical_index, self.period, self.orbit_index, self.k)


def landing_brackets(family: MapFamily, lam_lo: float, lam_hi: float, *, n_grid: int = 401,
                     period_max: int = 2, k_max: int = 8,
                     positive_only: bool = False) -> list[LandingBracket]:
    """Sign changes of ``f^k(c(lam)) - p(lam)`` along a parameter grid.

    A landing at step ``k`` repeats at later steps on the same grid interval;
    only the smallest ``k`` is kept.
    """
    lams = np.linspace(lam_lo, lam_hi, n_grid)
    crit0 = family.critical_x(lams[0])
    tracks = _track_orbits(family, lams, period_max, positive_only)
    out: dict[tuple[int, int, int], LandingBracket] = {}

    def crit_at(lam, ref):
        cs = family.critical_x(lam)
        return min(cs, key=lambda c: abs(c - ref)) if cs else None

    for ci, c0 in enumerate(crit0):
        cvals = np.full(lams.size, np.nan)
        ref = c0
        for i, lam in enumerate(lams):
            c = crit_at(lam, ref)
            if c is None:
                break
            cvals[i] = ref = c
        iters = np.empty((k_max + 1, lams.size))
        for i, lam in enumerate(lams):
            iters[:, i] = family.orbit(cvals[i], lam, k_max + 1) if np.isfinite(cvals[i]) else np.nan
        for ti, (period, pv) in enumerate(tracks):
            for k in range(1, k_max + 1):
                F = iters[k] - pv
                ok = np.isfinite(F[:-1]) & np.isfinite(F[1:])
                for i in np.flatnonzero(ok & (np.sign(F[:-1]) * np.sign(F[1:]) < 0)):
                    key = (ci, ti, int(i))
                    if key not in out:
                        out[key] = LandingBracket(float(lams[i]), float(lams[i + 1]), ci, float(cvals[i]),
                                                  float(pv[i]), period, ti, k)
    return sorted(out.values(), key=lambda b: (b.lo, b.k, b.critical_index, b.orbit_index))


def tangency_parameters(family: MapFamily, lam_lo: float, lam_hi: float, *, n_grid: int = 401,
                        period_max: int = 2, k_max: int = 8, xtol: float = 1e-14,
                        positive_only: bool = False) -> list[LandingParameter]:
    """Parameters in ``[lam_lo, lam_hi]`` where a critical orbit lands on a
    repelling periodic point.

    The landing condition ``f^k(c(lam)) = p(lam)`` is codimension one, so it is
    found from sign changes along a parameter grid and polished by bisection.
    """
    out = [p for b in landing_brackets(family, lam_lo, lam_hi, n_grid=n_grid, period_max=period_max,
                                       k_max=k_max, positive_only=positive_only)
           if (p := b.bisect(family, xtol)) is not None]
    out.sort(key=lambda p: (p.lam, p.k))
    # a landing at step k repeats at every later step; keep the first
    kept: list[LandingParameter] = []
    for p in out:
        if any(abs(p.lam - q.lam) <= 1e-10 and (p.critical_index, p.orbit_index)
               == (q.critical_index, q.orbit_index) for q in kept):
            continue
        kept.append(p)
    return kept


def _bisect_landing(family, lo, hi, c_ref, p_ref, period, k, xtol):
    def F(lam):
        cs = family.critical_x(lam)
        if not cs:
            return None
        c = min(cs, key=lambda v: abs(v - c_ref))
        p = newton_track(family, p_ref, lam, period)
        if p is None:
            return None
        return float(family.iterate(c, lam, k)) - p

    f_lo = F(lo)
    if f_lo is None:
        return None
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = F(mid)
        if fm is None:
            return None
        if np.sign(fm) == np.sign(f_lo):
            lo, f_lo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
