"""One-parameter families of polynomial interval maps.

A family is stored as a coefficient table ``C`` with
``f(x, lam) = sum_ij C[i, j] * x**i * lam**j``, which covers the logistic
map, ``x**2 + lam``, cubics with parameter-dependent coefficients and
arbitrary user tables. All derivatives are exact polynomial derivatives.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import FamilyError, FlatIntervalError, NoBirthEventError

CRIT_GRID = 4096
ORBIT_GRID = 2**14
PERIOD_CAP = 24
TOL_ORBIT = 1e-9
TOL_HYP = 1e-4
TOL_CRIT = 1e-12

ATTRACTING = "attracting"
REPELLING = "repelling"
SADDLE_NODE = "non_hyperbolic_saddle_node"
PERIOD_DOUBLING = "non_hyperbolic_period_doubling"


@dataclass(frozen=True, eq=False)
class MapFamily:
    """A C-infinity family ``f(x, lam)`` mapping ``domain`` into itself.

    Args:
        coeffs: table of shape (deg_x + 1, deg_lam + 1).
        domain: state interval ``(a, b)``.
        window: parameter interval on which invariance is guaranteed.
        family_id: name tag used in exported records.
        check_invariance: verify ``f(domain, lam) ⊂ domain`` across the
            window at construction. Only disable for root-finding work on
            families without a compact invariant interval.
    """

    coeffs: np.ndarray
    domain: tuple[float, float]
    window: tuple[float, float]
    family_id: str = "custom"
    check_invariance: bool = field(default=True, repr=False)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 2 or c.size == 0 or not np.all(np.isfinite(c)):
            raise FamilyError("coefficient table must be a finite 2-D array")
        object.__setattr__(self, "coeffs", c)
        a, b = (float(v) for v in self.domain)
        lo, hi = (float(v) for v in self.window)
        if not a < b:
            raise FamilyError(f"empty domain [{a}, {b}]")
        if not lo <= hi:
            raise FamilyError(f"empty parameter window [{lo}, {hi}]")
        object.__setattr__(self, "domain", (a, b))
        object.__setattr__(self, "window", (lo, hi))
        self._check_derivatives()
        if self.check_invariance:
            self._check_invariance()

    # -- evaluation -----------------------------------------------------

    @property
    def width(self) -> float:
        return self.domain[1] - self.domain[0]

    def coefficients_at(self, lam: float) -> np.ndarray:
        """Coefficients in ``x`` (ascending powers) at parameter ``lam``."""
        powers = float(lam) ** np.arange(self.coeffs.shape[1])
        return self.coeffs @ powers

    def eval(self, x, lam):
        return P.polyval(x, self.coefficients_at(lam))

    def derivative(self, x, lam, k: int = 1):
        """k-th partial derivative in ``x``."""
        return P.polyval(x, P.polyder(self.coefficients_at(lam), k))

    def d1(self, x, lam):
        return self.derivative(x, lam, 1)

    def d2(self, x, lam):
        return self.derivative(x, lam, 2)

    def dlam(self, x, lam):
        j = np.arange(1, self.coeffs.shape[1])
        if j.size == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        dc = self.coeffs[:, 1:] @ (j * float(lam) ** (j - 1))
        return P.polyval(x, dc)

    def iterate(self, x, lam, n: int):
        a = self.coefficients_at(lam)
        x = np.asarray(x, dtype=float)
        for _ in range(n):
            x = P.polyval(x, a)
        return x

    def iterate_with_derivative(self, x, lam, n: int):
        """Return ``(f^n(x), (f^n)'(x))`` by the chain rule."""
        a = self.coefficients_at(lam)
        da = P.polyder(a)
        x = np.asarray(x, dtype=float)
        d = np.ones_like(x)
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(n):
                d = d * P.polyval(x, da)
                x = P.polyval(x, a)
        return x, d

    def orbit(self, x: float, lam: float, n: int) -> np.ndarray:
        """The points ``x, f(x), ..., f^(n-1)(x)``."""
        a = self.coefficients_at(lam)
        out = np.empty(n)
        for k in range(n):
            out[k] = x
            x = float(P.polyval(x, a))
        return out

    def image_interval(self, lo: float, hi: float, lam: float) -> tuple[float, float]:
        """Exact image of ``[lo, hi]``: f is monotone between critical points."""
        a = self.coefficients_at(lam)
        pts = [lo, hi]
        pts.extend(c for c in self._critical_x(a) if lo < c < hi)
        vals = P.polyval(np.asarray(pts), a)
        return float(vals.min()), float(vals.max())

    def critical_x(self, lam: float) -> list[float]:
        """Real critical points inside the domain (polynomial root finder)."""
        a, b = self.domain
        return [c for c in self._critical_x(self.coefficients_at(lam)) if a <= c <= b]

    def image_interval_n(self, lo: float, hi: float, lam: float, n: int) -> tuple[float, float]:
        for _ in range(n):
            lo, hi = self.image_interval(lo, hi, lam)
        return lo, hi

    def contains(self, x, slack: float = 0.0):
        a, b = self.domain
        return (x >= a - slack) & (x <= b + slack)

    # -- construction checks ---------------------------------------------

    def _critical_x(self, a: np.ndarray) -> list[float]:
        da = np.trim_zeros(P.polyder(a), "b")
        if da.size <= 1:
            return []
        roots = P.polyroots(da)
        return sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-9 * (1 + abs(r.real)))

    def _check_invariance(self, n_lam: int = 33):
        a, b = self.domain
        slack = 1e-12 * self.width
        for lam in np.linspace(*self.window, n_lam):
            lo, hi = self.image_interval(a, b, lam)
            if lo < a - slack or hi > b + slack:
                raise FamilyError(
                    f"{self.family_id}: f(., {lam:.6g}) maps [{a}, {b}] onto "
                    f"[{lo:.6g}, {hi:.6g}], outside the domain"
                )

    def _check_derivatives(self, n_probe: int = 64, rtol: float = 1e-6):
        rng = np.random.default_rng(0)
        xs = rng.uniform(*self.domain, n_probe)
        lams = rng.uniform(*self.window, n_probe) if self.window[1] > self.window[0] \
            else np.full(n_probe, self.window[0])
        step = 1e-6 * self.width
        for x, lam in zip(xs, lams):
            fd = (self.eval(x + step, lam) - self.eval(x - step, lam)) / (2 * step)
            an = self.d1(x, lam)
            scale = max(abs(an), abs(self.eval(x, lam)) / self.width, 1.0)
            if abs(fd - an) > rtol * scale:
                raise FamilyError(f"d1 disagrees with finite differences at x={x:.6g}")


def logistic(window=(0.0, 4.0)) -> MapFamily:
    """``lam * x * (1 - x)`` on [0, 1]."""
    return MapFamily([[0.0, 0.0], [0.0, 1.0], [0.0, -1.0]], (0.0, 1.0), window, "logistic")


def quadratic(domain=(-1.5, 1.5), window=(-1.5, -0.75), check_invariance=True) -> MapFamily:
    """``x**2 + lam``; the default domain is invariant over the default window."""
    return MapFamily([[0.0, 1.0], [0.0, 0.0], [1.0, 0.0]], domain, window, "quadratic",
                     check_invariance=check_invariance)


def cubic(c0, c1, c2, c3, domain, window, family_id="cubic") -> MapFamily:
    """Cubic with coefficients affine in the parameter.

    Each ``ci`` is either a number or a pair ``(const, slope)`` meaning
    ``const + slope * lam``.
    """
    rows = []
    for c in (c0, c1, c2, c3):
        const, slope = (c, 0.0) if np.isscalar(c) else c
        rows.append([float(const), float(slope)])
    return MapFamily(rows, domain, window, family_id)


def polynomial(table, domain, window, family_id="polynomial") -> MapFamily:
    return MapFamily(table, domain, window, family_id)


# -- root machinery -----------------------------------------------------------


def _bisect(fun, lo, hi, iters: int = 200):
    """Vectorized bisection on brackets with a sign change."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    flo = fun(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if not np.any((mid > lo) & (mid < hi)):
            break
        fm = fun(mid)
        keep_hi = np.sign(fm) == np.sign(flo)
        lo = np.where(keep_hi, mid, lo)
        flo = np.where(keep_hi, fm, flo)
        hi = np.where(keep_hi, hi, mid)
    return lo, hi


def polish_roots(g, dg, lo, hi, gtol: float = 0.0, max_newton: int = 64):
    """Safeguarded Newton on sign-change brackets, bisection fallback.

    Newton steps that leave the bracket are replaced by midpoints. Brackets
    that have not reached ``|g| <= gtol`` after ``max_newton`` steps are
    finished by pure bisection.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    glo = g(lo)
    x = 0.5 * (lo + hi)
    done = np.zeros(lo.shape, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(max_newton):
            gx = g(x)
            done |= np.abs(gx) <= gtol
            if done.all():
                break
            same = np.sign(gx) == np.sign(glo)
            lo = np.where(same & ~done, x, lo)
            glo = np.where(same & ~done, gx, glo)
            hi = np.where(~same & ~done, x, hi)
            step = x - gx / dg(x)
            bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
            x = np.where(done, x, np.where(bad, 0.5 * (lo + hi), step))
    if not done.all():
        rest = ~done
        blo, bhi = _bisect(g, lo[rest], hi[rest])
        x[rest] = 0.5 * (blo + bhi)
    return x


def _grid_roots(g, dg, xs: np.ndarray, tangent_tol: float):
    """Roots of ``g`` on the grid ``xs``.

    Sign changes are polished directly. Grid minima of ``|g|`` without a sign
    change are treated as possible tangential roots: the extremum of ``g`` is
    located through a sign change of ``dg`` and either splits into two roots
    or, when ``|g| <= tangent_tol`` there, is reported as one tangential root.

    Returns ``(roots, tangential)`` arrays.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        v = g(xs)
    v = np.where(np.isfinite(v), v, np.nan)
    s = np.sign(v)
    exact = np.flatnonzero(s == 0)
    cross = np.flatnonzero(s[:-1] * s[1:] < 0)
    roots = [xs[exact], polish_roots(g, dg, xs[cross], xs[cross + 1])]
    tang = [np.zeros(exact.size + cross.size, dtype=bool)]

    av = np.abs(v)
    i = np.arange(1, xs.size - 1)
    cand = i[
        (av[i] <= av[i - 1]) & (av[i] <= av[i + 1])
        & (s[i - 1] == s[i]) & (s[i + 1] == s[i]) & (s[i] != 0)
    ]
    if cand.size:
        reach = np.maximum(np.abs(v[cand + 1] - v[cand]), np.abs(v[cand - 1] - v[cand]))
        cand = cand[av[cand] <= 2.0 * reach + tangent_tol]
    if cand.size:
        a, b = xs[cand - 1], xs[cand + 1]
        da, db = dg(a), dg(b)
        ok = np.sign(da) * np.sign(db) < 0
        cand, a, b = cand[ok], a[ok], b[ok]
    if cand.size:
        lo, hi = _bisect(dg, a, b)
        xe = 0.5 * (lo + hi)
        ve = g(xe)
        touching = np.abs(ve) <= tangent_tol
        flipped = (np.sign(ve) != s[cand]) & ~touching
        roots.append(xe[touching])
        tang.append(np.ones(int(touching.sum()), dtype=bool))
        if flipped.any():
            r1 = polish_roots(g, dg, a[flipped], xe[flipped])
            r2 = polish_roots(g, dg, xe[flipped], b[flipped])
            roots.extend([r1, r2])
            tang.append(np.zeros(2 * int(flipped.sum()), dtype=bool))
    r = np.concatenate(roots)
    t = np.concatenate(tang)
    order = np.argsort(r, kind="stable")
    return r[order], t[order]


# -- critical points ----------------------------------------------------------


@dataclass(frozen=True)
class CriticalPoint:
    x: float
    order: int = 1


def find_critical_points(family: MapFamily, lam: float, grid: int = CRIT_GRID,
                         tol: float = TOL_CRIT) -> list[CriticalPoint]:
    """All zeros of ``d1(., lam)`` in the domain, ascending."""
    xs = np.linspace(*family.domain, grid + 1)
    a = family.coefficients_at(lam)
    da, dda = P.polyder(a), P.polyder(a, 2)
    if np.all(np.abs(da) <= 1e-300):
        raise FlatIntervalError(f"{family.family_id}: f is constant at lam={lam} (H2 violated)")
    d1v = np.abs(P.polyval(xs, da))
    flat = np.convolve(d1v <= tol, np.ones(3, dtype=int), mode="valid") >= 3
    if flat.any():
        raise FlatIntervalError(f"{family.family_id}: d1 vanishes on a subinterval at lam={lam}")

    def g(x):
        return P.polyval(x, da)

    def dg(x):
        return P.polyval(x, dda)

    roots, _ = _grid_roots(g, dg, xs, tangent_tol=tol)
    out = []
    scale = max(1.0, float(np.max(np.abs(a))))
    for x in _dedupe(roots, 1e-10 * family.width):
        order = 1
        for k in range(2, a.size + 1):
            if abs(P.polyval(x, P.polyder(a, k))) > 1e-9 * scale:
                break
            order += 1
        out.append(CriticalPoint(float(x), order))
    for c, d in zip(out, out[1:]):
        if d.x - c.x < 1e-6 * family.width:
            warnings.warn(f"near-coincident critical points at {c.x:.9g} and {d.x:.9g}")
    return out


def _dedupe(xs: np.ndarray, tol: float) -> list[float]:
    out: list[float] = []
    for x in np.sort(np.asarray(xs, dtype=float)):
        if not out or x - out[-1] > tol:
            out.append(float(x))
    return out


# -- periodic orbits ----------------------------------------------------------


@dataclass(frozen=True)
class PeriodicOrbit:
    """A periodic orbit, listed from its smallest point in dynamical order."""

    points: tuple[float, ...]
    multiplier: float
    classification: str
    lam: float
    residual: float = 0.0
    tangential: bool = False

    @property
    def period(self) -> int:
        return len(self.points)

    @property
    def hyperbolic(self) -> bool:
        return self.classification in (ATTRACTING, REPELLING)

    def distance_to(self, x: float) -> float:
        return float(np.min(np.abs(np.asarray(self.points) - x)))


def classify_multiplier(mu: float, tol_hyp: float = TOL_HYP) -> str:
    if abs(mu - 1.0) <= tol_hyp:
        return SADDLE_NODE
    if abs(mu + 1.0) <= tol_hyp:
        return PERIOD_DOUBLING
    return ATTRACTING if abs(mu) < 1.0 else REPELLING


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n) if n % d == 0]


def find_periodic_orbits(family: MapFamily, lam: float, period_max: int, *,
                         period_min: int = 1, grid: int = ORBIT_GRID,
                         tol_orbit: float = TOL_ORBIT, tol_hyp: float = TOL_HYP,
                         x_range: tuple[float, float] | None = None,
                         tangent_tol: float | None = None) -> list[PeriodicOrbit]:
    """Periodic orbits with least period in ``[period_min, period_max]``.

    Roots of ``f^n(x) - x`` are located on a grid over ``x_range`` (default:
    the whole domain). Tangential roots, which a sign-change scan misses, are
    found from local minima of ``|f^n(x) - x|`` and flagged. The residual
    check is relative to ``max(1, |multiplier|)`` because ``f^n - x`` cannot be
    evaluated more accurately than its slope allows.
    """
    if period_max > PERIOD_CAP:
        raise ValueError(f"period_max is capped at {PERIOD_CAP}")
    if tangent_tol is None:
        tangent_tol = tol_orbit
    x_lo, x_hi = x_range if x_range is not None else family.domain
    xs = np.linspace(x_lo, x_hi, grid + 1)
    a = family.coefficients_at(lam)
    da = P.polyder(a)
    distinct = 1e-7 * family.width
    found: dict[int, list[PeriodicOrbit]] = {}

    for n in range(period_min, period_max + 1):
        def g(x, n=n):
            y, _ = family.iterate_with_derivative(x, lam, n)
            return y - x

        def dg(x, n=n):
            _, d = family.iterate_with_derivative(x, lam, n)
            return d - 1.0

        roots, tang = _grid_roots(g, dg, xs, tangent_tol)
        orbits: list[PeriodicOrbit] = []
        seen: list[float] = []
        for x0, is_tan in zip(roots, tang):
            pts = family.orbit(float(x0), lam, n + 1)
            if any(abs(pts[d] - pts[0]) <= distinct for d in _divisors(n)):
                continue
            orbit_pts = pts[:n]
            mu = float(np.prod(P.polyval(orbit_pts, da)))
            resid = abs(pts[n] - pts[0])
            if resid > tol_orbit * max(1.0, abs(mu)):
                continue
            k = int(np.argmin(orbit_pts))
            key = float(orbit_pts[k])
            if any(abs(key - s) <= distinct for s in seen):
                continue
            seen.append(key)
            ordered = tuple(float(v) for v in np.roll(orbit_pts, -k))
            cls = SADDLE_NODE if is_tan else classify_multiplier(mu, tol_hyp)
            orbits.append(PeriodicOrbit(ordered, mu, cls, float(lam), float(resid), bool(is_tan)))
        found[n] = sorted(orbits, key=lambda o: o.points[0])

    out = [o for n in sorted(found) for o in found[n]]
    if sum(not o.hyperbolic for o in out) > 1:
        warnings.warn(f"{family.family_id}: several non-hyperbolic orbits at lam={lam:.12g}")
    return out


def has_orbit(family: MapFamily, lam: float, period: int, **kw) -> bool:
    """Whether an orbit of least period ``period`` exists (tangency counts only
    once the extremum actually reaches zero)."""
    kw.setdefault("tangent_tol", 0.0)
    with warnings.catch_warnings():
        # near a fold the saddle and the node are both nearly neutral
        warnings.simplefilter("ignore")
        return bool(find_periodic_orbits(family, lam, period, period_min=period, **kw))


def find_saddle_node_parameter(family: MapFamily, period: int, lam_lo: float, lam_hi: float,
                               *, xtol: float = 1e-10, **kw) -> float:
    """Bisect in the parameter on the existence of a period-``period`` orbit.

    ``kw`` is passed to :func:`find_periodic_orbits` (``x_range`` restricts the
    search to a neighbourhood of one fold).
    """
    e_lo = has_orbit(family, lam_lo, period, **kw)
    e_hi = has_orbit(family, lam_hi, period, **kw)
    if e_lo == e_hi:
        raise NoBirthEventError("no birth event bracketed")
    lo, hi = float(lam_lo), float(lam_hi)
    while abs(hi - lo) > xtol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if has_orbit(family, mid, period, **kw) == e_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def orbit_multiplier(family: MapFamily, points, lam: float) -> float:
    return float(np.prod(family.d1(np.asarray(points, dtype=float), lam)))


def fd_multiplier(family: MapFamily, x: float, lam: float, n: int, step: float = 1e-7) -> float:
    """Central finite difference of ``f^n`` at ``x`` (independent check)."""
    h = step * family.width
    return float((family.iterate(x + h, lam, n) - family.iterate(x - h, lam, n)) / (2 * h))


def newton_track(family: MapFamily, x: float, lam: float, n: int, iters: int = 50,
                 tol: float = 1e-13) -> float | None:
    """Newton on ``f^n(x) - x`` from ``x``; None when it does not converge."""
    for _ in range(iters):
        y, d = family.iterate_with_derivative(x, lam, n)
        y, d = float(y), float(d)
        if not math.isfinite(y) or d == 1.0:
            return None
        step = (y - x) / (d - 1.0)
        x -= step
        if not family.contains(x, 1e-9 * family.width):
            return None
        if abs(step) <= tol * max(1.0, abs(x)):
            return x
    return None
