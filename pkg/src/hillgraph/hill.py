"""Monodromy matrix, discriminant and band structure of the Hill operator
-u'' + q0 u = lambda u with q0 extended periodically from [0, 1].

The fundamental solutions c (c(0)=1, c'(0)=0) and s (s(0)=0, s'(0)=1) are
integrated with a fourth-order Magnus method on Gauss nodes.  For this
operator every step is the exponential of a traceless 2x2 matrix, which has
a closed form, so det M = 1 up to rounding and pieces where q0 is constant
are integrated exactly.

Band edges are located through the factorisation, valid for even q0,

    D(lambda)**2 - 4 = 4 s(1) c'(1),

so every edge is a Dirichlet eigenvalue (s(1) = 0) or a Neumann eigenvalue
(c'(1) = 0).  Both are simple roots of a Sturm-Liouville problem, and the
Pruefer angles tracked by the integrator count them exactly, so a closed gap
shows up as a Dirichlet and a Neumann root at the same place instead of a
double root of D -/+ 2 that a sign scan would miss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import _backend
from .errors import DomainError, NumericError, ResolutionError, UnavailableError
from .potential import Potential

DEFAULT_TOL = 1e-10
XTOL = 1e-14
RTOL = 4 * np.finfo(float).eps
# a Dirichlet and a Neumann root closer than a few root-finder tolerances
# are one double root: a closed gap
CLOSED_GAP_FACTOR = 32.0
# roots are polished with the integrator held to at least this accuracy, so
# that the lambda error of an edge is not dominated by the scan tolerance
POLISH_TOL = 1e-13

_BASE_STEPS = 16
_MAX_LEVEL = 14
_GAUSS_LO = 0.5 - math.sqrt(3.0) / 6.0
_GAUSS_HI = 0.5 + math.sqrt(3.0) / 6.0
_SCAN_DU = 0.25


# ---------------------------------------------------------------------------
# integration


@lru_cache(maxsize=256)
def _step_grid(p: Potential, level: int, osc: int):
    hs, q1s, q2s = [], [], []
    for seg in p.segments():
        ell = seg.hi - seg.lo
        # h * sqrt(lambda - q) <= 1/2 keeps the Pruefer angle unwrapping valid
        n_osc = math.ceil(2.0 * ell * osc)
        if seg.constant is not None:
            n = max(1, n_osc)
        else:
            n = max(math.ceil(_BASE_STEPS * ell), n_osc) << level
        x = np.linspace(seg.lo, seg.hi, n + 1)
        h = np.diff(x)
        hs.append(h)
        if seg.constant is not None:
            q1s.append(np.full(n, seg.constant))
            q2s.append(np.full(n, seg.constant))
        else:
            q1s.append(p.evaluate(x[:-1] + _GAUSS_LO * h))
            q2s.append(p.evaluate(x[:-1] + _GAUSS_HI * h))
    return (
        np.ascontiguousarray(np.concatenate(hs)),
        np.ascontiguousarray(np.concatenate(q1s)),
        np.ascontiguousarray(np.concatenate(q2s)),
    )


def _is_exact(p: Potential) -> bool:
    return all(seg.constant is not None for seg in p.segments())


def _osc_bound(p: Potential, lams: np.ndarray) -> int:
    top = float(np.max(lams)) if lams.size else 0.0
    return int(math.ceil(math.sqrt(max(top - p.min_value, 0.0))))


def _run(p, level, osc, lams, angles=True):
    h, q1, q2 = _step_grid(p, level, osc)
    return _backend.magnus_transfer(h, q1, q2, np.ascontiguousarray(lams, dtype=float), angles)


def _error(a: np.ndarray, b: np.ndarray, lams: np.ndarray) -> np.ndarray:
    w = np.sqrt(1.0 + np.abs(lams))
    diff = np.max(
        np.abs(
            np.column_stack(
                [a[:, 0] - b[:, 0], (a[:, 1] - b[:, 1]) / w, (a[:, 2] - b[:, 2]) * w, a[:, 3] - b[:, 3]]
            )
        ),
        axis=1,
    )
    scale = np.maximum.reduce(
        [np.ones_like(w), np.abs(b[:, 0]), np.abs(b[:, 3]), np.abs(b[:, 1]) / w, np.abs(b[:, 2]) * w]
    )
    # step doubling for an order-4 method: the finer result is off by ~diff/15
    return diff / scale / 15.0


def transfer(p: Potential, lams, tol: float = DEFAULT_TOL, angles: bool = True) -> np.ndarray:
    """Monodromy entries and Pruefer angles for an array of lambdas.

    Returns shape (m, 6): c(1), c'(1), s(1), s'(1), psi_c, psi_s.  Step
    doubling continues until the estimated error of each entry (scaled to
    the natural size of the solutions) is below ``tol``.  With
    ``angles=False`` the angle columns are NaN and the sweep is cheaper.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if lams.size and not np.all(np.isfinite(lams)):
        raise DomainError("lambda must be finite")
    osc = _osc_bound(p, lams)
    if _is_exact(p):
        return _run(p, 0, osc, lams, angles)
    out = np.empty((lams.size, 6))
    pending = np.arange(lams.size)
    prev = _run(p, 0, osc, lams, angles)
    last_err = np.full(lams.size, np.inf)
    stalled = np.zeros(lams.size, dtype=int)
    level = 0
    while pending.size:
        level += 1
        # rounding sets a floor under the error estimate: once it stops
        # shrinking for two levels in a row, finer steps cannot help
        if level > _MAX_LEVEL or np.any(stalled >= 2):
            bad = float(lams[pending[np.argmax(stalled) if np.any(stalled >= 2) else 0]])
            raise NumericError(f"monodromy integration did not reach tol={tol:g} at lambda={bad!r}", lam=bad)
        cur = _run(p, level, osc, lams[pending], angles)
        err = _error(prev, cur, lams[pending])
        ok = err <= tol
        stalled = np.where(err > 0.5 * last_err, stalled + 1, 0)
        out[pending[ok]] = cur[ok]
        pending = pending[~ok]
        prev = cur[~ok]
        last_err, stalled = err[~ok], stalled[~ok]
    return out


def transfer_at_level(p: Potential, lams, level: int, angles: bool = True) -> np.ndarray:
    """Fixed-step transfer: 16 * 2**level Magnus steps per unit length on
    each smooth piece of q0 (more where lambda - q0 is large)."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    return _run(p, int(level), _osc_bound(p, lams), lams, angles)


@dataclass(frozen=True)
class MonodromyData:
    lam: float
    c1: float
    c1p: float
    s1: float
    s1p: float
    discriminant: float
    eta: float
    psi_c: float = field(default=math.nan, repr=False)
    psi_s: float = field(default=math.nan, repr=False)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.c1, self.s1], [self.c1p, self.s1p]])

    @property
    def det(self) -> float:
        return self.c1 * self.s1p - self.s1 * self.c1p

    @property
    def dirichlet_count(self) -> int:
        """Number of Dirichlet eigenvalues below ``lam``."""
        return _dirichlet_count(self.psi_s)

    @property
    def neumann_count(self) -> int:
        """Number of Neumann eigenvalues below ``lam``."""
        return _neumann_count(self.psi_c)


def _dirichlet_count(psi_s):
    return np.floor(np.asarray(psi_s) / np.pi).astype(int)


def _neumann_count(psi_c):
    return np.floor(np.asarray(psi_c) / np.pi + 0.5).astype(int)


def _from_row(lam, row) -> MonodromyData:
    c1, c1p, s1, s1p, psi_c, psi_s = (float(v) for v in row)
    d = c1 + s1p
    return MonodromyData(float(lam), c1, c1p, s1, s1p, d, d / 2.0, psi_c, psi_s)


def monodromy(p: Potential, lam: float, tol: float = DEFAULT_TOL) -> MonodromyData:
    """Monodromy matrix M(lambda) = [[c(1), s(1)], [c'(1), s'(1)]]."""
    return _from_row(lam, transfer(p, [lam], tol)[0])


def discriminant(p: Potential, lam, tol: float = DEFAULT_TOL):
    """D(lambda) = tr M(lambda); vectorised over ``lam``."""
    rows = transfer(p, lam, tol, angles=False)
    d = rows[:, 0] + rows[:, 3]
    return float(d[0]) if np.ndim(lam) == 0 else d


def eta(p: Potential, lam, tol: float = DEFAULT_TOL):
    return 0.5 * discriminant(p, lam, tol)


def discriminant_derivative(p: Potential, lam: float, tol: float = 1e-12) -> float:
    """D'(lambda) by a five-point central difference."""
    h = 1e-3 * math.sqrt(1.0 + abs(lam))
    d = discriminant(p, lam + h * np.array([-2.0, -1.0, 1.0, 2.0]), tol)
    return float((d[0] - 8.0 * d[1] + 8.0 * d[2] - d[3]) / (12.0 * h))


# ---------------------------------------------------------------------------
# Dirichlet / Neumann eigenvalues

_COLUMN = {"dirichlet": (2, 5, _dirichlet_count), "neumann": (1, 4, _neumann_count)}


def _scan_grid(p: Potential, lo: float, hi: float) -> np.ndarray:
    ref = p.min_value - 1.0

    def u(x):
        return math.copysign(math.sqrt(abs(x - ref)), x - ref)

    ua, ub = u(lo), u(hi)
    n = max(8, math.ceil((ub - ua) / _SCAN_DU))
    uu = np.linspace(ua, ub, n + 1)
    grid = ref + uu * np.abs(uu)
    grid[0], grid[-1] = lo, hi
    return grid


def _sturm_roots(p: Potential, which: str, lo: float, hi: float, tol: float):
    """All roots in (lo, hi] of s(1) ("dirichlet") or c'(1) ("neumann").

    Returns (roots, count_below_lo).
    """
    col, angle_col, counter = _COLUMN[which]
    grid = _scan_grid(p, lo, hi)
    rows = transfer(p, grid, tol)
    counts = counter(rows[:, angle_col])

    polish = min(tol, POLISH_TOL)

    def f(x):
        return transfer(p, [x], polish, angles=False)[0, col]

    roots: list[float] = []
    stack = [(grid[i], rows[i], grid[i + 1], rows[i + 1]) for i in range(len(grid) - 1)][::-1]
    while stack:
        a, ra, b, rb = stack.pop()
        na, nb = int(counter(ra[angle_col])), int(counter(rb[angle_col]))
        d = nb - na
        if d == 0:
            continue
        fa, fb = ra[col], rb[col]
        if d == 1 and fa * fb <= 0.0:
            if fa == 0.0:
                roots.append(float(a))
            elif fb == 0.0:
                roots.append(float(b))
            else:
                roots.append(float(brentq(f, a, b, xtol=XTOL, rtol=RTOL, maxiter=200)))
            continue
        if b - a < 1e-11 * max(1.0, abs(a)):
            raise ResolutionError(
                f"cannot separate {d} {which} eigenvalues clustered in [{a!r}, {b!r}]", lam=float(a)
            )
        m = 0.5 * (a + b)
        rm = transfer(p, [m], tol)[0]
        stack.append((m, rm, b, rb))
        stack.append((a, ra, m, rm))
    roots = sorted(set(roots))
    return roots, int(counts[0])


def dirichlet_spectrum(p: Potential, window, tol: float = DEFAULT_TOL) -> list[float]:
    """Eigenvalues of -u'' + q0 u with u(0) = u(1) = 0 inside ``window``."""
    lo, hi = _check_window(window)
    roots, _ = _sturm_roots(p, "dirichlet", lo, hi, tol)
    return [r for r in roots if lo <= r <= hi]


def neumann_spectrum(p: Potential, window, tol: float = DEFAULT_TOL) -> list[float]:
    """Eigenvalues with u'(0) = u'(1) = 0 inside ``window``."""
    lo, hi = _check_window(window)
    roots, _ = _sturm_roots(p, "neumann", lo, hi, tol)
    # the scan works on (lo, hi]; a root sitting exactly on lo is picked up here
    if transfer(p, [lo], tol)[0, 1] == 0.0:
        roots = [lo] + roots
    return [r for r in roots if lo <= r <= hi]


def closed_gap_tol(lam: float) -> float:
    return CLOSED_GAP_FACTOR * (XTOL + RTOL * max(1.0, abs(lam)))


def _check_window(window) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in window)
    except (TypeError, ValueError):
        raise DomainError("window must be a pair [lambda_min, lambda_max]") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise DomainError(f"empty lambda window [{lo}, {hi}]")
    return lo, hi


def default_window(p: Potential, upper: float = 100.0) -> tuple[float, float]:
    """[min q0 - 1, upper]; the ground state a0 is never below min q0."""
    return (p.min_value - 1.0, float(upper))


# ---------------------------------------------------------------------------
# band structure


@dataclass(frozen=True)
class Band:
    """Hill band B_k; D runs from +2 to -2 on even k and from -2 to +2 on
    odd k.  Clipped ends are window boundaries, not band edges."""

    index: int
    lower: float
    upper: float
    clipped_lower: bool = False
    clipped_upper: bool = False

    @property
    def clipped(self) -> bool:
        return self.clipped_lower or self.clipped_upper

    @property
    def decreasing(self) -> bool:
        return self.index % 2 == 0

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def contains(self, lam: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= lam <= self.upper + tol


@dataclass(frozen=True)
class Gap:
    """Spectral gap k between bands k-1 and k (k >= 1)."""

    index: int
    lower: float
    upper: float
    closed: bool
    dirichlet_side: str | None  # "lower", "upper", "both" or None when clipped
    clipped_lower: bool = False
    clipped_upper: bool = False

    @property
    def length(self) -> float:
        return 0.0 if self.closed else self.upper - self.lower


@dataclass(frozen=True)
class BandStructure:
    potential: Potential
    lambda_window: tuple[float, float]
    tol: float
    bands: tuple[Band, ...]
    gaps: tuple[Gap, ...]
    dirichlet_eigenvalues: tuple[float, ...]
    periodic_eigenvalues: tuple[float, ...]
    antiperiodic_eigenvalues: tuple[float, ...]
    neumann_eigenvalues: tuple[float, ...] = ()

    def band(self, k: int) -> Band:
        for b in self.bands:
            if b.index == k:
                return b
        raise UnavailableError(f"band {k} is not inside the window {self.lambda_window}")

    @property
    def full_bands(self) -> tuple[Band, ...]:
        return tuple(b for b in self.bands if not b.clipped)

    @property
    def edges(self) -> tuple[float, ...]:
        return tuple(sorted(self.periodic_eigenvalues + self.antiperiodic_eigenvalues))

    def discriminant(self, lam):
        return discriminant(self.potential, lam, self.tol)

    def in_spectrum(self, lam: float, tol: float = 0.0) -> bool:
        return any(b.contains(lam, tol) for b in self.bands)


def band_structure(p: Potential, window=None, tol: float = DEFAULT_TOL) -> BandStructure:
    """Bands, gaps and periodic/antiperiodic/Dirichlet eigenvalues in a window."""
    p.require_even()
    lo, hi = _check_window(window if window is not None else default_window(p))
    pad_lo = 1e-8 * max(1.0, abs(lo))
    pad_hi = 1e-8 * max(1.0, abs(hi))
    xlo, xhi = lo - pad_lo, hi + pad_hi

    droots, nd0 = _sturm_roots(p, "dirichlet", xlo, xhi, tol)
    nroots, nn0 = _sturm_roots(p, "neumann", xlo, xhi, tol)
    offset = nd0 + nn0

    # edges as (lambda, kind); a coincident Dirichlet/Neumann pair is a closed gap
    edges: list[tuple[float, str]] = []
    i = j = 0
    while i < len(droots) or j < len(nroots):
        d = droots[i] if i < len(droots) else math.inf
        n = nroots[j] if j < len(nroots) else math.inf
        if math.isfinite(d + n) and abs(d - n) <= closed_gap_tol(d):
            mid = 0.5 * (d + n)
            edges += [(mid, "closed"), (mid, "closed")]
            i += 1
            j += 1
        elif d < n:
            edges.append((d, "D"))
            i += 1
        else:
            edges.append((n, "N"))
            j += 1

    def edge(g: int) -> tuple[float, str] | None:
        loc = g - offset
        return edges[loc] if 0 <= loc < len(edges) else None

    _check_edge_kinds(edges, offset)

    bands: list[Band] = []
    gaps: list[Gap] = []
    k = offset // 2
    while True:
        e_lo, e_hi = edge(2 * k), edge(2 * k + 1)
        b_lo = e_lo[0] if e_lo is not None else lo
        if b_lo > hi:
            break
        b_hi = e_hi[0] if e_hi is not None else hi
        bands.append(Band(k, b_lo, b_hi, e_lo is None, e_hi is None))
        if e_hi is None:
            break
        g_hi = edge(2 * k + 2)
        gaps.append(_make_gap(k + 1, e_hi, g_hi, hi))
        if g_hi is None:
            break
        k += 1
    if offset % 2 == 0 and offset > 0:
        # window starts inside gap offset/2
        g_lo = edge(offset - 1)
        first = edge(offset)
        gaps.insert(0, _make_gap(offset // 2, g_lo, first, hi, lo_fallback=lo))

    periodic, antiperiodic = [], []
    for loc, (lam, _) in enumerate(edges):
        g = loc + offset
        kb = g // 2
        # even band: lower edge D = +2, upper D = -2; odd band reversed
        plus = (kb % 2 == 0) == (g % 2 == 0)
        (periodic if plus else antiperiodic).append(lam)

    def inside(x):
        return xlo <= x <= xhi

    bs = BandStructure(
        potential=p,
        lambda_window=(lo, hi),
        tol=tol,
        bands=tuple(bands),
        gaps=tuple(g for g in gaps if g.upper >= lo and g.lower <= hi),
        dirichlet_eigenvalues=tuple(x for x in droots if inside(x)),
        periodic_eigenvalues=tuple(x for x in periodic if inside(x)),
        antiperiodic_eigenvalues=tuple(x for x in antiperiodic if inside(x)),
        neumann_eigenvalues=tuple(x for x in nroots if inside(x)),
    )
    problems = check_band_structure(bs)
    if problems:
        raise NumericError("band structure failed its consistency checks: " + "; ".join(problems))
    return bs


def _make_gap(index, e_lo, e_hi, hi, lo_fallback=None) -> Gap:
    lower = e_lo[0] if e_lo is not None else lo_fallback
    upper = e_hi[0] if e_hi is not None else hi
    kinds = (e_lo[1] if e_lo else None, e_hi[1] if e_hi else None)
    closed = kinds == ("closed", "closed")
    if closed:
        side = "both"
    elif "D" in kinds:
        side = "lower" if kinds[0] == "D" else "upper"
    else:
        side = None
    return Gap(index, lower, upper, closed, side, e_lo is None, e_hi is None)


def _check_edge_kinds(edges, offset) -> None:
    """Interlacing: a0 is Neumann, every gap has one Dirichlet and one
    Neumann edge (or is closed)."""
    for loc, (lam, kind) in enumerate(edges):
        g = loc + offset
        if g == 0:
            if kind != "N":
                raise NumericError(f"lowest band edge {lam!r} is not a Neumann eigenvalue", lam=lam)
            continue
        if g % 2 == 1:
            partner = loc + 1
            if partner < len(edges):
                pair = {kind, edges[partner][1]}
                if pair not in ({"D", "N"}, {"closed"}):
                    raise NumericError(f"gap edges near {lam!r} violate interlacing", lam=lam)


def check_band_structure(bs: BandStructure) -> list[str]:
    """Sample the invariants of a band structure; returns the violations."""
    p, tol = bs.potential, bs.tol
    problems = []
    probes, expect = [], []
    for b in bs.bands:
        if b.length > 0:
            probes.append(0.5 * (b.lower + b.upper))
            expect.append(("band", b.index))
        if not b.clipped_lower:
            probes.append(b.lower)
            expect.append(("edge", 2.0 if b.decreasing else -2.0))
        if not b.clipped_upper:
            probes.append(b.upper)
            expect.append(("edge", -2.0 if b.decreasing else 2.0))
    for g in bs.gaps:
        if not g.closed and not g.clipped_lower and not g.clipped_upper and g.length > 0:
            probes.append(0.5 * (g.lower + g.upper))
            expect.append(("gap", g.index))
    if not probes:
        return problems
    d = discriminant(p, np.array(probes), tol)
    for lam, val, (what, ref) in zip(probes, d, expect):
        if what == "band" and not abs(val) < 2.0:
            problems.append(f"|D| = {abs(val):.6g} >= 2 inside band {ref} at {lam:.12g}")
        elif what == "gap" and not abs(val) > 2.0 - 1e-9:
            problems.append(f"|D| = {abs(val):.6g} < 2 inside gap {ref} at {lam:.12g}")
        elif what == "edge" and abs(val - ref) > 1e-6:
            problems.append(f"D = {val:.12g} at edge {lam:.12g}, expected {ref:+g}")
    return problems


# ---------------------------------------------------------------------------
# inverting D on a band


def _edge_targets(band: Band) -> tuple[float, float]:
    return (2.0, -2.0) if band.decreasing else (-2.0, 2.0)


def _solve_on_band(bs: BandStructure, band: Band, target: float) -> float | None:
    """lambda in the (possibly clipped) band with D(lambda) = target, or None
    if target is outside the D-range of the part inside the window."""
    d_lo, d_hi = _edge_targets(band)
    if not band.clipped_lower and target == d_lo:
        return band.lower
    if not band.clipped_upper and target == d_hi:
        return band.upper
    p, tol = bs.potential, bs.tol
    sign = 1.0 if d_hi > d_lo else -1.0  # orient so g increases across the band

    def g(x):
        return sign * (discriminant(p, x, tol) - target)

    g_lo = sign * (d_lo - target) if not band.clipped_lower else g(band.lower)
    g_hi = sign * (d_hi - target) if not band.clipped_upper else g(band.upper)
    if g_lo > 0.0 or g_hi < 0.0:
        return None
    # re-evaluate true edges: rounding can leave D a hair off +-2 there
    a, b = band.lower, band.upper
    ga = g(a) if not band.clipped_lower else g_lo
    gb = g(b) if not band.clipped_upper else g_hi
    if ga >= 0.0:
        return a
    if gb <= 0.0:
        return b
    return float(brentq(g, a, b, xtol=XTOL, rtol=RTOL, maxiter=200))


def invert_discriminant_on_band(bs: BandStructure, band_index: int, target: float, tol=None) -> float:
    """The unique lambda in band ``band_index`` with D(lambda) = target."""
    if not -2.0 <= target <= 2.0:
        raise DomainError(f"target {target!r} outside [-2, 2]")
    band = bs.band(band_index)
    if band.clipped:
        raise UnavailableError(f"band {band_index} is clipped by the window {bs.lambda_window}")
    lam = _solve_on_band(bs, band, float(target))
    if lam is None:  # pragma: no cover - full band covers [-2, 2]
        raise NumericError(f"no preimage of {target} on band {band_index}")
    return lam


def preimage_on_band(bs: BandStructure, band_index: int, target: float) -> float | None:
    """Like ``invert_discriminant_on_band`` but also works on clipped bands,
    returning None when the preimage lies outside the window."""
    return _solve_on_band(bs, bs.band(band_index), float(target))


def invert_many(bs: BandStructure, band_index: int, targets, table_size: int = 257) -> np.ndarray:
    """Vectorised inversion of D on a full band.

    A monotone table of D seeds a bracket for every target, then all
    brackets are tightened together with the Illinois variant of regula
    falsi, one batched monodromy evaluation per sweep.
    """
    targets = np.asarray(targets, dtype=float)
    if np.any(np.abs(targets) > 2.0):
        raise DomainError("targets must lie in [-2, 2]")
    band = bs.band(band_index)
    if band.clipped:
        raise UnavailableError(f"band {band_index} is clipped by the window {bs.lambda_window}")
    p, tol = bs.potential, bs.tol
    d_lo, d_hi = _edge_targets(band)
    sign = 1.0 if d_hi > d_lo else -1.0
    t = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, table_size)))
    lam_t = band.lower + (band.upper - band.lower) * t
    g_t = sign * discriminant(p, lam_t, tol)
    g_t[0], g_t[-1] = sign * d_lo, sign * d_hi
    g_t = np.maximum.accumulate(g_t)
    goal = sign * targets
    idx = np.clip(np.searchsorted(g_t, goal, side="left"), 1, table_size - 1)
    a, b = lam_t[idx - 1], lam_t[idx]
    fa, fb = g_t[idx - 1] - goal, g_t[idx] - goal
    root = np.where(fa == 0.0, a, np.where(fb == 0.0, b, np.nan))
    active = np.isnan(root)
    side = np.zeros(targets.shape, dtype=int)
    for _ in range(200):
        if not active.any():
            break
        ia = np.flatnonzero(active)
        den = fb[ia] - fa[ia]
        x = np.where(den != 0.0, b[ia] - fb[ia] * (b[ia] - a[ia]) / np.where(den != 0.0, den, 1.0), 0.5 * (a[ia] + b[ia]))
        bad = ~((x > a[ia]) & (x < b[ia]))
        x[bad] = 0.5 * (a[ia] + b[ia])[bad]
        fx = sign * discriminant(p, x, tol) - goal[ia]
        hit = fx == 0.0
        right = fx > 0.0
        # move the bracket end on the same side as fx; Illinois halving on repeats
        b_new = np.where(right, x, b[ia])
        fb_new = np.where(right, fx, np.where(side[ia] == -1, 0.5 * fb[ia], fb[ia]))
        a_new = np.where(right, a[ia], x)
        fa_new = np.where(right, np.where(side[ia] == 1, 0.5 * fa[ia], fa[ia]), fx)
        side[ia] = np.where(right, 1, -1)
        a[ia], b[ia], fa[ia], fb[ia] = a_new, b_new, fa_new, fb_new
        width = b[ia] - a[ia]
        done = hit | (width <= XTOL + RTOL * np.abs(x))
        root[ia[done]] = np.where(hit[done], x[done], 0.5 * (a[ia[done]] + b[ia[done]]))
        active[ia[done]] = False
    if active.any():  # pragma: no cover
        raise NumericError(f"inversion on band {band_index} did not converge")
    return root
