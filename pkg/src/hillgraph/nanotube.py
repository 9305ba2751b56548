"""Carbon nanotubes as quotients of the hexagonal graph.

A tube vector p = (p1, p2) identifies lattice points differing by
p1 e1 + p2 e2.  Only quasimomenta on the lines p . theta = 2 pi n survive,
and the smallest value alpha(p) of F on those lines decides whether the
tube spectrum has extra gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import hill
from .errors import DomainError
from .graphene import DispersionPoint, SIGNS, bloch_factor
from .hill import Band, BandStructure
from .potential import Potential

FAMILIES = ("zigzag", "armchair", "chiral")
XI_TARGET = 2.0 / 3.0
EDGE_TOL = 1e-9


def _rotate(p):
    # 60 degree rotation of the hexagonal lattice in (e1, e2) coordinates
    return (-p[1], p[0] + p[1])


def _reflect(p):
    return (-p[0], p[0] + p[1])


def orbit(p1: int, p2: int) -> list[tuple[int, int]]:
    """All tube vectors equivalent to (p1, p2) under the lattice symmetries."""
    out = []
    q = (int(p1), int(p2))
    for _ in range(6):
        out.append(q)
        out.append(_reflect(q))
        q = _rotate(q)
    return sorted(set(out))


@dataclass(frozen=True)
class TubeVector:
    p1: int
    p2: int
    family: str = field(init=False)
    normal_form: tuple[int, int] = field(init=False)
    metallic: bool = field(init=False)

    def __post_init__(self):
        if int(self.p1) != self.p1 or int(self.p2) != self.p2:
            raise DomainError("tube vector components must be integers")
        p1, p2 = int(self.p1), int(self.p2)
        if p1 == 0 and p2 == 0:
            raise DomainError("tube vector must be nonzero")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)
        a, b = max(q for q in orbit(p1, p2) if q[0] >= q[1] >= 0)
        if b == 0:
            family, normal = "zigzag", (0, a)
        elif a == b:
            family, normal = "armchair", (a, a)
        else:
            family, normal = "chiral", (a, b)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "normal_form", normal)
        object.__setattr__(self, "metallic", (p1 - p2) % 3 == 0)

    @property
    def vector(self) -> tuple[int, int]:
        return (self.p1, self.p2)

    @property
    def even_zigzag(self) -> bool:
        return self.family == "zigzag" and self.normal_form[1] % 2 == 0


def classify(p1: int, p2: int | None = None) -> TubeVector:
    if p2 is None:
        if isinstance(p1, TubeVector):
            return p1
        p1, p2 = p1
    return TubeVector(p1, p2)


def _tube(p) -> TubeVector:
    return p if isinstance(p, TubeVector) else classify(p)


@dataclass(frozen=True)
class QuasimomentumLine:
    """The segment of {p1 theta1 + p2 theta2 = 2 pi n} inside [-pi, pi]^2."""

    p1: int
    p2: int
    n: int

    def endpoints(self) -> tuple[np.ndarray, np.ndarray] | None:
        p = np.array([self.p1, self.p2], dtype=float)
        base = 2.0 * math.pi * self.n * p / (p @ p)
        d = np.array([-p[1], p[0]]) / math.sqrt(p @ p)
        lo, hi = -math.inf, math.inf
        for i in range(2):
            if d[i] == 0.0:
                if abs(base[i]) > math.pi + 1e-12:
                    return None
                continue
            t1 = (-math.pi - base[i]) / d[i]
            t2 = (math.pi - base[i]) / d[i]
            lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
        if lo > hi:
            return None
        return base + lo * d, base + hi * d

    def points(self, m: int) -> np.ndarray:
        """m equispaced points along the segment, shape (m, 2)."""
        ends = self.endpoints()
        if ends is None:
            return np.empty((0, 2))
        t = np.linspace(0.0, 1.0, m)[:, None]
        return ends[0] + t * (ends[1] - ends[0])


def quasimomentum_lines(p) -> list[QuasimomentumLine]:
    """Lines p . theta = 2 pi n that meet the Brillouin zone."""
    tv = _tube(p)
    top = (abs(tv.p1) + abs(tv.p2)) // 2
    return [QuasimomentumLine(tv.p1, tv.p2, n) for n in range(-top, top + 1)]


def alpha_zigzag_formula(N: int) -> float:
    """|2 cos(pi m / N) - 1| with m the integer closest to N / 3."""
    if N < 1:
        raise DomainError("N must be positive")
    if N % 3 == 0:
        return 0.0
    m = round(N / 3)
    return abs(2.0 * math.cos(math.pi * m / N) - 1.0)


class LineMinimum(NamedTuple):
    value: float
    n: int
    theta: tuple[float, float]


def _refine(a, b, t0, dt, xatol):
    """Bounded Brent on F over t0 + s dt, s in [-1, 1]; the local variable
    keeps Brent's relative tolerance from swamping small minima."""
    length = float(np.hypot(*(b - a)))

    def f(s):
        th = a + (t0 + s * dt) * (b - a)
        return bloch_factor(th[0], th[1])

    res = minimize_scalar(f, bounds=(-1.0, 1.0), method="bounded", options={"xatol": xatol / max(dt * length, 1e-300)})
    return t0 + res.x * dt, float(res.fun)


def minimize_on_lines(p, samples: int = 1025, xatol: float = 1e-12) -> LineMinimum:
    """Brute-force min of F over B_p: dense samples on every line, then a
    bounded Brent refinement around the best few local minima."""
    return minimize_on_lines_of(quasimomentum_lines(p), xatol, samples)


def minimize_on_lines_of(lines, xatol: float = 1e-12, samples: int = 1025) -> LineMinimum:
    best = LineMinimum(math.inf, 0, (0.0, 0.0))
    t = np.linspace(0.0, 1.0, samples)
    dt = t[1] - t[0]
    for line in lines:
        ends = line.endpoints()
        if ends is None:
            continue
        a, b = ends
        pts = a + t[:, None] * (b - a)
        vals = bloch_factor(pts[:, 0], pts[:, 1])
        left = np.r_[True, vals[1:] <= vals[:-1]]
        right = np.r_[vals[:-1] <= vals[1:], True]
        cand = np.flatnonzero(left & right)
        cand = cand[np.argsort(vals[cand], kind="stable")][:8]
        for i in cand:
            x, fx = t[i], float(vals[i])
            if np.any(b != a):
                xr, fr = _refine(a, b, t[i], dt, xatol)
                if fr < fx:
                    x, fx = xr, fr
            if fx < best.value:
                th = a + x * (b - a)
                best = LineMinimum(fx, line.n, (float(th[0]), float(th[1])))
    return best


@dataclass(frozen=True)
class AlphaReport:
    tube: TubeVector
    value: float
    method: str  # "metallic", "alpha-one", "zigzag-formula" or "minimized"
    minimized: float
    argmin_line: int
    predicted_line: int | None
    predicted_line_value: float | None

    @property
    def consistent(self) -> bool:
        return abs(self.value - self.minimized) < 1e-8

    @property
    def predicted_line_agrees(self) -> bool | None:
        """Whether the line p . theta = 2 pi m with p1 - p2 = 3m +- 1 attains alpha."""
        if self.predicted_line_value is None:
            return None
        return abs(self.predicted_line_value - self.minimized) < 1e-9


def alpha_details(p, xatol: float = 1e-12) -> AlphaReport:
    tv = _tube(p)
    brute = minimize_on_lines(tv, xatol=xatol)
    if tv.metallic:
        value, method = 0.0, "metallic"
    elif tv.normal_form in ((0, 1), (0, 2)):
        value, method = 1.0, "alpha-one"
    elif tv.family == "zigzag":
        value, method = alpha_zigzag_formula(tv.normal_form[1]), "zigzag-formula"
    else:
        value, method = brute.value, "minimized"
    predicted = pred_value = None
    if not tv.metallic:
        predicted = round((tv.p1 - tv.p2) / 3)
        line = QuasimomentumLine(tv.p1, tv.p2, predicted)
        if line.endpoints() is not None:
            pred_value = line_minimum(line, xatol)
    return AlphaReport(tv, value, method, brute.value, brute.n, predicted, pred_value)


def line_minimum(line: QuasimomentumLine, xatol: float = 1e-12) -> float:
    """Minimum of F along a single line."""
    return minimize_on_lines_of([line], xatol).value


def alpha(p, xatol: float = 1e-12) -> float:
    """alpha(p) = min of F over B_p, in [0, 1]."""
    return alpha_details(p, xatol).value


# ---------------------------------------------------------------------------
# spectra


class Interval(NamedTuple):
    lower: float
    upper: float
    band: int


class XiLevel(NamedTuple):
    lam: float
    band: int
    sign: str  # "+" for D = 2/3, "-" for D = -2/3
    location: str  # "edge" or "embedded"


@dataclass(frozen=True)
class TubeSpectrum:
    tube: TubeVector
    alpha: float
    ac_bands: tuple[Interval, ...]
    tube_gaps: tuple[Interval, ...]
    point_spectrum_dirichlet: tuple[float, ...]
    point_spectrum_xi: tuple[XiLevel, ...]
    band_structure: BandStructure


def _split_band(bs: BandStructure, band: Band, threshold: float):
    """Split a band into the parts with |D| >= threshold and |D| < threshold."""
    if threshold <= 0.0:
        return [(band.lower, band.upper)], []
    cuts = []
    for target in (threshold, -threshold):
        lam = hill.preimage_on_band(bs, band.index, target)
        if lam is not None and band.lower < lam < band.upper:
            cuts.append(lam)
    pts = [band.lower] + sorted(cuts) + [band.upper]
    ac, gaps = [], []
    for lo, hi in zip(pts, pts[1:]):
        if hi <= lo:
            continue
        mid = hill.discriminant(bs.potential, 0.5 * (lo + hi), bs.tol)
        (ac if abs(mid) >= threshold else gaps).append((lo, hi))
    return ac, gaps


def xi_levels(bs: BandStructure) -> list[tuple[float, int, str]]:
    """Roots of D = +2/3 and D = -2/3 in the window, sorted by lambda.
    Full bands give two each; clipped bands may give fewer."""
    out = []
    for band in bs.bands:
        for sign in SIGNS:
            target = XI_TARGET if sign == "+" else -XI_TARGET
            lam = hill.preimage_on_band(bs, band.index, target)
            if lam is not None:
                out.append((lam, band.index, sign))
    return sorted(out)


def tube_spectrum_from_bands(p, bs: BandStructure) -> TubeSpectrum:
    tv = _tube(p)
    a = alpha(tv)
    threshold = (2.0 / 3.0) * a
    ac, gaps = [], []
    for band in bs.bands:
        band_ac, band_gaps = _split_band(bs, band, threshold)
        ac += [Interval(lo, hi, band.index) for lo, hi in band_ac]
        gaps += [Interval(lo, hi, band.index) for lo, hi in band_gaps]
    xi = []
    if tv.even_zigzag:
        ends = [x for iv in ac for x in (iv.lower, iv.upper)]
        for lam, k, sign in xi_levels(bs):
            at_edge = any(abs(lam - e) <= EDGE_TOL * max(1.0, abs(lam)) for e in ends)
            xi.append(XiLevel(lam, k, sign, "edge" if at_edge else "embedded"))
    return TubeSpectrum(tv, a, tuple(ac), tuple(gaps), bs.dirichlet_eigenvalues, tuple(xi), bs)


def tube_spectrum(p, potential: Potential, window=None, tol: float = hill.DEFAULT_TOL) -> TubeSpectrum:
    return tube_spectrum_from_bands(p, hill.band_structure(potential, window, tol))


def check_tube_spectrum(ts: TubeSpectrum) -> list[str]:
    problems = []
    if not 0.0 <= ts.alpha <= 1.0:
        problems.append(f"alpha {ts.alpha} outside [0, 1]")
    if ts.alpha == 0.0:
        if ts.tube_gaps:
            problems.append("metallic tube has extra gaps")
        if [(b.lower, b.upper) for b in ts.band_structure.bands] != [(i.lower, i.upper) for i in ts.ac_bands]:
            problems.append("metallic tube ac spectrum differs from the Hill bands")
    if ts.point_spectrum_xi and not ts.tube.even_zigzag:
        problems.append("Xi levels on a tube that is not an even zig-zag")
    n = ts.tube.normal_form[1]
    for x in ts.point_spectrum_xi:
        expected = "edge" if n == 2 else "embedded"
        if x.location != expected:
            problems.append(f"Xi level {x.lam} is {x.location}, expected {expected}")
    if ts.alpha > 0.0:
        for band in ts.band_structure.full_bands:
            count = sum(1 for g in ts.tube_gaps if g.band == band.index)
            if count != 1:
                problems.append(f"band {band.index} has {count} tube gaps")
    return problems


# ---------------------------------------------------------------------------
# one dimensional dispersions


@dataclass(frozen=True)
class LineDispersion:
    factor: float
    clamped: bool
    points: tuple[DispersionPoint, ...]

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _line_dispersion(bs: BandStructure, radicand: float) -> LineDispersion:
    clamped = radicand < 0.0
    f = math.sqrt(max(radicand, 0.0))
    pts = []
    for band in bs.full_bands:
        for sign in SIGNS:
            target = (2.0 / 3.0) * f * (1.0 if sign == "+" else -1.0)
            pts.append(DispersionPoint(band.index, sign, hill.invert_discriminant_on_band(bs, band.index, target)))
    return LineDispersion(f, clamped, tuple(pts))


def _check_line(N: int, n: int) -> None:
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    if int(n) != n or not 0 <= n < N:
        raise DomainError("line index n must satisfy 0 <= n < N")


def zigzag_radicand(N: int, n: int, theta1: float) -> float:
    c = math.cos(math.pi * n / N)
    return 1.0 + 4.0 * c * (c + math.cos(theta1 - math.pi * n / N))


def armchair_radicand(N: int, n: int, theta1: float) -> float:
    s = math.pi * n / N
    return 1.0 + 8.0 * math.cos(theta1 - s) * math.cos(theta1 / 2.0) * math.cos(theta1 / 2.0 - s)


def zigzag_dispersion(N: int, bs: BandStructure, n: int, theta1: float) -> LineDispersion:
    """Dispersion of T_(0,N) on the line theta2 = 2 pi n / N."""
    _check_line(N, n)
    return _line_dispersion(bs, zigzag_radicand(N, n, theta1))


def armchair_dispersion(N: int, bs: BandStructure, n: int, theta1: float) -> LineDispersion:
    """Dispersion of T_(N,N) on the line theta1 + theta2 = 2 pi n / N."""
    _check_line(N, n)
    return _line_dispersion(bs, armchair_radicand(N, n, theta1))
