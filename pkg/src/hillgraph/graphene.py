"""Spectrum of the hexagonal quantum graph with a periodic edge potential.

Each Bloch fibre reduces to the 2x2 combinatorial operator

    Delta^theta = 1/3 [[0, conj(z)], [z, 0]],   z = 1 + exp(i theta1) + exp(i theta2),

whose eigenvalues are +-F(theta)/3 with F = |z|.  A lambda off the Dirichlet
spectrum belongs to the fibre spectrum exactly when eta(lambda) = +-F/3,
i.e. D(lambda) = +-(2/3) F(theta).  Since D is monotone on every Hill band
the dispersion is obtained band by band as a one dimensional inversion.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from . import hill
from .errors import UnavailableError
from .hill import Band, BandStructure
from .potential import Potential

TWO_PI = 2.0 * math.pi
DIRAC_POINT = (2.0 * math.pi / 3.0, -2.0 * math.pi / 3.0)

# F below this is rounding noise of the complex modulus around a Dirac point
_F_FLOOR = 16 * np.finfo(float).eps

# lattice vectors in units of the edge length: theta_j = e_j . k maps
# Cartesian quasi-momentum k onto the Brillouin torus and makes the cones round
E1 = np.array([1.5, math.sqrt(3.0) / 2.0])
E2 = np.array([0.0, math.sqrt(3.0)])


def _reduce(t: float) -> float:
    t = float(t)
    if -math.pi <= t <= math.pi:
        return t
    return (t + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class Quasimomentum:
    """A point of the Brillouin zone [-pi, pi]^2 (reduced on construction)."""

    theta1: float
    theta2: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", _reduce(self.theta1))
        object.__setattr__(self, "theta2", _reduce(self.theta2))

    def __iter__(self):
        return iter((self.theta1, self.theta2))


def _split(theta, theta2):
    if theta2 is None:
        if isinstance(theta, Quasimomentum):
            return theta.theta1, theta.theta2
        t1, t2 = theta
        return t1, t2
    return theta, theta2


def bloch_factor(theta, theta2=None):
    """F(theta) = |1 + exp(i theta1) + exp(i theta2)|, range [0, 3].

    Accepts a ``Quasimomentum``, a pair, or two (array) arguments.
    """
    t1, t2 = _split(theta, theta2)
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    f = np.abs(1.0 + np.exp(1j * t1) + np.exp(1j * t2))
    return float(f) if f.ndim == 0 else f


def bloch_factor_squared_modified(theta, theta2=None):
    """F**2 written as 1 + 4 cos(theta2/2) [cos(theta2/2) + cos(theta1 - theta2/2)]."""
    t1, t2 = _split(theta, theta2)
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    c = np.cos(0.5 * t2)
    r = 1.0 + 4.0 * c * (c + np.cos(t1 - 0.5 * t2))
    return float(r) if r.ndim == 0 else r


def bloch_factor_modified(theta, theta2=None):
    """F from the trigonometric form; the radicand is clamped at 0, so close
    to a Dirac point the result carries sqrt(rounding) ~ 1e-8 of noise."""
    r = np.sqrt(np.maximum(bloch_factor_squared_modified(theta, theta2), 0.0))
    return float(r) if np.ndim(r) == 0 else r


def bloch_laplacian(theta, theta2=None) -> np.ndarray:
    """The 2x2 matrix of the combinatorial Laplacian on the theta fibre."""
    t1, t2 = _split(theta, theta2)
    z = 1.0 + np.exp(1j * t1) + np.exp(1j * t2)
    return np.array([[0.0, np.conj(z)], [z, 0.0]]) / 3.0


def _clean_factor(f):
    return np.where(f < _F_FLOOR, 0.0, f)


class DispersionPoint(NamedTuple):
    band: int
    sign: str  # "+" means D = +(2/3) F, "-" means D = -(2/3) F
    lam: float


SIGNS = ("+", "-")


def dispersion_lambda(bs: BandStructure, theta, theta2=None) -> list[DispersionPoint]:
    """All (band, sign, lambda) with D(lambda) = sign (2/3) F(theta), one per
    full band and sign."""
    f = float(_clean_factor(bloch_factor(theta, theta2)))
    out = []
    for band in bs.full_bands:
        for sign in SIGNS:
            target = (2.0 / 3.0) * f * (1.0 if sign == "+" else -1.0)
            out.append(DispersionPoint(band.index, sign, hill.invert_discriminant_on_band(bs, band.index, target)))
    return out


@dataclass(frozen=True)
class DispersionSurface:
    """lambda on an n x n grid of [-pi, pi]^2.

    ``values[i2, i1, b, s]`` is the branch with sign ``SIGNS[s]`` on band
    ``bands[b]`` at (theta[i1], theta[i2]).
    """

    theta: np.ndarray
    bands: tuple[int, ...]
    values: np.ndarray

    def rows(self) -> Iterator[tuple[float, float, int, str, float]]:
        """(theta1, theta2, band, sign, lambda); theta2 outermost, theta1 next."""
        for i2, t2 in enumerate(self.theta):
            for i1, t1 in enumerate(self.theta):
                for b, k in enumerate(self.bands):
                    for s, sign in enumerate(SIGNS):
                        yield float(t1), float(t2), k, sign, float(self.values[i2, i1, b, s])

    def __len__(self) -> int:
        return self.values.size


def dispersion_surface(bs: BandStructure, n: int, bands=None) -> DispersionSurface:
    """Tabulate ``dispersion_lambda`` on theta = linspace(-pi, pi, n) squared."""
    if int(n) != n or n < 2:
        raise ValueError("surface grid size must be an integer >= 2")
    n = int(n)
    full = [b.index for b in bs.full_bands]
    if bands is None:
        bands = full
    bands = tuple(int(k) for k in bands)
    for k in bands:
        if k not in full:
            raise UnavailableError(f"band {k} is not a full band inside the window {bs.lambda_window}")
    theta = np.linspace(-math.pi, math.pi, n)
    t1, t2 = np.meshgrid(theta, theta)  # rows follow theta2
    f = _clean_factor(bloch_factor(t1, t2)).ravel()
    # F only takes a few distinct values on a symmetric grid; invert each once
    uniq, inv = np.unique(f, return_inverse=True)
    values = np.empty((n, n, len(bands), 2))
    for b, k in enumerate(bands):
        lam = hill.invert_many(bs, k, np.concatenate([(2.0 / 3.0) * uniq, -(2.0 / 3.0) * uniq]))
        plus, minus = lam[: uniq.size], lam[uniq.size :]
        values[:, :, b, 0] = plus[inv].reshape(n, n)
        values[:, :, b, 1] = minus[inv].reshape(n, n)
    return DispersionSurface(theta, bands, values)


@dataclass(frozen=True)
class GrapheneSpectrum:
    ac_bands: tuple[Band, ...]
    point_spectrum: tuple[float, ...]
    dirac_levels: tuple[float, ...]
    band_structure: BandStructure

    @property
    def flat_levels(self) -> tuple[float, ...]:
        """The point spectrum: infinitely degenerate flat branches."""
        return self.point_spectrum


def dirac_level(bs: BandStructure, band_index: int) -> float | None:
    """The root of D on band ``band_index``; None if it is outside the window."""
    return hill.preimage_on_band(bs, band_index, 0.0)


def graphene_spectrum(p: Potential, window=None, tol: float = hill.DEFAULT_TOL) -> GrapheneSpectrum:
    bs = hill.band_structure(p, window, tol)
    return spectrum_from_bands(bs)


def spectrum_from_bands(bs: BandStructure) -> GrapheneSpectrum:
    dirac = []
    for band in bs.bands:
        lam = dirac_level(bs, band.index)
        if lam is not None:
            dirac.append(lam)
    return GrapheneSpectrum(bs.bands, bs.dirichlet_eigenvalues, tuple(dirac), bs)


@dataclass(frozen=True)
class DiracCone:
    band: int
    lam_star: float
    directions: np.ndarray  # unit vectors in Cartesian quasi-momentum
    slopes_plus: np.ndarray
    slopes_minus: np.ndarray
    step: float

    @property
    def slope(self) -> float:
        """Mean |d lambda / d|k|| over all rays and both branches."""
        return float(np.mean(np.abs(np.concatenate([self.slopes_plus, self.slopes_minus]))))

    @property
    def anisotropy(self) -> float:
        mags = np.abs(np.concatenate([self.slopes_plus, self.slopes_minus]))
        return float((mags.max() - mags.min()) / mags.mean())

    @property
    def isotropic(self) -> bool:
        return self.anisotropy <= 0.05


def dirac_cone_slopes(
    bs: BandStructure, band_index: int, tol: float = 1e-8, step: float = 1e-3, n_directions: int = 4
) -> DiracCone:
    """Cone slopes at (Dirac point, lambda*) along ``n_directions`` rays.

    Rays are straight lines in Cartesian quasi-momentum k, mapped to the torus
    by theta_j = e_j . k; in these coordinates the cone is round, so the slope
    per unit |k| is (2/3)(3/2)/|D'(lambda*)| = 1/|D'(lambda*)|.  For each ray
    the one-sided difference quotients at +step and -step are averaged, which
    cancels the quadratic part of F along the line.
    """
    band = bs.band(band_index)
    lam_star = dirac_level(bs, band_index)
    if lam_star is None:
        raise UnavailableError(f"band {band_index} has no root of D inside the window")
    angles = np.pi * np.arange(n_directions) / n_directions
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    plus, minus = [], []
    for d in dirs:
        dth = step * np.array([E1 @ d, E2 @ d])
        lam = {}
        for side in (1.0, -1.0):
            f = bloch_factor(DIRAC_POINT[0] + side * dth[0], DIRAC_POINT[1] + side * dth[1])
            for sign in SIGNS:
                target = (2.0 / 3.0) * f * (1.0 if sign == "+" else -1.0)
                val = hill.preimage_on_band(bs, band.index, target)
                if val is None:
                    raise UnavailableError(f"cone around {lam_star} leaves the window")
                lam[side, sign] = val
        plus.append((lam[1.0, "+"] + lam[-1.0, "+"] - 2.0 * lam_star) / (2.0 * step))
        minus.append((lam[1.0, "-"] + lam[-1.0, "-"] - 2.0 * lam_star) / (2.0 * step))
    cone = DiracCone(band_index, lam_star, dirs, np.array(plus), np.array(minus), step)
    if min(np.abs(cone.slopes_plus).min(), np.abs(cone.slopes_minus).min()) < tol:
        warnings.warn(f"degenerate Dirac cone on band {band_index}: slope below {tol:g}", RuntimeWarning)
    elif not cone.isotropic:
        warnings.warn(f"Dirac cone on band {band_index} is anisotropic ({cone.anisotropy:.2%})", RuntimeWarning)
    return cone


def bloch_laplacian_check(bs: BandStructure, theta, tol: float = 1e-8) -> bool:
    """True iff every dispersion lambda at theta has eta(lambda) in the
    spectrum of the 2x2 Bloch Laplacian."""
    ev = np.linalg.eigvalsh(bloch_laplacian(theta))
    points = dispersion_lambda(bs, theta)
    if not points:
        return True
    etas = np.atleast_1d(hill.eta(bs.potential, np.array([pt.lam for pt in points]), bs.tol))
    return bool(all(np.min(np.abs(ev - e)) < tol for e in etas))
