"""Edge potentials q0 on the unit interval.

Potentials are described by a small closed set of families so that a run
configuration fully determines them.  Every family except ``cosine`` has to
be checked numerically for evenness about x = 1/2; the cosine family
``A cos(2 pi k x)`` is even by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DomainError

KINDS = ("zero", "cosine", "polynomial", "piecewise_constant", "tabulated")

CLOSED_FORM_TOL = 1e-12
TABULATED_TOL = 1e-9


class EvennessReport(NamedTuple):
    ok: bool
    max_violation: float


class Segment(NamedTuple):
    """A sub-interval on which q0 is smooth; ``constant`` is set when q0 is
    constant there (the transfer matrix is then exact)."""

    lo: float
    hi: float
    constant: float | None


@dataclass(frozen=True)
class Potential:
    kind: str
    amplitude: float = 0.0
    harmonics: int = 1
    coefficients: tuple[float, ...] = ()
    breakpoints: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    samples: tuple[float, ...] = ()
    symmetry_tolerance: float = field(default=-1.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown potential kind {self.kind!r}")
        # normalise sequences so instances hash and compare by value
        for name in ("coefficients", "breakpoints", "values", "samples"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if self.symmetry_tolerance < 0:
            tol = TABULATED_TOL if self.kind == "tabulated" else CLOSED_FORM_TOL
            object.__setattr__(self, "symmetry_tolerance", tol)

        if self.kind == "cosine":
            if int(self.harmonics) != self.harmonics or self.harmonics < 1:
                raise DomainError("cosine harmonics must be a positive integer")
            object.__setattr__(self, "harmonics", int(self.harmonics))
        elif self.kind == "polynomial":
            if not self.coefficients:
                raise DomainError("polynomial potential needs at least one coefficient")
        elif self.kind == "piecewise_constant":
            bps = self.breakpoints
            if len(self.values) != len(bps) + 1:
                raise DomainError("piecewise_constant needs len(values) == len(breakpoints) + 1")
            if any(not 0.0 < b < 1.0 for b in bps) or any(b >= c for b, c in zip(bps, bps[1:])):
                raise DomainError("breakpoints must be strictly increasing inside (0, 1)")
        elif self.kind == "tabulated":
            if len(self.samples) < 2:
                raise DomainError("tabulated potential needs at least 2 samples")
        if not all(math.isfinite(v) for v in self.coefficients + self.values + self.samples):
            raise DomainError("potential parameters must be finite")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> Potential:
        return cls("zero")

    @classmethod
    def cosine(cls, amplitude: float, harmonics: int = 1) -> Potential:
        return cls("cosine", amplitude=float(amplitude), harmonics=harmonics)

    @classmethod
    def polynomial(cls, coefficients) -> Potential:
        """Coefficients in increasing degree: q0(x) = sum c_i x**i."""
        return cls("polynomial", coefficients=tuple(coefficients))

    @classmethod
    def piecewise_constant(cls, breakpoints, values) -> Potential:
        return cls("piecewise_constant", breakpoints=tuple(breakpoints), values=tuple(values))

    @classmethod
    def tabulated(cls, samples, symmetry_tolerance: float = TABULATED_TOL) -> Potential:
        return cls("tabulated", samples=tuple(samples), symmetry_tolerance=symmetry_tolerance)

    # -- evaluation -------------------------------------------------------

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """q0(x) for x in [0, 1]; accepts scalars or arrays."""
        xa = np.asarray(x, dtype=float)
        if np.any(~np.isfinite(xa)) or np.any(xa < 0.0) or np.any(xa > 1.0):
            raise DomainError("potential evaluated outside [0, 1]")
        out = self._eval(xa)
        return float(out) if out.ndim == 0 else out

    def periodic(self, x):
        """The 1-periodic extension q(x) = q0(x mod 1)."""
        xa = np.mod(np.asarray(x, dtype=float), 1.0)
        out = self._eval(xa)
        return float(out) if out.ndim == 0 else out

    def _eval(self, x: np.ndarray) -> np.ndarray:
        kind = self.kind
        if kind == "zero":
            return np.zeros_like(x)
        if kind == "cosine":
            return self.amplitude * np.cos(2.0 * np.pi * self.harmonics * x)
        if kind == "polynomial":
            # np.polyval wants the highest degree first
            return np.polyval(self.coefficients[::-1], x)
        if kind == "piecewise_constant":
            bps = np.asarray(self.breakpoints)
            vals = np.asarray(self.values)
            right = vals[np.searchsorted(bps, x, side="right")]
            left = vals[np.searchsorted(bps, x, side="left")]
            # at a jump take the mean of both sides so symmetric steps stay symmetric
            return 0.5 * (left + right)
        grid = np.linspace(0.0, 1.0, len(self.samples))
        return np.interp(x, grid, np.asarray(self.samples))

    # -- metadata -----------------------------------------------------------

    def segments(self) -> list[Segment]:
        """Split [0, 1] at the points where q0 loses smoothness."""
        if self.kind == "zero":
            return [Segment(0.0, 1.0, 0.0)]
        if self.kind == "piecewise_constant":
            edges = (0.0,) + self.breakpoints + (1.0,)
            return [Segment(lo, hi, v) for lo, hi, v in zip(edges, edges[1:], self.values)]
        if self.kind == "tabulated":
            n = len(self.samples)
            if n == 2 and self.samples[0] == self.samples[1]:
                return [Segment(0.0, 1.0, self.samples[0])]
            grid = np.linspace(0.0, 1.0, n)
            return [Segment(float(lo), float(hi), None) for lo, hi in zip(grid, grid[1:])]
        if self.kind == "polynomial" and all(c == 0.0 for c in self.coefficients[1:]):
            return [Segment(0.0, 1.0, self.coefficients[0])]
        if self.kind == "cosine" and self.amplitude == 0.0:
            return [Segment(0.0, 1.0, 0.0)]
        return [Segment(0.0, 1.0, None)]

    @property
    def min_value(self) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "cosine":
            return -abs(self.amplitude)
        if self.kind == "piecewise_constant":
            return min(self.values)
        if self.kind == "tabulated":
            return min(self.samples)
        return float(np.min(self._eval(np.linspace(0.0, 1.0, 4097))))

    @property
    def max_value(self) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "cosine":
            return abs(self.amplitude)
        if self.kind == "piecewise_constant":
            return max(self.values)
        if self.kind == "tabulated":
            return max(self.samples)
        return float(np.max(self._eval(np.linspace(0.0, 1.0, 4097))))

    def validate_evenness(self, grid_size: int = 1024) -> EvennessReport:
        if grid_size < 2:
            raise DomainError("grid_size must be at least 2")
        x = np.linspace(0.0, 1.0, grid_size)
        violation = float(np.max(np.abs(self._eval(x) - self._eval(1.0 - x))))
        if self.kind == "tabulated":
            s = np.asarray(self.samples)
            violation = max(violation, float(np.max(np.abs(s - s[::-1]))))
        return EvennessReport(violation <= self.symmetry_tolerance, violation)

    def require_even(self, grid_size: int = 1024) -> None:
        report = self.validate_evenness(grid_size)
        if not report.ok:
            raise DomainError(
                f"potential is not even about x = 1/2 (max violation {report.max_violation:.3g})"
            )

    # -- serialisation -----------------------------------------------------

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "cosine":
            d.update(amplitude=self.amplitude, harmonics=self.harmonics)
        elif self.kind == "polynomial":
            d["coefficients"] = list(self.coefficients)
        elif self.kind == "piecewise_constant":
            d.update(breakpoints=list(self.breakpoints), values=list(self.values))
        elif self.kind == "tabulated":
            d["samples"] = list(self.samples)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Potential:
        """Build from the configuration keys ``kind``, ``amplitude``,
        ``harmonics``, ``coefficients``, ``breakpoints``, ``values`` and
        ``samples``.  List values may be given as sequences or as
        comma-separated strings."""
        try:
            kind = str(d["kind"]).strip().lower().replace("-", "_")
        except KeyError:
            raise ConfigError("potential block needs a 'kind' key") from None
        if kind == "piecewise":
            kind = "piecewise_constant"
        try:
            if kind == "zero":
                return cls.zero()
            if kind == "cosine":
                return cls.cosine(float(d.get("amplitude", 1.0)), int(d.get("harmonics", 1)))
            if kind == "polynomial":
                return cls.polynomial(_floats(d["coefficients"]))
            if kind == "piecewise_constant":
                return cls.piecewise_constant(_floats(d["breakpoints"]), _floats(d["values"]))
            if kind == "tabulated":
                return cls.tabulated(_floats(d["samples"]))
        except KeyError as exc:
            raise ConfigError(f"potential kind {kind!r} needs key {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise ConfigError(str(exc)) from exc
            raise ConfigError(f"bad potential parameter: {exc}") from exc
        raise ConfigError(f"unknown potential kind {kind!r}")

    def describe(self) -> str:
        if self.kind == "zero":
            return "zero"
        if self.kind == "cosine":
            return f"cosine(amplitude={self.amplitude:g}, harmonics={self.harmonics})"
        if self.kind == "polynomial":
            return f"polynomial{list(self.coefficients)}"
        if self.kind == "piecewise_constant":
            return f"piecewise_constant(breakpoints={list(self.breakpoints)}, values={list(self.values)})"
        return f"tabulated({len(self.samples)} samples)"


def _floats(v) -> tuple[float, ...]:
    if isinstance(v, str):
        v = [s for s in v.replace(",", " ").split()]
    return tuple(float(s) for s in v)


def evaluate(p: Potential, x):
    return p.evaluate(x)


def validate_evenness(p: Potential, grid_size: int = 1024) -> EvennessReport:
    return p.validate_evenness(grid_size)
