"""Compactly supported eigenfunctions on the hexagonal graph and on tubes.

Lattice model: cell (i, j) sits at i e1 + j e2 and owns vertices a(i, j),
b(i, j) and three edges, all oriented away from a(i, j):

    f(i, j): a(i, j) -> b(i, j)
    g(i, j): a(i, j) -> b(i - 1, j)
    h(i, j): a(i, j) -> b(i, j - 1)

On the zig-zag tube T_(0, N) the index j is taken mod N.  The derivative
of an edge function pointing out of a vertex is +u'(0) at the tail and
-u'(1) at the head.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import _backend, hill
from .errors import ConstructionError, DomainError, NumericError
from .potential import Potential

DEFAULT_SAMPLES = 256
PHI_GUARD = 1e-6

_GAUSS_LO = 0.5 - math.sqrt(3.0) / 6.0
_GAUSS_HI = 0.5 + math.sqrt(3.0) / 6.0


# ---------------------------------------------------------------------------
# lattice


class EdgeId(NamedTuple):
    kind: str  # "f", "g" or "h"
    i: int
    j: int

    def __str__(self):
        return f"{self.kind}({self.i},{self.j})"


def _canon(kind: str, i: int, j: int, period: int | None):
    return (kind, i, j % period if period else j)


def edge_id(kind: str, i: int, j: int, period: int | None = None) -> EdgeId:
    return EdgeId(*_canon(kind, i, j, period))


def tail(e: EdgeId, period: int | None = None):
    return _canon("a", e.i, e.j, period)


def head(e: EdgeId, period: int | None = None):
    if e.kind == "f":
        return _canon("b", e.i, e.j, period)
    if e.kind == "g":
        return _canon("b", e.i - 1, e.j, period)
    return _canon("b", e.i, e.j - 1, period)


def incident_edges(v, period: int | None = None) -> list[EdgeId]:
    kind, i, j = v
    if kind == "a":
        return [edge_id(k, i, j, period) for k in "fgh"]
    return [edge_id("f", i, j, period), edge_id("g", i + 1, j, period), edge_id("h", i, j + 1, period)]


def vertex_name(v) -> str:
    return f"{v[0]}({v[1]},{v[2]})"


# ---------------------------------------------------------------------------
# edge functions


@dataclass(frozen=True)
class EdgeFunction:
    """Samples of u and u' at x = linspace(0, 1, n) on one oriented edge."""

    edge_id: EdgeId
    values: np.ndarray
    derivatives: np.ndarray

    def __post_init__(self):
        if len(self.values) < 16 or len(self.values) != len(self.derivatives):
            raise DomainError("an edge function needs at least 16 matching samples")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.values))

    @property
    def derivative_endpoints(self) -> tuple[float, float]:
        return float(self.derivatives[0]), float(self.derivatives[-1])

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


class Profile(NamedTuple):
    """u and u' sampled on the uniform grid of [0, 1]."""

    values: np.ndarray
    derivatives: np.ndarray

    def __add__(self, other):
        return Profile(self.values + other.values, self.derivatives + other.derivatives)

    def __mul__(self, k):
        return Profile(k * self.values, k * self.derivatives)

    __rmul__ = __mul__

    def reversed(self) -> Profile:
        """x -> u(1 - x)."""
        return Profile(self.values[::-1].copy(), -self.derivatives[::-1])


def _fine_grid(p: Potential, nodes: np.ndarray, sub: int):
    """Steps subdividing each node interval (and each smooth piece of q0)."""
    cuts = sorted(set(np.round(nodes, 15)) | {s.lo for s in p.segments()} | {1.0})
    cuts = np.array(cuts)
    x = (cuts[:-1, None] + (cuts[1:] - cuts[:-1])[:, None] * np.arange(sub)[None, :] / sub).ravel()
    x = np.append(x, 1.0)
    h = np.diff(x)
    q1 = p.evaluate(x[:-1] + _GAUSS_LO * h)
    q2 = p.evaluate(x[:-1] + _GAUSS_HI * h)
    idx = np.searchsorted(x, nodes - 1e-15)
    return h, q1, q2, idx


def fundamental_solutions(p: Potential, lam: float, samples: int = DEFAULT_SAMPLES, sub: int | None = None):
    """c, c', s, s' at x = linspace(0, 1, samples), shape (samples, 4).

    With ``sub`` given, every sample interval is split into that many
    Magnus steps; otherwise ``sub`` doubles until two passes agree to
    about 1e-13.
    """
    x = np.linspace(0.0, 1.0, samples)
    if sub is not None:
        h, q1, q2, idx = _fine_grid(p, x, sub)
        return _backend.magnus_path(h, q1, q2, float(lam))[idx]
    w = math.sqrt(1.0 + abs(lam))
    scale = np.array([1.0, 1.0 / w, w, 1.0])
    prev = None
    sub = max(2, math.ceil(2.0 * math.sqrt(max(lam - p.min_value, 0.0)) / (samples - 1)))
    for _ in range(12):
        h, q1, q2, idx = _fine_grid(p, x, sub)
        cur = _backend.magnus_path(h, q1, q2, float(lam))[idx]
        if prev is not None:
            err = np.max(np.abs(cur - prev) * scale) / max(1.0, np.max(np.abs(cur) * scale)) / 15.0
            if err < 1e-13:
                return cur
        prev, sub = cur, 2 * sub
    return prev


# ---------------------------------------------------------------------------
# Dirichlet eigenfunctions


@dataclass(frozen=True)
class DirichletMode:
    lam: float
    values: np.ndarray
    derivatives: np.ndarray
    parity: str  # "even" or "odd" about x = 1/2

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.values))

    @property
    def profile(self) -> Profile:
        return Profile(self.values, self.derivatives)


def _s1(p: Potential, lam: float) -> float:
    return float(hill.transfer(p, [lam], 1e-12, angles=False)[0, 2])


def polish_dirichlet(p: Potential, lam: float) -> float:
    """Refine an approximate Dirichlet eigenvalue to a root of s(1)."""
    w = math.sqrt(1.0 + abs(lam))
    s = _s1(p, lam)
    if s == 0.0:
        return lam
    if abs(s) * w > 1e-5:
        raise DomainError(f"lambda={lam!r} is not a Dirichlet eigenvalue (|s(1)| = {abs(s):.3g})")
    step = 1e-7 * max(1.0, abs(lam))
    for _ in range(20):
        lo, hi = lam - step, lam + step
        if _s1(p, lo) * _s1(p, hi) <= 0.0:
            return float(brentq(lambda t: _s1(p, t), lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))
        step *= 2.0
    raise NumericError(f"could not bracket the Dirichlet eigenvalue near {lam!r}", lam=lam)


def dirichlet_eigenfunction(p: Potential, lambda_dir: float, samples: int = DEFAULT_SAMPLES) -> DirichletMode:
    """Eigenfunction with u(0) = u(1) = 0, scaled to max |u| = 1 on the samples."""
    p.require_even()
    lam = polish_dirichlet(p, float(lambda_dir))
    sol = fundamental_solutions(p, lam, samples)
    u, du = sol[:, 2], sol[:, 3]
    k = int(np.argmax(np.abs(u)))
    scale = 1.0 / u[k]
    u, du = u * scale, du * scale
    if np.max(np.abs(u - u[::-1])) < 1e-6:
        parity = "even"
    elif np.max(np.abs(u + u[::-1])) < 1e-6:
        parity = "odd"
    else:
        raise NumericError(f"Dirichlet eigenfunction at {lam!r} has no definite parity", lam=lam)
    # the end values are zero up to the root tolerance; pin them
    u[0] = u[-1] = 0.0
    return DirichletMode(lam, u, du, parity)


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class GraphState:
    """Edge functions on a finite piece of the lattice (or a tube).

    ``check_vertices`` lists where the matching conditions are imposed;
    every other edge at those vertices carries zero.
    """

    lam: float
    potential: Potential
    edges: dict
    period: int | None = None
    check_vertices: tuple = ()

    def support_vertices(self) -> list:
        out = []
        for e in self.edges:
            for v in (tail(e, self.period), head(e, self.period)):
                if v not in out:
                    out.append(v)
        return out


@dataclass(frozen=True)
class LoopState:
    kind: str  # "hexagon", "tube_loop", "dumbbell_bead" or "dumbbell_full"
    lam: float
    parity: str
    walk: tuple  # ((EdgeId, +1 or -1), ...)
    signs: tuple
    edges: dict
    potential: Potential
    period: int | None = None

    @property
    def negative_edges(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    def graph(self) -> GraphState:
        return GraphState(self.lam, self.potential, self.edges, self.period, tuple(_walk_vertices(self.walk, self.period)))


def _walk_vertices(walk, period):
    out = []
    for e, d in walk:
        v = tail(e, period) if d > 0 else head(e, period)
        if v not in out:
            out.append(v)
    return out


HEXAGON_WALK = (
    (EdgeId("f", 0, 0), +1),
    (EdgeId("g", 1, 0), -1),
    (EdgeId("h", 1, 0), +1),
    (EdgeId("f", 1, -1), -1),
    (EdgeId("g", 1, -1), +1),
    (EdgeId("h", 0, 0), -1),
)


def tube_ring_walk(N: int):
    """The 2N-edge zig-zag ring a(0,k) -> b(0,k) <- a(0,k+1) around T_(0,N)."""
    walk = []
    for k in range(N):
        walk.append((edge_id("f", 0, k, N), +1))
        walk.append((edge_id("h", 0, k + 1, N), -1))
    return tuple(walk)


def _check_closed(walk, period):
    for (e, d), (e2, d2) in zip(walk, walk[1:] + walk[:1]):
        end = head(e, period) if d > 0 else tail(e, period)
        start = tail(e2, period) if d2 > 0 else head(e2, period)
        if end != start:
            raise ConstructionError(f"walk breaks between {e} and {e2}")


def build_ring(kind: str, p: Potential, lambda_dir: float, walk, period=None, samples=DEFAULT_SAMPLES) -> LoopState:
    """Repeat the Dirichlet eigenfunction along a closed walk.

    Flux balance where consecutive edges meet forces equal signs for odd
    eigenfunctions and alternating signs for even ones, so an even
    eigenfunction only closes up on a walk of even length.
    """
    walk = tuple((edge_id(e.kind, e.i, e.j, period), d) for e, d in walk)
    _check_closed(walk, period)
    mode = dirichlet_eigenfunction(p, lambda_dir, samples)
    n = len(walk)
    if mode.parity == "even":
        if n % 2:
            raise ConstructionError(
                f"an even Dirichlet eigenfunction cannot close around a loop of odd length {n}"
            )
        signs = tuple((-1) ** k for k in range(n))
    else:
        signs = (1,) * n
    acc: dict = {}
    for (e, d), sgn in zip(walk, signs):
        prof = mode.profile if d > 0 else mode.profile.reversed()
        prof = prof * float(sgn)
        acc[e] = acc[e] + prof if e in acc else prof
    edges = {e: EdgeFunction(e, pr.values, pr.derivatives) for e, pr in acc.items()}
    return LoopState(kind, mode.lam, mode.parity, walk, signs, edges, p, period)


def build_hexagon_loop(p: Potential, lambda_dir: float, samples: int = DEFAULT_SAMPLES) -> LoopState:
    return build_ring("hexagon", p, lambda_dir, HEXAGON_WALK, None, samples)


def build_tube_loop(p: Potential, lambda_dir: float, N: int, samples: int = DEFAULT_SAMPLES) -> LoopState:
    """Loop state on the circumference ring (2N edges) of T_(0,N)."""
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    return build_ring("tube_loop", p, lambda_dir, tube_ring_walk(int(N)), int(N), samples)


def build_dumbbell(p: Potential, lambda_dir: float, full: bool = False, samples: int = DEFAULT_SAMPLES) -> LoopState:
    """States on the necklace T_(0,1): a single bead (two parallel edges), or
    the hexagon folded onto the dumbbell, whose link edge is walked twice in
    opposite directions and ends up carrying zero."""
    if full:
        return build_ring("dumbbell_full", p, lambda_dir, HEXAGON_WALK, 1, samples)
    return build_ring("dumbbell_bead", p, lambda_dir, tube_ring_walk(1), 1, samples)


# ---------------------------------------------------------------------------
# three-leaf states


@dataclass(frozen=True)
class ThreeLeafState:
    """State on the Z-shaped support: bridge g(0,0) between a = a(0,0) and
    b = b(-1,0), horns f(0,0), h(0,0) at a and f(-1,0), h(-1,1) at b.

    Copies shifted by k e2 with sign (-1)**k fit together, so the state
    extends around T_(0,M) for every even M.
    """

    lam: float
    sign: int
    eta: float
    edges: dict
    potential: Potential
    phi1_d0: float
    phi1_d1: float
    extension_period: int = 2

    @property
    def derivative_identity_residual(self) -> float:
        """|phi1'(0) - 3 sign phi1'(1)|; zero exactly when eta = sign / 3."""
        return abs(self.phi1_d0 - 3.0 * self.sign * self.phi1_d1)

    def shifted(self, k: int, period: int | None = None) -> dict:
        s = (-1.0) ** k
        out = {}
        for e, ef in self.edges.items():
            e2 = edge_id(e.kind, e.i, e.j + k, period)
            out[e2] = EdgeFunction(e2, s * ef.values, s * ef.derivatives)
        return out

    def graph(self) -> GraphState:
        """Z with its neighbours Z_{-1}, Z_{+1}; conditions are checked at a,
        b and the four horn tips of Z."""
        edges = {}
        for k in (-1, 0, 1):
            for e, ef in self.shifted(k).items():
                if e in edges:
                    old = edges[e]
                    ef = EdgeFunction(e, old.values + ef.values, old.derivatives + ef.derivatives)
                edges[e] = ef
        check = (("a", 0, 0), ("b", -1, 0), ("b", 0, 0), ("b", 0, -1), ("a", -1, 0), ("a", -1, 1))
        return GraphState(self.lam, self.potential, edges, None, check)

    def extension(self, M: int) -> GraphState:
        """The state on T_(0,M), M even: copies k = 0..M-1 with sign (-1)**k."""
        if M < 2 or M % 2:
            raise ConstructionError("three-leaf states close up only around T_(0,M) with M even")
        edges = {}
        for k in range(M):
            edges.update(self.shifted(k, M))
        g = GraphState(self.lam, self.potential, edges, M)
        return GraphState(self.lam, self.potential, edges, M, tuple(g.support_vertices()))


def phi_basis(p: Potential, lam: float, samples: int = DEFAULT_SAMPLES):
    """phi0, phi1 with phi0(0) = 1, phi0(1) = 0, phi1(0) = 0, phi1(1) = 1."""
    sol = fundamental_solutions(p, lam, samples)
    c, dc, s, ds = sol.T
    s1 = s[-1]
    if abs(s1) * math.sqrt(1.0 + abs(lam)) <= PHI_GUARD:
        raise NumericError(f"lambda={lam!r} is too close to the Dirichlet spectrum for the phi basis", lam=lam)
    phi1 = Profile(s / s1, ds / s1)
    phi0 = Profile(c - c[-1] * phi1.values, dc - c[-1] * phi1.derivatives)
    return phi0, phi1


def build_three_leaf(p: Potential, lambda_xi: float, sign=+1, samples: int = DEFAULT_SAMPLES) -> ThreeLeafState:
    """Three-leaf state for eta(lambda) = sign / 3.

    The state is assembled even when lambda is slightly off the level set,
    so that ``verify_state`` can measure the resulting flux defect; only a
    lambda closer to the opposite level is rejected.
    """
    p.require_even()
    sign = _sign(sign)
    lam = float(lambda_xi)
    d = hill.discriminant(p, lam, 1e-12)
    target = sign * 2.0 / 3.0
    if abs(d - target) > abs(d + target) + 1e-12:  # ties at D = 0 are accepted
        raise DomainError(f"D({lam!r}) = {d:.6g} is on the {'-' if sign > 0 else '+'}2/3 level, not {target:+.6g}")
    phi0, phi1 = phi_basis(p, lam, samples)
    horn_a = phi1.reversed()
    horn_b = phi1 * float(sign)
    bridge = phi0 + phi1 * float(sign)
    parts = {
        EdgeId("f", 0, 0): horn_a,
        EdgeId("h", 0, 0): horn_a,
        EdgeId("g", 0, 0): bridge,
        EdgeId("f", -1, 0): horn_b,
        EdgeId("h", -1, 1): horn_b,
    }
    sup = max(np.max(np.abs(pr.values)) for pr in parts.values())
    edges = {e: EdgeFunction(e, pr.values / sup, pr.derivatives / sup) for e, pr in parts.items()}
    return ThreeLeafState(lam, sign, d / 2.0, edges, p, float(phi1.derivatives[0]), float(phi1.derivatives[-1]))


def _sign(sign) -> int:
    if sign in (1, "+", "plus", +1.0):
        return 1
    if sign in (-1, "-", "minus", -1.0):
        return -1
    raise DomainError(f"sign must be + or -, got {sign!r}")


# ---------------------------------------------------------------------------
# verification


class StateReport(NamedTuple):
    vertex_residual: float
    flux_residual: float
    eigen_residual: float
    passed: bool
    worst_vertex: str
    tol: float


def _as_graph(state) -> GraphState:
    return state if isinstance(state, GraphState) else state.graph()


def _eigen_defect(p: Potential, lam: float, ef: EdgeFunction, sub: int = 24) -> float:
    """Propagate (u, u') across each sample interval with an independently
    discretised transfer matrix and compare with the stored next sample."""
    phi = fundamental_solutions(p, lam, len(ef.values), sub=sub)
    # Phi_k = [[c, s], [c', s']] at sample k; T_k = Phi_{k+1} Phi_k^{-1}, det Phi = 1
    c, dc, s, ds = phi.T
    u, du = ef.values, ef.derivatives
    # coefficients of (u, u') in the (c, s) basis at each sample
    alpha = ds * u - s * du
    beta = -dc * u + c * du
    u_pred = c[1:] * alpha[:-1] + s[1:] * beta[:-1]
    du_pred = dc[1:] * alpha[:-1] + ds[1:] * beta[:-1]
    w = math.sqrt(1.0 + abs(lam))
    return float(max(np.max(np.abs(u_pred - u[1:])), np.max(np.abs(du_pred - du[1:])) / w))


def verify_state(state, tol: float = 1e-7) -> StateReport:
    """Vertex continuity, Kirchhoff flux balance and the edge equation.

    The state is first scaled to max |u| = 1; all residuals are absolute
    on that scale.
    """
    g = _as_graph(state)
    sup = max(ef.sup for ef in g.edges.values())
    if sup == 0.0:
        raise DomainError("state vanishes identically")
    vertex_res = flux_res = 0.0
    worst, worst_val = "", -1.0
    for v in g.check_vertices or g.support_vertices():
        values, flux = [], 0.0
        for e in incident_edges(v, g.period):
            ef = g.edges.get(e)
            if ef is None:
                values.append(0.0)
                continue
            if tail(e, g.period) == v:
                values.append(ef.values[0] / sup)
                flux += ef.derivatives[0] / sup
            if head(e, g.period) == v:
                values.append(ef.values[-1] / sup)
                flux -= ef.derivatives[-1] / sup
        vr = max(values) - min(values)
        vertex_res = max(vertex_res, float(vr))
        flux_res = max(flux_res, abs(float(flux)))
        if max(vr, abs(flux)) > worst_val:
            worst, worst_val = vertex_name(v), max(vr, abs(flux))
    eigen_res = 0.0
    seen = set()
    for ef in g.edges.values():
        key = (ef.values.tobytes(), ef.derivatives.tobytes())
        if key in seen:
            continue
        seen.add(key)
        eigen_res = max(eigen_res, _eigen_defect(g.potential, g.lam, ef) / sup)
    passed = bool(vertex_res < tol and flux_res < tol and eigen_res < tol)
    return StateReport(vertex_res, flux_res, eigen_res, passed, worst, tol)


def state_csv(state) -> str:
    """Per-edge samples as CSV with columns edge_id, x, value."""
    edges = state if isinstance(state, dict) else state.edges
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["edge_id", "x", "value"])
    for e in sorted(edges, key=lambda e: (e.kind, e.i, e.j)):
        ef = edges[e]
        for x, val in zip(ef.x, ef.values):
            w.writerow([str(e), f"{x:.15g}", f"{val:.15g}"])
    return buf.getvalue()
