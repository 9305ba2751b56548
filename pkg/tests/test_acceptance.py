"""Exit criteria of the build, one test per criterion (A1 ... A11).

Each test prints a PASS/FAIL line; the lines are repeated in the terminal
summary of the pytest run.
"""

import math
import time

import numpy as np
import pytest

from hillgraph import graphene, hill, nanotube
from hillgraph.eigenstates import build_three_leaf, verify_state
from hillgraph.potential import Potential

from oracles import free_discriminant, free_root, galerkin_band_edges

pytestmark = pytest.mark.acceptance


def test_a1_free_discriminant_and_tiling(verdict):
    start = time.perf_counter()
    p = Potential.zero()
    lams = np.linspace(-1.0, 400.0, 2000)
    d = hill.discriminant(p, lams)
    err = float(np.max(np.abs(d - free_discriminant(lams))))
    bs = hill.band_structure(p, (-1.0, 400.0))
    top = (6.0 * math.pi) ** 2
    covering = [b for b in bs.bands if b.lower < top]
    gaps = [nxt.lower - cur.upper for cur, nxt in zip(covering, covering[1:])]
    elapsed = time.perf_counter() - start
    ok = (
        err < 1e-9
        and abs(covering[0].lower) < 1e-8
        and covering[-1].upper >= top - 1e-8
        and len(covering) == 6
        and max(gaps) < 1e-8
        and elapsed < 5.0
    )
    verdict(
        "A1 free-case discriminant and tiling",
        ok,
        f"max|D - 2cos sqrt(lam)| = {err:.2e}, max gap = {max(gaps):.2e}, {elapsed:.2f} s",
    )


def test_a2_determinant(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(20240101)
    worst = 0.0
    for p in (
        Potential.zero(),
        Potential.cosine(3.0, 1),
        Potential.piecewise_constant([0.25, 0.75], [2.0, -3.0, 2.0]),
    ):
        lams = rng.uniform(p.min_value - 1.0, 400.0, 1000)
        rows = hill.transfer(p, lams, angles=False)
        det = rows[:, 0] * rows[:, 3] - rows[:, 1] * rows[:, 2]
        worst = max(worst, float(np.max(np.abs(det - 1.0))))
    elapsed = time.perf_counter() - start
    verdict("A2 det M = 1", worst < 1e-9 and elapsed < 10.0, f"max|det - 1| = {worst:.2e}, {elapsed:.2f} s")


def test_a3_graphene_spectrum_identity(verdict, cos31_bs):
    spec = graphene.spectrum_from_bands(cos31_bs)
    same = [(b.lower, b.upper) for b in spec.ac_bands] == [(b.lower, b.upper) for b in cos31_bs.bands]
    edges = [e for b in cos31_bs.full_bands for e in (b.lower, b.upper)]
    ref = galerkin_band_edges(3.0, 1, modes=64, count=len(edges))
    err = float(np.max(np.abs(np.array(edges) - ref)))
    verdict(
        "A3 graphene ac spectrum equals Hill bands",
        same and err < 1e-6,
        f"{len(edges)} edges, max deviation from Galerkin = {err:.2e}",
    )


def test_a4_bloch_factor_range(verdict):
    # 1023 intervals over one period: the nodes contain 0, 2 pi / 3 and 4 pi / 3
    theta = np.linspace(0.0, 2.0 * math.pi, 1024)
    t1, t2 = np.meshgrid(theta, theta)
    f = graphene.bloch_factor(t1, t2)
    at_origin = f[0, 0]
    i2, i1 = np.unravel_index(np.argmin(f), f.shape)
    q = graphene.Quasimomentum(theta[i1], theta[i2])
    near = min(math.hypot(q.theta1 - s * 2 * math.pi / 3, q.theta2 + s * 2 * math.pi / 3) for s in (1.0, -1.0))
    ok = (
        0.0 <= f.min()
        and f.max() <= 3.0
        and at_origin == 3.0
        and f.max() == at_origin
        and f.min() < 1e-3
        and near < 1e-2
    )
    verdict("A4 range of F", ok, f"min = {f.min():.2e} at distance {near:.1e} from a Dirac point, F(0,0) = {float(at_origin)!r}")


def test_a5_alpha_formula(verdict):
    worst = 0.0
    exact = True
    for N in range(1, 31):
        formula = nanotube.alpha_zigzag_formula(N)
        minimized = nanotube.minimize_on_lines((0, N)).value
        worst = max(worst, abs(formula - minimized))
        a = nanotube.alpha((0, N))
        if (N % 3 == 0) != (a == 0.0):
            exact = False
        if N in (1, 2) and a != 1.0:
            exact = False
    verdict("A5 zig-zag alpha formula vs minimisation", worst < 1e-8 and exact, f"max deviation {worst:.2e}")


def test_a6_tube_gaps_free_0_4(verdict, free_bs):
    ts = nanotube.tube_spectrum_from_bands((0, 4), free_bs)
    t = (2.0 / 3.0) * (math.sqrt(2.0) - 1.0)
    ok = True
    worst = 0.0
    for band in free_bs.full_bands:
        gaps = [g for g in ts.tube_gaps if g.band == band.index]
        if len(gaps) != 1:
            ok = False
            continue
        lo, hi = sorted(free_root(s * t, band.lower + 1e-12, band.upper - 1e-12) for s in (1.0, -1.0))
        worst = max(worst, abs(gaps[0].lower - lo), abs(gaps[0].upper - hi))
    verdict(
        "A6 one extra gap per band for T(0,4)",
        ok and worst < 1e-9,
        f"{len(free_bs.full_bands)} bands, max endpoint deviation {worst:.2e}",
    )


def test_a7_xi_placement(verdict, free_bs):
    ts2 = nanotube.tube_spectrum_from_bands((0, 2), free_bs)
    ends = np.array([x for iv in ts2.ac_bands for x in (iv.lower, iv.upper)])
    edge_dist = max(float(np.min(np.abs(ends - x.lam))) for x in ts2.point_spectrum_xi)
    # the Xi levels themselves against scalar roots of 2 cos sqrt(lam) = +-2/3
    bands = {b.index: b for b in free_bs.bands}
    root_err = max(
        abs(x.lam - free_root((2.0 if x.sign == "+" else -2.0) / 3.0, bands[x.band].lower, bands[x.band].upper))
        for x in ts2.point_spectrum_xi
    )
    ts4 = nanotube.tube_spectrum_from_bands((0, 4), free_bs)
    margins = []
    for x in ts4.point_spectrum_xi:
        inside = [min(x.lam - iv.lower, iv.upper - x.lam) for iv in ts4.ac_bands if iv.lower < x.lam < iv.upper]
        margins.append(max(inside) if inside else -1.0)
    ok = bool(ts2.point_spectrum_xi) and edge_dist < 1e-9 and root_err < 1e-9 and bool(margins) and min(margins) > 1e-3
    verdict(
        "A7 Xi levels at edges for T(0,2), inside bands for T(0,4)",
        ok,
        f"T(0,2) max distance to an edge {edge_dist:.2e} (root error {root_err:.1e}), T(0,4) min margin {min(margins):.3g}",
    )


def test_a8_three_leaf(verdict):
    p = Potential.zero()
    lam = math.acos(1.0 / 3.0) ** 2
    rep = verify_state(build_three_leaf(p, lam, +1))
    off = verify_state(build_three_leaf(p, lam + 1e-3, +1))
    worst = max(rep.vertex_residual, rep.flux_residual, rep.eigen_residual)
    ok = worst < 1e-8 and off.flux_residual > 1e-4
    verdict(
        "A8 three-leaf state",
        ok,
        f"residuals {rep.vertex_residual:.1e}/{rep.flux_residual:.1e}/{rep.eigen_residual:.1e}, "
        f"perturbed flux {off.flux_residual:.2e}",
    )


def test_a9_dirac_cone(verdict, free_bs):
    lam_star = graphene.dirac_level(free_bs, 0)
    cone = graphene.dirac_cone_slopes(free_bs, 0, n_directions=4)
    sp, sm = cone.slopes_plus, cone.slopes_minus
    rel = np.abs(np.abs(sp) - np.abs(sm)) / np.maximum(np.abs(sp), np.abs(sm))
    opposite = bool(np.all(np.sign(sp) == -np.sign(sm)))
    ok = abs(lam_star - (math.pi / 2) ** 2) < 1e-9 and opposite and rel.max() < 0.01 and np.min(np.abs(sp)) > 0
    verdict(
        "A9 Dirac cone on band 0",
        ok,
        f"lambda* error {abs(lam_star - (math.pi / 2) ** 2):.1e}, slopes {sp.round(6)} / {sm.round(6)}",
    )


def _random_even_potential(rng):
    kind = rng.integers(3)
    if kind == 0:
        return Potential.cosine(rng.uniform(-8.0, 8.0), int(rng.integers(1, 4)))
    if kind == 1:
        # even polynomial in (x - 1/2): a + b (x - 1/2)^2
        a, b = rng.uniform(-5.0, 5.0, 2)
        return Potential.polynomial([a + b / 4.0, -b, b])
    w = rng.uniform(0.05, 0.45)
    v = rng.uniform(-5.0, 5.0, 2)
    return Potential.piecewise_constant([w, 1.0 - w], [v[0], v[1], v[0]])


def test_a10_bloch_laplacian_cross_check(verdict):
    rng = np.random.default_rng(7)
    worst = 0.0
    count = 0
    for _ in range(100):
        p = _random_even_potential(rng)
        bs = hill.band_structure(p, (p.min_value - 1.0, 120.0))
        theta = rng.uniform(-math.pi, math.pi, 2)
        f = graphene.bloch_factor(theta)
        for pt in graphene.dispersion_lambda(bs, theta):
            worst = max(worst, abs(abs(hill.eta(p, pt.lam)) - f / 3.0))
            count += 1
    verdict("A10 |eta| = F/3 on the dispersion", worst < 1e-8, f"{count} lambdas, max deviation {worst:.2e}")


def test_a11_zigzag_equivalence(verdict, cos11_bs):
    spectra = [nanotube.tube_spectrum_from_bands(p, cos11_bs) for p in ((0, 3), (3, 0), (3, -3))]
    ref = spectra[0]
    ok = True
    worst = 0.0
    for ts in spectra[1:]:
        for a, b in ((ref.ac_bands, ts.ac_bands), (ref.tube_gaps, ts.tube_gaps)):
            if len(a) != len(b):
                ok = False
                continue
            for x, y in zip(a, b):
                worst = max(worst, abs(x.lower - y.lower), abs(x.upper - y.upper))
    verdict("A11 T(0,3), T(3,0), T(3,-3) agree", ok and worst < 1e-9, f"max interval deviation {worst:.2e}")
