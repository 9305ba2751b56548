import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hillgraph import graphene, hill, nanotube
from hillgraph.eigenstates import build_three_leaf, verify_state
from hillgraph.errors import DomainError
from hillgraph.nanotube import classify, orbit
from hillgraph.potential import Potential

vectors = st.tuples(st.integers(-9, 9), st.integers(-9, 9)).filter(lambda p: p != (0, 0))


@pytest.mark.parametrize(
    "p, family, normal, metallic",
    [
        ((0, 4), "zigzag", (0, 4), False),
        ((3, -3), "zigzag", (0, 3), True),
        ((4, 0), "zigzag", (0, 4), False),
        ((5, 5), "armchair", (5, 5), True),
        ((-5, 10), "armchair", (5, 5), True),
        ((2, 1), "chiral", (2, 1), False),
    ],
)
def test_classify_examples(p, family, normal, metallic):
    tv = classify(*p)
    assert (tv.family, tv.normal_form, tv.metallic) == (family, normal, metallic)


def test_zero_vector_rejected():
    with pytest.raises(DomainError):
        classify(0, 0)


@given(vectors)
@settings(max_examples=200, deadline=None)
def test_classification_is_an_orbit_invariant(p):
    tv = classify(*p)
    for q in orbit(*p):
        other = classify(*q)
        assert other.normal_form == tv.normal_form
        assert other.metallic == tv.metallic


@given(st.integers(1, 12))
def test_zigzag_presentations_agree(N):
    forms = {classify(*p).normal_form for p in ((0, N), (N, 0), (N, -N), (0, -N))}
    assert forms == {(0, N)}


@pytest.mark.parametrize("p, ns", [((0, 1), [0]), ((0, 4), [-2, -1, 0, 1, 2]), ((1, 1), [-1, 0, 1])])
def test_quasimomentum_lines_examples(p, ns):
    lines = nanotube.quasimomentum_lines(p)
    assert [ln.n for ln in lines] == ns
    for ln in lines:
        pts = ln.points(11)
        assert len(pts) == 11
        assert np.all(np.abs(pts) <= math.pi + 1e-12)
        assert np.allclose(pts @ np.array(p, dtype=float), 2 * math.pi * ln.n, atol=1e-12)


def test_zigzag_lines_are_horizontal():
    for ln in nanotube.quasimomentum_lines((0, 4)):
        pts = ln.points(5)
        assert np.allclose(pts[:, 1], math.pi * ln.n / 2)


# ---------------------------------------------------------------------------
# alpha


@pytest.mark.parametrize(
    "p, value",
    [((0, 3), 0.0), ((0, 2), 1.0), ((0, 4), math.sqrt(2) - 1), ((0, 5), abs(2 * math.cos(2 * math.pi / 5) - 1))],
)
def test_alpha_examples(p, value):
    assert nanotube.alpha(p) == pytest.approx(value, abs=1e-12)
    assert nanotube.minimize_on_lines(p).value == pytest.approx(value, abs=1e-9)


def test_alpha_shortcuts_are_exact():
    assert nanotube.alpha((0, 3)) == 0.0
    assert nanotube.alpha((5, 5)) == 0.0
    for p in ((0, 1), (1, 0), (0, 2), (2, 0), (1, -1), (2, -2), (0, -2)):
        assert nanotube.alpha(p) == 1.0
        assert nanotube.minimize_on_lines(p).value == pytest.approx(1.0, abs=1e-9)


@given(vectors)
@settings(max_examples=60, deadline=None)
def test_alpha_range_and_metallicity(p):
    rep = nanotube.alpha_details(p)
    assert 0.0 <= rep.value <= 1.0
    assert rep.consistent
    assert (rep.minimized < 1e-9) == classify(*p).metallic
    if rep.predicted_line_agrees is not None:
        assert rep.predicted_line_agrees


def test_alpha_tends_to_zero():
    for N in range(20, 61):
        if N % 3:
            assert nanotube.alpha((0, N)) < 0.1
    values = [nanotube.alpha((0, N)) for N in (4, 7, 10, 13, 16, 19)]
    assert values == sorted(values, reverse=True)


def test_zigzag_formula_guard():
    with pytest.raises(DomainError):
        nanotube.alpha_zigzag_formula(0)


# ---------------------------------------------------------------------------
# spectra


def test_armchair_free_spectrum(free_bs):
    ts = nanotube.tube_spectrum((1, 1), Potential.zero(), (-1.0, 100.0))
    assert ts.alpha == 0.0
    assert ts.tube_gaps == ()
    assert ts.point_spectrum_xi == ()
    assert [(i.lower, i.upper) for i in ts.ac_bands] == [(b.lower, b.upper) for b in ts.band_structure.bands]
    assert nanotube.check_tube_spectrum(ts) == []


def test_armchair_cosine_has_no_extra_gaps(cos11_bs):
    ts = nanotube.tube_spectrum_from_bands((5, 5), cos11_bs)
    assert ts.alpha == 0.0 and ts.tube_gaps == ()
    assert nanotube.check_tube_spectrum(ts) == []


def test_zigzag_two_free_case():
    ts = nanotube.tube_spectrum((0, 2), Potential.zero(), (-1.0, 50.0))
    xi = [x.lam for x in ts.point_spectrum_xi]
    a, b = math.acos(1 / 3), math.acos(-1 / 3)
    expected = [a**2, b**2, (2 * math.pi - b) ** 2, (2 * math.pi - a) ** 2]
    assert np.allclose(xi[:4], expected, atol=1e-9)
    assert np.allclose(xi[:2], [1.51526, 3.65052], atol=1e-5)
    assert all(x.location == "edge" for x in ts.point_spectrum_xi)
    for iv in ts.ac_bands:
        d = [abs(hill.discriminant(ts.band_structure.potential, x)) for x in np.linspace(iv.lower, iv.upper, 7)]
        assert min(d) >= 2.0 / 3.0 - 1e-9
    assert nanotube.check_tube_spectrum(ts) == []


def test_zigzag_four_free_case():
    ts = nanotube.tube_spectrum((0, 4), Potential.zero(), (-1.0, 50.0))
    t = (2.0 / 3.0) * (math.sqrt(2) - 1)
    for band in ts.band_structure.full_bands:
        (gap,) = [g for g in ts.tube_gaps if g.band == band.index]
        for x in (gap.lower, gap.upper):
            assert abs(abs(2 * math.cos(math.sqrt(x))) - t) < 1e-12
    assert all(x.location == "embedded" for x in ts.point_spectrum_xi)
    assert nanotube.check_tube_spectrum(ts) == []


def test_chiral_tube(cos11_bs):
    ts = nanotube.tube_spectrum_from_bands((2, 1), cos11_bs)
    assert ts.tube.family == "chiral" and not ts.tube.metallic
    assert 0.0 < ts.alpha < 1.0
    assert ts.point_spectrum_xi == ()
    assert nanotube.check_tube_spectrum(ts) == []


@pytest.mark.parametrize("N", [4, 5, 7, 8])
def test_one_extra_gap_per_band(cos31_bs, N):
    ts = nanotube.tube_spectrum_from_bands((0, N), cos31_bs)
    counts = [sum(1 for g in ts.tube_gaps if g.band == b.index) for b in cos31_bs.full_bands]
    assert counts == [1] * len(cos31_bs.full_bands)


@pytest.mark.parametrize("N", [1, 2, 4, 5, 7, 10])
def test_zigzag_equivalence(cos11_bs, N):
    spectra = [nanotube.tube_spectrum_from_bands(p, cos11_bs) for p in ((0, N), (N, 0), (N, -N))]
    for ts in spectra[1:]:
        assert ts.ac_bands == spectra[0].ac_bands
        assert ts.tube_gaps == spectra[0].tube_gaps
        assert [x.lam for x in ts.point_spectrum_xi] == [x.lam for x in spectra[0].point_spectrum_xi]


def test_equivalence_from_raw_lines():
    # minimise over the raw (untransformed) lines of each presentation
    for N in (4, 5, 7):
        values = [nanotube.minimize_on_lines_of(nanotube.quasimomentum_lines(p)).value for p in ((0, N), (N, 0), (N, -N))]
        assert max(values) - min(values) < 1e-9


@pytest.mark.parametrize("N", [1, 3, 5])
def test_odd_zigzag_has_no_xi(cos11_bs, N):
    assert nanotube.tube_spectrum_from_bands((0, N), cos11_bs).point_spectrum_xi == ()


@pytest.mark.parametrize("N", [2, 4, 6])
def test_xi_levels_carry_three_leaf_states(cos11_bs, N):
    ts = nanotube.tube_spectrum_from_bands((0, N), cos11_bs)
    full = {b.index for b in cos11_bs.full_bands}
    levels = [x for x in ts.point_spectrum_xi if x.band in full]
    assert len(levels) == 2 * len(full)
    for x in levels[:6]:
        state = build_three_leaf(cos11_bs.potential, x.lam, x.sign)
        assert verify_state(state).passed
        assert verify_state(state.extension(N)).passed


def test_xi_levels_free_case(free_bs):
    levels = nanotube.xi_levels(free_bs)
    band0 = [lam for lam, k, _ in levels if k == 0]
    band1 = [lam for lam, k, _ in levels if k == 1]
    assert np.allclose(band0, [math.acos(1 / 3) ** 2, math.acos(-1 / 3) ** 2], atol=1e-9)
    expected1 = sorted([(2 * math.pi - math.acos(-1 / 3)) ** 2, (2 * math.pi - math.acos(1 / 3)) ** 2])
    assert np.allclose(band1, expected1, atol=1e-9)


def test_xi_levels_on_clipped_band():
    bs = hill.band_structure(Potential.zero(), (-1.0, 2.0))
    levels = nanotube.xi_levels(bs)
    assert [(k, s) for _, k, s in levels] == [(0, "+")]


# ---------------------------------------------------------------------------
# line dispersions


def test_zigzag_dispersion_examples(free_bs):
    edge = nanotube.zigzag_dispersion(3, free_bs, 0, 0.0)
    assert edge.factor == pytest.approx(3.0)
    lam = {(pt.band, pt.sign): pt.lam for pt in edge}
    assert lam[0, "+"] == pytest.approx(0.0, abs=1e-9)
    dirac = nanotube.zigzag_dispersion(3, free_bs, 1, -2 * math.pi / 3)
    assert dirac.factor < 1e-7
    for pt in dirac:
        assert abs(hill.discriminant(Potential.zero(), pt.lam)) < 1e-6
    theta1 = -3 * math.pi / 4
    low = nanotube.zigzag_dispersion(4, free_bs, 1, theta1)
    assert low.factor == pytest.approx(math.sqrt(2) - 1, abs=1e-12)
    assert low.factor == pytest.approx(nanotube.alpha((0, 4)), abs=1e-12)


def test_armchair_dispersion_examples(free_bs):
    assert nanotube.armchair_dispersion(1, free_bs, 0, 0.0).factor == pytest.approx(3.0)
    # the n = 0 line of T_(2,2) passes through a Dirac point
    assert nanotube.armchair_radicand(2, 0, 2 * math.pi / 3) == pytest.approx(0.0, abs=1e-14)


def test_line_index_range(free_bs):
    with pytest.raises(DomainError):
        nanotube.zigzag_dispersion(3, free_bs, 3, 0.0)
    with pytest.raises(DomainError):
        nanotube.armchair_dispersion(0, free_bs, 0, 0.0)


@given(st.integers(1, 12), st.data(), st.floats(-math.pi, math.pi))
@settings(max_examples=60, deadline=None)
def test_line_dispersions_restrict_graphene(N, data, theta1):
    bs = _free()
    n = data.draw(st.integers(0, N - 1))
    for kind, func, theta2 in (
        ("zigzag", nanotube.zigzag_dispersion, 2 * math.pi * n / N),
        ("armchair", nanotube.armchair_dispersion, 2 * math.pi * n / N - theta1),
    ):
        f = graphene.bloch_factor(theta1, theta2)
        # F = 3 sits on closed free-case edges, where lambda ~ sqrt(3 - F) amplifies rounding
        assume(1e-3 < f < 3 - 1e-3)
        line = {(pt.band, pt.sign): pt.lam for pt in func(N, bs, n, theta1)}
        plane = {(pt.band, pt.sign): pt.lam for pt in graphene.dispersion_lambda(bs, theta1, theta2)}
        assert line.keys() == plane.keys()
        for key in line:
            assert line[key] == pytest.approx(plane[key], abs=1e-9)


_FREE = {}


def _free():
    if "bs" not in _FREE:
        _FREE["bs"] = hill.band_structure(Potential.zero(), (-1.0, 120.0))
    return _FREE["bs"]


def _cos():
    if "cos" not in _FREE:
        _FREE["cos"] = hill.band_structure(Potential.cosine(2.0, 1), (-3.0, 120.0))
    return _FREE["cos"]


@given(vectors, st.data())
@settings(max_examples=40, deadline=None)
def test_line_spectra_lie_in_tube_spectrum(p, data):
    bs = _cos()
    ts = nanotube.tube_spectrum_from_bands(p, bs)
    lines = [ln for ln in nanotube.quasimomentum_lines(p) if ln.endpoints() is not None]
    line = data.draw(st.sampled_from(lines))
    s = data.draw(st.floats(0.0, 1.0))
    a, b = line.endpoints()
    theta = a + s * (b - a)
    assert abs(theta @ np.array(p, dtype=float) - 2 * math.pi * line.n) < 1e-9
    for pt in graphene.dispersion_lambda(bs, theta):
        assert any(iv.lower - 1e-9 <= pt.lam <= iv.upper + 1e-9 for iv in ts.ac_bands)
        assert not any(g.lower + 1e-9 < pt.lam < g.upper - 1e-9 for g in ts.tube_gaps)
