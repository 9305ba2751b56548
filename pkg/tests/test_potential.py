import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hillgraph.errors import ConfigError, DomainError
from hillgraph.potential import Potential, validate_evenness


def test_evaluate_examples():
    assert Potential.zero().evaluate(0.3) == 0.0
    assert Potential.cosine(2.0, 1).evaluate(0.25) == pytest.approx(0.0, abs=1e-15)
    assert Potential.cosine(2.0, 1).evaluate(0.0) == 2.0


@pytest.mark.parametrize("x", [-1e-12, 1.0 + 1e-12, float("nan"), 3.0])
def test_evaluate_outside_unit_interval(x):
    with pytest.raises(DomainError):
        Potential.cosine(1.0).evaluate(x)


def test_evenness_examples():
    assert validate_evenness(Potential.cosine(2.0, 1), 1024).ok
    rep = validate_evenness(Potential.piecewise_constant([0.5], [0.0, 1.0]), 1024)
    assert not rep.ok
    assert rep.max_violation == 1.0
    assert validate_evenness(Potential.zero(), 2).ok


def test_require_even_rejects_asymmetric():
    with pytest.raises(DomainError):
        Potential.polynomial([0.0, 1.0]).require_even()


def test_tabulated_is_linear_interpolation():
    p = Potential.tabulated([0.0, 2.0, 0.0])
    assert p.evaluate(0.25) == pytest.approx(1.0)
    assert p.evaluate(0.5) == 2.0
    assert p.validate_evenness().ok


def test_tabulated_evenness_uses_its_tolerance():
    assert not Potential.tabulated([0.0, 1.0, 1e-6]).validate_evenness().ok
    assert Potential.tabulated([0.0, 1.0, 1e-6], symmetry_tolerance=1e-5).validate_evenness().ok


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="cosine", amplitude=1.0, harmonics=0),
        dict(kind="polynomial"),
        dict(kind="piecewise_constant", breakpoints=(0.5,), values=(1.0,)),
        dict(kind="piecewise_constant", breakpoints=(0.6, 0.4), values=(1.0, 2.0, 1.0)),
        dict(kind="tabulated", samples=(1.0,)),
        dict(kind="square"),
    ],
)
def test_invalid_construction(kwargs):
    with pytest.raises(DomainError):
        Potential(**kwargs)


def test_from_dict_reports_config_errors():
    with pytest.raises(ConfigError):
        Potential.from_dict({"kind": "cosine", "amplitude": "lots"})
    with pytest.raises(ConfigError):
        Potential.from_dict({"amplitude": 1.0})


def test_min_max():
    p = Potential.piecewise_constant([0.25, 0.75], [2.0, -3.0, 2.0])
    assert p.min_value == -3.0
    assert p.max_value == 2.0
    assert Potential.cosine(-4.0, 3).min_value == pytest.approx(-4.0)


def test_concurrent_readers_agree():
    p = Potential.tabulated(np.cos(2 * np.pi * np.linspace(0, 1, 101)))
    xs = np.linspace(0, 1, 5001)
    expected = p.evaluate(xs)
    results = []

    def worker():
        results.append(np.array_equal(p.evaluate(xs), expected))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(results) and len(results) == 8


even_potentials = st.one_of(
    st.builds(Potential.cosine, st.floats(-20, 20), st.integers(1, 5)),
    st.builds(
        lambda a, b: Potential.polynomial([a + b / 4.0, -b, b]),
        st.floats(-10, 10),
        st.floats(-10, 10),
    ),
    st.builds(
        lambda w, u, v: Potential.piecewise_constant([w, 1.0 - w], [u, v, u]),
        st.floats(0.01, 0.49),
        st.floats(-10, 10),
        st.floats(-10, 10),
    ),
)


@given(even_potentials, st.floats(0.0, 1.0))
@settings(max_examples=200, deadline=None)
def test_even_potentials_are_symmetric(p, x):
    # piecewise potentials are averaged at their jumps, so 1 - x hits the mirrored jump too
    assert abs(p.evaluate(x) - p.evaluate(1.0 - x)) <= max(p.symmetry_tolerance, 1e-12 * (1 + abs(p.max_value)))


@given(even_potentials, st.integers(0, 1 << 20), st.integers(-64, 64))
@settings(max_examples=200, deadline=None)
def test_periodic_extension_is_exact(p, i, k):
    # dyadic points stay exact under integer shifts, so equality must be exact
    x = i / float(1 << 20)
    assert p.periodic(x + k) == p.periodic(x)
    if x < 1.0:
        assert p.periodic(x) == p.evaluate(x)


@given(even_potentials)
@settings(max_examples=50, deadline=None)
def test_dict_round_trip(p):
    assert Potential.from_dict(p.to_dict()) == p
