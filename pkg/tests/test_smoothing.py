import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sddmesh.decomposition import build_layout
from sddmesh.domain import GridSpec, MeshSolution
from sddmesh.errors import InstabilityError, StabilityWarning
from sddmesh.smoothing import (SmoothConfig, loess_matrix, perona_malik, perona_malik_field,
                               smooth_interface, stable_dt)


def _noisy(g, seed=0, amp=0.02):
    X, Y = g.meshgrid()
    rng = np.random.default_rng(seed)
    xi, eta = X + amp * rng.standard_normal(g.shape), Y + amp * rng.standard_normal(g.shape)
    for u, v in ((xi, X), (eta, Y)):
        u[0], u[-1], u[:, 0], u[:, -1] = v[0], v[-1], v[:, 0], v[:, -1]
    return MeshSolution.from_arrays(g, xi, eta)


def test_config_validation():
    with pytest.raises(ValueError):
        SmoothConfig(k=0)
    with pytest.raises(ValueError):
        SmoothConfig(steps=-1)
    with pytest.raises(ValueError):
        SmoothConfig(scope="nope")


def test_constant_and_linear_fields_are_steady():
    g = GridSpec(29, 29)
    X, Y = g.meshgrid()
    c = np.full(g.shape, 0.3)
    assert np.array_equal(perona_malik_field(c, g.hx, g.hy, SmoothConfig(steps=10)), c)
    sol = perona_malik(MeshSolution.from_arrays(g, X, Y), SmoothConfig(steps=10))
    np.testing.assert_allclose(sol.xi.values, X, atol=1e-12)
    np.testing.assert_allclose(sol.eta.values, Y, atol=1e-12)


@pytest.mark.invariant
def test_zero_steps_is_identity():
    sol = _noisy(GridSpec(17, 17))
    out = perona_malik(sol, SmoothConfig(steps=0))
    assert np.array_equal(out.xi.values, sol.xi.values) and np.array_equal(out.eta.values, sol.eta.values)


@pytest.mark.invariant
@pytest.mark.parametrize("scope", ["global", "per-subdomain"])
def test_fixed_nodes_are_bit_identical(scope):
    g = GridSpec(29, 29)
    sol = _noisy(g)
    lay = build_layout(None, g, 2, 2)
    out = perona_malik(sol, SmoothConfig(steps=5, scope=scope), layout=lay)
    fixed = np.zeros(g.shape, dtype=bool)
    fixed[0], fixed[-1], fixed[:, 0], fixed[:, -1] = True, True, True, True
    if scope == "per-subdomain":
        fixed[14], fixed[:, 14] = True, True
    for a, b in ((sol.xi, out.xi), (sol.eta, out.eta)):
        assert np.array_equal(a.values[fixed], b.values[fixed])
        assert not np.array_equal(a.values[~fixed], b.values[~fixed])


@pytest.mark.invariant
def test_extremum_principle_per_step():
    g = GridSpec(29, 29)
    u = _noisy(g, seed=3, amp=0.1).xi.values
    cfg = SmoothConfig(k=5.0, dt=0.9 * stable_dt(g.hx, g.hy), steps=1)
    for _ in range(10):
        v = perona_malik_field(u, g.hx, g.hy, cfg)
        assert v[1:-1, 1:-1].min() >= u.min() - 1e-15 and v[1:-1, 1:-1].max() <= u.max() + 1e-15
        u = v


def test_smoothing_reduces_noise():
    g = GridSpec(29, 29)
    X, _ = g.meshgrid()
    sol = _noisy(g, seed=4)
    out = perona_malik(sol, SmoothConfig(steps=5))
    assert np.abs(out.xi.values - X).max() < np.abs(sol.xi.values - X).max()


def test_stability_warning_and_instability_error():
    g = GridSpec(29, 29)
    u = _noisy(g, seed=5).xi.values
    assert stable_dt(g.hx, g.hy) == pytest.approx(g.hx * g.hy / 4)
    with pytest.warns(StabilityWarning):
        perona_malik_field(u, g.hx, g.hy, SmoothConfig(dt=4e-4, steps=1))
    with pytest.warns(StabilityWarning), pytest.raises(InstabilityError, match="dt"):
        perona_malik_field(u, g.hx, g.hy, SmoothConfig(dt=1e-2, steps=5))


def test_per_subdomain_needs_layout():
    with pytest.raises(ValueError):
        perona_malik(_noisy(GridSpec(9, 9)), SmoothConfig(scope="per-subdomain"))


def test_loess_reproduces_constants_and_quadratics():
    s = np.linspace(0, 1, 29)
    np.testing.assert_allclose(smooth_interface(np.full(29, 2.5), 5, s=s), 2.5, rtol=1e-13)
    q = 0.3 - 1.2 * s + 2.0 * s**2
    for span in (3, 5, 9, 29):
        np.testing.assert_allclose(smooth_interface(q, span, s=s), q, atol=1e-12)


def test_loess_reduces_noise_on_a_quadratic():
    s = np.linspace(0, 1, 29)
    q = 0.1 + s - 0.7 * s**2
    rng = np.random.default_rng(11)
    for _ in range(100):
        v = q + 0.01 * rng.standard_normal(29)
        before = np.sqrt(np.mean((v - q) ** 2))
        after = np.sqrt(np.mean((smooth_interface(v, 5, s=s) - q) ** 2))
        assert after < before


def test_loess_keeps_anchors_and_checks_span():
    v = np.random.default_rng(2).standard_normal(15)
    out = smooth_interface(v, 5, anchors=[0, 7, 14])
    assert out[0] == v[0] and out[7] == v[7] and out[14] == v[14]
    for bad in (4, 1, 17):
        with pytest.raises(ValueError):
            smooth_interface(v, bad)


@pytest.mark.invariant
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.floats(-5, 5), st.floats(-5, 5))
def test_loess_is_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal((2, 21))
    lhs = smooth_interface(a * u + b * v, 7)
    rhs = a * smooth_interface(u, 7) + b * smooth_interface(v, 7)
    np.testing.assert_allclose(lhs, rhs, atol=1e-11)


def test_loess_rows_sum_to_one():
    L = loess_matrix(np.linspace(0, 2, 11), 5)
    np.testing.assert_allclose(L.sum(axis=1), 1.0, atol=1e-13)
    assert np.count_nonzero(L[5]) == 5
