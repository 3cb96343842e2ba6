import math

import numpy as np
import pytest

from sddmesh.domain import PhysicalMesh
from sddmesh.errors import ComparisonError, TanglingError
from sddmesh.monitor import constant, running_example
from sddmesh.quality import (cell_quality, l_inf_error, quality_field, quality_from_jacobian,
                             quality_report)


def _affine(J, m=5, shift=(0.0, 0.0)):
    u = PhysicalMesh.uniform(m, m)
    x = J[0][0] * u.x + J[0][1] * u.y + shift[0]
    y = J[1][0] * u.x + J[1][1] * u.y + shift[1]
    return PhysicalMesh(x, y)


def _wavy(m=9, amp=0.05):
    u = PhysicalMesh.uniform(m, m)
    return PhysicalMesh(u.x + amp * np.sin(np.pi * u.x) * np.sin(2 * np.pi * u.y),
                        u.y + amp * np.sin(2 * np.pi * u.x) * np.sin(np.pi * u.y))


def test_uniform_cells_have_unit_quality():
    q = quality_field(PhysicalMesh.uniform(11, 11))
    np.testing.assert_allclose(q, 1.0, atol=1e-14)
    assert cell_quality(PhysicalMesh.uniform(11, 11), (3, 4)) == pytest.approx(1.0, abs=1e-14)


def test_stretched_and_sheared_cells():
    assert cell_quality(_affine([[2, 0], [0, 1]]), (1, 1)) == pytest.approx(1.25, abs=1e-14)
    # shear [[1, s], [0, 1]]: tr = 2 + s^2, det = 1
    s = 0.5
    assert cell_quality(_affine([[1, s], [0, 1]]), (0, 2)) == pytest.approx((2 + s * s) / 2, abs=1e-14)


@pytest.mark.invariant
def test_quality_at_least_one_with_equality_iff_equal_singular_values(rng):
    J = rng.standard_normal((2000, 2, 2))
    q = quality_from_jacobian(J[:, 0, 0], J[:, 0, 1], J[:, 1, 0], J[:, 1, 1])
    sv = np.linalg.svd(J, compute_uv=False)
    np.testing.assert_allclose(q, (sv[:, 0] ** 2 + sv[:, 1] ** 2) / (2 * sv[:, 0] * sv[:, 1]), rtol=1e-10)
    assert np.all(q >= 1 - 1e-12)
    # conformal Jacobians c R give Q = 1
    th = rng.uniform(0, 2 * np.pi, 50)
    c = rng.uniform(0.1, 3, 50)
    qc = quality_from_jacobian(c * np.cos(th), -c * np.sin(th), c * np.sin(th), c * np.cos(th))
    np.testing.assert_allclose(qc, 1.0, atol=1e-12)


@pytest.mark.invariant
@pytest.mark.parametrize("theta", [0.3, 1.2, 2.9])
def test_rotation_and_scaling_invariance(theta):
    mesh = _wavy()
    q0 = quality_field(mesh)
    c, s = math.cos(theta), math.sin(theta)
    rot = PhysicalMesh(c * mesh.x - s * mesh.y + 2.0, s * mesh.x + c * mesh.y - 1.0)
    scaled = PhysicalMesh(3.7 * mesh.x, 3.7 * mesh.y)
    np.testing.assert_allclose(quality_field(rot), q0, atol=1e-12)
    np.testing.assert_allclose(quality_field(scaled), q0, atol=1e-12)


@pytest.mark.invariant
def test_report_orderings_and_self_comparison():
    mesh = _wavy()
    r = quality_report(mesh, mesh, running_example())
    assert r.q_max >= r.q_mean >= 1
    assert r.r_max == 1.0 and r.r_mean == 1.0 and r.l_inf == 0.0
    other = _wavy(amp=0.08)
    assert l_inf_error(other, mesh, running_example()) >= 0
    plain = quality_report(mesh)
    assert plain.r_max is None and plain.l_inf is None


def test_ratios_put_reference_in_numerator():
    ref = _affine([[2, 0], [0, 1]])
    mesh = PhysicalMesh.uniform(5, 5)
    r = quality_report(mesh, ref, constant())
    assert r.r_max == pytest.approx(1.25) and r.r_mean == pytest.approx(1.25)


def test_l_inf_uses_node_values():
    m = running_example()
    a = PhysicalMesh.uniform(5, 5)
    x = a.x.copy()
    x[2, 2] = 0.75  # move the centre node onto the density peak
    b = PhysicalMesh(x, a.y)
    assert l_inf_error(b, a, m) == pytest.approx(m.rho(0.75, 0.5) - m.rho(0.5, 0.5), rel=1e-14)


def test_folded_cells_are_finite_but_degenerate_cells_raise():
    u = PhysicalMesh.uniform(4, 4)
    x = u.x.copy()
    x[:, 1], x[:, 2] = u.x[:, 2], u.x[:, 1]  # fold the middle column of cells
    assert np.all(np.isfinite(quality_field(PhysicalMesh(x, u.y))))
    x = u.x.copy()
    x[:, 2] = x[:, 1]
    with pytest.raises(TanglingError) as err:
        quality_report(PhysicalMesh(x, u.y))
    assert err.value.cell == (1, 0)


def test_shape_mismatch_is_a_comparison_error():
    with pytest.raises(ComparisonError):
        quality_report(PhysicalMesh.uniform(5, 5), PhysicalMesh.uniform(6, 5))
    with pytest.raises(IndexError):
        cell_quality(PhysicalMesh.uniform(5, 5), (4, 0))
