import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from c1pg.mesh import (Partition1D, from_reference, perturb_partition, tensor_mesh,
                       to_reference, uniform_partition)


def test_uniform_two_cells():
    np.testing.assert_array_equal(uniform_partition(2, 0, 1).coords, [0, 0.5, 1])


def test_uniform_one_cell():
    np.testing.assert_array_equal(uniform_partition(1, 0, 1).coords, [0, 1])


def test_uniform_gaps():
    np.testing.assert_allclose(uniform_partition(4, 0, 1).gaps, 0.25, atol=1e-16)


@pytest.mark.parametrize("M,a,b", [(0, 0, 1), (3, 1, 1), (3, 2, 1)])
def test_uniform_rejects_bad_input(M, a, b):
    with pytest.raises(ValueError):
        uniform_partition(M, a, b)


def test_partition_rejects_non_increasing():
    with pytest.raises(ValueError):
        Partition1D(np.array([0.0, 0.5, 0.5, 1.0]))


def test_partition_is_read_only():
    p = uniform_partition(3, 0, 1)
    with pytest.raises(ValueError):
        p.coords[1] = 0.2


def test_eps_zero_is_identity():
    p = uniform_partition(8, 0, 1)
    np.testing.assert_array_equal(perturb_partition(p, 0.0, seed=7).coords, p.coords)


@pytest.mark.parametrize("eps", [-0.1, 0.5, 0.7])
def test_perturb_rejects_eps_out_of_range(eps):
    with pytest.raises(ValueError):
        perturb_partition(uniform_partition(4, 0, 1), eps, seed=0)


def test_perturbation_bound_example():
    p = perturb_partition(uniform_partition(8, 0, 1), 0.001, seed=42)
    assert np.max(np.abs(p.coords - np.arange(9) / 8)) <= 0.001 / 8


def test_perturbation_is_not_trivial():
    p = perturb_partition(uniform_partition(8, 0, 1), 0.3, seed=42)
    assert np.max(np.abs(p.coords - np.arange(9) / 8)) > 0


def test_axes_use_independent_streams():
    mesh = tensor_mesh(8, 8, eps=0.3, seed=5)
    assert not np.array_equal(mesh.px.coords, mesh.py.coords)


def test_general_domain_keeps_magnitude():
    p = perturb_partition(uniform_partition(8, -2, 2), 0.2, seed=3)
    q = perturb_partition(uniform_partition(8, 0, 1), 0.2, seed=3)
    np.testing.assert_allclose((p.coords + 2) / 4, q.coords, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(M=st.integers(1, 40), eps=st.floats(0, 0.499), seed=st.integers(0, 2 ** 32 - 1),
       a=st.floats(-5, 5), width=st.floats(0.1, 10))
def test_perturbation_invariants(M, eps, seed, a, width):
    b = a + width
    base = uniform_partition(M, a, b)
    p = perturb_partition(base, eps, seed)
    assert p.coords[0] == a and p.coords[-1] == b
    assert np.all(np.diff(p.coords) > 0)
    assert np.all(np.abs(p.coords - base.coords) <= eps * width / M * (1 + 1e-12))
    assert p.ratio <= (1 + 2 * eps) / (1 - 2 * eps) * (1 + 1e-12)


@settings(max_examples=20, deadline=None)
@given(M=st.integers(1, 20), N=st.integers(1, 20), eps=st.floats(0, 0.49),
       seed=st.integers(0, 10 ** 6))
def test_mesh_is_deterministic(M, N, eps, seed):
    m1, m2 = tensor_mesh(M, N, eps=eps, seed=seed), tensor_mesh(M, N, eps=eps, seed=seed)
    assert m1.px.coords.tobytes() == m2.px.coords.tobytes()
    assert m1.py.coords.tobytes() == m2.py.coords.tobytes()


def recovered_draws(M, eps, seed):
    p = perturb_partition(uniform_partition(M, 0, 1), eps, seed)
    i = np.arange(1, M)
    return (p.coords[1:-1] - i / M) * M / (eps * np.sin(i * np.pi / M))


def test_draw_depends_only_on_seed_axis_and_node():
    u4, u8 = recovered_draws(4, 0.4, 9), recovered_draws(8, 0.4, 9)
    np.testing.assert_allclose(u4, u8[:3], rtol=1e-9)
    assert np.all((u8 > 0) & (u8 < 1))
    assert not np.allclose(u4, recovered_draws(4, 0.4, 10))


def test_mesh_geometry():
    mesh = tensor_mesh(4, 2, domain=(0, 2, 0, 1))
    assert (mesh.M, mesh.N) == (4, 2)
    assert mesh.h == pytest.approx(0.5)
    assert mesh.h_min == pytest.approx(0.5)
    el = mesh.element(1, 1)
    assert el.x == (0.5, 1.0) and el.y == (0.5, 1.0)
    assert (el.hx, el.hy) == (0.5, 0.5)
    assert len(list(mesh.elements())) == 8
    with pytest.raises(IndexError):
        mesh.element(4, 0)


def test_locate_maps_right_end_to_last_cell():
    p = uniform_partition(4, 0, 1)
    np.testing.assert_array_equal(p.locate([0.0, 0.3, 0.5, 1.0]), [0, 1, 2, 3])


def test_reference_map_examples():
    iv = (0.25, 0.75)
    assert to_reference(iv, 0.5) == 0
    assert to_reference(iv, 0.25) == -1 and to_reference(iv, 0.75) == 1


@given(x0=st.floats(-10, 10), width=st.floats(1e-3, 10), frac=st.floats(0, 1))
def test_reference_round_trip(x0, width, frac):
    iv = (x0, x0 + width)
    x = x0 + frac * width
    assert from_reference(iv, to_reference(iv, x)) == pytest.approx(x, abs=1e-14 * (1 + abs(x0) + width))
