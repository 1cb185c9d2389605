import numpy as np
import pytest

from hnabem.errors import BadGrading, BadLayers
from hnabem.mesh import (
    degree_vector,
    graded_mesh,
    quasi_uniform_count,
    quasi_uniform_mesh,
    subdivide_for_oscillation,
)


def test_graded_mesh_simple():
    m = graded_mesh(1.0, 1, 0.15)
    assert np.allclose(m.nodes, [0.0, 0.15, 0.85, 1.0])


def test_graded_mesh_two_layers_2pi():
    m = graded_mesh(2 * np.pi, 2, 0.15)
    assert np.allclose(m.nodes,
                       [0.0, 0.141372, 0.942478, 5.340708, 6.141813, 6.283185],
                       atol=5e-7)
    assert m.n_elements == 5


@pytest.mark.parametrize("L,n,sigma", [(1.0, 1, 0.1), (2 * np.pi, 5, 0.15),
                                       (0.37, 16, 0.33), (11.0, 3, 0.49)])
def test_graded_mesh_symmetry_and_widths(L, n, sigma):
    m = graded_mesh(L, n, sigma)
    x = m.nodes
    assert len(x) == 2 * n + 2
    assert np.all(np.diff(x) > 0)
    # mirror symmetry x_i + x_{2n+1-i} = L
    assert np.allclose(x + x[::-1], L, rtol=1e-13)
    w = m.widths
    assert np.isclose(w[0], L * sigma ** n)
    assert np.isclose(w[-1], L * sigma ** n)
    for i in range(2, n + 1):
        assert np.isclose(w[i - 1], L * sigma ** (n - i + 1) * (1 - sigma))
    assert np.isclose(w[n], L * (1 - 2 * sigma))


def test_graded_mesh_errors():
    with pytest.raises(BadGrading):
        graded_mesh(1.0, 2, 0.5)
    with pytest.raises(BadGrading):
        graded_mesh(1.0, 2, 0.0)
    with pytest.raises(BadLayers):
        graded_mesh(1.0, 0, 0.15)


def test_degree_vectors():
    assert degree_vector(4, 2).degrees == (0, 2, 4)
    assert degree_vector(1, 1).degrees == (0, 1)
    assert degree_vector(8, 16).degrees == (0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8)
    for p in range(1, 9):
        for n in (1, 2, 5, 2 * p):
            d = degree_vector(p, n).degrees
            assert d[-1] == p
            assert all(0 <= q <= p for q in d)
            assert all(b >= a for a, b in zip(d, d[1:]))  # non-decreasing


def test_degree_vector_monotone_in_p():
    for n in (2, 7):
        prev = degree_vector(1, n).degrees
        for p in range(2, 9):
            cur = degree_vector(p, n).degrees
            assert all(c >= q for c, q in zip(cur, prev))
            prev = cur


def test_degree_vector_mirroring():
    dv = degree_vector(4, 2)
    assert list(dv.element_degrees(2)) == [0, 2, 4, 2, 0]


def test_quasi_uniform_rule():
    # 2 wavelengths at p=1, c=2 pi -> ceil(4 pi) = 13 elements
    k = 5.0
    L = 2 * (2 * np.pi / k)
    assert quasi_uniform_count(L, k, 1, 2 * np.pi) == 13
    # coarse limit: one element
    assert quasi_uniform_count(0.01, 1.0, 3, 2 * np.pi) == 1
    nodes = quasi_uniform_mesh(L, k, 1, 2 * np.pi)
    assert len(nodes) == 14
    assert np.allclose(np.diff(nodes), np.diff(nodes)[0])
    # mesh width satisfies k h / p <= 2 pi / c at the configured c
    for kk in (3.0, 21.0, 160.0):
        for p in (1, 4, 8):
            h = np.max(np.diff(quasi_uniform_mesh(3.7, kk, p, 2 * np.pi)))
            assert kk * h / max(p, 1) <= 2 * np.pi / (2 * np.pi) + 1e-12


def test_quasi_uniform_doubling_monotone():
    for p in (1, 3):
        m1 = quasi_uniform_count(1.7, 10.0, p, 2 * np.pi)
        m2 = quasi_uniform_count(1.7, 20.0, p, 2 * np.pi)
        assert m1 <= m2 <= 2 * m1 + 1


def test_subdivide_for_oscillation():
    m = graded_mesh(np.pi / 5, 4, 0.15)
    degs = degree_vector(2, 4).element_degrees(4)
    nodes, out_degs = subdivide_for_oscillation(m.nodes, degs, k=20.0, c=2 * np.pi)
    assert nodes[0] == 0.0 and np.isclose(nodes[-1], np.pi / 5)
    assert np.all(np.diff(nodes) > 0)
    assert len(out_degs) == len(nodes) - 1
    for a, b, q in zip(nodes[:-1], nodes[1:], out_degs):
        assert 20.0 * (b - a) / max(q, 1) <= 1.0 + 1e-9
