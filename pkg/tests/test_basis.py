import numpy as np
import pytest

from hnabem.basis import (
    build_hna_space,
    build_hp_space,
    count_dofs_by_enumeration,
    eval_basis,
    legendre_values,
    removal_threshold,
)
from hnabem.errors import AlphaOutOfRange, BadIndex
from hnabem.mesh import graded_mesh
from hnabem.scenes import builtin_scene


def exp1_spaces(k=20.0, p=8):
    scene = builtin_scene("exp1", k=k)
    vg = build_hna_space(scene.polygon, k, p)
    vs = build_hp_space(scene, k, p)
    return scene, vg, vs


def test_removal_threshold_example():
    # alpha=2, k=20, L=2 pi, n=2: threshold 0.6283 -> x_1 = 0.141372
    mesh = graded_mesh(2 * np.pi, 2, 0.15)
    x, idx = removal_threshold(mesh.nodes, 2.0, 20.0)
    assert idx == 1
    assert abs(x - 0.141372) < 1e-6


def test_no_removal_when_threshold_below_first_node():
    mesh = graded_mesh(2 * np.pi, 2, 0.15)
    x, idx = removal_threshold(mesh.nodes, 0.1, 100.0)  # 0.00628 < x_1
    assert idx == 0 and x == 0.0


def test_single_direction_zone_structure():
    scene = builtin_scene("exp1", k=20.0)
    space = build_hna_space(scene.polygon, 20.0, 2, layers=2, alpha=2.0)
    # per side: 5 elements, first/last single-direction
    for j in range(3):
        els = [el for el in space.elements if el.piece_id == j]
        assert len(els) == 5
        dirs = [sorted({f.direction for f in space.functions_on(el.index)}) for el in els]
        assert dirs[0] == [1]
        assert dirs[-1] == [-1]
        assert all(d == [-1, 1] for d in dirs[1:-1])


def test_dof_counts_match_paper_headline():
    _, vg, vs = exp1_spaces(k=20.0, p=8)
    assert vg.n_dofs == count_dofs_by_enumeration(vg)
    assert vs.n_dofs == count_dofs_by_enumeration(vs)
    assert vg.n_dofs == 588
    assert vs.n_dofs == 534
    total = vg.n_dofs + vs.n_dofs
    assert total == 1122          # figure caption value, reproduced exactly
    assert abs(total - 1122) <= 0.1 * 1122

    scene3 = builtin_scene("exp3", k=20.0)
    vg3 = build_hna_space(scene3.polygon, 20.0, 8)
    vs3 = build_hp_space(scene3, 20.0, 8)
    assert vg3.n_dofs + vs3.n_dofs == 1656


def test_hp_space_dof_scaling_with_k():
    # N_Gamma stays fixed as k grows; N_gamma grows sublinearly
    counts = {}
    for k in (20.0, 40.0, 80.0):
        scene = builtin_scene("exp1", k=k)
        counts[k] = (build_hna_space(scene.polygon, k, 8).n_dofs,
                     build_hp_space(scene, k, 8).n_dofs)
    assert counts[20.0][0] == counts[40.0][0] == counts[80.0][0]
    assert counts[20.0][1] < counts[40.0][1] < counts[80.0][1]
    assert counts[80.0][1] / counts[20.0][1] < 4.0


def test_simple_hp_counts():
    # one straight piece, 1 element, p=2 -> 3 dofs; m elements -> m(p+1)
    scene = builtin_scene("exp1", k=20.0)
    smooth_scene = builtin_scene("exp1", k=0.5)
    vs = build_hp_space(smooth_scene, 0.5, 2, layers=1)
    for pid in range(3):
        els = [e for e in vs.elements if e.piece_id == pid]
        assert sum(e.degree + 1 for e in els) == sum(
            len(vs.functions_on(e.index)) for e in els)


def test_alpha_out_of_range():
    scene = builtin_scene("exp1", k=20.0)
    with pytest.raises(AlphaOutOfRange):
        # alpha >= L k/(4 pi) = 10
        build_hna_space(scene.polygon, 20.0, 2, alpha=10.0)


def test_eval_basis_support_and_values():
    _, vg, _ = exp1_spaces(k=20.0, p=3)
    f = next(f for f in vg.functions if f.degree == 1)
    el = vg.elements[f.element]
    mid = el.midpoint_s()
    # P_1 vanishes at the element midpoint
    assert abs(vg.eval_dof(f.dof, mid)) < 1e-13
    assert vg.eval_dof(f.dof, el.b + 0.5 * el.width) == 0.0
    # constant-dof values are a pure phase on the element
    f0 = next(f for f in vg.functions if f.degree == 0 and f.direction == 1)
    el0 = vg.elements[f0.element]
    s = np.linspace(el0.a, el0.b - 1e-12 * max(el0.width, 1.0), 7)
    vals = vg.eval_dof(f0.dof, s)
    assert np.allclose(np.abs(vals), 1.0)
    assert np.allclose(vals, np.exp(1j * vg.k * s))
    with pytest.raises(BadIndex):
        vg.eval_dof(vg.n_dofs, 0.0)
    assert eval_basis(vg, 0, np.array([el.a - 1.0]))[0] == 0.0


def test_magnitude_bound_on_element():
    _, vg, vs = exp1_spaces(k=20.0, p=5)
    rng = np.random.default_rng(3)
    for space in (vg, vs):
        for f in rng.choice(space.functions, size=20, replace=False):
            el = space.elements[f.element]
            s = el.a + el.width * rng.random(50)
            assert np.all(np.abs(space.eval_dof(f.dof, s)) <= 1.0 + 1e-12)


def test_supports_partition():
    _, vg, _ = exp1_spaces(k=20.0, p=4)
    for el in vg.elements:
        funcs = vg.functions_on(el.index)
        dirs = {f.direction for f in funcs}
        assert len(funcs) == len(dirs) * (el.degree + 1)
    # every function's support is exactly one element
    assert sum(len(vg.functions_on(e.index)) for e in vg.elements) == vg.n_dofs


def test_legendre_values_recurrence():
    t = np.linspace(-1, 1, 11)
    vals = legendre_values(4, t)
    assert np.allclose(vals[:, 0], 1.0)
    assert np.allclose(vals[:, 1], t)
    assert np.allclose(vals[:, 2], 0.5 * (3 * t ** 2 - 1))
    assert np.allclose(vals[:, 4], (35 * t ** 4 - 30 * t ** 2 + 3) / 8.0)
