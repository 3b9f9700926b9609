import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodal.linalg import rank
from nodal.toric import (
    ChernTuple,
    InvalidPolygonError,
    NonSmoothSurfaceError,
    SurfaceFileError,
    ampleness_advisory,
    chern_numbers,
    cut_corners,
    generator_library,
    hirzebruch,
    instance,
    instance_from_json,
    instance_to_json,
    load_surface_file,
    monomial_exponents,
    monomial_row,
    p1xp1,
    projective_plane,
    surface_from_polygon,
)


@pytest.mark.parametrize("d", range(1, 6))
def test_triangle_is_projective_plane(d):
    s = surface_from_polygon([(0, 0), (d, 0), (0, d)])
    assert len(s.fixed_points) == 3
    assert chern_numbers(s) == ChernTuple(d * d, -3 * d, 9, 3)


def test_rectangle_is_p1xp1():
    assert chern_numbers(p1xp1(1, 1)) == ChernTuple(2, -4, 8, 4)
    assert chern_numbers(p1xp1(2, 3)) == ChernTuple(12, -10, 8, 4)


def test_corner_cut_square():
    s = cut_corners(p1xp1(2, 2), {0: 1})
    assert len(s.vertices) == 5
    assert chern_numbers(s).t == 5


def test_p2_cubic():
    assert chern_numbers(instance(projective_plane(3))) == ChernTuple(9, -9, 9, 3)


def test_disjoint_union_additive():
    u = instance(projective_plane(1), projective_plane(1))
    assert chern_numbers(u) == ChernTuple(2, -6, 18, 6)


def test_clockwise_input_is_normalized():
    s = surface_from_polygon([(0, 0), (0, 2), (2, 0)])
    assert s.twice_area() == 4


def test_nonconvex_rejected():
    with pytest.raises(InvalidPolygonError):
        surface_from_polygon([(0, 0), (4, 0), (1, 1), (0, 4)])
    with pytest.raises(InvalidPolygonError):
        surface_from_polygon([(0, 0), (1, 0), (2, 0), (0, 1)])  # collinear vertex
    with pytest.raises(InvalidPolygonError):
        surface_from_polygon([(0, 0), (1, 0)])


def test_singular_vertex_rejected():
    # weighted projective plane P(1,1,2)
    with pytest.raises(NonSmoothSurfaceError):
        surface_from_polygon([(0, 0), (2, 0), (0, 1)])


def test_float_vertex_rejected():
    with pytest.raises(InvalidPolygonError):
        surface_from_polygon([(0, 0), (1.0, 0), (0, 1)])


def test_hirzebruch_noether():
    for n in (0, 1, 2, 3):
        ch = chern_numbers(hirzebruch(n, 2, 1))
        assert ch.z + ch.t == 12
        assert ch.t == 4


comps = st.sampled_from([projective_plane(1), projective_plane(3), p1xp1(1, 2), hirzebruch(1, 2, 2),
                         cut_corners(p1xp1(3, 3), {0: 1, 2: 2})])


@settings(max_examples=50, deadline=None)
@given(st.lists(comps, min_size=1, max_size=4), st.lists(comps, min_size=1, max_size=4))
def test_chern_additivity(a, b):
    assert chern_numbers(instance(*a, *b)) == chern_numbers(instance(*a)) + chern_numbers(instance(*b))
    ch = chern_numbers(instance(*a))
    assert ch.z + ch.t == 12 * len(a)


def test_vertex_count_is_euler_characteristic():
    s = cut_corners(projective_plane(4), {0: 1, 1: 1, 2: 1})
    assert chern_numbers(s).t == len(s.fixed_points) == 6


def test_monomial_basis_size():
    assert len(monomial_exponents(4)) == 70
    assert len(monomial_exponents(1)) == 5


@pytest.mark.parametrize("variant", [0, 1])
@pytest.mark.parametrize("degree", range(5))
def test_generator_library_rank(degree, variant):
    lib = generator_library(degree, variant)
    exps = monomial_exponents(degree)
    assert rank([monomial_row(chern_numbers(i), exps) for i in lib]) == len(exps)
    assert len(lib) >= len(exps) + 5
    for inst in lib:
        ch = chern_numbers(inst)
        assert ch.z + ch.t == 12 * len(inst.components)


def test_generator_library_sizes():
    assert len(generator_library(0)) >= 1
    assert len(generator_library(1)) >= 5
    assert len(generator_library(4)) >= 70


def test_libraries_disjoint():
    a = {i.key for i in generator_library(4, 0)}
    b = {i.key for i in generator_library(4, 1)}
    assert not a & b
    pa = {c.key for i in generator_library(4, 0) for c in i.components}
    pb = {c.key for i in generator_library(4, 1) for c in i.components}
    assert not pa & pb


def test_generator_library_deterministic():
    assert [i.key for i in generator_library(3)] == [i.key for i in generator_library(3)]


def test_advisory():
    assert ampleness_advisory(projective_plane(3), 3).ok
    assert not ampleness_advisory(projective_plane(2), 3).ok
    assert ampleness_advisory(projective_plane(1), 0).ok


def test_surface_file_round_trip(tmp_path):
    inst = instance(projective_plane(2), p1xp1(1, 3), name="mix")
    path = tmp_path / "s.json"
    path.write_text(json.dumps(instance_to_json(inst)))
    back = load_surface_file(path)
    assert back.key == inst.key
    assert chern_numbers(back) == chern_numbers(inst)


def test_surface_file_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"name": "x", "polygon": [[0, 0], [3, 0], [0, 3.0]]}')
    with pytest.raises(SurfaceFileError, match="non-integer"):
        load_surface_file(path)
    path.write_text('{"name": "x",\n "polygon": [[0, 0], [3, 0] [0, 3]]}')
    with pytest.raises(SurfaceFileError, match=r"bad\.json:2:"):
        load_surface_file(path)
    with pytest.raises(SurfaceFileError, match=r"'polygon'\[1\]"):
        instance_from_json({"polygon": [[0, 0], [1], [0, 1]]})
    with pytest.raises(SurfaceFileError, match="exactly one"):
        instance_from_json({"name": "x"})
    with pytest.raises(SurfaceFileError, match="smooth"):
        instance_from_json({"polygon": [[0, 0], [2, 0], [0, 1]]})
