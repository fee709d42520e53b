import xml.etree.ElementTree as ET
from collections import Counter

import pytest
from hypothesis import HealthCheck, assume, given, settings

from gentlecm.quiver import parse_presentation
from gentlecm.strings import enumerate_bands, enumerate_strings, parse_letters, validate_band
from gentlecm.surface import build_surface, finite_gldim_geometric, invariants, render_svg

from test_quiver import FULL_CYCLE, ONE_VERTEX, accepted, presentations

NS = "{http://www.w3.org/2000/svg}"
SIX = "a,b,ab'^-1,a',b',a'b^-1"


def by_class(svg_text, cls):
    root = ET.fromstring(svg_text)
    return [el for el in root.iter() if el.get("class") == cls]


def test_torus_algebra_polygons(a0):
    S = build_surface(a0)
    assert [P.edge_count for P in S.polygons] == [4, 4]
    assert sorted(S.gluing) == ["1", "2", "3"]
    assert [P.labels for P in S.polygons] == [("1", "2", "3"), ("1", "2", "3")]


def test_torus_algebra_invariants(a0):
    inv = invariants(build_surface(a0))
    assert (inv.genus, inv.boundary_components, inv.marked_points) == (1, 1, 2)
    assert inv.euler_characteristic == len(a0.vertices) - len(a0.arrows) == -1


def test_cycle_algebra_is_annulus(cycle3):
    S = build_surface(cycle3)
    inv = invariants(S)
    assert (inv.genus, inv.boundary_components) == (0, 2)
    assert inv.euler_characteristic == 0
    assert inv.marked_points == len(cycle3.maximal_paths_geo) == 3
    assert sorted(P.edge_count for P in S.polygons) == [2, 2, 5]


def test_one_vertex_is_disk():
    A = parse_presentation(ONE_VERTEX)
    inv = invariants(build_surface(A))
    assert (inv.euler_characteristic, inv.genus, inv.boundary_components) == (1, 0, 1)
    assert finite_gldim_geometric(build_surface(A))


def test_gldim_geometric_examples(a0):
    assert finite_gldim_geometric(build_surface(a0))
    assert not finite_gldim_geometric(build_surface(parse_presentation(FULL_CYCLE, check_gldim=False)))


def test_svg_torus_no_curves(a0):
    text = render_svg(build_surface(a0))
    root = ET.fromstring(text)
    assert root.tag == NS + "svg"
    assert len(by_class(text, "polygon")) == 2
    assert len(by_class(text, "labeled-edge")) == 6
    assert len(by_class(text, "edge-label")) == 6
    assert len(by_class(text, "marked-point")) == 2
    assert by_class(text, "curve-segment") == []


def test_svg_six_letter_band(a0):
    b = validate_band(a0, parse_letters(a0, SIX))
    text = render_svg(build_surface(a0), [b])
    assert len(by_class(text, "curve-segment")) == 6


def test_svg_one_vertex():
    A = parse_presentation(ONE_VERTEX)
    text = render_svg(build_surface(A))
    ET.fromstring(text)
    assert len(by_class(text, "polygon")) == len(A.maximal_paths_geo)


def test_svg_deterministic(a0, cycle3):
    for A in (a0, cycle3):
        curves = enumerate_strings(A, 2)[:3] + enumerate_bands(A, 3)[:2]
        S = build_surface(A)
        assert render_svg(S, curves) == render_svg(build_surface(A), curves)


def test_edge_labels_name_partners(a0):
    text = render_svg(build_surface(a0))
    labels = [el.text for el in by_class(text, "edge-label")]
    assert labels[:3] == ["1 ~ P1.0", "2 ~ P1.1", "3 ~ P1.2"]


@pytest.mark.parametrize("fixture", ["a0", "cycle3"])
def test_curves_one_segment_per_letter(request, fixture):
    A = request.getfixturevalue(fixture)
    S = build_surface(A)
    for w in enumerate_strings(A, 4) + enumerate_bands(A, 4):
        assert len(by_class(render_svg(S, [w]), "curve-segment")) == len(w)


# ---------------------------------------------------------------- properties
rand_settings = settings(max_examples=100, suppress_health_check=[HealthCheck.filter_too_much])


@rand_settings
@given(presentations())
def test_euler_characteristic_from_quiver(text):
    A = accepted(text)
    # interior corners of infinite global dimension add CW vertices
    assume(A is not None and A.has_finite_gldim())
    inv = invariants(build_surface(A))
    assert inv.euler_characteristic == len(A.vertices) - len(A.arrows)
    assert inv.genus >= 0 and inv.boundary_components >= 1
    assert inv.euler_characteristic == 2 - 2 * inv.genus - inv.boundary_components


@rand_settings
@given(presentations())
def test_every_label_used_twice(text):
    A = accepted(text)
    assume(A is not None)
    S = build_surface(A)
    counts = Counter(v for P in S.polygons for v in P.labels)
    assert set(counts) == set(A.vertices)
    assert set(counts.values()) == {2}
    assert sum(len(P.labels) for P in S.polygons) == 2 * len(A.vertices)
    assert all(P.edge_count == len(P.owner.arrows) + 2 for P in S.polygons)
    assert invariants(S).marked_points == len(S.polygons)
