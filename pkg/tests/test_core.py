"""Tests for the curvegeom core: curves, resampling, geometry and star search"""

import ast
import dataclasses
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import curvegeom
from conftest import ellipse, figure_eight, regular_polygon
from curvegeom import (
    ClosedCurve,
    Orientation,
    ResampleMethod,
    compute_geometry,
    curvature_variation,
    curve_from_dict,
    divergence_integral,
    find_star_center,
    is_convex,
    is_embedded,
    load_curve,
    max_curvature,
    measure_curve,
    normalize_area,
    resample_uniform,
    save_curve,
    second_arc_derivative,
    support_margins,
    turning_integral,
    vertex_divergence_sum,
)
from curvegeom.exceptions import (
    CurveValidationError,
    DegenerateCurveError,
    NonUniformSpacingError,
)
from csf_checker.corpus import CurveKind, CurveSpec, generate


def square_with_midpoints():
    return ClosedCurve(
        [[0, 0], [1, 0], [2, 0], [2, 1], [2, 2], [1, 2], [0, 2], [0, 1]]
    )


class TestClosedCurve:
    def test_rejects_too_few_points(self):
        with pytest.raises(CurveValidationError, match="at least 8"):
            ClosedCurve(regular_polygon(8).points[:7])

    def test_rejects_repeated_consecutive_point(self):
        pts = regular_polygon(16).points.copy()
        pts[5] = pts[4]
        with pytest.raises(CurveValidationError, match="Zero-length edge"):
            ClosedCurve(pts)

    def test_rejects_non_finite(self):
        pts = regular_polygon(16).points.copy()
        pts[3, 1] = np.nan
        with pytest.raises(CurveValidationError):
            ClosedCurve(pts)

    def test_rejects_wrong_shape(self):
        with pytest.raises(CurveValidationError, match=r"\(N, 2\)"):
            ClosedCurve(np.zeros((16, 3)))

    def test_points_are_read_only(self):
        curve = regular_polygon(16)
        with pytest.raises(ValueError):
            curve.points[0, 0] = 5.0

    @pytest.mark.parametrize("n", [8, 64, 512])
    def test_shoelace_area_of_regular_polygon(self, n):
        curve = regular_polygon(n, radius=1.5)
        expected = 0.5 * n * 1.5**2 * np.sin(2 * np.pi / n)
        assert curve.signed_area == pytest.approx(expected, rel=1e-12)

    def test_orientation_and_reversal(self):
        curve = regular_polygon(32)
        assert curve.orientation == Orientation.COUNTERCLOCKWISE
        back = curve.reversed()
        assert back.orientation == Orientation.CLOCKWISE
        assert back.signed_area == pytest.approx(-curve.signed_area, rel=1e-12)
        np.testing.assert_array_equal(back.points[0], curve.points[0])

    def test_centroid_of_translated_circle(self):
        curve = regular_polygon(64, center=(3.0, -2.0))
        np.testing.assert_allclose(curve.centroid, [3.0, -2.0], atol=1e-12)


class TestResampleUniform:
    def test_same_count_returns_same_points(self):
        curve = regular_polygon(256)
        out = resample_uniform(curve, 256)
        np.testing.assert_allclose(out.points, curve.points, atol=1e-12)

    def test_refinement_keeps_vertices_and_length(self):
        curve = regular_polygon(16)
        out = resample_uniform(curve, 32)
        np.testing.assert_allclose(out.points[::2], curve.points, atol=1e-12)
        assert out.length == pytest.approx(curve.length, rel=1e-12)

    def test_points_stay_on_input_edges(self):
        curve = regular_polygon(16)
        out = resample_uniform(curve, 40)
        radii = np.linalg.norm(out.points, axis=1)
        assert np.all(radii <= 1.0 + 1e-12)
        assert np.all(radii >= np.cos(np.pi / 16) - 1e-12)

    def test_preserves_orientation_and_phase(self):
        curve = regular_polygon(64).reversed()
        out = resample_uniform(curve, 100)
        assert out.orientation == Orientation.CLOCKWISE
        np.testing.assert_allclose(out.points[0], curve.points[0], atol=1e-12)

    def test_spline_points_lie_on_circle(self):
        curve = regular_polygon(128)
        out = resample_uniform(curve, 300, ResampleMethod.SPLINE)
        radii = np.linalg.norm(out.points, axis=1)
        np.testing.assert_allclose(radii, 1.0, atol=1e-6)
        assert np.ptp(out.edge_lengths) / out.edge_lengths.mean() < 1e-3

    def test_method_accepts_string(self):
        out = resample_uniform(regular_polygon(64), 80, "spline")
        assert out.n_points == 80

    def test_rejects_small_n(self):
        with pytest.raises(CurveValidationError):
            resample_uniform(regular_polygon(64), 7)

    def test_rejects_degenerate_curve(self):
        tiny = ClosedCurve(regular_polygon(16).points * 1e-15)
        with pytest.raises(DegenerateCurveError):
            resample_uniform(tiny, 16)


class TestComputeGeometry:
    @pytest.mark.parametrize("radius", [0.25, 1.0, 3.0])
    def test_regular_polygon_curvature_is_inverse_radius(self, radius):
        geom = compute_geometry(regular_polygon(128, radius=radius))
        np.testing.assert_allclose(geom.curvatures, 1.0 / radius, rtol=1e-9)

    def test_frame_is_orthonormal_and_outward(self):
        curve = regular_polygon(64, center=(1.0, 2.0))
        geom = compute_geometry(curve)
        np.testing.assert_allclose(np.linalg.norm(geom.tangents, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(geom.outer_normals, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(
            np.einsum("ij,ij->i", geom.tangents, geom.outer_normals), 0.0, atol=1e-12
        )
        radial = curve.points - np.array([1.0, 2.0])
        np.testing.assert_allclose(geom.outer_normals, radial, atol=1e-12)

    def test_collinear_vertex_has_zero_curvature(self):
        geom = compute_geometry(square_with_midpoints())
        assert np.all(geom.curvatures[1::2] == 0.0)
        np.testing.assert_allclose(geom.curvatures[0::2], np.sqrt(2.0), rtol=1e-12)

    def test_ellipse_vertex_curvature(self):
        geom = compute_geometry(ellipse(2048))
        np.testing.assert_allclose(geom.points[0], [2.0, 0.0], atol=1e-12)
        assert geom.curvatures[0] == pytest.approx(2.0, abs=1e-3)

    def test_clockwise_curve_has_negative_curvature_and_area(self):
        geom = compute_geometry(regular_polygon(64).reversed())
        assert np.all(geom.curvatures < 0)
        assert geom.enclosed_area < 0

    def test_rejects_non_uniform_spacing(self):
        u = np.arange(64) / 64
        theta = 2 * np.pi * (u + 0.05 * np.sin(2 * np.pi * u))
        curve = ClosedCurve(np.column_stack([np.cos(theta), np.sin(theta)]))
        with pytest.raises(NonUniformSpacingError):
            compute_geometry(curve)
        geom = compute_geometry(curve, spacing_tol=None)
        assert geom.n_points == 64

    def test_arc_positions_and_weights(self):
        geom = compute_geometry(regular_polygon(100))
        edge = 2 * np.sin(np.pi / 100)
        np.testing.assert_allclose(geom.arc_positions, edge * np.arange(100), rtol=1e-12)
        np.testing.assert_allclose(geom.vertex_weights, edge, rtol=1e-12)
        assert geom.spacing == pytest.approx(edge, rel=1e-12)


class TestScalarInvariants:
    def test_max_curvature_lowest_index_on_ties(self):
        geom = compute_geometry(regular_polygon(16))
        k = np.ones(16)
        k[[3, 7]] = 5.0
        k_max, index = max_curvature(dataclasses.replace(geom, curvatures=k))
        assert (k_max, index) == (5.0, 3)

    def test_max_curvature_of_ellipse(self):
        k_max, index = max_curvature(compute_geometry(ellipse(2048)))
        assert k_max == pytest.approx(2.0, abs=1e-3)
        assert index in (0, 1024)

    def test_turning_integral_of_circle(self):
        geom = compute_geometry(regular_polygon(512))
        assert turning_integral(geom) == pytest.approx(2 * np.pi, abs=1e-4)

    def test_turning_integral_clockwise(self):
        geom = compute_geometry(regular_polygon(512).reversed())
        assert turning_integral(geom) == pytest.approx(-2 * np.pi, abs=1e-4)

    def test_turning_integral_converges_at_second_order(self):
        errors = [
            abs(turning_integral(compute_geometry(ellipse(n))) - 2 * np.pi)
            for n in (128, 256, 512, 1024)
        ]
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert np.all(orders >= 1.8)

    def test_menger_curvature_converges_at_second_order(self):
        # vertex 0 of the sampled ellipse is (a, 0), where k = a / b^2 = 2
        errors = [abs(compute_geometry(ellipse(n)).curvatures[0] - 2.0) for n in (256, 512, 1024)]
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert np.all(orders >= 1.8)

    @pytest.mark.parametrize(
        "curve_fn",
        [
            lambda: ellipse(1024),
            lambda: generate(
                CurveSpec(CurveKind.RADIAL_FOURIER, {"r0": 1.0, "a": [0, 0, 0.3]}, n_points=1024)
            ).translated((0.4, 0.9)),
            lambda: regular_polygon(1024).reversed(),
        ],
    )
    def test_vertex_divergence_sum_is_twice_area(self, curve_fn):
        geom = compute_geometry(curve_fn())
        twice_area = 2 * geom.enclosed_area
        assert abs(vertex_divergence_sum(geom) - twice_area) <= 1e-6 * abs(twice_area)

    def test_vertex_divergence_sum_sees_bad_normals(self, ellipse_1024):
        geom = compute_geometry(ellipse_1024)
        twice_area = 2 * geom.enclosed_area
        flipped = dataclasses.replace(geom, outer_normals=-geom.outer_normals)
        assert vertex_divergence_sum(flipped) == pytest.approx(-twice_area, rel=1e-9)

        c, s = np.cos(0.01), np.sin(0.01)
        tilted = dataclasses.replace(geom, outer_normals=geom.outer_normals @ np.array([[c, s], [-s, c]]))
        assert abs(vertex_divergence_sum(tilted) - twice_area) > 1e-6 * twice_area

    @pytest.mark.parametrize("curve_fn", [lambda: regular_polygon(64), lambda: ellipse(200)])
    def test_divergence_integral_is_twice_area(self, curve_fn):
        curve = curve_fn().translated((0.7, -1.3))
        assert divergence_integral(curve) == pytest.approx(2 * curve.signed_area, rel=1e-12)

    def test_second_derivative_of_constant_is_zero(self):
        geom = compute_geometry(regular_polygon(64))
        np.testing.assert_allclose(second_arc_derivative(geom, np.full(64, 3.0)), 0.0, atol=1e-9)

    def test_curvature_variation(self, ellipse_1024):
        assert curvature_variation(compute_geometry(regular_polygon(256))) < 1e-9
        assert curvature_variation(compute_geometry(ellipse_1024)) == pytest.approx(0.793, abs=0.005)
        assert np.isnan(curvature_variation(compute_geometry(regular_polygon(64).reversed())))


class TestEmbeddedAndConvex:
    def test_circle_is_embedded(self, unit_circle):
        assert is_embedded(unit_circle)

    def test_figure_eight_is_not_embedded(self):
        assert not is_embedded(figure_eight())

    def test_regular_polygon_is_convex(self):
        assert is_convex(compute_geometry(regular_polygon(64)))

    def test_ellipse_is_convex(self, ellipse_512):
        assert is_convex(compute_geometry(ellipse_512), 1e-9)

    def test_bean_is_not_convex(self, bean):
        geom = compute_geometry(bean)
        assert not is_convex(geom, 1e-6 * geom.max_abs_curvature)
        assert geom.curvatures.min() <= -0.1


class TestStarCenter:
    def test_circle_center(self):
        curve = regular_polygon(256, radius=2.0, center=(1.0, 1.0))
        geom = compute_geometry(curve)
        result = find_star_center(curve, geom)
        assert result.found
        np.testing.assert_allclose(result.center, [1.0, 1.0], atol=1e-9)
        assert result.min_support == pytest.approx(2.0, rel=1e-9)

    def test_ellipse_is_star_shaped(self, ellipse_512):
        result = find_star_center(ellipse_512, compute_geometry(ellipse_512))
        assert result.found
        assert result.min_support > 0

    def test_radial_curve_about_origin(self):
        curve = generate(
            CurveSpec(CurveKind.RADIAL_FOURIER, {"r0": 1.0, "a": [0, 0, 0.3]}, n_points=512)
        )
        result = find_star_center(curve, compute_geometry(curve), hints=[(0.0, 0.0)])
        assert result.found
        np.testing.assert_allclose(result.center, [0.0, 0.0])
        assert result.min_support > 0

    def test_bean_is_star_shaped(self, bean):
        result = find_star_center(bean, compute_geometry(bean), hints=[(0.0, 0.0)])
        assert result.found

    def test_kidney_has_no_star_center(self, kidney):
        geom = compute_geometry(kidney)
        result = find_star_center(kidney, geom)
        assert not result.found
        assert result.center is None
        assert result.min_support < 0

    def test_kidney_fine_grid_finds_no_kernel_point(self, kidney):
        from curvegeom.utils import grid_inside_mask

        geom = compute_geometry(kidney)
        lo, hi = kidney.bounding_box
        xs = np.linspace(lo[0], hi[0], 640)
        ys = np.linspace(lo[1], hi[1], 640)
        mask = grid_inside_mask(kidney.points, xs, ys)
        gx, gy = np.meshgrid(xs, ys)
        margins = support_margins(geom, np.column_stack([gx[mask], gy[mask]]))
        assert margins.max() < 0


class TestNormalizeArea:
    def test_scales_to_pi(self):
        curve = regular_polygon(512, radius=2.0, center=(1.0, 0.5))
        out = normalize_area(curve)
        assert out.signed_area == pytest.approx(np.pi, rel=1e-12)
        np.testing.assert_allclose(out.centroid, [1.0, 0.5], atol=1e-12)

    def test_identity_on_normalized_curve(self, ellipse_512):
        once = normalize_area(ellipse_512)
        np.testing.assert_allclose(normalize_area(once).points, once.points, atol=1e-12)

    def test_argmax_index_is_scale_invariant(self, ellipse_512):
        before = max_curvature(compute_geometry(ellipse_512))[1]
        after = max_curvature(compute_geometry(normalize_area(ellipse_512)))[1]
        assert before == after

    def test_rejects_clockwise_curve(self):
        with pytest.raises(DegenerateCurveError):
            normalize_area(regular_polygon(64).reversed())


class TestCurveFiles:
    def test_clockwise_file_is_reversed_on_load(self, tmp_path):
        path = save_curve(regular_polygon(64).reversed(), tmp_path / "cw.json")
        curve, reversed_input = load_curve(path, verbose=False)
        assert reversed_input
        assert curve.orientation == Orientation.COUNTERCLOCKWISE

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(CurveValidationError):
            load_curve(path, verbose=False)

    def test_points_key_is_required(self):
        with pytest.raises(CurveValidationError, match="points"):
            curve_from_dict({"vertices": [[0, 0]]})

    def test_measure_regular_polygon(self):
        stats = measure_curve(regular_polygon(64))
        assert stats["n_points"] == 64
        assert stats["k_max"] == pytest.approx(1.0, abs=1e-6)
        assert stats["turning"] == pytest.approx(2 * np.pi, rel=1e-2)
        assert stats["embedded"] is True


@settings(max_examples=25, deadline=None)
@given(
    dx=st.floats(min_value=-10.0, max_value=10.0),
    dy=st.floats(min_value=-10.0, max_value=10.0),
)
def test_curvature_is_translation_invariant(dx, dy):
    curve = ellipse(256)
    base = compute_geometry(curve).curvatures
    moved = compute_geometry(curve.translated((dx, dy))).curvatures
    np.testing.assert_allclose(moved, base, rtol=1e-7, atol=1e-7)


@settings(max_examples=25, deadline=None)
@given(factor=st.floats(min_value=0.1, max_value=10.0))
def test_curvature_scales_inversely(factor):
    curve = ellipse(256)
    base = compute_geometry(curve).curvatures
    scaled = compute_geometry(curve.scaled(factor, about=(0.0, 0.0))).curvatures
    np.testing.assert_allclose(scaled * factor, base, rtol=1e-9)


def test_setup_installs_the_package_directory():
    source = (Path(curvegeom.__file__).parent / "setup.py").read_text(encoding="utf-8")
    call = next(
        node
        for node in ast.walk(ast.parse(source))
        if isinstance(node, ast.Call) and getattr(node.func, "id", None) == "setup"
    )
    keywords = {kw.arg: ast.literal_eval(kw.value) for kw in call.keywords if kw.arg in ("packages", "package_dir")}
    assert keywords == {"packages": ["curvegeom"], "package_dir": {"curvegeom": "."}}
    assert "py_modules" not in {kw.arg for kw in call.keywords}
