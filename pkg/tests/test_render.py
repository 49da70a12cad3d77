import json

import numpy as np
import pytest

from cubicrauzy.algebra import AlgNum, FamilyParam, embed, roots
from cubicrauzy.numeration import admissible_count
from cubicrauzy.render import (
    Lattice,
    PointCloud,
    area_estimate,
    boundary_points,
    export,
    points_of_R,
    tiling,
)

P3 = FamilyParam(3)
E3 = roots(P3)


def nearest_distances(queries: np.ndarray, targets: np.ndarray) -> np.ndarray:
    from scipy.spatial import cKDTree

    tree = cKDTree(np.column_stack([targets.real, targets.imag]))
    d, _ = tree.query(np.column_stack([queries.real, queries.imag]), k=1)
    return d


class TestPointsOfR:
    def test_depth_one(self):
        cloud = points_of_R(P3, E3, 1)
        a2 = embed(AlgNum.alpha_sq(P3), E3)
        want = sorted([0j, a2, 2 * a2], key=lambda z: (z.real, z.imag))
        got = sorted(cloud.points.tolist(), key=lambda z: (z.real, z.imag))
        assert np.allclose(got, want)

    def test_counts_match_enumeration(self):
        for n in (3, 5, 9):
            cloud = points_of_R(P3, E3, n)
            assert len(cloud) == admissible_count(P3, n)

    def test_radius_bound(self):
        cloud = points_of_R(P3, E3, 10)
        am = abs(E3.alpha)
        radius = 2 * am ** 2 / (1 - am)  # (a-1) * sum_{i>=2} |alpha|^i
        assert np.abs(cloud.points).max() <= radius + 1e-9

    def test_zero_and_max_word_present(self):
        cloud = points_of_R(P3, E3, 6)
        assert np.abs(cloud.points).min() < 1e-12
        from cubicrauzy.numeration import enumerate_admissible, eval_word

        words = list(enumerate_admissible(P3, 6))
        zmax = eval_word(words[-1], E3)
        assert np.abs(cloud.points - zmax).min() < 1e-12

    def test_depth_monotonicity(self):
        shallow = points_of_R(P3, E3, 6)
        deep = points_of_R(P3, E3, 7)
        # zero-extension embeds the depth-6 cloud in the depth-7 cloud
        d_embed = nearest_distances(shallow.points, deep.points)
        assert d_embed.max() < 1e-12
        # and truncation moves any depth-7 point at most the tail bound
        tail = 2 * abs(E3.alpha) ** 8 / (1 - abs(E3.alpha))
        d_trunc = nearest_distances(deep.points, shallow.points)
        assert d_trunc.max() <= tail + 1e-12

    def test_subsampling_deterministic(self):
        c1 = points_of_R(P3, E3, 16, cap=5000, seed=42)
        c2 = points_of_R(P3, E3, 16, cap=5000, seed=42)
        assert np.array_equal(c1.points, c2.points)
        assert c1.meta["sampled"] is True
        assert len(c1) == 5000
        c3 = points_of_R(P3, E3, 16, cap=5000, seed=43)
        assert not np.array_equal(c1.points, c3.points)

    def test_sampled_points_are_fractal_points(self):
        sampled = points_of_R(P3, E3, 12, cap=500, seed=7)
        full = points_of_R(P3, E3, 12)
        d = nearest_distances(sampled.points, full.points)
        assert d.max() < 1e-12


class TestBoundary:
    def test_corners_present(self):
        cloud = boundary_points(P3, E3, 200, depth=25)
        for corner in (-1 + 0j, embed(-AlgNum.alpha(P3), E3), embed(-AlgNum.alpha_sq(P3), E3)):
            assert np.abs(cloud.points - corner).min() < 1e-9

    def test_contained_in_fractal_neighborhood(self):
        depth = 11
        curve = boundary_points(P3, E3, 300, depth=depth)
        cloud = points_of_R(P3, E3, depth)
        eps = 5 * abs(E3.alpha) ** depth
        d = nearest_distances(curve.points, cloud.points)
        assert d.max() <= eps

    def test_closed_curve_small_steps(self):
        cloud = boundary_points(P3, E3, 4000, depth=30)
        per_edge = cloud.meta["samples_per_edge"]
        for edge in range(4):
            seg = cloud.points[edge * per_edge:(edge + 1) * per_edge]
            steps = np.abs(np.diff(seg))
            assert steps.max() < 0.2


class TestTiling:
    def test_translate_counts(self):
        assert len(tiling(P3, E3, 6, 0).shifts) == 1
        assert len(tiling(P3, E3, 6, 1).shifts) == 9
        assert len(tiling(FamilyParam(4), roots(FamilyParam(4)), 5, 2).shifts) == 25

    def test_covolume(self):
        lat = Lattice.for_family(P3, E3)
        u = embed(AlgNum(-1, 1, 0, P3), E3)
        assert lat.covolume == pytest.approx(abs(u) ** 2 * E3.alpha.imag, rel=1e-12)

    def test_singleton_neighbors_touch_only_near_their_point(self):
        # translate by (1+alpha)u meets the fractal only at -1; translate by
        # (alpha-1)u only at -alpha
        depth = 12
        cloud = points_of_R(P3, E3, depth).points
        alpha = E3.alpha
        u = embed(AlgNum(-1, 1, 0, P3), E3)
        for shift, point in (((1 + alpha) * u, -1 + 0j), ((alpha - 1) * u, -alpha)):
            translated = cloud + shift
            d = nearest_distances(translated, cloud)
            contact = 3 * abs(alpha) ** depth
            touching = translated[d < contact]
            assert len(touching) > 0
            assert np.abs(touching - point).max() < 0.05

    def test_all_points_flattens(self):
        til = tiling(P3, E3, 4, 1)
        assert len(til.all_points()) == 9 * len(til.base)


class TestArea:
    def test_empty_cloud(self):
        assert area_estimate(PointCloud(np.array([], dtype=complex)), 0.1) == 0.0

    def test_pixel_size_validation(self):
        with pytest.raises(ValueError):
            area_estimate(points_of_R(P3, E3, 4), 0.0)

    def test_unit_square_sanity(self):
        rng = np.random.default_rng(0)
        pts = rng.random(200_000) + 1j * rng.random(200_000)
        est = area_estimate(PointCloud(pts), 0.01)
        assert est == pytest.approx(1.0, rel=0.05)

    def test_converges_to_covolume(self):
        lat = Lattice.for_family(P3, E3)
        cloud = points_of_R(P3, E3, 14, cap=600_000, seed=0)
        h = lat.covolume ** 0.5 / 200
        est = area_estimate(cloud, h)
        assert est == pytest.approx(lat.covolume, rel=0.05)


class TestExport:
    def test_csv(self, tmp_path):
        cloud = points_of_R(P3, E3, 4)
        path = tmp_path / "pts.csv"
        export(cloud, str(path), "csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "re,im"
        assert len(lines) == len(cloud) + 1
        re0, im0 = map(float, lines[1].split(","))
        assert complex(re0, im0) in set(cloud.points.tolist())

    def test_json(self, tmp_path):
        cloud = points_of_R(P3, E3, 3)
        path = tmp_path / "pts.json"
        export(cloud, str(path), "json")
        doc = json.loads(path.read_text())
        assert doc["meta"]["a"] == 3
        assert len(doc["points"]) == len(cloud)

    def test_ppm_header_and_determinism(self, tmp_path):
        cloud = points_of_R(P3, E3, 8)
        p1, p2 = tmp_path / "a.ppm", tmp_path / "b.ppm"
        export(cloud, str(p1), "ppm")
        export(cloud, str(p2), "ppm")
        b1 = p1.read_bytes()
        assert b1.startswith(b"P6\n")
        assert b1 == p2.read_bytes()

    def test_svg(self, tmp_path):
        cloud = points_of_R(P3, E3, 6)
        path = tmp_path / "a.svg"
        export(cloud, str(path), "svg", width=200)
        text = path.read_text()
        assert text.startswith("<?xml")
        assert "<svg" in text and text.rstrip().endswith("</svg>")

    def test_tiling_export(self, tmp_path):
        til = tiling(P3, E3, 5, 1)
        export(til, str(tmp_path / "t.ppm"), "ppm", width=300)
        export(til, str(tmp_path / "t.json"), "json")
        doc = json.loads((tmp_path / "t.json").read_text())
        assert len(doc["tiles"]) == 9
        assert doc["lattice"]["covolume"] == pytest.approx(0.6666, abs=1e-3)

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError, match="unknown format"):
            export(points_of_R(P3, E3, 3), str(tmp_path / "x.bmp"), "bmp")
