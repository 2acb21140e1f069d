import numpy as np
import pytest

from semireach.sets import (
    GridSpec,
    LatticeSet,
    dist_hausdorff,
    dist_one_sided,
    load_cloud,
    project_point,
    project_points,
    project_set,
    save_cloud,
)


def grid(rho, center, dim):
    return GridSpec(rho, center, dim)


class TestGridSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(0.0, (0.0,), 1)
        with pytest.raises(ValueError):
            GridSpec(1.0, (0.0,), 0)
        with pytest.raises(ValueError):
            GridSpec(1.0, (0.0, 0.0), 1)

    def test_cell_point_bijection(self):
        g = grid(0.25, (1.0, -2.0), 2)
        cells = np.array([[0, 0], [3, -5], [-2, 7]])
        pts = g.cell_to_point(cells)
        back = (pts - g.center_array) / g.rho
        assert np.array_equal(np.rint(back).astype(int), cells)


class TestProjectPoint:
    def test_rounding(self):
        assert project_point(0.4, grid(1.0, (0.0,), 1)) == (0,)

    def test_identity(self):
        assert project_point((0.0, 0.0), grid(0.3, (0.0, 0.0), 2)) == (0, 0)

    def test_tie_half_away_from_zero(self):
        g = grid(0.5, (0.0, 0.0), 2)
        cell = project_point((0.75, -0.75), g)
        assert cell == (2, -2)
        gp = g.cell_to_point(np.array(cell))
        err = np.linalg.norm(np.array([0.75, -0.75]) - gp)
        assert err <= np.sqrt(2) / 4 + 1e-12

    def test_componentwise_bound(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            d = rng.integers(1, 4)
            g = grid(rng.uniform(0.05, 1.0), rng.normal(size=d), int(d))
            x = rng.normal(scale=3.0, size=d)
            gp = g.cell_to_point(np.array(project_point(x, g)))
            assert np.all(np.abs(x - gp) <= g.rho / 2 + 1e-12)


class TestProjectSet:
    def test_single_point_excludes_far_cell(self):
        lat = project_set(np.array([[0.4]]), grid(1.0, (0.0,), 1))
        assert lat.cells.tolist() == [[0]]

    def test_origin_2d_only_own_cell(self):
        # nearest foreign grid points are at distance 1 > sqrt(2)/2
        lat = project_set(np.array([[0.0, 0.0]]), grid(1.0, (0.0, 0.0), 2))
        assert lat.cells.tolist() == [[0, 0]]

    def test_segment_cells(self):
        samples = np.linspace(0.0, 1.0, 101).reshape(-1, 1)
        lat = project_set(samples, grid(0.25, (0.0,), 1))
        assert sorted(c[0] for c in lat.cells.tolist()) == [0, 1, 2, 3, 4]

    def test_empty_input_errors(self):
        with pytest.raises(ValueError, match="empty"):
            project_set(np.empty((0, 1)), grid(1.0, (0.0,), 1))

    def test_window_width_beyond_three_dimensions(self):
        # sqrt(d)/2 >= 1 from d = 4 on: neighbor cells at offset 1 enter the
        # window, so the stencil half-width must come from the bound
        rng = np.random.default_rng(8)
        d = 4
        g = grid(1.0, (0.0,) * d, d)
        pts = rng.normal(scale=1.5, size=(5, d))
        lat = project_set(pts, g)
        lo = np.floor(pts.min(axis=0)).astype(int) - 2
        hi = np.ceil(pts.max(axis=0)).astype(int) + 2
        ranges = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
        mesh = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d)
        dmin = np.min(np.linalg.norm(mesh[:, None, :] - pts[None, :, :], axis=2), axis=1)
        expect = np.unique(mesh[dmin <= np.sqrt(d) / 2 + 1e-12], axis=0)
        assert np.array_equal(lat.cells, expect)
        # an exact grid point now picks up its 2d axis neighbors as well
        single = project_set(np.zeros((1, d)), g)
        assert len(single) == 1 + 2 * d

    def test_matches_brute_force_window(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            d = int(rng.integers(1, 4))
            g = grid(rng.uniform(0.1, 1.0), rng.normal(size=d), d)
            pts = rng.normal(scale=2.0, size=(rng.integers(1, 8), d))
            lat = project_set(pts, g)
            # brute force: enumerate all cells in a generous window
            lo = np.floor((pts.min(axis=0) - g.center_array) / g.rho).astype(int) - 2
            hi = np.ceil((pts.max(axis=0) - g.center_array) / g.rho).astype(int) + 2
            ranges = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
            mesh = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d)
            gp = g.cell_to_point(mesh)
            dmin = np.min(np.linalg.norm(gp[:, None, :] - pts[None, :, :], axis=2), axis=1)
            expect = mesh[dmin <= np.sqrt(d) / 2 * g.rho + 1e-12]
            expect = np.unique(expect, axis=0)
            assert np.array_equal(lat.cells, expect)


class TestProjectionProperties:
    def test_accuracy_and_nonempty(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            d = int(rng.integers(1, 4))
            rho = float(rng.uniform(1e-3, 1.0))
            g = grid(rho, rng.normal(size=d), d)
            pts = rng.normal(scale=5.0, size=(int(rng.integers(1, 30)), d))
            lat = project_set(pts, g)
            assert len(lat) > 0
            assert dist_hausdorff(pts, lat.points()) <= np.sqrt(d) / 2 * rho + 1e-12

    def test_idempotence_on_grid_points(self):
        # exact grid points project to exactly themselves for d <= 3
        rng = np.random.default_rng(11)
        for d in (1, 2, 3):
            g = grid(0.3, rng.normal(size=d), d)
            cells = rng.integers(-10, 10, size=(20, d))
            lat = LatticeSet(g, cells)
            back = project_set(lat.points(), g)
            assert np.array_equal(back.cells, lat.cells)

    def test_projection_contains_original_cells(self):
        rng = np.random.default_rng(12)
        g = grid(0.2, (0.0, 0.0), 2)
        cells = rng.integers(-5, 5, size=(15, 2))
        lat = LatticeSet(g, cells)
        noisy = lat.points() + rng.uniform(-0.05, 0.05, size=lat.points().shape)
        proj = project_set(noisy, g)
        for c in lat.cells:
            assert tuple(c) in proj


class TestDistances:
    def test_one_sided_examples(self):
        assert dist_one_sided([[0.0], [1.0]], [[0.0], [2.0]]) == 1.0
        A = np.array([[0.3, 1.2], [5.0, -2.0]])
        assert dist_one_sided(A, A) == 0.0
        assert dist_one_sided([[3.0, 4.0]], [[0.0, 0.0]]) == 5.0

    def test_hausdorff_intervals(self):
        A = np.linspace(0, 1, 101).reshape(-1, 1)
        B = np.linspace(0, 2, 201).reshape(-1, 1)
        assert abs(dist_hausdorff(A, B) - 1.0) <= 0.01

    def test_hausdorff_examples(self):
        assert dist_hausdorff([[0.0]], [[-1.0], [1.0]]) == 1.0
        A = np.array([[0.1], [0.9]])
        assert dist_hausdorff(A, A) == 0.0

    def test_metric_axioms_random(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            d = int(rng.integers(1, 4))
            A = rng.normal(size=(rng.integers(1, 10), d))
            B = rng.normal(size=(rng.integers(1, 10), d))
            C = rng.normal(size=(rng.integers(1, 10), d))
            dab = dist_hausdorff(A, B)
            assert dab == dist_hausdorff(B, A)
            assert dist_hausdorff(A, C) <= dab + dist_hausdorff(B, C) + 1e-12

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            dist_one_sided(np.empty((0, 1)), [[0.0]])
        with pytest.raises(ValueError):
            dist_hausdorff([[0.0]], np.empty((0, 1)))


class TestSerialization:
    def test_lattice_roundtrip(self, tmp_path):
        g = grid(0.125, (5.0, -1.5), 2)
        lat = LatticeSet(g, [[0, 0], [3, -2], [-7, 4]])
        path = tmp_path / "lat.csv"
        lat.to_csv(path)
        text = path.read_text()
        assert text.startswith("# rho=0.125 center=5.0,-1.5\n")
        back = LatticeSet.from_csv(path)
        assert back == lat

    def test_cloud_roundtrip(self, tmp_path):
        pts = np.array([[0.1, -2.5], [3.25, 4.0]])
        path = tmp_path / "cloud.csv"
        save_cloud(path, pts)
        assert np.array_equal(load_cloud(path), pts)

    def test_malformed_cloud_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\noops,3.0\n")
        with pytest.raises(ValueError, match=":2:"):
            load_cloud(path)

    def test_union_and_membership(self):
        g = grid(1.0, (0.0,), 1)
        a = LatticeSet(g, [[0], [1]])
        b = LatticeSet(g, [[1], [5]])
        u = a.union(b)
        assert len(u) == 3 and (5,) in u and (2,) not in u
        with pytest.raises(ValueError):
            a.union(LatticeSet(grid(0.5, (0.0,), 1), [[0]]))
