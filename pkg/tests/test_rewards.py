import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmcover import geometry as geo
from swarmcover import rewards as rw
from swarmcover.environment import WorldState
from conftest import ngon_area, square

SW = rw.SwRewardSpec()
CR = rw.CrRewardSpec()
A30 = ngon_area(0.5, 30)
BIG = geo.PolygonRegion(square(-50.0, -50.0, 100.0))
SQ3 = geo.PolygonRegion(square(side=3.0))


def state(*pts):
    p = np.array(pts, dtype=float).reshape(-1, 2)
    return WorldState(p, np.zeros_like(p))


def cov(x, y):
    return geo.make_coverage_polygon((x, y), 0.5, 30)


class TestSwRegion:
    disk = geo.DiskRegion((0.0, 0.0), 1.0)

    def test_inside(self):
        assert rw.sw_region_reward((0.5, 0.0), self.disk, SW) == 150.0

    def test_outside(self):
        assert rw.sw_region_reward((2.0, 0.0), self.disk, SW) == -203.0

    def test_on_boundary_is_outside(self):
        assert rw.sw_region_reward((1.0, 0.0), self.disk, SW) == -200.0

    def test_polygon_region_uses_distance(self):
        assert rw.sw_region_reward((4.0, 1.5), SQ3, SW) == pytest.approx(-201.0)


class TestSwPairs:
    def test_three_agents(self):
        # d12 = 1.0, d13 = 0.3, d23 = 2.0 is not a planar triangle; d23 = 1.3 hits the same buckets
        pts = [[0.0, 0.0], [1.0, 0.0], [-0.3, 0.0]]
        assert rw.sw_inter_agent_reward(pts, SW) == -50.0

    def test_far_apart(self):
        assert rw.sw_inter_agent_reward([[0, 0], [5, 0], [0, 5]], SW) == 0.0

    def test_single_pair(self):
        assert rw.sw_inter_agent_reward([[0, 0], [0.9, 0]], SW) == 150.0

    def test_single_agent(self):
        assert rw.sw_inter_agent_reward([[0, 0]], SW) == 0.0

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 9), st.integers(0, 2**31 - 1))
    def test_matches_double_loop(self, n, seed):
        pos = np.random.default_rng(seed).uniform(0, 2, (n, 2))
        expected = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                d = float(np.hypot(*(pos[i] - pos[j])))
                if 0.85 <= d <= 1.2:
                    expected += 150
                if 0.0 <= d <= 0.56:
                    expected -= 200
        assert rw.sw_inter_agent_reward(pos, SW) == expected


class TestSwShared:
    def test_two_inside_far_apart(self):
        np.testing.assert_array_equal(rw.sw_shared_reward(state([0.5, 0.5], [2.5, 0.5]), SQ3, SW), [300, 300])

    def test_single(self):
        np.testing.assert_array_equal(rw.sw_shared_reward(state([1, 1]), SQ3, SW), [150])

    def test_mean_aggregate(self):
        spec = rw.SwRewardSpec(aggregate="mean")
        np.testing.assert_array_equal(rw.sw_shared_reward(state([0.5, 0.5], [2.5, 0.5]), SQ3, spec), [150, 150])

    def test_permutation_invariant(self):
        pts = np.random.default_rng(0).uniform(-1, 4, (6, 2))
        a = rw.sw_shared_reward(state(*pts), SQ3, SW)
        b = rw.sw_shared_reward(state(*pts[::-1]), SQ3, SW)
        np.testing.assert_allclose(a, b, rtol=1e-12)
        assert np.all(a == a[0])


class TestCrCover:
    def test_fully_inside(self):
        assert rw.cr_cover_reward(cov(1.5, 1.5), SQ3, CR) == pytest.approx(60.779669, abs=1e-4)

    def test_half_inside(self):
        region = geo.PolygonRegion(square(-5.0, -10.0, 10.0))
        assert rw.cr_cover_reward(cov(0.0, 0.0), region, CR) == pytest.approx(30.389835, abs=1e-4)

    def test_disjoint(self):
        # nearest probe is the rightmost vertex at x = 3 + 1.3
        assert rw.cr_cover_reward(cov(4.8, 1.5), SQ3, CR) == pytest.approx(-1.3, abs=1e-12)

    def test_disjoint_with_r3(self):
        spec = rw.CrRewardSpec(R3_out=2.0)
        assert rw.cr_cover_reward(cov(4.8, 1.5), SQ3, spec) == pytest.approx(-3.3, abs=1e-12)

    def test_concave_region_not_fully_inside(self):
        u = geo.PolygonRegion(geo.Polygon([[0, 0], [3, 0], [3, 3], [2, 3], [2, 1], [1, 1], [1, 3], [0, 3]]))
        r = rw.cr_cover_reward(cov(1.5, 1.2), u, CR)
        assert 30.0 < r < 30.0 + A30

    @pytest.mark.parametrize("x_switch", [2.5, 3.5])
    def test_jump_at_branch_switch(self, x_switch):
        # the right-hand vertex touches x = 3 at 2.5, the left-hand one leaves at 3.5
        xs = x_switch + np.linspace(-0.05, 0.05, 100)
        vals = np.array([rw.cr_cover_reward(cov(x, 1.5), SQ3, CR) for x in xs])
        assert np.max(np.abs(np.diff(vals))) <= abs(CR.R1_full - CR.R2_partial) + 1e-3

    def test_partial_branch_continuous(self):
        xs = np.linspace(1.5, 4.5, 100)
        vals = np.array([rw.cr_cover_reward(cov(x, 1.5), SQ3, CR) for x in xs])
        partial = (vals > 30.0) & (vals < 30.0 + A30)
        assert partial.sum() > 20
        assert np.abs(np.diff(vals[partial])).max() < 0.05


class TestOverall:
    def test_single_inside(self):
        assert rw.overall_area_coverage([cov(1.5, 1.5)], SQ3, CR) == pytest.approx(0.779669, abs=1e-6)

    def test_coincident(self):
        assert rw.overall_area_coverage([cov(1, 1), cov(1, 1)], SQ3, CR) == pytest.approx(A30, abs=1e-12)

    def test_empty(self):
        assert rw.overall_area_coverage([], SQ3, CR) == 0.0

    def test_clip_flag(self):
        outside = [cov(1.5, 1.5), cov(10, 10)]
        assert rw.overall_area_coverage(outside, SQ3, CR) == pytest.approx(A30)
        raw = rw.overall_area_coverage(outside, SQ3, rw.CrRewardSpec(clip_overall_to_region=False))
        assert raw == pytest.approx(2 * A30)

    def test_monotone_adding_agents(self):
        rng = np.random.default_rng(4)
        agents, prev = [], 0.0
        for _ in range(9):
            agents.append(cov(*rng.uniform(-0.5, 3.5, 2)))
            cur = rw.overall_area_coverage(agents, SQ3, CR)
            assert cur >= prev - 1e-12
            prev = cur


class TestCrOverall:
    def test_single_big_region(self):
        r = rw.cr_overall_reward(state([0.0, 0.0]), BIG, CR)
        assert r[0] == pytest.approx(64.678, abs=1e-3)
        assert r[0] == pytest.approx(60 + A30 + 5 * A30, abs=1e-9)

    def test_c2_zero(self):
        spec = rw.CrRewardSpec(c2=0.0)
        s = state([1.5, 1.5], [3.0, 1.5], [7, 7])
        expected = [rw.cr_cover_reward(c, SQ3, spec) for c in rw.coverage_polygons(s)]
        np.testing.assert_allclose(rw.cr_overall_reward(s, SQ3, spec), expected, atol=1e-12)

    def test_identical_placement(self):
        r = rw.cr_overall_reward(state([1, 1], [1, 1]), SQ3, CR)
        assert r[0] == r[1]

    def test_permutation_equivariant(self):
        pts = np.random.default_rng(1).uniform(-1, 4, (5, 2))
        perm = [3, 0, 4, 1, 2]
        a = rw.cr_overall_reward(state(*pts), SQ3, CR)
        b = rw.cr_overall_reward(state(*pts[perm]), SQ3, CR)
        np.testing.assert_allclose(b, a[perm], atol=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_batched_path_matches(self, seed):
        pts = np.random.default_rng(seed).uniform(-1, 4, (9, 2))
        s = state(*pts)
        r, covered = rw.step_rewards("cr", s, SQ3, CR)
        np.testing.assert_allclose(r, rw.cr_overall_reward(s, SQ3, CR), atol=1e-9)
        assert covered == pytest.approx(rw.overall_area_coverage(rw.coverage_polygons(s), SQ3, CR), abs=1e-12)
        sw, _ = rw.step_rewards("sw", s, SQ3, SW)
        np.testing.assert_array_equal(sw, rw.sw_shared_reward(s, SQ3, SW))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(-100, 100), st.floats(-100, 100))
def test_translation_invariance(seed, dx, dy):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 4, (4, 2))
    shift = np.array([dx, dy])
    region = square(side=3.0)
    moved = geo.PolygonRegion(region.translated(shift))
    a = rw.cr_overall_reward(state(*pts), geo.PolygonRegion(region), CR)
    b = rw.cr_overall_reward(state(*(pts + shift)), moved, CR)
    np.testing.assert_allclose(a, b, atol=1e-9)
    a = rw.sw_shared_reward(state(*pts), geo.PolygonRegion(region), SW)
    b = rw.sw_shared_reward(state(*(pts + shift)), moved, SW)
    np.testing.assert_allclose(a, b, atol=1e-9)


@pytest.mark.parametrize("kw", [{"prop_range": (0.5, 0.6), "coll_range": (0.0, 0.56)},
                                {"alpha": -1.0}, {"aggregate": "max"}, {"prop_range": (1.2, 0.85)}])
def test_sw_spec_validation(kw):
    with pytest.raises(ValueError):
        rw.SwRewardSpec(**kw)


def test_unknown_scheme():
    with pytest.raises(ValueError):
        rw.step_rewards("xx", state([0, 0]), SQ3, CR)


def test_branch_exclusive_over_grid():
    for x, y in itertools.product(np.linspace(-1, 4, 11), repeat=2):
        r = rw.cr_cover_reward(cov(x, y), SQ3, CR)
        fully = r >= 60.0
        partial = 30.0 < r < 60.0
        out = r <= 0.0
        assert fully + partial + out == 1
