import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from swarmcover import environment as env
from swarmcover import geometry as geo
from conftest import square


@pytest.fixture
def cfg():
    return env.EnvConfig(region=geo.PolygonRegion(square(side=3.0)))


def test_spawn_box_default_is_outside_corner(cfg):
    b = cfg.spawn_box
    assert (b.x0, b.y0, b.x1, b.y1) == (-0.5, -0.5, 0.0, 0.0)


class TestReset:
    def test_nine_agents_in_box(self, cfg):
        s = env.reset(cfg, 3)
        b = cfg.spawn_box
        assert s.positions.shape == (9, 2)
        assert np.all((s.positions[:, 0] >= b.x0) & (s.positions[:, 0] <= b.x1))
        assert np.all((s.positions[:, 1] >= b.y0) & (s.positions[:, 1] <= b.y1))

    def test_deterministic(self, cfg):
        a, b = env.reset(cfg, 42), env.reset(cfg, 42)
        np.testing.assert_array_equal(a.positions, b.positions)

    def test_seeds_differ(self, cfg):
        assert not np.array_equal(env.reset(cfg, 1).positions, env.reset(cfg, 2).positions)

    def test_zero_velocity(self, cfg):
        s = env.reset(cfg, 0)
        assert np.all(s.velocities == 0.0)
        assert s.step_index == 0

    def test_state_is_read_only(self, cfg):
        s = env.reset(cfg, 0)
        with pytest.raises(ValueError):
            s.positions[0, 0] = 1.0

    def test_uniform_per_axis(self, cfg):
        pos = np.vstack([env.reset(cfg, seed).positions for seed in range(1112)])[:10_000]
        b = cfg.spawn_box
        for axis, (lo, hi) in enumerate([(b.x0, b.x1), (b.y0, b.y1)]):
            p = stats.kstest(pos[:, axis], "uniform", args=(lo, hi - lo)).pvalue
            assert p > 0.01


class TestStep:
    def test_zero_action_at_rest(self, cfg):
        s = env.reset(cfg, 0)
        s2 = env.step(s, np.zeros((9, 2)), cfg)
        np.testing.assert_array_equal(s2.positions, s.positions)
        assert s2.step_index == 1

    def test_damping(self):
        cfg = env.EnvConfig(region=geo.PolygonRegion(square()), n_agents=1)
        s = env.WorldState(np.zeros((1, 2)), np.array([[0.4, 0.0]]))
        s2 = env.step(s, np.zeros((1, 2)), cfg)
        np.testing.assert_allclose(s2.velocities, [[0.3, 0.0]], atol=1e-15)
        np.testing.assert_allclose(s2.positions, [[0.03, 0.0]], atol=1e-15)

    def test_geometric_decay(self):
        cfg = env.EnvConfig(region=geo.PolygonRegion(square()), n_agents=2)
        s = env.WorldState(np.zeros((2, 2)), np.array([[0.8, 0.0], [0.0, -0.5]]))
        speeds = [np.linalg.norm(s.velocities, axis=1)]
        for _ in range(20):
            s = env.step(s, np.zeros((2, 2)), cfg)
            speeds.append(np.linalg.norm(s.velocities, axis=1))
        speeds = np.array(speeds)
        np.testing.assert_allclose(speeds[1:], 0.75 * speeds[:-1], rtol=1e-12)

    def test_sustained_max_action_respects_cap(self, cfg):
        s = env.reset(cfg, 0)
        for _ in range(200):
            s = env.step(s, np.ones((9, 2)), cfg)
            assert np.linalg.norm(s.velocities, axis=1).max() <= cfg.v_max + 1e-12

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.floats(0.05, 3.0))
    def test_speed_cap_random_actions(self, seed, v_max):
        cfg = env.EnvConfig(region=geo.PolygonRegion(square()), n_agents=5, v_max=v_max, u_max=20.0)
        rng = np.random.default_rng(seed)
        s = env.reset(cfg, rng)
        for _ in range(10):
            s = env.step(s, rng.uniform(-3, 3, (5, 2)), cfg)
            assert np.all(np.linalg.norm(s.velocities, axis=1) <= v_max * (1 + 1e-12))

    def test_deterministic(self, cfg):
        s = env.reset(cfg, 5)
        a = np.random.default_rng(0).uniform(-1, 1, (9, 2))
        np.testing.assert_array_equal(env.step(s, a, cfg).positions, env.step(s, a, cfg).positions)

    def test_shape_mismatch(self, cfg):
        with pytest.raises(ValueError, match="shape"):
            env.step(env.reset(cfg, 0), np.zeros((8, 2)), cfg)

    def test_displacement_mode(self):
        cfg = env.EnvConfig(region=geo.PolygonRegion(square()), n_agents=2, kinematics_mode="displacement")
        s = env.WorldState(np.zeros((2, 2)), np.zeros((2, 2)))
        s2 = env.step(s, np.array([[0.05, 0.0], [1.0, 1.0]]), cfg)
        np.testing.assert_allclose(s2.positions[0], [0.05, 0.0])
        # second agent's request exceeds v_max*dt = 0.1 and is clipped along its direction
        np.testing.assert_allclose(s2.positions[1], [0.1 / np.sqrt(2)] * 2)
        np.testing.assert_allclose(s2.velocities, (s2.positions - s.positions) / cfg.dt)

    def test_agents_may_overlap(self):
        cfg = env.EnvConfig(region=geo.PolygonRegion(square()), n_agents=2)
        s = env.WorldState(np.zeros((2, 2)), np.zeros((2, 2)))
        assert np.array_equal(env.step(s, np.zeros((2, 2)), cfg).positions, np.zeros((2, 2)))


class TestObserve:
    def test_own_position(self):
        s = env.WorldState(np.array([[1.2, -0.3], [0.0, 0.0]]), np.zeros((2, 2)))
        np.testing.assert_array_equal(env.observe(s, 0), [1.2, -0.3])
        assert env.observe(s, 0).shape == (2,)

    def test_joint_length(self, cfg):
        assert env.joint_observation(env.reset(cfg, 0)).shape == (18,)

    def test_out_of_range(self, cfg):
        with pytest.raises(IndexError):
            env.observe(env.reset(cfg, 0), 9)

    def test_velocity_flag(self):
        cfg = env.EnvConfig(region=geo.PolygonRegion(square()), n_agents=1, observe_velocity=True)
        s = env.WorldState(np.array([[1.0, 2.0]]), np.array([[0.1, 0.2]]))
        np.testing.assert_array_equal(env.observe(s, 0, cfg), [1.0, 2.0, 0.1, 0.2])
        assert cfg.obs_dim == 4


@pytest.mark.parametrize("kw", [{"n_agents": 0}, {"damping": 1.0}, {"dt": 0.0}, {"v_max": -1.0},
                                {"kinematics_mode": "teleport"}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        env.EnvConfig(region=geo.PolygonRegion(square()), **kw)
