import json
import math
import re

import numpy as np
import pytest

from swarmcover import checkpoint as ckpt
from swarmcover import harness, learner
from swarmcover import geometry as geo
from swarmcover.cli import main
from swarmcover.config import DEFAULTS, ConfigError, parse_config
from swarmcover.scenarios import SCENARIOS, bedok_path, builtin_region, builtin_scenario

FAST = {
    "env": {"n_agents": 3, "steps_per_episode": 10},
    "train": {"episodes": 4, "hidden": [8], "batch_size": 16, "warmup": 16, "update_every": 5},
    "eval": {"episodes": 2},
}


def write_cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        cfg = parse_config(path)
        assert cfg.doc["scenario"] == "square3"
        assert cfg.sw.R1_in == 150 and cfg.sw.beta == 200 and cfg.sw.prop_range == (0.85, 1.2)
        assert cfg.cr.R1_full == 60 and cfg.cr.c2 == 5 and cfg.cr.clip_overall_to_region
        assert cfg.env.n_agents == 9 and cfg.env.coverage_radius == 0.5 and cfg.env.coverage_edges == 30
        assert cfg.train.gamma == 0.95 and cfg.train.episodes == 10_000
        assert cfg.train.reward_mode == "per_agent"

    def test_sw_defaults_to_shared(self):
        assert parse_config(None, {"scheme": "sw"}).train.reward_mode == "shared"

    def test_episode_override(self, tmp_path):
        cfg = parse_config(write_cfg(tmp_path, FAST), {"train.episodes": 3})
        rec = harness.cmd_train(cfg, 0, tmp_path / "run")
        assert rec.to_dict()["episodes"] == 3
        assert rec.config["train"]["episodes"] == 3

    def test_gamma_out_of_range(self, tmp_path):
        with pytest.raises(ConfigError, match="train"):
            parse_config(write_cfg(tmp_path, {"train": {"gamma": 1.5}}))

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError, match=r"env\.radius.*unknown key"):
            parse_config(write_cfg(tmp_path, {"env": {"radius": 1}}))

    def test_wrong_type(self, tmp_path):
        with pytest.raises(ConfigError, match=r"env\.n_agents"):
            parse_config(write_cfg(tmp_path, {"env": {"n_agents": "nine"}}))

    def test_malformed_json_location(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "scheme": "cr",\n  "env": {,}\n}')
        with pytest.raises(ConfigError, match="line 3"):
            parse_config(path)

    def test_snapshot_round_trip(self, tmp_path):
        cfg = parse_config(write_cfg(tmp_path, FAST))
        again = parse_config(write_cfg(tmp_path, cfg.snapshot(), "snap.json"))
        assert again.snapshot() == cfg.snapshot()
        assert again.env == cfg.env and again.train == cfg.train

    def test_region_file(self, tmp_path):
        ring = {"name": "l", "crs": "local", "ring": [[0, 0], [4, 0], [4, 1], [1, 1], [1, 3], [0, 3]]}
        (tmp_path / "l.json").write_text(json.dumps(ring))
        cfg = parse_config(write_cfg(tmp_path, {"region": {"file": "l.json"}}))
        assert cfg.region.area == pytest.approx(6.0)

    def test_every_default_section_documented(self):
        assert set(DEFAULTS) == {"scenario", "scheme", "env", "sw", "cr", "train", "region", "eval", "metrics"}


class TestScenarios:
    @pytest.mark.parametrize("name", ["square3", "rect1x9", "disk"])
    def test_area_nine(self, name):
        assert builtin_region(name).area == pytest.approx(9.0, abs=1e-9)

    def test_square_and_rect_equal(self):
        assert builtin_region("square3").area == builtin_region("rect1x9").area

    def test_rect_shape(self):
        assert builtin_region("rect1x9").bounds == (0.0, 0.0, 9.0, 1.0)

    def test_disk_polygonisation_close(self):
        assert geo.region_polygon(builtin_region("disk")).area == pytest.approx(9.0, rel=1e-3)

    def test_bedok_matches_file(self):
        rf = geo.read_region_file(bedok_path())
        assert rf.raw_area == pytest.approx(rf.stated_area, rel=1e-6)

    def test_unknown(self):
        with pytest.raises(KeyError):
            builtin_scenario("ocean")

    def test_catalog(self):
        assert {builtin_scenario(n).name for n in SCENARIOS} == set(SCENARIOS)


class TestMetrics:
    def rows(self, episodes=10, agents=9):
        return [learner.MetricRow(e, i, 1.0 + e, 9.0 + e, 0.25, 0.0) for e in range(episodes) for i in range(agents)]

    def test_row_count_and_header(self, tmp_path):
        path = harness.write_metrics(self.rows(), tmp_path / "m.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "episode,agent_id,mean_reward,shared_reward,coverage_fraction,wall_ms"
        assert len(lines) - 1 == 90

    def test_round_trip(self, tmp_path):
        rows = self.rows(3, 2)
        assert harness.read_metrics(harness.write_metrics(rows, tmp_path / "m.csv")) == rows

    def test_rejects_fraction_above_one(self):
        bad = [learner.MetricRow(0, 0, 0.0, 0.0, 1.5, 0.0)]
        with pytest.raises(ValueError):
            harness.metrics_text(bad)

    def test_episode_series(self):
        rows = [learner.MetricRow(0, 0, 1.0, 0, 0, 0), learner.MetricRow(0, 1, 3.0, 0, 0, 0),
                learner.MetricRow(1, 0, 5.0, 0, 0, 0), learner.MetricRow(1, 1, 5.0, 0, 0, 0)]
        np.testing.assert_array_equal(harness.episode_series(rows), [2.0, 5.0])


class TestCheckpoint:
    def test_round_trip_bytes(self, tmp_path):
        nets = learner.make_agents(3, 2, 2, learner.TrainConfig(hidden=(5, 4)), 0)
        nets[0].actor_opt.step = 7
        path = ckpt.save(nets, tmp_path / "c.bin")
        back = ckpt.load(path)
        assert ckpt.encode(back) == path.read_bytes()
        for a, b in zip(nets, back):
            for name in ("actor", "critic", "target_actor", "target_critic"):
                assert np.array_equal(getattr(a, name).flat(), getattr(b, name).flat())
        assert back[0].actor_opt.step == 7

    def test_header(self, tmp_path):
        data = ckpt.encode(learner.make_agents(2, 2, 2, learner.TrainConfig(hidden=(3,)), 0))
        assert data[:8] == b"SWCVCKPT"

    @pytest.mark.parametrize("mutate", [lambda d: b"XXXXXXXX" + d[8:], lambda d: d[:-8], lambda d: d + b"\0"])
    def test_corrupt(self, mutate):
        data = ckpt.encode(learner.make_agents(2, 2, 2, learner.TrainConfig(hidden=(3,)), 0))
        with pytest.raises(ckpt.CheckpointError):
            ckpt.decode(mutate(data))

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ckpt.load(tmp_path / "none.bin")


class TestCli:
    def test_train_twice_identical(self, tmp_path):
        cfg = write_cfg(tmp_path, FAST)
        for out in ("a", "b"):
            assert main(["train", "--config", str(cfg), "--seed", "7", "--out", str(tmp_path / out)]) == 0
        a, b = tmp_path / "a", tmp_path / "b"
        assert (a / "metrics.csv").read_bytes() == (b / "metrics.csv").read_bytes()
        assert (a / "checkpoint.bin").read_bytes() == (b / "checkpoint.bin").read_bytes()
        assert len((a / "metrics.csv").read_text().splitlines()) == 1 + 4 * 3
        for name in ("reward_curve.svg", "config.json", "run.json"):
            assert (a / name).is_file()

    def test_eval_after_train(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, FAST)
        out = str(tmp_path / "run")
        main(["train", "--config", str(cfg), "--out", out])
        assert main(["eval", "--config", str(cfg), "--out", out, "--seed", "3"]) == 0
        doc = json.loads((tmp_path / "run" / "eval.json").read_text())
        assert doc["episodes"] == 2 and 0.0 <= doc["final_coverage_fraction"] <= 1.0

    def test_eval_without_checkpoint(self, tmp_path, capsys):
        assert main(["eval", "--out", str(tmp_path / "nothing")]) == 2
        assert "checkpoint not found" in capsys.readouterr().err

    def test_render_nine_agents(self, tmp_path):
        assert main(["render", "--out", str(tmp_path)]) == 0
        text = (tmp_path / "snapshot.svg").read_text()
        assert len(re.findall(r'<polygon class="coverage"', text)) == 9
        assert len(re.findall(r'<path class="region"', text)) == 1
        assert text.count('class="agent"') == 9

    def test_render_with_checkpoint(self, tmp_path):
        cfg = write_cfg(tmp_path, FAST)
        main(["train", "--config", str(cfg), "--out", str(tmp_path)])
        assert main(["render", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "snapshot.svg").read_text().count('class="coverage"') == 3

    def test_config_error_exit(self, tmp_path, capsys):
        assert main(["train", "--config", str(write_cfg(tmp_path, {"train": {"gamma": 1.5}}))]) == 2
        assert "gamma" in capsys.readouterr().err

    def test_gradcheck(self, tmp_path):
        cfg = write_cfg(tmp_path, {"env": {"n_agents": 2}, "train": {"hidden": [6, 6]}})
        assert main(["gradcheck", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "gradcheck.json").read_text())
        assert doc["max_relative_error"] < 1e-4


def test_checkpoint_round_trip_preserves_eval(tmp_path):
    cfg = parse_config(write_cfg(tmp_path, FAST))
    rec = harness.cmd_train(cfg, 1, tmp_path)
    nets = ckpt.load(rec.checkpoint)
    direct = learner.evaluate(learner.train_run(cfg.env, cfg.scheme, cfg.reward_spec, cfg.train, 1).nets,
                              cfg.env, cfg.scheme, cfg.reward_spec, 3, 5)
    loaded = learner.evaluate(nets, cfg.env, cfg.scheme, cfg.reward_spec, 3, 5)
    assert direct == loaded
    assert math.isfinite(loaded.mean_reward)
