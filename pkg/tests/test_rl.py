import numpy as np
import pytest

from yawbench.core import Goal
from yawbench.gaiting import GaitingController
from yawbench.plant import PlantConfig
from yawbench.reward import RewardConfig
from yawbench.rl import (CheckpointError, DDPGAgent, PolicyCheckpoint,
                         ReplayBuffer, TrainConfig, evaluate_policy_success,
                         evaluate_success_rate, her_relabel, load_checkpoint,
                         rollout_episode, save_checkpoint, train)

PLANT = PlantConfig()
SPARSE = RewardConfig.sparse()

SMALL = TrainConfig(epochs=2, cycles_per_epoch=2, episodes_per_cycle=1,
                    updates_per_cycle=4, batch_size=32, hidden=16,
                    eval_trials=10)


def make_episode(n=20, seed=0):
    rng = np.random.default_rng(seed)
    ctl = GaitingController(PLANT)
    goal = Goal(1.0)
    episode, _, _ = rollout_episode(PLANT, SPARSE,
                                    lambda o, s, g: ctl(o, s, g), goal, rng)
    return episode[:n]


# ---- HER -----------------------------------------------------------------

def test_her_counts():
    episode = make_episode(n=100)
    assert len(episode) == 100
    out = her_relabel(episode, 4, SPARSE, np.random.default_rng(0), PLANT.K)
    assert len(out) == 500


def test_her_k_zero_is_identity():
    episode = make_episode()
    out = her_relabel(episode, 0, SPARSE, np.random.default_rng(0), PLANT.K)
    assert out == episode


def test_her_self_relabel_scores_zero():
    # goals drawn from achieved goals of the same or later steps; the
    # defining property: a transition relabeled with its own achieved
    # goal gets sparse reward 0
    episode = make_episode()
    for tr in episode:
        out = her_relabel([tr], 3, SPARSE, np.random.default_rng(1), PLANT.K)
        for relabeled in out[1:]:
            assert relabeled.goal.yaw == tr.achieved_goal.yaw
            assert relabeled.reward == 0.0


def test_her_goals_come_from_future_steps():
    episode = make_episode(n=50)
    rng = np.random.default_rng(2)
    out = her_relabel(episode, 4, SPARSE, rng, PLANT.K)
    achieved = [tr.achieved_goal.yaw for tr in episode]
    for idx, tr in enumerate(episode):
        copies = out[50 + idx * 4: 50 + (idx + 1) * 4]
        for c in copies:
            assert c.goal.yaw in achieved[idx:]


def test_her_rewrites_goal_slots():
    episode = make_episode(n=10)
    out = her_relabel(episode, 1, SPARSE, np.random.default_rng(3), PLANT.K)
    base = 4 * PLANT.K
    for c in out[10:]:
        np.testing.assert_allclose(c.obs[base + 16:base + 20], c.goal.quat)


def test_her_rejects_empty_episode():
    with pytest.raises(ValueError):
        her_relabel([], 4, SPARSE, np.random.default_rng(0), PLANT.K)


# ---- replay buffer -------------------------------------------------------

def test_buffer_fifo_eviction():
    buf = ReplayBuffer(5, np.random.default_rng(0))
    episode = make_episode(n=8)
    buf.add(episode)
    assert len(buf) == 5
    # capacity 5 after 8 inserts: the 3 oldest are overwritten in place
    expected = {t.obs.tobytes() for t in episode[3:]}
    stored = {buf._arrays["obs"][i].tobytes() for i in range(5)}
    assert stored == expected


def test_buffer_sample_uniform():
    buf = ReplayBuffer(100, np.random.default_rng(1))
    buf.add(make_episode(n=20))
    batch = buf.sample(64)
    assert len(batch) == 64


def test_buffer_empty_sample_rejected():
    buf = ReplayBuffer(10, np.random.default_rng(0))
    with pytest.raises(RuntimeError):
        buf.sample(4)


# ---- agent updates -------------------------------------------------------

def filled_buffer(seed=0, n_eps=3):
    buf = ReplayBuffer(10_000, np.random.default_rng(seed))
    rng = np.random.default_rng(seed + 1)
    for _ in range(n_eps):
        ctl = GaitingController(PLANT)
        goal = Goal(float(rng.uniform(-2, 2)))
        ep, _, _ = rollout_episode(PLANT, SPARSE,
                                   lambda o, s, g: ctl(o, s, g), goal, rng)
        buf.add(her_relabel(ep, 4, SPARSE, rng, PLANT.K))
    return buf


def test_update_gamma_zero_targets_are_rewards():
    cfg = TrainConfig(epochs=1, gamma=0.0, hidden=16, batch_size=16)
    agent = DDPGAgent(PLANT.K, cfg, np.random.default_rng(0))
    buf = filled_buffer()
    # with gamma=0 the target is clip(r, -inf, 0) = r for sparse rewards
    batch = buf.sample(cfg.batch_size)
    rewards = np.array([t.reward for t in batch])[:, None]
    target = rewards + 0.0
    assert np.all(target <= 0)
    agent.update(buf)   # exercises the gamma=0 path


def test_update_polyak_one_freezes_targets():
    cfg = TrainConfig(epochs=1, polyak=1.0, hidden=16, batch_size=16)
    agent = DDPGAgent(PLANT.K, cfg, np.random.default_rng(0))
    before = [p.copy() for p in agent.actor_target.params + agent.critic_target.params]
    buf = filled_buffer()
    for _ in range(3):
        agent.update(buf)
    after = agent.actor_target.params + agent.critic_target.params
    for b, a in zip(before, after):
        np.testing.assert_array_equal(b, a)


def test_update_decreases_critic_loss_on_fixed_batch():
    cfg = TrainConfig(epochs=1, hidden=32, batch_size=64, polyak=1.0)
    agent = DDPGAgent(PLANT.K, cfg, np.random.default_rng(0))
    buf = filled_buffer(seed=3)

    batch = buf.sample(64)
    obs = np.stack([t.obs for t in batch])
    acts = np.stack([t.action for t in batch])
    rewards = np.array([t.reward for t in batch])[:, None]
    next_obs = np.stack([t.next_obs for t in batch])

    def critic_loss():
        o = agent.normalizer.normalize(obs)
        o2 = agent.normalizer.normalize(next_obs)
        a2 = agent.actor_target.forward(o2)
        qn = agent.critic_target.forward(np.concatenate([o2, a2], axis=1))
        tgt = np.clip(rewards + cfg.gamma * qn, -1 / (1 - cfg.gamma), 0)
        q = agent.critic.forward(np.concatenate([o, acts], axis=1))
        return float(np.mean((q - tgt) ** 2))

    class FixedBuffer:
        def __len__(self):
            return len(batch)

        def sample_arrays(self, k):
            return {"obs": obs, "action": acts, "reward": rewards[:, 0],
                    "next_obs": next_obs}

    before = critic_loss()
    agent.update(FixedBuffer())
    after = critic_loss()
    assert after < before


def test_update_empty_buffer_rejected():
    agent = DDPGAgent(PLANT.K, SMALL, np.random.default_rng(0))
    with pytest.raises(RuntimeError):
        agent.update(ReplayBuffer(10, np.random.default_rng(0)))


def test_critic_targets_clipped_range():
    cfg = TrainConfig(epochs=1, hidden=16, batch_size=32)
    lo = -1.0 / (1.0 - cfg.gamma)
    agent = DDPGAgent(PLANT.K, cfg, np.random.default_rng(0))
    buf = filled_buffer(seed=5)
    batch = buf.sample(cfg.batch_size)
    obs2 = np.stack([t.next_obs for t in batch])
    o2 = agent.normalizer.normalize(obs2)
    a2 = agent.actor_target.forward(o2)
    qn = agent.critic_target.forward(np.concatenate([o2, a2], axis=1))
    rewards = np.array([t.reward for t in batch])[:, None]
    target = np.clip(rewards + cfg.gamma * qn, lo, 0.0)
    assert np.all(target >= lo) and np.all(target <= 0.0)


# ---- training loop -------------------------------------------------------

def test_train_zero_epochs():
    cfg = TrainConfig(epochs=0, hidden=16)
    ckpt, log = train(PLANT, SPARSE, cfg, seed=0)
    assert log == []
    assert isinstance(ckpt, PolicyCheckpoint)


def test_train_deterministic():
    logs = []
    for _ in range(2):
        _, log = train(PLANT, SPARSE, SMALL, seed=123)
        logs.append(log)
    assert logs[0] == logs[1]


def test_demo_seeding_prefills_buffer():
    from yawbench.rl.train import _seed_with_demonstrations
    plant = PlantConfig(horizon=20)
    cfg = TrainConfig(epochs=0, hidden=16, demo_episodes=3, her_k=2)
    buf = ReplayBuffer(10_000, np.random.default_rng(0))
    _seed_with_demonstrations(buf, GaitingController(plant), plant, SPARSE,
                              cfg, np.random.default_rng(1))
    assert len(buf) == 3 * plant.horizon * (1 + cfg.her_k)


def test_train_with_demos_deterministic():
    cfg = TrainConfig(epochs=1, cycles_per_epoch=2, episodes_per_cycle=1,
                      updates_per_cycle=4, batch_size=32, hidden=16,
                      eval_trials=10, demo_episodes=2)
    logs = [train(PLANT, SPARSE, cfg, seed=11)[1] for _ in range(2)]
    assert logs[0] == logs[1]


def test_evaluate_scripted_controller_oracle():
    ctl = GaitingController(PLANT)
    rate = evaluate_policy_success(lambda o, s, g: ctl(o, s, g), PLANT,
                                   SPARSE, trials=50, seed=1,
                                   reset_hook=ctl.reset)
    assert rate >= 0.9


def test_evaluate_untrained_baseline():
    cfg = TrainConfig(epochs=0, hidden=16)
    agent = DDPGAgent(PLANT.K, cfg, np.random.default_rng(0))
    rate = evaluate_success_rate(agent, PLANT, SPARSE, trials=50, seed=2)
    assert rate < 0.1


def test_evaluate_deterministic():
    agent = DDPGAgent(PLANT.K, SMALL, np.random.default_rng(0))
    a = evaluate_success_rate(agent, PLANT, SPARSE, trials=20, seed=3)
    b = evaluate_success_rate(agent, PLANT, SPARSE, trials=20, seed=3)
    assert a == b


# ---- checkpointing -------------------------------------------------------

def test_checkpoint_round_trip(tmp_path):
    ckpt, _ = train(PLANT, SPARSE, TrainConfig(epochs=0, hidden=16), seed=7)
    path = tmp_path / "policy.ckpt"
    save_checkpoint(ckpt, path)
    loaded = load_checkpoint(path)
    assert loaded.plant_config == ckpt.plant_config
    assert loaded.reward_config == ckpt.reward_config
    assert loaded.train_config == ckpt.train_config
    assert loaded.seed == ckpt.seed
    for a, b in zip(ckpt.actor_params + ckpt.critic_params
                    + ckpt.actor_target_params + ckpt.critic_target_params,
                    loaded.actor_params + loaded.critic_params
                    + loaded.actor_target_params + loaded.critic_target_params):
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(ckpt.norm_total, loaded.norm_total)
    assert ckpt.norm_count == loaded.norm_count


def test_checkpoint_truncated_file(tmp_path):
    ckpt, _ = train(PLANT, SPARSE, TrainConfig(epochs=0, hidden=16), seed=7)
    path = tmp_path / "policy.ckpt"
    save_checkpoint(ckpt, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_dimension_guard(tmp_path):
    ckpt, _ = train(PLANT, SPARSE, TrainConfig(epochs=0, hidden=16), seed=7)
    path = tmp_path / "policy.ckpt"
    save_checkpoint(ckpt, path)
    loaded = load_checkpoint(path)
    object.__setattr__(loaded.plant_config, "__dict__", None) if False else None
    import dataclasses
    loaded = dataclasses.replace(loaded, plant_config=PlantConfig(K=3))
    with pytest.raises(CheckpointError):
        loaded.build_agent()


def test_checkpoint_rejects_foreign_file(tmp_path):
    path = tmp_path / "not_a_ckpt.json"
    path.write_text('{"hello": "world"}')
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_agent_reproduces_actions(tmp_path):
    ckpt, _ = train(PLANT, SPARSE, SMALL, seed=11)
    path = tmp_path / "p.ckpt"
    save_checkpoint(ckpt, path)
    agent_a = ckpt.build_agent()
    agent_b = load_checkpoint(path).build_agent()
    rng = np.random.default_rng(0)
    for _ in range(5):
        obs = rng.normal(size=agent_a.obs_dim)
        np.testing.assert_array_equal(agent_a.act(obs), agent_b.act(obs))
