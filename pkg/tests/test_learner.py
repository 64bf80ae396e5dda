import math

import numpy as np
import pytest

from leohfl.aggregation import ParamVector
from leohfl.errors import DimensionMismatch, EmptyDataset, ShapeMismatch, TooSmall
from leohfl.learner import (AutoencoderSpec, Dataset, TrainConfig, dirichlet_partition, forward,
                           init_params, loss_and_grad, mse_loss, noise_std, power_normalize, psnr,
                           psnr_from_mse, ssim, synthetic_tiles, train_epochs)
from leohfl.learner.metrics import batch_ssim

SPEC = AutoencoderSpec()


def tiles(n=64, seed=0):
    return synthetic_tiles(n, side=8, seed=seed)


# forward

def test_noiseless_forward_is_deterministic():
    p = init_params(SPEC, 1)
    x = tiles(5)
    a = forward(SPEC, p, x).reconstruction
    b = forward(SPEC, p, x).reconstruction
    assert np.array_equal(a, b)
    assert a.shape == x.shape
    assert np.all((a > 0) & (a < 1))


def test_latent_has_unit_symbol_power():
    p = init_params(SPEC, 2)
    rng = np.random.default_rng(0)
    for x in rng.uniform(0, 1, (50, 64)):
        z = forward(SPEC, p, x).latent
        assert np.mean(z ** 2) == pytest.approx(1.0, abs=1e-9)
    z = power_normalize(rng.normal(size=(10, 16)) * 1e3)
    assert np.allclose(np.mean(z ** 2, axis=1), 1.0, atol=1e-12)


def test_channel_noise_variance():
    p = init_params(SPEC, 3)
    x = tiles(6250, seed=5)  # 6250 samples x 16 symbols = 1e5 symbols
    res = forward(SPEC, p, x, snr_db=5.0, noise_seed=11)
    received = res.cache["post"][SPEC.n_encoder_layers]
    noise = received - res.latent
    assert noise.size == 100_000
    assert np.var(noise) == pytest.approx(10 ** -0.5, rel=0.02)
    assert noise_std(math.inf) == 0.0


def test_fixed_noise_seed_is_reproducible():
    p = init_params(SPEC, 4)
    x = tiles(8)
    a = forward(SPEC, p, x, 3.0, noise_seed=9).reconstruction
    b = forward(SPEC, p, x, 3.0, noise_seed=9).reconstruction
    c = forward(SPEC, p, x, 3.0, noise_seed=10).reconstruction
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        forward(SPEC, init_params(SPEC), np.zeros(63))


def test_spec_validation():
    assert SPEC.dims == [64, 32, 16, 32, 64]
    assert len(init_params(SPEC).values) == SPEC.n_params
    with pytest.raises(ValueError):
        AutoencoderSpec(latent_dim=64)
    with pytest.raises(ValueError):
        AutoencoderSpec(activation="gelu")


# gradients

def finite_difference_check(spec, seed, snr_db=5.0, n_coords=20, eps=1e-5):
    rng = np.random.default_rng(seed)
    p = init_params(spec, rng)
    x = rng.uniform(0, 1, (4, spec.input_dim))
    noise = rng.standard_normal((4, spec.latent_dim))
    _, grad = loss_and_grad(spec, p, x, snr_db, noise)
    worst = 0.0
    for i in rng.choice(len(p), n_coords, replace=False):
        up, down = p.values.copy(), p.values.copy()
        up[i] += eps
        down[i] -= eps
        num = (mse_loss(spec, ParamVector(up, p.layout_tag), x, snr_db, noise)
               - mse_loss(spec, ParamVector(down, p.layout_tag), x, snr_db, noise)) / (2 * eps)
        scale = max(abs(num), abs(grad[i]), 1e-8)
        worst = max(worst, abs(num - grad[i]) / scale)
    return worst


@pytest.mark.parametrize("activation", ["tanh", "relu"])
@pytest.mark.parametrize("hidden", [(32,), (24, 20)])
def test_gradient_matches_finite_differences(activation, hidden):
    spec = AutoencoderSpec(64, 16, hidden, activation)
    for seed in range(3):
        assert finite_difference_check(spec, seed) < 1e-4


def test_gradient_noiseless_channel():
    assert finite_difference_check(SPEC, 7, snr_db=math.inf) < 1e-4


# training

def test_zero_epochs_is_identity():
    p = init_params(SPEC, 0)
    ds = Dataset(tiles(20), owner=3)
    r = train_epochs(SPEC, p, ds, 0, TrainConfig())
    assert np.array_equal(r.params.values, p.values)
    assert (r.epochs, r.data_count, r.satellite_id) == (0, 20, 3)
    assert r.loss > 0


def test_single_sample_descent():
    p = init_params(SPEC, 0)
    ds = Dataset(tiles(1), owner=0)
    cfg = TrainConfig(learning_rate=0.01, batch_size=1, snr_db=math.inf)
    losses = [mse_loss(SPEC, p, ds.samples)]
    for _ in range(50):
        p = train_epochs(SPEC, p, ds, 1, cfg).params
        losses.append(mse_loss(SPEC, p, ds.samples))
    assert all(b <= a for a, b in zip(losses, losses[1:]))
    assert losses[-1] < losses[0]


def test_training_reduces_loss_on_noisy_channel():
    p = init_params(SPEC, 0)
    ds = Dataset(tiles(200), owner=0)
    before = mse_loss(SPEC, p, ds.samples, 5.0, np.random.default_rng(1).standard_normal((200, 16)))
    r = train_epochs(SPEC, p, ds, 10, TrainConfig(), rng=2)
    after = mse_loss(SPEC, r.params, ds.samples, 5.0, np.random.default_rng(1).standard_normal((200, 16)))
    assert after < before


def test_training_is_bit_deterministic():
    p = init_params(SPEC, 0)
    ds = Dataset(tiles(40), owner=0)
    a = train_epochs(SPEC, p, ds, 3, TrainConfig(seed=5))
    b = train_epochs(SPEC, p, ds, 3, TrainConfig(seed=5))
    assert a.params.digest() == b.params.digest()
    assert a.loss == b.loss
    # the input vector is never modified in place
    assert np.array_equal(p.values, init_params(SPEC, 0).values)


def test_empty_dataset():
    with pytest.raises(EmptyDataset):
        train_epochs(SPEC, init_params(SPEC), Dataset(np.zeros((0, 64))), 1, TrainConfig())


# metrics

def test_psnr_examples():
    assert psnr_from_mse(1.0, 1.0) == 0.0
    assert psnr_from_mse(0.01, 1.0) == pytest.approx(20.0)
    assert psnr_from_mse(255.0 ** 2, 255.0) == 0.0
    x = np.full((4, 4), 0.3)
    assert psnr(x, x) == math.inf
    assert psnr(np.zeros(4), np.full(4, 0.1)) == pytest.approx(20.0)
    with pytest.raises(ShapeMismatch):
        psnr(np.zeros(3), np.zeros(4))


def test_psnr_strictly_decreasing_in_mse():
    values = [psnr_from_mse(m) for m in np.geomspace(1e-6, 1.0, 50)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_ssim_examples():
    rng = np.random.default_rng(0)
    img = rng.uniform(0, 1, (8, 8))
    assert ssim(img, img) == pytest.approx(1.0)
    neg = 2 * img.mean() - img
    assert ssim(img, neg) <= 0


def test_ssim_of_constants_is_luminance_term():
    c1 = 0.01 ** 2
    for a, b in [(0.2, 0.7), (0.5, 0.5), (0.0, 1.0)]:
        expected = (2 * a * b + c1) / (a * a + b * b + c1)
        assert ssim(np.full((8, 8), a), np.full((8, 8), b)) == pytest.approx(expected, rel=1e-12)
        assert ssim(np.full((12, 9), a), np.full((12, 9), b)) == pytest.approx(expected, rel=1e-12)


def test_ssim_too_small():
    with pytest.raises(TooSmall):
        ssim(np.zeros((7, 8)), np.zeros((7, 8)))


def test_batch_ssim_averages_tiles():
    x = tiles(3)
    assert batch_ssim(x, x, side=8) == pytest.approx(1.0)


# data

def test_synthetic_tiles_in_range_and_seeded():
    a, b = tiles(100, 3), tiles(100, 3)
    assert a.shape == (100, 64)
    assert np.array_equal(a, b)
    assert a.min() >= 0 and a.max() <= 1
    assert a.std() > 0.05


def test_partition_single_client():
    ds = Dataset(tiles(30))
    [only] = dirichlet_partition(ds, 1, 0.1, seed=0)
    assert np.array_equal(only.samples, ds.samples)


def test_partition_near_uniform_for_large_lambda():
    ds = Dataset(tiles(2000))
    inside = 0
    for seed in range(100):
        counts = [len(s) for s in dirichlet_partition(ds, 10, 10.0, seed=seed)]
        inside += all(100 <= c <= 300 for c in counts)
    assert inside >= 99


def test_partition_conserves_and_is_disjoint():
    x = tiles(500)
    # tag every sample through its first pixel so shards can be traced back
    x[:, 0] = np.arange(500) / 499
    ds = Dataset(x)
    for seed in range(100):
        shards = dirichlet_partition(ds, 10, 0.1, seed=seed)
        assert sum(len(s) for s in shards) == 500
        ids = np.concatenate([np.rint(s.samples[:, 0] * 499) for s in shards])
        assert sorted(ids.tolist()) == list(range(500))


def test_partition_reserve():
    ds = Dataset(tiles(2000))
    for seed in range(20):
        counts = [len(s) for s in dirichlet_partition(ds, 10, 0.1, seed=seed, min_count=10)]
        assert min(counts) >= 10


@pytest.mark.parametrize("lam, spread", [(0.1, 135.0), (1.0, 55.0), (10.0, 18.0)])
def test_partition_spread_matches_reference_counts(lam, spread):
    # reference spreads: standard deviation of per-satellite counts for a
    # 10-satellite, 2000-sample split at each lambda
    ds = Dataset(tiles(2000))
    sds = [np.std([len(s) for s in dirichlet_partition(ds, 10, lam, seed=k)]) for k in range(200)]
    assert np.mean(sds) == pytest.approx(spread, rel=0.25)


def test_single_group_is_one_dirichlet_draw():
    ds = Dataset(tiles(2000))
    sds = [np.std([len(s) for s in dirichlet_partition(ds, 10, 10.0, seed=k, n_groups=1)])
           for k in range(200)]
    # Beta(10, 90) share of 2000 samples: sd about 60
    assert np.mean(sds) == pytest.approx(2000 * math.sqrt(0.1 * 0.9 / 101), rel=0.15)
