"""Born-rule sampler: coupling law, noise channel, shot serialization."""

import math

import numpy as np
import pytest

from nishimori.geometry import build_brickwall, build_chain
from nishimori.sampler import (
    ProtocolParams,
    beta_of,
    effective_flip_prob,
    read_shots,
    sample_noisy_shots,
    sample_shots,
    write_shots,
)


def test_beta_values():
    assert beta_of(0.0) == 0.0
    assert beta_of(math.pi / 4) == math.inf
    assert beta_of(math.pi / 8) == pytest.approx(2 * math.atanh(math.tan(math.pi / 8)))
    assert beta_of(math.pi / 8) == pytest.approx(0.881373587019543, abs=1e-12)


def test_beta_rejects_out_of_range():
    with pytest.raises(ValueError):
        beta_of(-0.01)
    with pytest.raises(ValueError):
        beta_of(math.pi / 4 + 0.01)


def test_nishimori_identity():
    # flip probability and inverse temperature satisfy p/(1-p) = e^{-2 beta}
    for t_A in (0.1, 0.3, 0.6):
        p = effective_flip_prob(t_A, 0.0)
        beta = beta_of(t_A)
        assert p / (1 - p) == pytest.approx(math.exp(-2 * beta), rel=1e-12)


def test_effective_flip_prob_combines_channels():
    t_A, p_s = 0.3, 0.04
    a = (1 - math.sin(2 * t_A)) / 2
    assert effective_flip_prob(t_A, p_s) == pytest.approx(a * (1 - p_s) + (1 - a) * p_s)
    assert effective_flip_prob(math.pi / 4, 0.0) == 0.0
    assert effective_flip_prob(0.0, 0.0) == 0.5


def test_params_derived_fields():
    p = ProtocolParams(t_A=math.pi / 8, p_s=0.02, p_sigma=0.01, shots=100, seed=1)
    assert p.beta == pytest.approx(beta_of(math.pi / 8))
    assert p.p_tilde == pytest.approx(effective_flip_prob(math.pi / 8, 0.02))


def test_clifford_point_syndromes_exact():
    geom = build_brickwall(2)
    params = ProtocolParams(t_A=math.pi / 4, p_s=0.0, p_sigma=0.0, shots=200, seed=3)
    shot = sample_shots(geom, params, np.arange(200))
    ii, jj = geom.bond_endpoints()
    assert np.array_equal(shot.s, shot.sigma[:, ii] * shot.sigma[:, jj])


def test_trivial_point_syndromes_are_coin_flips():
    geom = build_brickwall(2)
    params = ProtocolParams(t_A=0.0, p_s=0.0, p_sigma=0.0, shots=20000, seed=3)
    shot = sample_shots(geom, params, np.arange(20000))
    ii, jj = geom.bond_endpoints()
    agree = np.mean(shot.s == shot.sigma[:, ii] * shot.sigma[:, jj])
    assert abs(agree - 0.5) < 0.02


def test_empirical_flip_rate_matches_formula():
    geom = build_chain(30)
    t_A = math.pi / 6
    params = ProtocolParams(t_A=t_A, p_s=0.0, p_sigma=0.0, shots=20000, seed=5)
    shot = sample_shots(geom, params, np.arange(20000))
    ii, jj = geom.bond_endpoints()
    flip = np.mean(shot.s != shot.sigma[:, ii] * shot.sigma[:, jj])
    p = effective_flip_prob(t_A, 0.0)
    sigma_err = math.sqrt(p * (1 - p) / (20000 * geom.n_bonds))
    assert abs(flip - p) < 4 * sigma_err


def test_sigma_is_uniform():
    geom = build_chain(16)
    params = ProtocolParams(t_A=0.5, p_s=0.0, p_sigma=0.0, shots=20000, seed=9)
    shot = sample_shots(geom, params, np.arange(20000))
    assert abs(np.mean(shot.sigma == 1) - 0.5) < 0.01


def test_noise_channel_rates():
    geom = build_brickwall(2)
    params = ProtocolParams(t_A=0.4, p_s=0.08, p_sigma=0.03, shots=20000, seed=11)
    shot = sample_noisy_shots(geom, params, np.arange(20000))
    s_rate = np.mean(shot.s_prime != shot.s)
    r_rate = np.mean(shot.sigma_readout != shot.sigma)
    assert abs(s_rate - 0.08) < 0.005
    assert abs(r_rate - 0.03) < 0.005


def test_zero_noise_passthrough():
    geom = build_chain(8)
    params = ProtocolParams(t_A=0.4, p_s=0.0, p_sigma=0.0, shots=50, seed=2)
    shot = sample_noisy_shots(geom, params, np.arange(50))
    assert np.array_equal(shot.s_prime, shot.s)
    assert np.array_equal(shot.sigma_readout, shot.sigma)


def test_shots_deterministic_and_addressable():
    geom = build_chain(6)
    params = ProtocolParams(t_A=0.3, p_s=0.05, p_sigma=0.02, shots=40, seed=8)
    full = sample_noisy_shots(geom, params, np.arange(40))
    part = sample_noisy_shots(geom, params, np.array([10, 33]))
    assert np.array_equal(full.sigma[[10, 33]], part.sigma)
    assert np.array_equal(full.s_prime[[10, 33]], part.s_prime)


def test_different_seeds_differ():
    geom = build_chain(6)
    a = sample_shots(geom, ProtocolParams(t_A=0.3, p_s=0, p_sigma=0, shots=50, seed=1), np.arange(50))
    b = sample_shots(geom, ProtocolParams(t_A=0.3, p_s=0, p_sigma=0, shots=50, seed=2), np.arange(50))
    assert not np.array_equal(a.sigma, b.sigma)


def test_shot_file_roundtrip(tmp_path):
    geom = build_brickwall(2)
    params = ProtocolParams(t_A=0.35, p_s=0.04, p_sigma=0.01, shots=64, seed=4)
    shot = sample_noisy_shots(geom, params, np.arange(64))
    path = tmp_path / "dump.shots"
    write_shots(path, geom, params, shot)
    header, back = read_shots(path)
    assert header["geometry"] == geom.digest()
    assert np.array_equal(back.sigma, shot.sigma)
    assert np.array_equal(back.s, shot.s)
    assert np.array_equal(back.s_prime, shot.s_prime)
    assert np.array_equal(back.sigma_readout, shot.sigma_readout)
