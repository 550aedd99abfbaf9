"""Decoder: exact ground states, matching optimality, chain special case."""

import math

import numpy as np
import pytest

from nishimori import oracles
from nishimori.decoder import (
    PlaquetteDecoder,
    decode,
    decode_chain,
    decode_chain_batch,
    frustration,
)
from nishimori.geometry import build_brickwall, build_chain, build_hexagon, defect_distances
from nishimori.sampler import ProtocolParams, sample_noisy_shots


def random_couplings(geom, p, rand, shots=1):
    return (1 - 2 * (rand.random((shots, geom.n_bonds)) < p)).astype(np.int8)


def test_frustration_counts_negative_bonds_mod_2():
    geom = build_hexagon()
    s = np.ones(geom.n_bonds, dtype=np.int8)
    assert len(frustration(geom, s)) == 0
    s[0] = -1
    assert list(frustration(geom, s)) == [0]
    s[1] = -1
    assert len(frustration(geom, s)) == 0


def test_frustration_rejects_1d():
    with pytest.raises(ValueError):
        frustration(build_chain(4), np.ones(3, dtype=np.int8))


def test_noiseless_syndromes_decode_perfectly():
    geom = build_brickwall(2)
    params = ProtocolParams(t_A=math.pi / 4, p_s=0.0, p_sigma=0.0, shots=50, seed=2)
    shot = sample_noisy_shots(geom, params, np.arange(50))
    for k in range(50):
        result = decode(geom, shot.s_prime[k])
        bits = shot.sigma_readout[k] * result.sigma_prime
        # every corrected shot is fully aligned one way or the other
        assert abs(int(bits.sum())) == geom.n_sites


def test_decode_energy_matches_brute_force():
    rand = np.random.default_rng(0)
    for geom in (build_brickwall(2), build_hexagon()):
        dec = PlaquetteDecoder(geom)
        for p in (0.02, 0.0675, 0.15):
            s = random_couplings(geom, p, rand, shots=60)
            _, energies = dec.decode_batch(s)
            for k in range(60):
                _, e_exact = oracles.brute_force_ground_state(geom, s[k])
                assert energies[k] == e_exact


def test_decode_sigma_prime_achieves_reported_energy():
    geom = build_brickwall(2)
    rand = np.random.default_rng(1)
    ii, jj = geom.bond_endpoints()
    s = random_couplings(geom, 0.12, rand, shots=40)
    dec = PlaquetteDecoder(geom)
    sigma_prime, energies = dec.decode_batch(s)
    recomputed = -np.sum(s * sigma_prime[:, ii] * sigma_prime[:, jj], axis=1)
    assert np.array_equal(recomputed, energies)


def test_matching_weight_equals_exhaustive():
    geom = build_brickwall(3)
    dist = defect_distances(geom)
    dec = PlaquetteDecoder(geom)
    rand = np.random.default_rng(7)
    for _ in range(200):
        n_def = int(rand.integers(0, 7))
        defects = tuple(sorted(rand.choice(geom.n_plaquettes, n_def, replace=False)))
        pairs = dec.match_defects(defects)
        w = dec.matching_weight(pairs)
        w_exact, _ = oracles.exhaustive_matching(defects, dist, geom.boundary_node)
        assert w == w_exact


def test_decode_batch_agrees_with_single():
    geom = build_brickwall(2)
    rand = np.random.default_rng(3)
    s = random_couplings(geom, 0.1, rand, shots=25)
    dec = PlaquetteDecoder(geom)
    batch_sigma, batch_e = dec.decode_batch(s)
    for k in range(25):
        res = dec.decode(s[k])
        assert np.array_equal(res.sigma_prime, batch_sigma[k])
        assert res.energy == batch_e[k]


def test_chain_decode_satisfies_all_bonds():
    geom = build_chain(12)
    rand = np.random.default_rng(5)
    s = random_couplings(geom, 0.2, rand, shots=30)
    sigma_prime, energies = decode_chain_batch(geom, s)
    ii, jj = geom.bond_endpoints()
    assert np.all(sigma_prime[:, ii] * sigma_prime[:, jj] == s)
    assert np.all(energies == -geom.n_bonds)


def test_chain_single_matches_batch():
    geom = build_chain(9)
    rand = np.random.default_rng(6)
    s = random_couplings(geom, 0.3, rand, shots=10)
    batch_sigma, _ = decode_chain_batch(geom, s)
    for k in range(10):
        res = decode_chain(geom, s[k])
        assert np.array_equal(res.sigma_prime, batch_sigma[k])


def test_chain_energy_is_brute_force_minimum():
    geom = build_chain(12)
    rand = np.random.default_rng(8)
    s = random_couplings(geom, 0.15, rand, shots=20)
    for k in range(20):
        _, e_exact = oracles.brute_force_ground_state(geom, s[k])
        res = decode_chain(geom, s[k])
        assert res.energy == e_exact


def test_trivial_syndrome_decodes_to_uniform():
    geom = build_brickwall(2)
    res = decode(geom, np.ones(geom.n_bonds, dtype=np.int8))
    assert np.all(res.sigma_prime == 1)
    assert res.energy == -geom.n_bonds
    assert len(res.matching) == 0
