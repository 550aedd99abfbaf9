"""Reference oracles: statevector, stabilizer tableau, brute-force solvers."""

import itertools
import math

import numpy as np
import pytest

from nishimori import oracles
from nishimori.geometry import build_brickwall, build_chain, build_hexagon

ANGLES = (0.0, math.pi / 8, math.pi / 6, math.pi / 4)


@pytest.mark.parametrize("t_A", ANGLES)
def test_statevector_matches_closed_form_bond(t_A):
    geom = build_chain(2)
    spec = oracles.build_circuit_spec(geom, t_A)
    tv = oracles.total_variation(
        oracles.statevector_distribution(spec),
        oracles.closed_form_distribution(geom, t_A, 0.0),
    )
    assert tv < 1e-12


@pytest.mark.parametrize("t_A", ANGLES)
def test_statevector_matches_closed_form_hexagon(t_A):
    geom = build_hexagon()
    spec = oracles.build_circuit_spec(geom, t_A)
    tv = oracles.total_variation(
        oracles.statevector_distribution(spec),
        oracles.closed_form_distribution(geom, t_A, 0.0),
    )
    assert tv < 1e-12


def test_layer_order_does_not_change_distribution():
    geom = build_hexagon()
    t_A = math.pi / 6
    spec = oracles.build_circuit_spec(geom, t_A)
    reordered = oracles.CircuitSpec(geom, t_A, tuple(reversed(spec.layers)))
    tv = oracles.total_variation(
        oracles.statevector_distribution(spec),
        oracles.statevector_distribution(reordered),
    )
    assert tv < 1e-12


def test_circuit_spec_rejects_site_collision():
    geom = build_chain(3)
    with pytest.raises(ValueError):
        oracles.CircuitSpec(geom, 0.3, ((0, 1),))  # bonds 0 and 1 share site 1


def test_circuit_spec_requires_full_coverage():
    geom = build_chain(3)
    with pytest.raises(ValueError):
        oracles.CircuitSpec(geom, 0.3, ((0,),))


def test_tableau_matches_statevector_at_clifford_point():
    for geom in (build_chain(2), build_chain(5), build_hexagon()):
        spec = oracles.build_circuit_spec(geom, math.pi / 4)
        sampler = oracles.AffineSampler(oracles.clifford_protocol_tableau(spec))
        tv = oracles.total_variation(
            sampler.exact_distribution(), oracles.statevector_distribution(spec)
        )
        assert tv < 1e-12


def test_tableau_rejects_non_clifford_angle():
    spec = oracles.build_circuit_spec(build_chain(2), 0.3)
    with pytest.raises(ValueError):
        oracles.clifford_protocol_tableau(spec)


def test_affine_sampler_x_basis_uniformity():
    # X-basis readout of the bond circuit mixes every outcome; empirical
    # frequencies must match the exact distribution
    geom = build_chain(2)
    spec = oracles.build_circuit_spec(geom, math.pi / 4)
    t = oracles.clifford_protocol_tableau(spec)
    sampler = oracles.site_basis_sampler(t, geom, "XX")
    probs = sampler.exact_distribution()
    rand = np.random.default_rng(0)
    bits = sampler.sample(20000, rand)
    weights = 1 << np.arange(t.n, dtype=np.uint64)
    idx = bits.astype(np.uint64) @ weights
    counts = np.bincount(idx.astype(np.int64), minlength=len(probs)) / 20000
    assert np.max(np.abs(counts - probs)) < 0.02


def test_ghz_frame_noiseless_string_is_deterministic():
    geom = build_brickwall(2)
    spec = oracles.build_circuit_spec(geom, math.pi / 4)
    y_sites, z_aux, tau = oracles.ghz_frame(spec)
    basis = "".join("Y" if y else "X" for y in y_sites)
    rand = np.random.default_rng(1)
    out = oracles.tableau_sample(spec, 0.0, 0.0, 100, rand, site_basis=basis)
    m_sites = 1 - 2 * out["site_bits"].astype(np.int64)
    m_aux = 1 - 2 * out["aux_bits"][:, np.flatnonzero(z_aux)].astype(np.int64)
    vals = tau * np.prod(m_sites, axis=1) * np.prod(m_aux, axis=1)
    assert np.all(vals == 1)


def test_pauli_errors_flip_anticommuting_readout():
    geom = build_chain(2)
    spec = oracles.build_circuit_spec(geom, math.pi / 4)
    rand = np.random.default_rng(0)
    clean = oracles.tableau_sample(spec, 0.0, 0.0, 10, rand)
    rand = np.random.default_rng(0)
    flipped = oracles.tableau_sample(spec, 0.0, 0.0, 10, rand, pauli_errors=[(0, "X")])
    assert np.array_equal(clean["site_bits"][:, 0] ^ 1, flipped["site_bits"][:, 0])
    rand = np.random.default_rng(0)
    same = oracles.tableau_sample(spec, 0.0, 0.0, 10, rand, pauli_errors=[(0, "Z")])
    assert np.array_equal(clean["site_bits"], same["site_bits"])


def test_brute_force_ground_state_ferromagnet():
    geom = build_chain(8)
    sigma, energy = oracles.brute_force_ground_state(geom, np.ones(geom.n_bonds))
    assert energy == -geom.n_bonds
    assert np.all(sigma == 1)


def test_brute_force_single_negative_bond():
    geom = build_chain(6)
    couplings = np.ones(geom.n_bonds)
    couplings[2] = -1
    _, energy = oracles.brute_force_ground_state(geom, couplings)
    # a chain can always satisfy every bond by flipping the tail
    assert energy == -geom.n_bonds


def test_brute_force_frustrated_hexagon_patch():
    geom = build_brickwall(2)
    rand = np.random.default_rng(4)
    couplings = 1 - 2 * rand.integers(0, 2, geom.n_bonds)
    sigma, energy = oracles.brute_force_ground_state(geom, couplings)
    ii, jj = geom.bond_endpoints()
    assert energy == -int(np.sum(couplings * sigma[ii] * sigma[jj]))
    assert sigma[0] == 1  # gauge fix


def test_exhaustive_matching_simple_pairs():
    # two defects at distance 2, boundary far away: pairing them wins
    dist = np.array([[0, 2, 9], [2, 0, 9], [9, 9, 0]])
    weight, pairs = oracles.exhaustive_matching((0, 1), dist, boundary=2)
    assert weight == 2
    assert pairs == ((0, 1),)


def test_exhaustive_matching_prefers_boundary():
    dist = np.array([[0, 9, 1], [9, 0, 1], [1, 1, 0]])
    weight, pairs = oracles.exhaustive_matching((0, 1), dist, boundary=2)
    assert weight == 2
    assert pairs == ((0, 2), (1, 2))


def test_exhaustive_matching_odd_defect_count():
    dist = np.array([[0, 1, 3], [1, 0, 3], [3, 3, 0]])
    weight, pairs = oracles.exhaustive_matching((0,), dist, boundary=2)
    assert weight == 3
    assert pairs == ((0, 2),)
