"""Statistics over decoded shots: magnetization moments, the per-qubit
variance f and normalized squared-magnetization fluctuation g, bond and
plaquette observables, the two-parameter noise fit, and GHZ fidelity
estimation from stabilizer samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class MomentStats:
    n_sites: int
    shots: int
    mean_M: float
    mean_M2: float
    mean_M4: float
    f: float
    g: float
    mean_M_err: float
    f_err: float
    g_err: float


@dataclass
class NoiseFit:
    p_s_hat: float
    p_sigma_hat: float
    p_s_err: float
    p_sigma_err: float
    zxz_residual: float
    w_residual: float


@dataclass
class FidelityEstimate:
    F_hat: float
    stderr: float
    n_sites: int
    S: int
    k: int


def magnetization(shot, result) -> int:
    """Total decoded magnetization sum_j sigma'_j * readout_j."""
    readout = shot.sigma_readout if shot.sigma_readout is not None else shot.sigma
    return int(np.sum(readout * result.sigma_prime))


def magnetization_batch(readout: np.ndarray, sigma_prime: np.ndarray) -> np.ndarray:
    return np.sum(readout.astype(np.int64) * sigma_prime.astype(np.int64), axis=1)


def _f_of(m, m2, n):
    return (m2 - m * m) / n


def _g_of(m2, m4, n):
    return (m4 - m2 * m2) / n**3


def f_statistic(stats: MomentStats) -> float:
    """(<M^2> - <M>^2) / N."""
    if stats.shots < 2:
        raise ValueError("f needs at least 2 shots")
    return _f_of(stats.mean_M, stats.mean_M2, stats.n_sites)


def g_statistic(stats: MomentStats) -> float:
    """(<M^4> - <M^2>^2) / N^3."""
    if stats.shots < 2:
        raise ValueError("g needs at least 2 shots")
    return _g_of(stats.mean_M2, stats.mean_M4, stats.n_sites)


def moment_stats(M: np.ndarray, n_sites: int, resamples: int = 500, seed: int = 0) -> MomentStats:
    """Sample moments of M with bootstrap standard errors on f and g."""
    M = np.asarray(M, dtype=np.float64)
    shots = M.shape[0]
    if shots < 2:
        raise ValueError("need at least 2 shots")
    m = float(M.mean())
    m2 = float((M**2).mean())
    m4 = float((M**4).mean())
    rand = np.random.default_rng(np.random.SeedSequence([seed, shots]))
    f_bs = np.empty(resamples)
    g_bs = np.empty(resamples)
    m_bs = np.empty(resamples)
    for r in range(resamples):
        pick = M[rand.integers(0, shots, shots)]
        bm = pick.mean()
        bm2 = (pick**2).mean()
        bm4 = (pick**4).mean()
        m_bs[r] = bm
        f_bs[r] = _f_of(bm, bm2, n_sites)
        g_bs[r] = _g_of(bm2, bm4, n_sites)
    return MomentStats(
        n_sites=n_sites,
        shots=shots,
        mean_M=m,
        mean_M2=m2,
        mean_M4=m4,
        f=_f_of(m, m2, n_sites),
        g=_g_of(m2, m4, n_sites),
        mean_M_err=float(m_bs.std(ddof=1)),
        f_err=float(f_bs.std(ddof=1)),
        g_err=float(g_bs.std(ddof=1)),
    )


def bond_plaquette_means(geom, sigma_readout: np.ndarray, s_prime: np.ndarray):
    """Per-bond <ZXZ> and per-plaquette <W> means over shots.

    The ferromagnetic syndrome sign convention makes the bond observable
    readout_i * s'_ij * readout_j, matching the device-positive values.
    """
    ii, jj = geom.bond_endpoints()
    zxz = (
        sigma_readout[:, ii].astype(np.float64)
        * s_prime.astype(np.float64)
        * sigma_readout[:, jj].astype(np.float64)
    ).mean(axis=0)
    if geom.n_plaquettes:
        pm = geom.plaquette_bond_matrix()
        neg = (s_prime < 0).astype(np.int64)
        par = (neg @ pm.T) % 2
        w = (1.0 - 2.0 * par).mean(axis=0)
    else:
        w = np.zeros(0)
    return zxz, w


def fit_noise_model(t_A_grid, zxz_means, w_means) -> NoiseFit:
    """Recover (p_s, p_sigma) from lattice-averaged observables on a t_A grid.

    Least-squares slope of <W> against sin^6(2 t_A) gives (1-2 p_s)^6;
    the slope of <ZXZ> against sin(2 t_A) gives (1-2 p_s)(1-2 p_sigma)^2.
    """
    t = np.asarray(t_A_grid, dtype=np.float64)
    if t.shape[0] < 3:
        raise ValueError("noise fit needs at least 3 grid points")
    zxz = np.asarray(zxz_means, dtype=np.float64)
    w = np.asarray(w_means, dtype=np.float64)
    x_z = np.sin(2 * t)
    x_w = x_z**6

    def slope_through_origin(x, y):
        denom = float(np.dot(x, x))
        a = float(np.dot(x, y)) / denom
        resid = y - a * x
        dof = max(len(x) - 1, 1)
        var_a = float(np.dot(resid, resid)) / dof / denom
        return a, math.sqrt(var_a), float(np.sqrt(np.mean(resid**2)))

    a_w, a_w_err, w_resid = slope_through_origin(x_w, w)
    a_z, a_z_err, z_resid = slope_through_origin(x_z, zxz)
    if not 0.0 < a_w <= 1.0 + 1e-9 or not 0.0 < a_z <= 1.0 + 1e-9:
        raise ValueError(f"fitted slopes outside (0, 1]: W={a_w}, ZXZ={a_z}")
    one_minus_2ps = a_w ** (1.0 / 6.0)
    p_s_hat = (1.0 - one_minus_2ps) / 2.0
    ratio = min(a_z / one_minus_2ps, 1.0)
    p_sigma_hat = (1.0 - math.sqrt(ratio)) / 2.0
    # first-order error propagation through both slopes
    p_s_err = a_w_err / (12.0 * max(a_w, 1e-30) ** (5.0 / 6.0))
    dr_daz = 1.0 / one_minus_2ps
    dr_daw = -a_z / (6.0 * one_minus_2ps * max(a_w, 1e-30))
    ratio_err = math.hypot(dr_daz * a_z_err, dr_daw * a_w_err)
    p_sigma_err = ratio_err / (4.0 * math.sqrt(max(ratio, 1e-30)))
    return NoiseFit(p_s_hat, p_sigma_hat, p_s_err, p_sigma_err, z_resid, w_resid)


def bootstrap(samples, statistic, resamples: int, rand, ci: float = 0.95):
    """Percentile bootstrap confidence interval; deterministic given ``rand``."""
    samples = np.asarray(samples)
    if samples.shape[0] < 10:
        raise ValueError("bootstrap needs at least 10 samples")
    vals = np.empty(resamples)
    n = samples.shape[0]
    for r in range(resamples):
        vals[r] = statistic(samples[rand.integers(0, n, n)])
    lo = (1.0 - ci) / 2.0
    return float(np.quantile(vals, lo)), float(np.quantile(vals, 1.0 - lo))


@dataclass
class StabilizerSamples:
    """Measured expectation samples feeding the fidelity estimator.

    ``nonz`` maps each sampled X/Y stabilizer to its array of signed,
    corrected shot outcomes (+-1); ``z_shots`` is the (shots, N) matrix of
    corrected Z-basis bits from which any Z-only stabilizer expectation
    can be reconstructed.
    """

    n_sites: int
    nonz: list          # list of np.ndarray of +-1 outcomes
    z_shots: np.ndarray


def z_pool(n_sites: int, max_pool: int, rand) -> list:
    """Distinct even-size nonempty Z supports, uniformly drawn.

    The nontrivial pool has 2^(N-1) - 1 elements; when that is smaller
    than ``max_pool`` (N = 10 gives 511) the whole pool is used.
    """
    total = (1 << (n_sites - 1)) - 1
    if total <= max_pool:
        supports = []
        for code in range(1, 1 << n_sites):
            if bin(code).count("1") % 2 == 0 and code != 0:
                supports.append(tuple(q for q in range(n_sites) if (code >> q) & 1))
        return supports
    seen = set()
    out = []
    while len(out) < max_pool:
        bits = rand.integers(0, 2, n_sites)
        if bits.sum() % 2 == 1:
            flip = int(rand.integers(0, n_sites))
            bits[flip] ^= 1
        support = tuple(int(q) for q in np.flatnonzero(bits))
        if len(support) == 0 or support in seen:
            continue
        seen.add(support)
        out.append(support)
    return out


def sample_ghz_stabilizers(geom, S: int, shots: int, rand, p_s: float = 0.0, p_sigma: float = 0.0) -> StabilizerSamples:
    """Draw corrected expectation samples of random GHZ stabilizers.

    X/Y strings have full weight N with an even-size Y support T and sign
    (-1)^{|T|/2}; each is measured on its own batch of Clifford-point shots.
    The circuit prepares the target state in a fixed local frame, so the
    string is measured in frame-rotated bases and each shot's value carries
    the auxiliary byproduct sign and the decoded spin-flip correction on T.
    Z-basis shots come from one shared batch since every Z-only expectation
    is a function of the corrected bits.
    """
    from .decoder import PlaquetteDecoder
    from .oracles import build_circuit_spec, ghz_frame, tableau_sample

    spec = build_circuit_spec(geom, math.pi / 4)
    dec = PlaquetteDecoder(geom)
    n = geom.n_sites
    y_sites, z_aux, tau = ghz_frame(spec)
    aux_ids = np.flatnonzero(z_aux)
    nonz = []
    for _ in range(S):
        bits = rand.integers(0, 2, n)
        if bits.sum() % 2 == 1:
            bits[int(rand.integers(0, n))] ^= 1
        support = np.flatnonzero(bits)
        sign = tau * (-1.0 if (len(support) // 2) % 2 == 1 else 1.0)
        if int(np.sum(bits.astype(bool) & y_sites)) % 2 == 1:
            sign = -sign
        measured_y = bits.astype(bool) ^ y_sites
        basis = "".join("Y" if measured_y[q] else "X" for q in range(n))
        out = tableau_sample(spec, p_s, p_sigma, shots, rand, site_basis=basis)
        sigma_prime, _ = dec.decode_batch(out["s_prime"])
        m = 1 - 2 * out["site_bits_noisy"].astype(np.int64)
        byproduct = np.prod(1 - 2 * out["aux_bits_noisy"][:, aux_ids].astype(np.int64), axis=1)
        vals = (sign * np.prod(m, axis=1) * byproduct
                * np.prod(sigma_prime[:, support], axis=1))
        nonz.append(vals.astype(np.float64))
    out = tableau_sample(spec, p_s, p_sigma, shots, rand)
    sigma_prime, _ = dec.decode_batch(out["s_prime"])
    m = 1 - 2 * out["site_bits_noisy"].astype(np.int64)
    return StabilizerSamples(n_sites=n, nonz=nonz, z_shots=(m * sigma_prime).astype(np.int8))


def estimate_fidelity(samples: StabilizerSamples, S: int, k: int, rand, z_pool_size: int = 1000) -> FidelityEstimate:
    """Binomial-resampled GHZ fidelity from stabilizer expectation samples.

    Each of ``k`` instances draws S' = 3S/4 X/Y stabilizers and S' Z-only
    stabilizers without replacement and averages their expectations; the
    estimate is the grand mean and the error the spread over instances.
    """
    n = samples.n_sites
    if len(samples.nonz) < S:
        raise ValueError("fewer non-Z stabilizer samples than requested S")
    s_prime_count = (3 * S) // 4
    pool = z_pool(n, z_pool_size, rand)
    if s_prime_count > len(pool) or s_prime_count > S:
        raise ValueError("resampling draws exceed pool sizes")
    nonz_exp = np.array([float(np.mean(v)) for v in samples.nonz[:S]])
    zbits = (samples.z_shots < 0).astype(np.uint8)
    z_exp = np.empty(len(pool))
    for idx, support in enumerate(pool):
        par = zbits[:, list(support)].sum(axis=1) % 2
        z_exp[idx] = float(np.mean(1.0 - 2.0 * par))
    means = np.empty(k)
    for inst in range(k):
        pick_nz = rand.choice(S, size=s_prime_count, replace=False)
        pick_z = rand.choice(len(pool), size=s_prime_count, replace=False)
        means[inst] = 0.5 * (nonz_exp[pick_nz].mean() + z_exp[pick_z].mean())
    return FidelityEstimate(
        F_hat=float(means.mean()),
        stderr=float(means.std(ddof=1)) if k > 1 else 0.0,
        n_sites=n,
        S=S,
        k=k,
    )
