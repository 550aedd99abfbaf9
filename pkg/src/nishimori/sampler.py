"""Exact Born-rule sampling of measurement outcomes via the RBIM factorization.

The joint law of (sigma, s) factorizes exactly: sigma is uniform over all
2^N bitstrings and each bond's syndrome is independently "satisfied"
(s_ij = sigma_i sigma_j in the ferromagnetic sign convention used
throughout this package) with probability 1 - (1 - sin 2 t_A)/2.
Incoherent noise is a terminal binary symmetric channel on syndromes
(rate p_s) and data readout (rate p_sigma).
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .geometry import LatticeGeometry

INF_BETA = math.inf


def beta_of(t_A: float) -> float:
    """Inverse temperature 2*artanh(tan t_A); +inf at the Clifford point."""
    if not 0.0 <= t_A <= math.pi / 4 + 1e-12:
        raise ValueError(f"t_A={t_A} outside [0, pi/4]")
    if t_A >= math.pi / 4 - 1e-12:
        return INF_BETA
    return 2.0 * math.atanh(math.tan(t_A))


def effective_flip_prob(t_A: float, p_s: float) -> float:
    """Effective bond-flip probability combining coherent and incoherent error.

    Equals the binary-symmetric-channel composition of (1 - sin 2 t_A)/2
    with p_s and lies in [0, 1/2].
    """
    if not 0.0 <= t_A <= math.pi / 4 + 1e-12:
        raise ValueError(f"t_A={t_A} outside [0, pi/4]")
    if not 0.0 <= p_s <= 0.5:
        raise ValueError(f"p_s={p_s} outside [0, 1/2]")
    a = (1.0 - math.sin(2.0 * t_A)) / 2.0
    return a * (1.0 - p_s) + (1.0 - a) * p_s


@dataclass(frozen=True)
class ProtocolParams:
    """Protocol knobs plus derived RBIM quantities."""

    t_A: float
    p_s: float = 0.0
    p_sigma: float = 0.0
    shots: int = 1
    seed: int = 0
    beta: float = field(init=False)
    p_tilde: float = field(init=False)

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be positive")
        if not 0.0 <= self.p_sigma <= 1.0:
            raise ValueError(f"p_sigma={self.p_sigma} outside [0, 1]")
        object.__setattr__(self, "beta", beta_of(self.t_A))
        object.__setattr__(self, "p_tilde", effective_flip_prob(self.t_A, self.p_s))


@dataclass
class Shot:
    """One sample: data bits, true syndromes, and their noisy counterparts."""

    sigma: np.ndarray
    s: np.ndarray
    s_prime: np.ndarray = None
    sigma_readout: np.ndarray = None


def _structural_flip_prob(t_A: float) -> float:
    return (1.0 - math.sin(2.0 * t_A)) / 2.0


def _params_key(geom: LatticeGeometry, params: ProtocolParams) -> np.ndarray:
    return rng.stream_key(
        params.seed,
        rng.float_key(params.t_A),
        rng.float_key(params.p_s),
        rng.float_key(params.p_sigma),
        int(geom.digest()[:16], 16),
    )


def sample_shots(geom: LatticeGeometry, params: ProtocolParams, shot_indices) -> Shot:
    """Sample (sigma, s) for many shots at once; arrays shaped (shots, ...).

    Shot ``i`` is a pure function of (geometry, params, i): identical
    indices give identical rows no matter how the batch is chunked.
    """
    idx = np.asarray(shot_indices, dtype=np.uint64)
    key = _params_key(geom, params)
    n, b = geom.n_sites, geom.n_bonds
    u_sig = rng.uniforms(key, idx, n, rng.DOMAIN_SIGMA)
    sigma = np.where(u_sig < 0.5, 1, -1).astype(np.int8)
    u_bond = rng.uniforms(key, idx, b, rng.DOMAIN_BOND)
    flip = u_bond < _structural_flip_prob(params.t_A)
    ii, jj = geom.bond_endpoints()
    s = (sigma[:, ii] * sigma[:, jj]).astype(np.int8)
    s[flip] *= -1
    return Shot(sigma=sigma, s=s)


def sample_shot(geom: LatticeGeometry, params: ProtocolParams, shot_index: int = 0) -> Shot:
    """Single-shot convenience wrapper around :func:`sample_shots`."""
    batch = sample_shots(geom, params, [shot_index])
    return Shot(sigma=batch.sigma[0], s=batch.s[0])


def apply_noise(shot: Shot, geom: LatticeGeometry, params: ProtocolParams, shot_indices=None) -> Shot:
    """Fill s_prime and sigma_readout with independent flip channels."""
    if shot.sigma.ndim == 1:
        batch = Shot(sigma=shot.sigma[None, :], s=shot.s[None, :])
        out = apply_noise(batch, geom, params, [0] if shot_indices is None else [shot_indices])
        shot.s_prime = out.s_prime[0]
        shot.sigma_readout = out.sigma_readout[0]
        return shot
    idx = np.asarray(
        np.arange(shot.sigma.shape[0]) if shot_indices is None else shot_indices, dtype=np.uint64
    )
    key = _params_key(geom, params)
    u_s = rng.uniforms(key, idx, shot.s.shape[1], rng.DOMAIN_SYNDROME_NOISE)
    u_r = rng.uniforms(key, idx, shot.sigma.shape[1], rng.DOMAIN_READOUT_NOISE)
    shot.s_prime = np.where(u_s < params.p_s, -shot.s, shot.s).astype(np.int8)
    shot.sigma_readout = np.where(u_r < params.p_sigma, -shot.sigma, shot.sigma).astype(np.int8)
    return shot


def sample_noisy_shots(geom: LatticeGeometry, params: ProtocolParams, shot_indices) -> Shot:
    """Sample and noise in one call (the shape used by the sweep engine)."""
    shot = sample_shots(geom, params, shot_indices)
    return apply_noise(shot, geom, params, shot_indices)


# --- binary shot record files ------------------------------------------

_MAGIC = b"NSHOTS1\n"


def write_shots(path, geom: LatticeGeometry, params: ProtocolParams, shot: Shot) -> None:
    """Bit-packed shot dump with a self-describing JSON header."""
    n, b = geom.n_sites, geom.n_bonds
    header = json.dumps(
        {
            "geometry": geom.digest(),
            "kind": geom.kind,
            "size": geom.size,
            "n_sites": n,
            "n_bonds": b,
            "t_A": params.t_A,
            "p_s": params.p_s,
            "p_sigma": params.p_sigma,
            "seed": params.seed,
            "shots": int(shot.sigma.shape[0]),
        },
        sort_keys=True,
    ).encode()
    fields = [shot.sigma, shot.s, shot.s_prime, shot.sigma_readout]
    bits = np.concatenate([(f < 0).astype(np.uint8) for f in fields], axis=1)
    packed = np.packbits(bits, axis=1)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(packed.tobytes())


def read_shots(path):
    """Inverse of :func:`write_shots`; returns (header dict, Shot)."""
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise ValueError("not a shot record file")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode())
        raw = fh.read()
    n, b, shots = header["n_sites"], header["n_bonds"], header["shots"]
    width = 2 * (n + b)
    row_bytes = -(-width // 8)
    packed = np.frombuffer(raw, dtype=np.uint8).reshape(shots, row_bytes)
    bits = np.unpackbits(packed, axis=1)[:, :width]
    signs = (1 - 2 * bits.astype(np.int8)).astype(np.int8)
    sigma = signs[:, :n]
    s = signs[:, n : n + b]
    s_prime = signs[:, n + b : n + 2 * b]
    sigma_readout = signs[:, n + 2 * b :]
    return header, Shot(sigma=sigma, s=s, s_prime=s_prime, sigma_readout=sigma_readout)
