"""Counter-based random streams (Philox-4x32-10).

Every random draw in the sampling pipeline is addressed by
(seed, context, shot index, domain, block), so results are bitwise
reproducible regardless of worker count, chunking or execution order.
"""

from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK32 = np.uint64(0xFFFFFFFF)

# draw domains, one independent stream per purpose
DOMAIN_SIGMA = 0
DOMAIN_BOND = 1
DOMAIN_SYNDROME_NOISE = 2
DOMAIN_READOUT_NOISE = 3


def philox4x32(counter: np.ndarray, key: np.ndarray, rounds: int = 10) -> np.ndarray:
    """Philox-4x32 block cipher; counter shape (..., 4), key shape (2,), both uint32."""
    c0 = counter[..., 0].astype(np.uint64)
    c1 = counter[..., 1].astype(np.uint64)
    c2 = counter[..., 2].astype(np.uint64)
    c3 = counter[..., 3].astype(np.uint64)
    k0 = int(key[0])
    k1 = int(key[1])
    for _ in range(rounds):
        p0 = _M0 * c0
        p1 = _M1 * c2
        new0 = (p1 >> np.uint64(32)) ^ c1 ^ np.uint64(k0)
        new1 = p1 & _MASK32
        new2 = (p0 >> np.uint64(32)) ^ c3 ^ np.uint64(k1)
        new3 = p0 & _MASK32
        c0, c1, c2, c3 = new0, new1, new2, new3
        k0 = (k0 + _W0) & 0xFFFFFFFF
        k1 = (k1 + _W1) & 0xFFFFFFFF
    return np.stack(
        [c0.astype(np.uint32), c1.astype(np.uint32), c2.astype(np.uint32), c3.astype(np.uint32)],
        axis=-1,
    )


def stream_key(seed: int, *context: int) -> np.ndarray:
    """Derive a 64-bit Philox key from a seed plus arbitrary integer context."""
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, *[c & 0xFFFFFFFFFFFFFFFF for c in context]])
    return ss.generate_state(2, np.uint32)


def float_key(value: float) -> int:
    """Stable integer encoding of a float for key derivation."""
    return int(np.float64(value).view(np.uint64))


def uniforms(key: np.ndarray, shot_indices: np.ndarray, n: int, domain: int) -> np.ndarray:
    """Uniform [0,1) floats, shape (len(shot_indices), n).

    Shot ``i`` always sees the same values for a given (key, domain),
    independent of which other shots are generated alongside it.
    """
    shots = np.asarray(shot_indices, dtype=np.uint64)
    if n == 0:
        return np.zeros((shots.shape[0], 0))
    blocks = -(-n // 4)
    ctr = np.zeros((shots.shape[0], blocks, 4), dtype=np.uint32)
    ctr[..., 0] = np.arange(blocks, dtype=np.uint32)[None, :]
    ctr[..., 1] = (shots & np.uint64(0xFFFFFFFF)).astype(np.uint32)[:, None]
    ctr[..., 2] = (shots >> np.uint64(32)).astype(np.uint32)[:, None]
    ctr[..., 3] = np.uint32(domain)
    words = philox4x32(ctr, key).reshape(shots.shape[0], blocks * 4)[:, :n]
    return (words.astype(np.float64) + 0.5) * (2.0 ** -32)
