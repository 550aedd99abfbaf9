"""Classical simulation and decoding of measurement-induced Ising order.

Sampling follows the exact Born-rule law of the constant-depth preparation
circuit (a random-bond Ising model on the Nishimori line), decoding pairs
frustrated plaquettes by minimum-weight matching, and the sweep layer maps
the order-disorder transition across coherent and incoherent error rates.
"""

from .decoder import DecodeResult, PlaquetteDecoder, decode, decode_chain, frustration
from .geometry import (
    LatticeGeometry,
    build_brickwall,
    build_chain,
    build_hexagon,
)
from .observables import (
    FidelityEstimate,
    MomentStats,
    NoiseFit,
    bond_plaquette_means,
    estimate_fidelity,
    fit_noise_model,
    magnetization,
    moment_stats,
)
from .sampler import (
    ProtocolParams,
    Shot,
    beta_of,
    effective_flip_prob,
    sample_noisy_shots,
    sample_shots,
)

__version__ = "0.1.0"

__all__ = [
    "DecodeResult",
    "FidelityEstimate",
    "LatticeGeometry",
    "MomentStats",
    "NoiseFit",
    "PlaquetteDecoder",
    "ProtocolParams",
    "Shot",
    "beta_of",
    "bond_plaquette_means",
    "build_brickwall",
    "build_chain",
    "build_hexagon",
    "decode",
    "decode_chain",
    "effective_flip_prob",
    "estimate_fidelity",
    "fit_noise_model",
    "frustration",
    "magnetization",
    "moment_stats",
    "sample_noisy_shots",
    "sample_shots",
    "__version__",
]
