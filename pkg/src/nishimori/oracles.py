"""Slow reference paths: dense statevector simulation, stabilizer tableau
simulation at the Clifford point, brute-force ground states, and exhaustive
matching.  These exist to validate the fast sampler and decoder and are
deliberately independent of them.

Conventions shared with the sampler: qubits are ordered sites first then
auxiliaries (aux of bond b is qubit n_sites + b); basis indices are
little-endian (qubit q is bit q); an auxiliary readout bit m = 0 maps to
the ferromagnetically-satisfied syndrome sign s = +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import LatticeGeometry

_Z = np.diag([1.0, -1.0]).astype(complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


# ----------------------------------------------------------------------
# circuit schedule
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CircuitSpec:
    """Entangling schedule for the measurement protocol on a geometry.

    Each bond carries a weak parity-measurement gadget: a full-strength
    ZZ rotation coupling the auxiliary to one endpoint and a tunable
    coupling exp(-i t_A Z X) to the other, after which the auxiliary is
    read out.  Bonds are partitioned into three layers so that no system
    qubit is touched twice within a layer.
    """

    geom: LatticeGeometry
    t_A: float
    layers: tuple  # tuple of bond-id tuples

    def __post_init__(self):
        seen = set()
        for layer in self.layers:
            sites = set()
            for b in layer:
                if b in seen:
                    raise ValueError("bond scheduled twice")
                seen.add(b)
                i, j, _ = self.geom.bonds[b]
                if i in sites or j in sites:
                    raise ValueError("site touched twice within a layer")
                sites.update((i, j))
        if len(seen) != self.geom.n_bonds:
            raise ValueError("schedule must cover every bond exactly once")


def build_circuit_spec(geom: LatticeGeometry, t_A: float, layer_order=(0, 1, 2)) -> CircuitSpec:
    """Three-layer bond coloring; valid for chains, hexagons and brickwalls."""
    colors = _bond_coloring(geom)
    layers = tuple(tuple(b for b in range(geom.n_bonds) if colors[b] == c) for c in layer_order)
    return CircuitSpec(geom, t_A, layers)


def _bond_coloring(geom: LatticeGeometry):
    # greedy proper edge coloring; the degree<=3 patches used here need <=3 colors
    site_colors = [set() for _ in range(geom.n_sites)]
    colors = []
    for i, j, _ in geom.bonds:
        c = 0
        while c in site_colors[i] or c in site_colors[j]:
            c += 1
        colors.append(c)
        site_colors[i].add(c)
        site_colors[j].add(c)
    if max(colors) > 2:
        raise ValueError("geometry is not 3-edge-colorable by the greedy scan")
    return colors


# ----------------------------------------------------------------------
# dense statevector oracle
# ----------------------------------------------------------------------

def _apply_two_qubit(psi, gate, q1, q2, n):
    psi = psi.reshape([2] * n)
    psi = np.moveaxis(psi, [n - 1 - q1, n - 1 - q2], [0, 1])
    shape = psi.shape
    psi = (gate @ psi.reshape(4, -1)).reshape(shape)
    psi = np.moveaxis(psi, [0, 1], [n - 1 - q1, n - 1 - q2])
    return psi.reshape(-1)


def statevector_distribution(spec: CircuitSpec) -> np.ndarray:
    """Exact joint probability over all (sigma, aux) outcome bitstrings.

    Index bit q < n_sites holds the site readout (bit 1 means sigma = -1);
    bit n_sites + b holds the auxiliary readout m of bond b (m = 1 means
    s = -1 in the ferromagnetic convention).
    """
    geom = spec.geom
    n = geom.n_qubits
    if n > 24:
        raise ValueError("statevector oracle limited to 24 qubits")
    psi = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=complex)  # |+>^n
    strong = np.cos(math.pi / 4) * np.eye(4) - 1j * np.sin(math.pi / 4) * np.kron(_Z, _Z)
    weak = np.cos(spec.t_A) * np.eye(4) - 1j * np.sin(spec.t_A) * np.kron(_Z, _X)
    for layer in spec.layers:
        for b in layer:
            i, j, _ = geom.bonds[b]
            a = geom.n_sites + b
            psi = _apply_two_qubit(psi, strong, i, a, n)
            psi = _apply_two_qubit(psi, weak, j, a, n)
    probs = np.abs(psi) ** 2
    total = probs.sum()
    if abs(total - 1.0) > 1e-12:
        raise AssertionError(f"statevector not normalized: {total}")
    return np.clip(probs, 0.0, None)


def closed_form_distribution(geom: LatticeGeometry, t_A: float, p_s: float = 0.0) -> np.ndarray:
    """The sampler's analytic joint law on the same outcome indexing."""
    n, b = geom.n_sites, geom.n_bonds
    total = n + b
    if total > 24:
        raise ValueError("exact enumeration limited to 24 qubits")
    from .sampler import effective_flip_prob

    p = effective_flip_prob(t_A, p_s)
    idx = np.arange(1 << total, dtype=np.uint64)
    sig_bits = np.zeros((1 << total, n), dtype=np.uint8)
    for q in range(n):
        sig_bits[:, q] = (idx >> np.uint64(q)) & np.uint64(1)
    probs = np.full(1 << total, 2.0 ** (-n))
    for bid, (i, j, _) in enumerate(geom.bonds):
        m = ((idx >> np.uint64(n + bid)) & np.uint64(1)).astype(np.uint8)
        unsat = (sig_bits[:, i] ^ sig_bits[:, j] ^ m) == 1
        probs *= np.where(unsat, p, 1.0 - p)
    return probs


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def dump_distribution(probs: np.ndarray, n_qubits: int, threshold: float = 0.0) -> str:
    """Text table outcome-bitstring -> probability (for diffing)."""
    lines = []
    for idx in range(len(probs)):
        if probs[idx] > threshold:
            bits = format(idx, f"0{n_qubits}b")[::-1]  # little-endian readout order
            lines.append(f"{bits} {probs[idx]:.12e}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# stabilizer tableau (Clifford point)
# ----------------------------------------------------------------------

class Tableau:
    """Stabilizer generators of an n-qubit state (no destabilizers).

    Rows are (x | z) bit vectors with a phase exponent in {0, 2}
    (sign = (-1)^(phase/2)); generators are Hermitian Paulis.
    """

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((n, n), dtype=np.uint8)
        self.z = np.eye(n, dtype=np.uint8)
        self.phase = np.zeros(n, dtype=np.uint8)  # mod 4

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.x = self.x.copy()
        t.z = self.z.copy()
        t.phase = self.phase.copy()
        return t

    # gate updates (standard CHP rules, applied column-wise)
    def h(self, q):
        self.phase = (self.phase + 2 * (self.x[:, q] & self.z[:, q])) % 4
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def s(self, q):
        self.phase = (self.phase + 2 * (self.x[:, q] & self.z[:, q])) % 4
        self.z[:, q] ^= self.x[:, q]

    def sdg(self, q):
        self.s(q)
        self.s(q)
        self.s(q)

    def cx(self, c, t):
        self.phase = (
            self.phase + 2 * (self.x[:, c] & self.z[:, t] & (self.x[:, t] ^ self.z[:, c] ^ 1))
        ) % 4
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def cz(self, a, b):
        self.h(b)
        self.cx(a, b)
        self.h(b)

    def rzz_clifford(self, a, b):
        """exp(-i pi/4 Z_a Z_b) up to global phase."""
        self.s(a)
        self.s(b)
        self.cz(a, b)

    def _row_mul_phase(self, xa, za, xb, zb):
        # phase exponent (mod 4) picked up multiplying Pauli rows a*b
        g = np.zeros(self.n, dtype=np.int64)
        ya = (xa & za).astype(bool)
        yb = (xb & zb).astype(bool)
        xo = (xa & ~za).astype(bool)
        zo = (~xa & za).astype(bool)
        g[xo] = (zb[xo].astype(np.int64)) * (2 * xb[xo].astype(np.int64) - 1)
        g[ya] = (zb[ya].astype(np.int64)) - (xb[ya].astype(np.int64))
        g[zo] = (xb[zo].astype(np.int64)) * (1 - 2 * zb[zo].astype(np.int64))
        return int(g.sum()) % 4

    def row_multiply(self, dst, src):
        """generator[dst] <- generator[src] * generator[dst]."""
        ph = self._row_mul_phase(self.x[src], self.z[src], self.x[dst], self.z[dst])
        self.phase[dst] = (self.phase[dst] + self.phase[src] + ph) % 4
        self.x[dst] ^= self.x[src]
        self.z[dst] ^= self.z[src]


def ghz_frame(spec: CircuitSpec):
    """Local frame and byproduct set of the prepared state's X-type stabilizer.

    The stabilizer group of the Clifford-point output contains exactly one
    element (up to bond-parity products) that acts as X or Y on every site
    and only as Z on auxiliaries.  Returns (y_sites, z_aux, tau):
    ``y_sites`` marks sites where that string is Y instead of X, ``z_aux``
    the auxiliaries whose Z outcomes enter its per-shot sign, and ``tau``
    its intrinsic sign.
    """
    t = clifford_protocol_tableau(spec)
    geom = spec.geom
    n = t.n
    target = np.zeros(n, dtype=np.uint8)
    target[: geom.n_sites] = 1
    lam = _solve_gf2(t.x.T.copy(), target, n)
    rows = [int(r) for r in np.flatnonzero(lam)]
    if not rows:
        raise AssertionError("no X-type string in the stabilizer group")
    k0 = rows[0]
    for r in rows[1:]:
        t.row_multiply(k0, r)
    if not np.array_equal(t.x[k0], target) or t.phase[k0] % 2 != 0:
        raise AssertionError("X-type string extraction failed")
    y_sites = t.z[k0, : geom.n_sites].astype(bool)
    z_aux = t.z[k0, geom.n_sites :].astype(bool)
    tau = -1.0 if t.phase[k0] % 4 == 2 else 1.0
    return y_sites, z_aux, tau


def plus_state_tableau(n: int) -> Tableau:
    t = Tableau(n)
    for q in range(n):
        t.h(q)
    return t


def clifford_protocol_tableau(spec: CircuitSpec) -> Tableau:
    """Run the Clifford-point circuit; auxiliary readout is plain Z afterwards."""
    if abs(spec.t_A - math.pi / 4) > 1e-12:
        raise ValueError("tableau path requires the Clifford point t_A = pi/4")
    geom = spec.geom
    t = plus_state_tableau(geom.n_qubits)
    for layer in spec.layers:
        for b in layer:
            i, j, _ = geom.bonds[b]
            a = geom.n_sites + b
            t.rzz_clifford(i, a)          # exp(-i pi/4 Z_i Z_a)
            t.h(a)
            t.rzz_clifford(j, a)          # exp(-i pi/4 Z_j X_a)
            t.h(a)
    return t


class AffineSampler:
    """Computational-basis readout of a stabilizer state.

    The support of a stabilizer state is an affine subspace with uniform
    probability; sampling reduces to XOR-combining basis rows.
    """

    def __init__(self, tableau: Tableau):
        t = tableau.copy()
        n = t.n
        rows = list(range(n))
        pivots = []
        r = 0
        for col in range(n):
            pivot = next((k for k in range(r, n) if t.x[rows[k], col]), None)
            if pivot is None:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            for k in range(n):
                if k != r and t.x[rows[k], col]:
                    t.row_multiply(rows[k], rows[r])
            pivots.append(col)
            r += 1
        self.n = n
        self.rank = r
        self.basis = t.x[rows[:r]].copy()  # (rank, n) subspace directions
        # remaining rows are Z-only: linear constraints z.m = phase/2 (mod 2)
        zmat = t.z[rows[r:]].copy()
        rhs = (t.phase[rows[r:]] // 2).astype(np.uint8)
        if np.any((t.phase[rows[r:]] % 2) != 0) or np.any(t.x[rows[r:]]):
            raise AssertionError("inconsistent tableau reduction")
        self.offset = _solve_gf2(zmat, rhs, n)

    def sample(self, shots: int, rand) -> np.ndarray:
        """(shots, n) uint8 outcome bits; ``rand`` is a numpy Generator."""
        if self.rank == 0:
            return np.tile(self.offset, (shots, 1))
        r = rand.integers(0, 2, size=(shots, self.rank), dtype=np.uint8)
        return ((r @ self.basis + self.offset) % 2).astype(np.uint8)

    def exact_distribution(self) -> np.ndarray:
        """Full 2^n probability vector (oracle scale only)."""
        if self.n > 24:
            raise ValueError("exact distribution limited to 24 qubits")
        probs = np.zeros(1 << self.n)
        weight = 2.0 ** (-self.rank)
        for bits in range(1 << self.rank):
            r = np.array([(bits >> k) & 1 for k in range(self.rank)], dtype=np.uint8)
            m = (r @ self.basis + self.offset) % 2
            idx = int(np.dot(m.astype(np.uint64), 1 << np.arange(self.n, dtype=np.uint64)))
            probs[idx] += weight
        return probs


def _solve_gf2(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """One solution of a m = b over GF(2) (system is consistent by construction)."""
    a = a.copy()
    b = b.copy()
    rows = a.shape[0]
    sol = np.zeros(n, dtype=np.uint8)
    pivot_cols = []
    r = 0
    for col in range(n):
        pivot = next((k for k in range(r, rows) if a[k, col]), None)
        if pivot is None:
            continue
        a[[r, pivot]] = a[[pivot, r]]
        b[[r, pivot]] = b[[pivot, r]]
        mask = a[:, col].copy()
        mask[r] = 0
        a[mask == 1] ^= a[r]
        b[mask == 1] ^= b[r]
        pivot_cols.append(col)
        r += 1
    # reduced row-echelon form with free variables set to 0
    for k, col in enumerate(pivot_cols):
        sol[col] = b[k]
    return sol


def site_basis_sampler(tableau: Tableau, geom: LatticeGeometry, site_basis) -> AffineSampler:
    """Rotate per-site measurement bases onto Z and build an affine sampler.

    ``site_basis`` is a length-n_sites string of 'X', 'Y', 'Z'.  Auxiliaries
    are always read in their scheduled basis (plain Z after the gadget).
    """
    t = tableau.copy()
    for q, basis in enumerate(site_basis):
        if basis == "X":
            t.h(q)
        elif basis == "Y":
            t.sdg(q)
            t.h(q)
        elif basis != "Z":
            raise ValueError(f"unknown basis {basis!r}")
    return AffineSampler(t)


def tableau_sample(
    spec: CircuitSpec,
    p_s: float,
    p_sigma: float,
    shots: int,
    rand,
    site_basis: str = None,
    pauli_errors=(),
) -> dict:
    """Clifford-point shots with terminal readout flips.

    Returns raw site bits, aux bits, and post-noise versions along with
    the ferromagnetic syndrome signs.  ``pauli_errors`` is an iterable of
    (qubit, pauli) inserted just before readout; an error anticommuting
    with the measured operator deterministically flips that outcome bit.
    """
    geom = spec.geom
    n, b = geom.n_sites, geom.n_bonds
    basis = site_basis or "Z" * n
    sampler = site_basis_sampler(clifford_protocol_tableau(spec), geom, basis)
    bits = sampler.sample(shots, rand)
    site_bits = bits[:, :n].copy()
    aux_bits = bits[:, n:].copy()
    for q, pauli in pauli_errors:
        measured = basis[q] if q < n else "Z"  # aux gadget output basis
        if pauli != "I" and pauli != measured:  # anticommuting error flips the bit
            if q < n:
                site_bits[:, q] ^= 1
            else:
                aux_bits[:, q - n] ^= 1
    site_noisy = site_bits ^ (rand.random((shots, n)) < p_sigma).astype(np.uint8)
    aux_noisy = aux_bits ^ (rand.random((shots, b)) < p_s).astype(np.uint8)
    return {
        "site_bits": site_bits,
        "aux_bits": aux_bits,
        "site_bits_noisy": site_noisy.astype(np.uint8),
        "aux_bits_noisy": aux_noisy.astype(np.uint8),
        "s": (1 - 2 * aux_bits.astype(np.int8)).astype(np.int8),
        "s_prime": (1 - 2 * aux_noisy.astype(np.int8)).astype(np.int8),
        "basis": basis,
    }


# ----------------------------------------------------------------------
# brute-force ground state
# ----------------------------------------------------------------------

def brute_force_ground_state(geom: LatticeGeometry, couplings: np.ndarray):
    """Exhaustive minimum of E(sigma) = -sum_b s_b sigma_i sigma_j.

    The reference site (id 0) is gauge-fixed to +1; returns (sigma, E).
    """
    n = geom.n_sites
    if n > 24:
        raise ValueError("brute force limited to 24 sites")
    s_neg = (np.asarray(couplings) < 0).astype(np.uint8)
    ii, jj = geom.bond_endpoints()
    nb = geom.n_bonds
    best_e = None
    best_cfg = None
    chunk = 1 << 16
    total = 1 << (n - 1)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = np.zeros((idx.shape[0], n), dtype=np.uint8)
        for q in range(1, n):  # site 0 fixed to +1 (bit 0)
            bits[:, q] = (idx >> np.uint64(q - 1)) & np.uint64(1)
        unsat = (bits[:, ii] ^ bits[:, jj] ^ s_neg[None, :]).sum(axis=1)
        k = int(np.argmin(unsat))
        e = -nb + 2 * int(unsat[k])
        if best_e is None or e < best_e:
            best_e = e
            best_cfg = (1 - 2 * bits[k].astype(np.int8)).astype(np.int8)
    return best_cfg, best_e


# ----------------------------------------------------------------------
# exhaustive matching
# ----------------------------------------------------------------------

def exhaustive_matching(defects, distances: np.ndarray, boundary: int):
    """Optimal pairing weight over all matchings with per-defect boundary legs.

    Enumerates every way of pairing the defect list (each defect may instead
    be matched to the boundary node); limited to 12 defects.
    """
    defects = tuple(sorted(defects))
    if len(defects) > 12:
        raise ValueError("exhaustive matching limited to 12 defects")

    @lru_cache(maxsize=None)
    def best(remaining):
        if not remaining:
            return 0, ()
        first, rest = remaining[0], remaining[1:]
        w, pairs = best(rest)
        result = (w + int(distances[first, boundary]), pairs + ((first, boundary),))
        for k, other in enumerate(rest):
            sub_w, sub_p = best(rest[:k] + rest[k + 1 :])
            cand = sub_w + int(distances[first, other])
            if cand < result[0]:
                result = (cand, sub_p + ((first, other),))
        return result

    weight, pairs = best(defects)
    return weight, tuple(sorted(pairs))
