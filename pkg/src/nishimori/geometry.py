"""Lattice construction: brickwall honeycomb patches, 1D chains, dual graphs.

Site ids are assigned row-major and bond ids in a fixed scan order, so a
given size always produces byte-identical geometry (and serialization).
The dual graph has one node per plaquette plus a single virtual boundary
node adjacent to every bond that borders only one plaquette.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class LatticeGeometry:
    kind: str                   # "chain" | "brickwall" | "hexagon"
    size: int                   # L_y for brickwall, N for chain
    n_sites: int
    bonds: tuple                # ((site_i, site_j, aux_id), ...)
    plaquettes: tuple           # tuple of bond-id tuples (6 bonds each in 2D)
    # derived, filled in __post_init__
    bond_faces: tuple = field(default=None)
    dual_adjacency: tuple = field(default=None)
    tree_paths: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        faces = [[] for _ in self.bonds]
        for p, cycle in enumerate(self.plaquettes):
            for b in cycle:
                faces[b].append(p)
        for f in faces:
            if len(f) > 2:
                raise ValueError("a bond may border at most two plaquettes")
        object.__setattr__(self, "bond_faces", tuple(tuple(f) for f in faces))
        object.__setattr__(self, "dual_adjacency", self._build_dual())
        object.__setattr__(self, "tree_paths", self._build_tree_paths())

    # --- basic counts -------------------------------------------------
    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    @property
    def n_plaquettes(self) -> int:
        return len(self.plaquettes)

    @property
    def n_qubits(self) -> int:
        """System plus auxiliary qubits."""
        return self.n_sites + self.n_bonds

    @property
    def boundary_node(self) -> int:
        """Dual index of the virtual boundary node."""
        return self.n_plaquettes

    @property
    def is_2d(self) -> bool:
        return self.n_plaquettes > 0

    # --- dual structure -----------------------------------------------
    def _build_dual(self):
        """Adjacency (neighbor, bond_id) per dual node; parallel dual edges
        are collapsed keeping the smallest bond id."""
        nb = self.n_plaquettes
        best = {}
        for b, fs in enumerate(self.bond_faces):
            if len(fs) == 2:
                u, v = fs
            elif len(fs) == 1:
                u, v = fs[0], nb
            else:
                continue
            k = (min(u, v), max(u, v))
            if k not in best or b < best[k]:
                best[k] = b
        adj = [[] for _ in range(nb + 1)]
        for (u, v), b in sorted(best.items()):
            adj[u].append((v, b))
            adj[v].append((u, b))
        return tuple(tuple(sorted(a)) for a in adj)

    def _build_tree_paths(self) -> np.ndarray:
        """(n_sites, n_bonds) 0/1 matrix: bonds on the BFS-tree path from
        the reference site (id 0) to each site."""
        n, b = self.n_sites, self.n_bonds
        adj = [[] for _ in range(n)]
        for bid, (i, j, _aux) in enumerate(self.bonds):
            adj[i].append((j, bid))
            adj[j].append((i, bid))
        for a in adj:
            a.sort()
        paths = np.zeros((n, b), dtype=np.uint8)
        seen = [False] * n
        seen[0] = True
        q = deque([0])
        while q:
            u = q.popleft()
            for v, bid in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    paths[v] = paths[u]
                    paths[v, bid] = 1
                    q.append(v)
        if not all(seen):
            raise ValueError("geometry is not connected")
        return paths

    def plaquette_bond_matrix(self) -> np.ndarray:
        """(n_plaquettes, n_bonds) 0/1 membership matrix."""
        m = np.zeros((self.n_plaquettes, self.n_bonds), dtype=np.uint8)
        for p, cycle in enumerate(self.plaquettes):
            for b in cycle:
                m[p, b] = 1
        return m

    def bond_endpoints(self):
        ii = np.array([b[0] for b in self.bonds], dtype=np.int64)
        jj = np.array([b[1] for b in self.bonds], dtype=np.int64)
        return ii, jj

    # --- serialization ------------------------------------------------
    def serialize(self) -> str:
        """Plain-text adjacency format consumed by debug and figure tooling."""
        lines = [f"kind {self.kind}", f"size {self.size}", f"sites {self.n_sites}"]
        for i, j, aux in self.bonds:
            lines.append(f"{i} {j} {aux}")
        for cycle in self.plaquettes:
            lines.append("plaquette " + " ".join(str(b) for b in cycle))
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()


def build_brickwall(L_y: int) -> LatticeGeometry:
    """Open-boundary honeycomb patch in brickwall form with ``L_y`` qubit columns.

    The patch is a wall of (L_y-1) rows by 2(L_y-1) bricks, odd rows shifted
    by half a brick.  Qubit totals reproduce the 21/63/125 device layouts
    for L_y = 2, 3, 4.
    """
    if L_y < 2:
        raise ValueError("brickwall needs L_y >= 2")
    rows = L_y - 1
    cols = 2 * (L_y - 1)
    off = [r % 2 for r in range(rows)]

    def line_range(y):
        spans = []
        if y > 0:
            spans.append((off[y - 1], off[y - 1] + 2 * cols))
        if y < rows:
            spans.append((off[y], off[y] + 2 * cols))
        return min(s[0] for s in spans), max(s[1] for s in spans)

    site_id = {}
    for y in range(rows + 1):
        lo, hi = line_range(y)
        for x in range(lo, hi + 1):
            site_id[(x, y)] = len(site_id)

    bonds = []
    bond_id = {}
    for y in range(rows + 1):
        lo, hi = line_range(y)
        for x in range(lo, hi):
            bond_id[((x, y), (x + 1, y))] = len(bonds)
            bonds.append((site_id[(x, y)], site_id[(x + 1, y)]))
        if y < rows:
            for j in range(cols + 1):
                x = off[y] + 2 * j
                bond_id[((x, y), (x, y + 1))] = len(bonds)
                bonds.append((site_id[(x, y)], site_id[(x, y + 1)]))

    plaquettes = []
    for r in range(rows):
        for j in range(cols):
            x0 = off[r] + 2 * j
            cycle = (
                bond_id[((x0, r), (x0 + 1, r))],
                bond_id[((x0 + 1, r), (x0 + 2, r))],
                bond_id[((x0 + 2, r), (x0 + 2, r + 1))],
                bond_id[((x0 + 1, r + 1), (x0 + 2, r + 1))],
                bond_id[((x0, r + 1), (x0 + 1, r + 1))],
                bond_id[((x0, r), (x0, r + 1))],
            )
            plaquettes.append(cycle)

    n = len(site_id)
    full = tuple((i, j, n + b) for b, (i, j) in enumerate(bonds))
    return LatticeGeometry("brickwall", L_y, n, full, tuple(plaquettes))


def build_chain(n_sites: int) -> LatticeGeometry:
    """1D chain of ``n_sites`` system qubits with one auxiliary per bond."""
    if n_sites < 2:
        raise ValueError("chain needs N >= 2")
    bonds = tuple((k, k + 1, n_sites + k) for k in range(n_sites - 1))
    return LatticeGeometry("chain", n_sites, n_sites, bonds, ())


def build_hexagon() -> LatticeGeometry:
    """Single hexagonal plaquette (6 sites, 6 bonds); oracle-scale geometry."""
    bonds = tuple((k, (k + 1) % 6, 6 + k) for k in range(6))
    return LatticeGeometry("hexagon", 1, 6, bonds, (tuple(range(6)),))


def defect_distances(geom: LatticeGeometry) -> np.ndarray:
    """All-pairs BFS hop distances on the dual graph, boundary node included.

    Row/column ``geom.boundary_node`` is the boundary.  Requires a 2D
    geometry (chains have no plaquettes to match).
    """
    if not geom.is_2d:
        raise ValueError("defect distances need a 2D geometry")
    nn = geom.n_plaquettes + 1
    dist = np.full((nn, nn), -1, dtype=np.int64)
    for src in range(nn):
        dist[src, src] = 0
        q = deque([src])
        while q:
            u = q.popleft()
            for v, _b in geom.dual_adjacency[u]:
                if dist[src, v] < 0:
                    dist[src, v] = dist[src, u] + 1
                    q.append(v)
    return dist


def dual_shortest_path_bonds(geom: LatticeGeometry, u: int, v: int) -> tuple:
    """Bond ids along one deterministic shortest dual path from u to v."""
    if u == v:
        return ()
    parent = {u: (None, None)}
    q = deque([u])
    while q:
        w = q.popleft()
        if w == v:
            break
        for x, b in geom.dual_adjacency[w]:
            if x not in parent:
                parent[x] = (w, b)
                q.append(x)
    bonds = []
    w = v
    while parent[w][0] is not None:
        bonds.append(parent[w][1])
        w = parent[w][0]
    return tuple(reversed(bonds))
