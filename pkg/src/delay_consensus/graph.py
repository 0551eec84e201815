"""Weighted directed interaction graphs and their consensus-value algebra.

Vertices are agents.  An edge (i, j) means agent i receives information
from agent j; "agent i can reach k" follows edges in that orientation, so
a root is a vertex every other vertex can reach, i.e. an information
source.  Each edge carries two positive weights, one for the position
coupling (``w``) and one for the delayed averaging observer (``b``), plus
a communication delay in seconds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoSpanningTreeError

GAMMA_RESIDUAL_RTOL = 1e-9
GAMMA_CLAMP = 1e-12
SIMPLE_ZERO_RTOL = 1e-7


@dataclass(frozen=True)
class Edge:
    """Directed link: agent ``i`` listens to agent ``j``."""

    i: int
    j: int
    w: float
    b: float
    delay: float


@dataclass(frozen=True)
class LeaderLink:
    """Link from the virtual leader to ``agent`` (leader has no in-links)."""

    agent: int
    w: float
    b: float
    delay: float


@dataclass(frozen=True)
class WeightedDigraph:
    """Directed graph on ``n`` agents, optionally annotated with leader links.

    Invariants enforced at construction: no self-loops, no duplicate edges,
    both weights strictly positive on every listed edge (absent edges simply
    are not listed), and delays finite and nonnegative.
    """

    n: int
    edges: tuple[Edge, ...]
    leader_links: tuple[LeaderLink, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex count must be >= 1, got {self.n}")
        seen = set()
        for e in self.edges:
            if not (0 <= e.i < self.n and 0 <= e.j < self.n):
                raise ValueError(f"edge ({e.i}, {e.j}) out of range for n={self.n}")
            if e.i == e.j:
                raise ValueError(f"self-loop at vertex {e.i}")
            if (e.i, e.j) in seen:
                raise ValueError(f"duplicate edge ({e.i}, {e.j})")
            seen.add((e.i, e.j))
            if not (e.w > 0.0 and e.b > 0.0):
                raise ValueError(
                    f"edge ({e.i}, {e.j}) must carry positive w and b; "
                    f"got w={e.w}, b={e.b}"
                )
            if e.delay < 0.0 or not np.isfinite(e.delay):
                raise ValueError(f"edge ({e.i}, {e.j}) has invalid delay {e.delay}")
        agents = set()
        for l in self.leader_links:
            if not 0 <= l.agent < self.n:
                raise ValueError(f"leader link agent {l.agent} out of range")
            if l.agent in agents:
                raise ValueError(f"duplicate leader link for agent {l.agent}")
            agents.add(l.agent)
            if not (l.w > 0.0 and l.b > 0.0):
                raise ValueError(
                    f"leader link for agent {l.agent} must carry positive w and b"
                )
            if l.delay < 0.0 or not np.isfinite(l.delay):
                raise ValueError(f"leader link for agent {l.agent} has invalid delay")

    @staticmethod
    def from_lists(n, edges, leader_links=()) -> "WeightedDigraph":
        """Build from plain tuples: edges (i, j, w, b, T), links (agent, w, b, T)."""
        return WeightedDigraph(
            n,
            tuple(Edge(int(i), int(j), float(w), float(b), float(t)) for i, j, w, b, t in edges),
            tuple(LeaderLink(int(a), float(w), float(b), float(t)) for a, w, b, t in leader_links),
        )

    def neighbors(self, i: int) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.i == i)

    def leader_link_for(self, i: int):
        for l in self.leader_links:
            if l.agent == i:
                return l
        return None

    def w_matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for e in self.edges:
            out[e.i, e.j] = e.w
        return out

    def b_matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for e in self.edges:
            out[e.i, e.j] = e.b
        return out


def build_laplacian(g: WeightedDigraph, weights: str = "control") -> np.ndarray:
    """Laplacian of ``g``: diagonal entry i is the sum of agent i's in-weights,
    off-diagonal (i, j) is minus the weight of edge (i, j).  Rows sum to zero.

    ``weights`` selects the control ("control", the w set) or observer
    ("observer", the b set) weights.
    """
    if weights not in ("control", "observer"):
        raise ValueError(f"weights must be 'control' or 'observer', got {weights!r}")
    lap = np.zeros((g.n, g.n))
    for e in g.edges:
        wt = e.w if weights == "control" else e.b
        lap[e.i, e.j] -= wt
        lap[e.i, e.i] += wt
    return lap


def _reachability(g: WeightedDigraph) -> np.ndarray:
    """Boolean closure: entry (u, v) true iff v is reachable from u (u reaches itself)."""
    reach = np.eye(g.n, dtype=bool)
    for e in g.edges:
        reach[e.i, e.j] = True
    for k in range(g.n):
        reach |= np.outer(reach[:, k], reach[k, :])
    return reach


def root_vertices(g: WeightedDigraph) -> tuple[int, ...]:
    """Vertices reachable from every other vertex (the information sources)."""
    reach = _reachability(g)
    return tuple(int(v) for v in range(g.n) if reach[:, v].all())


def has_spanning_tree(g: WeightedDigraph) -> bool:
    """True iff some vertex is reachable from every other vertex."""
    return len(root_vertices(g)) > 0


def compute_gamma(laplacian: np.ndarray) -> np.ndarray:
    """Nonnegative left null vector of a Laplacian, normalized to sum 1.

    Computed from the singular decomposition; the zero eigenvalue must be
    simple (second-smallest singular value above 1e-7 times the matrix
    norm), otherwise NoSpanningTreeError is raised.  Entries with magnitude
    below 1e-12 are clamped to exactly zero and the vector renormalized.
    """
    lap = np.asarray(laplacian, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {lap.shape}")
    n = lap.shape[0]
    if n == 1:
        return np.array([1.0])
    scale = np.linalg.norm(lap)
    if scale == 0.0:
        raise NoSpanningTreeError("zero Laplacian: the zero eigenvalue is not simple")
    u, sing, _ = np.linalg.svd(lap)
    if sing[-2] <= SIMPLE_ZERO_RTOL * scale:
        raise NoSpanningTreeError(
            "zero eigenvalue of the Laplacian is not simple "
            f"(second-smallest singular value {sing[-2]:.3e} vs norm {scale:.3e})"
        )
    vec = u[:, -1]
    total = vec.sum()
    if abs(total) < 1e-12:
        raise NoSpanningTreeError("left null vector has near-zero sum; graph is degenerate")
    gamma = vec / total
    gamma[np.abs(gamma) < GAMMA_CLAMP] = 0.0
    if (gamma < 0.0).any():
        raise NoSpanningTreeError("left null vector is not sign-definite; graph is degenerate")
    gamma = gamma / gamma.sum()
    residual = np.linalg.norm(gamma @ lap)
    if residual > GAMMA_RESIDUAL_RTOL * scale:
        raise NoSpanningTreeError(
            f"left eigenvector residual {residual:.3e} exceeds tolerance"
        )
    return gamma


def observer_gamma(g: WeightedDigraph) -> np.ndarray:
    """Left null vector of the observer-weight Laplacian.

    This is the vector that weights initial velocities in the observer's
    final value; it coincides with the control-weight vector whenever the
    two weight sets are proportional.
    """
    return compute_gamma(build_laplacian(g, "observer"))


def compute_sigma_s(g: WeightedDigraph, gamma: np.ndarray) -> float:
    """Delay-dependent scalar 1 / (1 + sum_i sum_j gamma_i w_ij T_ij), in (0, 1]."""
    gamma = np.asarray(gamma, dtype=float)
    acc = 0.0
    for e in g.edges:
        acc += gamma[e.i] * e.w * e.delay
    return 1.0 / (1.0 + acc)


def predict_consensus_velocity(g: WeightedDigraph, gamma: np.ndarray, v0) -> np.ndarray:
    """Closed-form consensus value of the delayed averaging observer.

    Returns the gamma-weighted mean of the initial velocities ``v0``
    (one vector per agent), scaled by 1 / (1 + sum gamma_k b_kj T_kj).
    """
    gamma = np.asarray(gamma, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if v0.ndim == 1:
        v0 = v0[:, None]
    if v0.shape[0] != g.n:
        raise ValueError(f"expected {g.n} initial velocities, got {v0.shape[0]}")
    denom = 1.0
    for e in g.edges:
        denom += gamma[e.i] * e.b * e.delay
    return (gamma @ v0) / denom


def leader_augmented(g: WeightedDigraph) -> WeightedDigraph:
    """Graph on n+1 vertices with the leader as vertex 0 (no in-edges).

    Follower indices shift up by one; leader links become ordinary edges
    into vertex 0.  Follower edges keep their relative order, leader edges
    come last, so per-agent neighbor ordering matches the dedicated leader
    mode of the simulator.
    """
    edges = [Edge(e.i + 1, e.j + 1, e.w, e.b, e.delay) for e in g.edges]
    edges += [Edge(l.agent + 1, 0, l.w, l.b, l.delay) for l in g.leader_links]
    return WeightedDigraph(g.n + 1, tuple(edges))


@dataclass(frozen=True, eq=False)
class LaplacianBundle:
    """Laplacian, left eigenvector, delay scalar and spanning-tree verdict of one graph."""

    laplacian: np.ndarray
    gamma: np.ndarray
    sigma_s: float
    has_spanning_tree: bool


def analyze_graph(g: WeightedDigraph) -> LaplacianBundle:
    """Bundle of Laplacian facts for ``g``; raises NoSpanningTreeError if there is no spanning tree."""
    if not has_spanning_tree(g):
        raise NoSpanningTreeError("graph has no spanning tree")
    lap = build_laplacian(g)
    gamma = compute_gamma(lap)
    return LaplacianBundle(lap, gamma, compute_sigma_s(g, gamma), True)
