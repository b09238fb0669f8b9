"""Directed networks, biased-orientation generators and degree-distribution theory.

Dynamics convention: the system matrix has ``A[i, j] = w`` for an edge
``j -> i`` of weight ``w``, so ``dx_i/dt`` is driven by the in-neighbours
of ``i``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, ParameterError, ParseError

__all__ = [
    "DirectedNetwork",
    "DegreeModel",
    "generate_er",
    "generate_ba",
    "load_edge_list",
    "dump_edge_list",
    "analytic_degree_pdf",
    "orient_by_degree",
]


@dataclass(frozen=True, eq=False)
class DirectedNetwork:
    """Immutable directed graph on nodes ``0..n-1``.

    ``edges`` is an ``(E, 2)`` integer array of ``(src, dst)`` pairs kept in
    lexicographic order; ``weights`` has one entry per edge.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ParameterError(f"network needs at least one node, got n={n}")
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ParameterError("edge endpoint outside 0..n-1")
        if self.weights is None:
            weights = np.ones(len(edges))
        else:
            weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
            if len(weights) != len(edges):
                raise ParameterError("weights must have one entry per edge")
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        weights = weights[order]
        if len(edges) > 1:
            dup = np.all(edges[1:] == edges[:-1], axis=1)
            if dup.any():
                i = int(np.flatnonzero(dup)[0])
                raise ParameterError(f"duplicate edge {tuple(edges[i])}")
        edges.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def csr(self):
        """Out-adjacency ``(indptr, indices)`` with ascending neighbours."""
        src = self.edges[:, 0]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        indices = np.ascontiguousarray(self.edges[:, 1])
        return indptr, indices

    @cached_property
    def csr_in(self):
        """In-adjacency ``(indptr, indices)``: predecessors of each node."""
        order = np.lexsort((self.edges[:, 0], self.edges[:, 1]))
        dst = self.edges[order, 1]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(dst, minlength=self.n), out=indptr[1:])
        return indptr, np.ascontiguousarray(self.edges[order, 0])

    def out_degree(self):
        return np.bincount(self.edges[:, 0], minlength=self.n)

    def in_degree(self):
        return np.bincount(self.edges[:, 1], minlength=self.n)

    def adjacency(self):
        """Dense system matrix, ``A[dst, src] = weight``."""
        a = np.zeros((self.n, self.n))
        a[self.edges[:, 1], self.edges[:, 0]] = self.weights
        return a

    def has_self_loops(self):
        return bool(np.any(self.edges[:, 0] == self.edges[:, 1]))

    def edge_set(self):
        return {(int(s), int(d)) for s, d in self.edges}

    def to_dict(self):
        out = {"n": self.n, "edges": self.edges.tolist()}
        if not np.all(self.weights == 1.0):
            out["weights"] = self.weights.tolist()
        out["meta"] = dict(self.metadata)
        return out

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        try:
            n = int(data["n"])
            edges = data["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed graph document: {exc}") from None
        return cls(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2),
                   data.get("weights"), dict(data.get("meta", {})))

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), line=exc.lineno) from None
        return cls.from_dict(data)


def orient_by_degree(n, i, j, pb, rng):
    """Orient undirected edges ``(i, j)`` by the degree-bias rule.

    An edge between endpoints of unequal degree points from the higher- to
    the lower-degree node with probability ``pb`` and the other way with
    ``1 - pb``; equal-degree edges get a fair coin.  Degrees are those of
    the undirected graph before any edge is oriented.
    """
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    deg = np.bincount(i, minlength=n) + np.bincount(j, minlength=n)
    di, dj = deg[i], deg[j]
    hi = np.where(di > dj, i, j)
    lo = np.where(di > dj, j, i)
    coin = rng.random(len(i))
    tie = di == dj
    down = coin < pb
    src = np.where(tie, np.where(coin < 0.5, i, j), np.where(down, hi, lo))
    dst = np.where(tie, np.where(coin < 0.5, j, i), np.where(down, lo, hi))
    return np.column_stack([src, dst])


def _check_pb(pb):
    if not 0.0 <= pb <= 1.0:
        raise ParameterError(f"pb must lie in [0, 1], got {pb}")


def generate_er(n, avg_k, pb, seed):
    """Erdős–Rényi graph with mean degree ``avg_k``, oriented by degree bias."""
    n = int(n)
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    if not 0.0 < avg_k < n - 1:
        raise ParameterError(f"avg_k must lie in (0, n-1), got {avg_k}")
    _check_pb(pb)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < avg_k / (n - 1)
    edges = orient_by_degree(n, iu[keep], ju[keep], pb, rng)
    meta = {"generator": "er", "avg_k": float(avg_k), "pb": float(pb), "seed": seed}
    return DirectedNetwork(n, edges, metadata=meta)


def generate_ba(n, m_attach, pb, seed):
    """Barabási–Albert preferential attachment, oriented by degree bias.

    Node ``m_attach`` joins the ``m_attach`` seed nodes; every later node
    attaches to ``m_attach`` distinct targets drawn proportionally to degree.
    """
    n, m = int(n), int(m_attach)
    # at least two newcomers, so attachment is actually preferential
    if m < 1 or m >= n - 1:
        raise ParameterError(f"need n - 1 > m_attach >= 1, got n={n}, m_attach={m}")
    _check_pb(pb)
    rng = np.random.default_rng(seed)
    targets = list(range(m))
    repeated = []
    us, vs = [], []
    for source in range(m, n):
        us.extend([source] * m)
        vs.extend(targets)
        repeated.extend(targets)
        repeated.extend([source] * m)
        chosen = set()
        while len(chosen) < m:
            chosen.add(repeated[int(rng.integers(len(repeated)))])
        targets = sorted(chosen)
    edges = orient_by_degree(n, np.array(us), np.array(vs), pb, rng)
    meta = {"generator": "ba", "m_attach": m, "pb": float(pb), "seed": seed}
    return DirectedNetwork(n, edges, metadata=meta)


def load_edge_list(text, drop_self_loops=False):
    """Parse whitespace-separated ``src dst`` lines; ``#`` starts a comment line.

    Duplicate edges collapse to one.  The returned network's metadata carries
    ``duplicates_collapsed`` and ``self_loops_dropped`` counts.
    """
    if hasattr(text, "read"):
        text = text.read()
    seen = set()
    edges = []
    dups = loops = 0
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'src dst', got {line!r}", line=lineno)
        try:
            s, d = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {line!r}", line=lineno) from None
        if s < 0 or d < 0:
            raise ParseError(f"negative node id in {line!r}", line=lineno)
        max_id = max(max_id, s, d)
        if s == d and drop_self_loops:
            loops += 1
            continue
        if (s, d) in seen:
            dups += 1
            continue
        seen.add((s, d))
        edges.append((s, d))
    if max_id < 0:
        raise ParseError("empty edge list", line=0)
    meta = {"source": "edge_list", "duplicates_collapsed": dups, "self_loops_dropped": loops}
    return DirectedNetwork(max_id + 1, np.array(edges, dtype=np.int64).reshape(-1, 2), metadata=meta)


def dump_edge_list(net):
    return "".join(f"{s} {d}\n" for s, d in net.edges)


@dataclass(frozen=True)
class DegreeModel:
    """Power-law undirected degree law ``P(k) = C k^-gamma`` on ``[k_min, k_max]``.

    ``lam`` is the orientation bias (the generators' ``pb``).  When
    ``c_norm`` is omitted the continuous normalisation on ``[k_min, inf)``
    is used.
    """

    gamma: float
    lam: float
    k_min: float = 1.0
    k_max: float = math.inf
    c_norm: float | None = None

    def __post_init__(self):
        if self.gamma <= 2:
            raise DomainError(f"gamma must exceed 2 (mean degree diverges), got {self.gamma}")
        if not 0.0 <= self.lam <= 1.0:
            raise ParameterError(f"lam must lie in [0, 1], got {self.lam}")
        if self.k_min < 1:
            raise ParameterError("k_min must be >= 1")
        if self.c_norm is None:
            object.__setattr__(self, "c_norm", (self.gamma - 1) * self.k_min ** (self.gamma - 1))
        elif self.c_norm <= 0:
            raise ParameterError("c_norm must be positive")

    @property
    def mean_k(self):
        return (self.gamma - 1) / (self.gamma - 2) * self.k_min

    @property
    def a_const(self):
        """Coefficient of ``k_L = A k^(3-gamma)``, the count of larger-degree neighbours."""
        return self.c_norm / (self.mean_k * (self.gamma - 2))

    def pk(self, k):
        return self.c_norm * np.power(k, -self.gamma)

    def directed_degree(self, k, side):
        """Expected out- or in-degree of a node with undirected degree ``k``."""
        a, g, lam = self.a_const, self.gamma, self.lam
        k_large = a * np.power(k, 3 - g)
        if side == "out":
            return (1 - 2 * lam) * k_large + lam * k
        return (1 - lam) * k + (2 * lam - 1) * k_large

    def directed_slope(self, k, side):
        a, g, lam = self.a_const, self.gamma, self.lam
        dk_large = a * (3 - g) * np.power(k, 2 - g)
        if side == "out":
            return (1 - 2 * lam) * dk_large + lam
        return (1 - lam) + (2 * lam - 1) * dk_large


def analytic_degree_pdf(model, k, side="out"):
    """Density of the out- (or in-) degree implied by ``model`` at ``k``.

    Closed forms cover ``lam`` in {0, 0.5, 1} and ``gamma == 3``; any other
    combination inverts the degree map numerically and sums
    ``P(k') / |f'(k')|`` over its preimages.
    """
    if side not in ("out", "in"):
        raise ParameterError("side must be 'out' or 'in'")
    if k <= 0:
        return 0.0
    g, lam, c = model.gamma, model.lam, model.c_norm
    # the in-degree law at lam equals the out-degree law at 1 - lam
    eff = lam if side == "out" else 1.0 - lam

    if eff == 0.5:
        return 2 ** (1 - g) * c * k ** (-g)
    if g == 3:
        if eff == 0.0:
            raise DomainError("gamma=3 with all edges up-degree collapses the degree to a point mass")
        return c * eff ** (g - 1) * (k + (2 * eff - 1) * model.k_min) ** (-g)
    if eff == 0.0:
        a = model.a_const
        return abs(c / (3 - g)) * a ** (1 / (3 - g)) * k ** (2 / (g - 3))
    return _numeric_pdf(model, k, side)


def _numeric_pdf(model, k_obs, side):
    hi = model.k_max if math.isfinite(model.k_max) else max(1e6, 1e3 * k_obs)
    grid = np.geomspace(model.k_min, hi, 4001)
    resid = model.directed_degree(grid, side) - k_obs
    total = 0.0
    for idx in np.flatnonzero(np.sign(resid[:-1]) * np.sign(resid[1:]) <= 0):
        lo_k, hi_k = grid[idx], grid[idx + 1]
        f = lambda x: float(model.directed_degree(x, side) - k_obs)
        if f(lo_k) == 0.0:
            root = lo_k
        elif f(hi_k) == 0.0:
            continue
        else:
            root = brentq(f, lo_k, hi_k, xtol=1e-12, rtol=1e-12)
        slope = abs(float(model.directed_slope(root, side)))
        if slope > 0:
            total += float(model.pk(root)) / slope
    return total
