"""Maximum matching, driver nodes and control-signal paths (CSPs)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConsistencyError, ParameterError

__all__ = [
    "MatchingResult",
    "ControlMatrix",
    "maximum_matching",
    "control_signal_paths",
    "control_matrix",
]


@dataclass(frozen=True)
class MatchingResult:
    """Outcome of a maximum matching on a network.

    ``csps`` partition the nodes.  A CSP is a driver followed by its matched
    successors; matched cycles the driver reaches are appended after it, each
    starting at the node recorded in ``cycle_heads``.  Cycles no driver can
    reach are appended to the first CSP and listed in ``inaccessible``.
    """

    n: int
    matched_edges: frozenset
    drivers: tuple
    csps: tuple
    non_path_edges: frozenset
    cycle_heads: frozenset = frozenset()
    inaccessible: tuple = ()
    edges: frozenset = field(default=frozenset(), repr=False)

    @property
    def n_drivers(self):
        return len(self.drivers)

    @property
    def driver_density(self):
        return len(self.drivers) / self.n

    def to_dict(self):
        return {
            "drivers": list(self.drivers),
            "csps": [list(p) for p in self.csps],
            "matched": sorted([u, v] for u, v in self.matched_edges),
        }


@dataclass(frozen=True)
class ControlMatrix:
    """Input matrix described by the node each input column drives.

    ``gains`` scales each column (1.0 for plain network inputs).
    """

    n: int
    input_columns: tuple
    gains: tuple | None = None

    def __post_init__(self):
        cols = tuple(int(c) for c in self.input_columns)
        if not cols or len(cols) > self.n:
            raise ParameterError(f"need 1..{self.n} input columns, got {len(cols)}")
        if any(c < 0 or c >= self.n for c in cols):
            raise ParameterError("input column node outside 0..n-1")
        gains = tuple(1.0 for _ in cols) if self.gains is None else tuple(float(g) for g in self.gains)
        if len(gains) != len(cols):
            raise ParameterError("one gain per input column required")
        object.__setattr__(self, "input_columns", cols)
        object.__setattr__(self, "gains", gains)

    @property
    def m(self):
        return len(self.input_columns)

    @property
    def duplicates(self):
        seen, dup = set(), []
        for c in self.input_columns:
            if c in seen:
                dup.append(c)
            seen.add(c)
        return dup

    def dense(self):
        b = np.zeros((self.n, self.m))
        b[list(self.input_columns), np.arange(self.m)] = self.gains
        return b

    def with_inputs(self, nodes, gain=1.0):
        nodes = tuple(int(x) for x in nodes)
        return ControlMatrix(self.n, self.input_columns + nodes, self.gains + (gain,) * len(nodes))


def maximum_matching(net):
    """Maximum matching of ``net`` and the resulting driver set and CSPs.

    Drivers are nodes whose in-copy is unmatched; a perfect matching yields
    the single driver 0.
    """
    n = net.n
    indptr, indices = net.csr
    match_out, match_in = kernels.hopcroft_karp(n, indptr, indices)
    match_out = [int(x) for x in match_out]
    match_in = [int(x) for x in match_in]

    matched = frozenset((u, v) for u, v in enumerate(match_out) if v >= 0)
    all_edges = net.edge_set()
    drivers = [v for v in range(n) if match_in[v] == -1]
    if not drivers:
        drivers = [0]

    owner = [-1] * n
    csps = []
    for d in drivers:
        path = [d]
        owner[d] = len(csps)
        u = match_out[d]
        while u >= 0 and owner[u] == -1:
            owner[u] = len(csps)
            path.append(u)
            u = match_out[u]
        csps.append(path)

    # remaining nodes sit on matched cycles
    cycles = []
    for start in range(n):
        if owner[start] != -1:
            continue
        cyc = [start]
        owner[start] = -2
        u = match_out[start]
        while u != start:
            cyc.append(u)
            owner[u] = -2
            u = match_out[u]
        cycles.append(cyc)

    cycle_heads = set()
    pending = list(cycles)
    progress = True
    while pending and progress:
        progress = False
        for cyc in list(pending):
            members = set(cyc)
            best = None
            for u in cyc:
                p0, p1 = net.csr_in[0][u], net.csr_in[0][u + 1]
                for w in net.csr_in[1][p0:p1]:
                    w = int(w)
                    if w not in members and owner[w] >= 0 and (best is None or owner[w] < best):
                        best = owner[w]
            if best is not None:
                for u in cyc:
                    owner[u] = best
                csps[best].extend(cyc)
                cycle_heads.add(cyc[0])
                pending.remove(cyc)
                progress = True

    inaccessible = []
    for cyc in pending:
        for u in cyc:
            owner[u] = 0
        csps[0].extend(cyc)
        cycle_heads.add(cyc[0])
        inaccessible.extend(cyc)

    return MatchingResult(
        n=n,
        matched_edges=matched,
        drivers=tuple(drivers),
        csps=tuple(tuple(p) for p in csps),
        non_path_edges=frozenset(all_edges - matched),
        cycle_heads=frozenset(cycle_heads),
        inaccessible=tuple(sorted(inaccessible)),
        edges=frozenset(all_edges),
    )


def control_signal_paths(result):
    """Return ``result.csps`` after checking the partition invariants."""
    n = result.n
    seen = [0] * n
    for p in result.csps:
        for u in p:
            seen[u] += 1
    if any(c != 1 for c in seen):
        raise ConsistencyError("CSPs do not partition the node set")
    drivers = set(result.drivers)
    if len(result.csps) != len(drivers):
        raise ConsistencyError("one CSP per driver expected")
    heads_out, heads_in = set(), set()
    for u, v in result.matched_edges:
        if u in heads_out or v in heads_in:
            raise ConsistencyError("matched edges share an endpoint")
        heads_out.add(u)
        heads_in.add(v)
    for p in result.csps:
        if p[0] not in drivers:
            raise ConsistencyError(f"CSP {p} does not start at a driver")
        for a, b in zip(p, p[1:]):
            if b in result.cycle_heads:
                continue
            if (a, b) not in result.matched_edges:
                raise ConsistencyError(f"CSP step {a}->{b} is not a matched edge")
    expected = max(n - len(result.matched_edges), 1)
    if len(drivers) != expected:
        raise ConsistencyError(f"{len(drivers)} drivers, expected {expected}")
    if result.edges and (result.matched_edges | result.non_path_edges) != result.edges:
        raise ConsistencyError("matched and non-path edges must cover every edge")
    if result.matched_edges & result.non_path_edges:
        raise ConsistencyError("matched and non-path edges overlap")
    return [list(p) for p in result.csps]


def control_matrix(result, extra_inputs=()):
    """Input matrix with one column per driver, then one per extra node."""
    extras = sorted({int(x) for x in extra_inputs})
    overlap = set(extras) & set(result.drivers)
    if overlap:
        raise ParameterError(f"extra inputs overlap drivers: {sorted(overlap)}")
    return ControlMatrix(result.n, tuple(sorted(result.drivers)) + tuple(extras))
