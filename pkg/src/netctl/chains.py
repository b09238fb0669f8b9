"""Control chains: longest control chains (LCCs), control diameter and degeneracy.

A control chain is a shortest directed path from the driver set to a node,
taken through the whole graph and measured in nodes (a driver is depth 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError

__all__ = ["ChainProfile", "control_profile", "topological_diameter"]


@dataclass(frozen=True)
class ChainProfile:
    d_c: int
    m: int
    end_nodes: tuple
    lcc_paths: tuple
    lcc_count: float
    depths: np.ndarray
    unreachable: tuple

    @property
    def per_node_depth(self):
        """Depth per node with ``inf`` for nodes no driver reaches."""
        return [math.inf if d == 0 else int(d) for d in self.depths]

    def to_dict(self):
        return {
            "dc": self.d_c,
            "m": self.m,
            "end_nodes": list(self.end_nodes),
            "depths": [None if d == 0 else int(d) for d in self.depths],
        }


def control_profile(net, drivers):
    """Multi-source BFS from ``drivers``; returns the chain profile."""
    drivers = sorted({int(d) for d in drivers})
    if not drivers:
        raise ParameterError("driver set must be non-empty")
    if drivers[0] < 0 or drivers[-1] >= net.n:
        raise ParameterError("driver outside 0..n-1")
    indptr, indices = net.csr
    depth, count, parent = kernels.bfs_layers(net.n, indptr, indices, np.asarray(drivers))
    d_c = int(depth.max())
    end_nodes = tuple(int(v) for v in np.flatnonzero(depth == d_c))
    paths = []
    for v in end_nodes:
        path = [v]
        while parent[path[-1]] >= 0:
            path.append(int(parent[path[-1]]))
        paths.append(tuple(reversed(path)))
    depth.setflags(write=False)
    return ChainProfile(
        d_c=d_c,
        m=len(end_nodes),
        end_nodes=end_nodes,
        lcc_paths=tuple(paths),
        lcc_count=float(count[list(end_nodes)].sum()),
        depths=depth,
        unreachable=tuple(int(v) for v in np.flatnonzero(depth == 0)),
    )


def topological_diameter(net):
    """Longest finite directed shortest-path distance, in edges."""
    indptr, indices = net.csr
    return kernels.max_finite_distance(net.n, indptr, indices)
