import numpy as np
import pytest
from hypothesis import given, strategies as st

from netctl import _kernels_py, kernels
from netctl.graph import DirectedNetwork

compiled = pytest.importorskip("netctl._kernels")


@st.composite
def digraphs(draw, max_n=14):
    n = draw(st.integers(1, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.sets(pairs, max_size=n * 3))
    return DirectedNetwork(n, sorted(edges))


def _cardinality(match_out):
    return int(np.sum(np.asarray(match_out) >= 0))


@given(digraphs())
def test_matching_backends_agree_on_size(net):
    ip, ix = net.csr
    a = compiled.hopcroft_karp(net.n, ip, ix)
    b = _kernels_py.hopcroft_karp(net.n, ip, ix)
    assert _cardinality(a[0]) == _cardinality(b[0])


@given(digraphs())
def test_matching_is_consistent(net):
    ip, ix = net.csr
    mo, mi = kernels.hopcroft_karp(net.n, ip, ix)
    edges = net.edge_set()
    for u, v in enumerate(mo):
        if v >= 0:
            assert (u, int(v)) in edges
            assert mi[v] == u


@given(digraphs(), st.data())
def test_bfs_backends_identical(net, data):
    sources = data.draw(st.sets(st.integers(0, net.n - 1), min_size=1))
    src = np.array(sorted(sources))
    ip, ix = net.csr
    d1, c1, p1 = compiled.bfs_layers(net.n, ip, ix, src)
    d2, c2, p2 = _kernels_py.bfs_layers(net.n, ip, ix, src)
    np.testing.assert_array_equal(d1, d2)
    np.testing.assert_array_equal(c1, c2)
    np.testing.assert_array_equal(p1, p2)


@given(digraphs())
def test_diameter_backends_identical(net):
    ip, ix = net.csr
    assert compiled.max_finite_distance(net.n, ip, ix) == _kernels_py.max_finite_distance(net.n, ip, ix)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
