import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from netctl.errors import DomainError, ParameterError, ParseError
from netctl.graph import (
    DegreeModel,
    DirectedNetwork,
    analytic_degree_pdf,
    dump_edge_list,
    generate_ba,
    generate_er,
    load_edge_list,
)
from netctl.models import fit_power_law


def _undirected_degree(net):
    return net.out_degree() + net.in_degree()


def _uphill_fraction(net):
    """Share of unequal-degree edges pointing from the lower to the higher degree."""
    deg = _undirected_degree(net)
    s, d = net.edges[:, 0], net.edges[:, 1]
    neq = deg[s] != deg[d]
    return np.mean(deg[s][neq] < deg[d][neq]) if neq.any() else math.nan


class TestNetwork:
    def test_adjacency_convention(self):
        net = DirectedNetwork(3, [(0, 1), (2, 1)], weights=[2.0, 3.0])
        a = net.adjacency()
        assert a[1, 0] == 2.0 and a[1, 2] == 3.0
        assert a.sum() == 5.0

    def test_rejects_out_of_range(self):
        with pytest.raises(ParameterError):
            DirectedNetwork(2, [(0, 2)])

    def test_rejects_duplicates(self):
        with pytest.raises(ParameterError):
            DirectedNetwork(2, [(0, 1), (0, 1)])

    def test_immutable(self):
        net = DirectedNetwork(2, [(0, 1)])
        with pytest.raises(ValueError):
            net.edges[0, 0] = 1

    def test_json_round_trip(self):
        net = DirectedNetwork(4, [(3, 0), (0, 1)], weights=[1.5, 1.0], metadata={"x": 1})
        back = DirectedNetwork.from_json(net.to_json())
        assert back.edge_set() == net.edge_set()
        np.testing.assert_array_equal(back.adjacency(), net.adjacency())
        doc = json.loads(net.to_json())
        assert set(doc) == {"n", "edges", "weights", "meta"}

    def test_unit_weights_omitted(self):
        assert "weights" not in DirectedNetwork(2, [(0, 1)]).to_dict()

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            DirectedNetwork.from_json('{"edges": []}')


class TestGenerators:
    def test_er_deterministic(self):
        a = generate_er(100, 6, 0.1, 7)
        b = generate_er(100, 6, 0.1, 7)
        assert a.edges.tobytes() == b.edges.tobytes()

    @pytest.mark.parametrize("seed", range(5))
    def test_er_pb0_all_uphill(self, seed):
        assert _uphill_fraction(generate_er(100, 6, 0.0, seed)) == 1.0

    @pytest.mark.parametrize("seed", range(5))
    def test_er_pb1_all_downhill(self, seed):
        assert _uphill_fraction(generate_er(100, 6, 1.0, seed)) == 0.0

    def test_ba_pb_extremes(self):
        assert _uphill_fraction(generate_ba(300, 3, 0.0, 1)) == 1.0
        assert _uphill_fraction(generate_ba(300, 3, 1.0, 1)) == 0.0

    def test_er_edge_count_mean(self):
        counts = [generate_er(200, 6, 0.5, s).n_edges for s in range(100)]
        n_pairs = 200 * 199 / 2
        p = 6 / 199
        sd = math.sqrt(n_pairs * p * (1 - p))
        assert abs(np.mean(counts) - 600) < 3 * sd / math.sqrt(len(counts))

    def test_no_self_loops(self):
        assert not generate_er(50, 10, 0.3, 2).has_self_loops()
        assert not generate_ba(50, 3, 0.3, 2).has_self_loops()

    @pytest.mark.parametrize("kwargs", [
        dict(n=1, avg_k=1, pb=0.5), dict(n=10, avg_k=0, pb=0.5),
        dict(n=10, avg_k=9, pb=0.5), dict(n=10, avg_k=2, pb=1.5),
    ])
    def test_er_bad_parameters(self, kwargs):
        with pytest.raises(ParameterError):
            generate_er(seed=0, **kwargs)

    @pytest.mark.parametrize("m", [0, 9, 10, 11])
    def test_ba_bad_attach(self, m):
        with pytest.raises(ParameterError):
            generate_ba(10, m, 0.5, 0)

    def test_ba_deterministic(self):
        assert generate_ba(100, 4, 0.3, 5).edges.tobytes() == generate_ba(100, 4, 0.3, 5).edges.tobytes()

    def test_ba_degree_exponent(self):
        net = generate_ba(1000, 4, 0.5, 1)
        fit = fit_power_law(_undirected_degree(net))
        assert abs(fit.params["alpha"] - 3.0) <= 0.4


class TestEdgeList:
    def test_basic(self):
        net = load_edge_list("0 1\n1 2\n")
        assert net.n == 3 and net.edge_set() == {(0, 1), (1, 2)}

    def test_drop_self_loops(self):
        net = load_edge_list("0 0\n0 1\n", drop_self_loops=True)
        assert net.n == 2 and net.edge_set() == {(0, 1)}
        assert net.metadata["self_loops_dropped"] == 1

    def test_self_loops_kept_by_default(self):
        assert load_edge_list("0 0\n0 1\n").has_self_loops()

    def test_duplicates(self):
        net = load_edge_list("0 1\n0 1\n")
        assert net.edge_set() == {(0, 1)} and net.metadata["duplicates_collapsed"] == 1

    def test_comments(self):
        assert load_edge_list("# header\n\n2 0\n").n == 3

    @pytest.mark.parametrize("text,line", [("0 1\n1 x\n", 2), ("0 -1\n", 1), ("", 0), ("0 1 2\n", 1)])
    def test_parse_errors(self, text, line):
        with pytest.raises(ParseError) as err:
            load_edge_list(text)
        assert err.value.line == line
        assert f"line {line}" in str(err.value)

    @given(st.sets(st.tuples(st.integers(0, 20), st.integers(0, 20)), min_size=1, max_size=60))
    def test_round_trip(self, edges):
        net = DirectedNetwork(21, sorted(edges))
        back = load_edge_list(dump_edge_list(net))
        assert back.edge_set() == net.edge_set()


class TestDegreeModel:
    def test_gamma_domain(self):
        with pytest.raises(DomainError):
            DegreeModel(2.0, 0.5)

    def test_case_half(self):
        m = DegreeModel(2.5, 0.5, k_min=2)
        for k in (2.0, 5.0, 11.0):
            assert analytic_degree_pdf(m, k) == pytest.approx(2 ** (1 - 2.5) * m.c_norm * k ** -2.5)

    def test_case_gamma3(self):
        m = DegreeModel(3.0, 0.7, k_min=4)
        for k in (4.0, 9.0, 30.0):
            expect = m.c_norm * 0.7 ** 2 * (k + 0.4 * 4) ** -3
            assert analytic_degree_pdf(m, k) == pytest.approx(expect)

    def test_case_lambda0_exponent(self):
        m = DegreeModel(2.5, 0.0, k_min=1)
        p1, p2 = analytic_degree_pdf(m, 10.0), analytic_degree_pdf(m, 20.0)
        assert math.log(p2 / p1) / math.log(2.0) == pytest.approx(-4.0)

    @pytest.mark.parametrize("lam", [0.0, 0.5])
    def test_numeric_inversion_matches_closed_form(self, lam):
        from netctl.graph import _numeric_pdf
        m = DegreeModel(2.5, lam, k_min=1)
        for k in (15.0, 40.0):
            assert _numeric_pdf(m, k, "out") == pytest.approx(analytic_degree_pdf(m, k), rel=1e-6)

    def test_in_side_mirrors_out(self):
        m = DegreeModel(2.7, 0.3, k_min=1)
        mirror = DegreeModel(2.7, 0.7, k_min=1)
        assert analytic_degree_pdf(m, 20.0, "in") == pytest.approx(analytic_degree_pdf(mirror, 20.0, "out"))

    def test_ba_out_degree_ks(self):
        net = generate_ba(5000, 4, 0.5, 0)
        kout = net.out_degree()
        x = kout[(kout >= 4) & (kout <= 50)]
        ks = np.arange(4, 51)
        m = DegreeModel(3.0, 0.5, k_min=4)
        p = np.array([analytic_degree_pdf(m, float(k)) for k in ks])
        p /= p.sum()
        emp = np.array([(x == k).mean() for k in ks])
        assert np.abs(np.cumsum(emp) - np.cumsum(p)).max() < 0.05
