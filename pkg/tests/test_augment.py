import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from netctl.augment import (
    AugmentationReport,
    augment_uncontrollable,
    florida_like,
    place_redundant,
    reduction_report,
    strategy_ratios,
    table_row,
)
from netctl.chains import control_profile
from netctl.errors import ConsistencyError, ParameterError
from netctl.graph import DirectedNetwork, generate_er, load_edge_list
from netctl.linctrl import gramian
from netctl.matching import ControlMatrix, maximum_matching

from conftest import path, random_digraph

TABLE_KEYS = ["name", "N", "ND", "Mstar", "nD", "nDstar", "Estar", "Mmid", "Emid", "Mend", "Eend", "DC"]


def _far_end(n):
    x0 = np.zeros(n)
    x0[-1] = 1.0
    return x0, np.zeros(n)


class TestAugmentUncontrollable:
    def test_path_needs_nothing(self):
        net = path(3)
        rep = augment_uncontrollable(net, maximum_matching(net), 1.0)
        assert rep.m_star == 0 and rep.controllable

    def test_unreached_component_gets_input(self):
        net = DirectedNetwork(4, [(0, 1), (2, 3), (3, 2)])
        m = maximum_matching(net)
        assert m.drivers == (0,)
        rep = augment_uncontrollable(net, m, 1.0)
        assert rep.m_star >= 1 and set(rep.extra_inputs) & {2, 3}
        w = gramian(net.adjacency(), ControlMatrix(4, rep.augmented_drivers), 1.0)
        assert np.linalg.matrix_rank(w) == 4
        assert math.isinf(rep.c_w_before) and rep.controllable

    @pytest.mark.parametrize("seed", range(30))
    def test_condition_number_never_increases(self, seed):
        net = random_digraph(25, 0.12, seed)
        rep = augment_uncontrollable(net, maximum_matching(net), 1.0)
        hist = rep.c_w_history
        assert all(b <= a * (1 + 1e-9) for a, b in zip(hist, hist[1:]))
        assert rep.m_star == len(hist) - 1

    def test_dense_loops_stay_uncontrollable(self):
        net = florida_like()
        rep = augment_uncontrollable(net, maximum_matching(net), 1.0)
        assert not rep.controllable and math.isnan(rep.e_after)
        assert len(rep.augmented_drivers) == net.n
        assert "practically-uncontrollable" in rep.flags

    def test_report_invariants_enforced(self):
        with pytest.raises(ConsistencyError):
            AugmentationReport(base_drivers=(0, 1), m_star=0, augmented_drivers=(0,), strategy="mid")
        with pytest.raises(ConsistencyError):
            AugmentationReport(base_drivers=(0,), m_star=0, augmented_drivers=(0,), strategy="mid",
                               ratio=1.5)


class TestPlacement:
    def test_mid_of_seven(self, chain7):
        prof = control_profile(chain7, [0])
        assert place_redundant(chain7, [0], prof, "mid") == [3]

    def test_end_nodes(self):
        d, a, b, c, e, f, g, h = range(8)
        edges = [(d, a), (d, b), (a, c), (a, e), (b, c), (b, e), (c, f), (e, f), (c, g), (e, h)]
        net = DirectedNetwork(8, edges)
        prof = control_profile(net, [d])
        assert place_redundant(net, [d], prof, "end") == [f, g, h]

    def test_random_reproducible(self):
        net = generate_er(60, 4, 0.2, 1)
        m = maximum_matching(net)
        prof = control_profile(net, m.drivers)
        a = place_redundant(net, m.drivers, prof, "random", 5, seed=9)
        assert a == place_redundant(net, m.drivers, prof, "random", 5, seed=9)
        assert a == sorted(a) and not set(a) & set(m.drivers)

    def test_random_pool_exhausted(self, chain7):
        prof = control_profile(chain7, [0])
        with pytest.raises(ParameterError):
            place_redundant(chain7, [0], prof, "random", 7)

    def test_unknown_strategy(self, chain7):
        with pytest.raises(ParameterError):
            place_redundant(chain7, [0], control_profile(chain7, [0]), "best")


class TestReduction:
    def test_chain7_mid(self, chain7):
        x0, xf = _far_end(7)
        rep = reduction_report(chain7, [0], [3], 1.0, x0, xf)
        assert rep.ratio <= 1e-5

    def test_no_extras(self, chain7):
        x0, xf = _far_end(7)
        assert reduction_report(chain7, [0], [], 1.0, x0, xf).ratio == 1.0

    def test_mid_beats_second_node(self, chain7):
        x0, xf = _far_end(7)
        ratios = {v: reduction_report(chain7, [0], [v], 1.0, x0, xf).ratio for v in range(1, 7)}
        assert ratios[3] < ratios[1]

    def test_overlap(self, chain7):
        with pytest.raises(ParameterError):
            reduction_report(chain7, [0], [0], 1.0, *_far_end(7))

    def test_uncontrollable_baseline(self):
        net = DirectedNetwork(3, [(0, 1)])
        rep = reduction_report(net, [0], [2], 1.0, np.ones(3), np.zeros(3))
        assert math.isnan(rep.ratio) and "before-uncontrollable" in rep.flags

    @given(st.integers(0, 10 ** 6))
    def test_ratio_at_most_one(self, seed):
        net = random_digraph(12, 0.25, seed)
        m = maximum_matching(net)
        rng = np.random.default_rng(seed)
        free = sorted(set(range(12)) - set(m.drivers))
        if not free:
            return
        extras = sorted(rng.choice(free, min(len(free), 1 + seed % 3), replace=False).tolist())
        x0, xf = rng.standard_normal(12), rng.standard_normal(12)
        rep = reduction_report(net, m.drivers, extras, 1.0, x0, xf)
        if not math.isnan(rep.ratio) and "ill-conditioned-baseline" not in rep.flags:
            assert rep.ratio <= 1.0 + 1e-6

    def test_strategy_ratios_keys(self):
        net = generate_er(40, 5, 0.1, 3)
        m = maximum_matching(net)
        prof = control_profile(net, m.drivers)
        rng = np.random.default_rng(0)
        r = strategy_ratios(net, m.drivers, prof, 1.0, rng.standard_normal(40), rng.standard_normal(40))
        assert set(r) == {"mid", "end", "random_mid", "random_end"}


class TestTable:
    def test_schema_on_edge_list(self):
        net = load_edge_list("0 1\n1 2\n2 3\n0 4\n4 5\n")
        row = table_row(net, name="toy")
        assert list(row) == TABLE_KEYS
        json.dumps(row)
        assert row["Mstar"] == 0 and row["nD"] == row["nDstar"]

    def test_full_rank_analogue_needs_no_augmentation(self):
        for seed in range(3):
            net = generate_er(32, 3, 0.1, seed)
            row = table_row(net, name=f"er{seed}")
            if row["Mstar"] == 0:
                assert isinstance(row["Estar"], float)

    def test_florida_like_row(self):
        row = table_row(florida_like(), name="florida-like")
        assert row["Estar"] == "NaN" and row["Emid"] == "NaN" and row["Eend"] == "NaN"
        assert row["nDstar"] == 1.0
