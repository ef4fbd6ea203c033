import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_chordal_graph, random_table
from mcip.exceptions import DegenerateFitError, InputError
from mcip.graph import UndirectedGraph, is_decomposable
from mcip.loglinear import (
    ContingencyTable,
    degrees_of_freedom,
    fit_decomposable,
    fit_ipf,
    fit_mcip,
    g2,
    graph_generators,
    marginal,
    pearson_x2,
)
from oracles import brute_mcip_fit, read_counts

BLOCKS = [["family"], ["systol"], ["phys"]]
GIVEN = ["protein", "smoke", "mental"]


def two_by_two(counts):
    return ContingencyTable([("a", ["0", "1"]), ("b", ["0", "1"])], counts)


class TestTable:
    def test_shape_and_levels(self, reinis):
        assert reinis.shape == (2,) * 6
        assert reinis.total == 1841
        assert reinis.levels["smoke"] == 2

    def test_counts_read_only(self, reinis):
        with pytest.raises(ValueError):
            reinis.counts[0, 0, 0, 0, 0, 0] = 1

    def test_rejects_negative(self):
        with pytest.raises(InputError):
            two_by_two([[1, -1], [0, 0]])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(InputError):
            two_by_two([1, 2, 3])

    def test_from_records(self):
        t = ContingencyTable.from_records([("x", "p"), ("x", "q"), ("y", "q"), ("x", "p")], ["a", "b"])
        assert t.levels == {"a": 2, "b": 2}
        assert t.counts.tolist() == [[2, 1], [0, 1]]

    def test_from_records_declared_levels(self):
        t = ContingencyTable.from_records([("1",)], ["a"], levels={"a": ["0", "1", "2"]})
        assert t.counts.tolist() == [0, 1, 0]
        with pytest.raises(InputError):
            ContingencyTable.from_records([("9",)], ["a"], levels={"a": ["0"]})


class TestMarginal:
    def test_identity(self, reinis):
        assert marginal(reinis, reinis.labels) == reinis

    def test_smoke_against_brute(self, reinis):
        header, cells = read_counts("reinis.csv")
        i = header.index("smoke")
        brute = {}
        for cell, c in cells.items():
            brute[cell[i]] = brute.get(cell[i], 0) + c
        m = marginal(reinis, ["smoke"])
        assert dict(m.cells()) == {(k,): v for k, v in brute.items()}

    def test_empty_keep_is_total(self, reinis):
        assert float(marginal(reinis, []).counts) == reinis.total

    def test_variable_order_kept(self, reinis):
        assert marginal(reinis, ["mental", "family"]).labels == ("family", "mental")


class TestStatistics:
    def test_x2_independence_2x2(self):
        t = two_by_two([[10, 20], [30, 40]])
        r = fit_mcip(t, [["a"], ["b"]])
        assert r.fitted.counts == pytest.approx(np.array([[12, 18], [28, 42]]))
        assert r.x2 == pytest.approx(50 / 63, rel=1e-12)
        assert r.df == 1

    def test_g2_direct(self):
        o, e = two_by_two([[10, 20], [30, 40]]), two_by_two([[12, 18], [28, 42]])
        expect = 2 * sum(a * math.log(a / b) for a, b in zip([10, 20, 30, 40], [12, 18, 28, 42]))
        assert g2(o, e) == pytest.approx(expect, rel=1e-12)

    def test_zero_zero_cells_ignored(self):
        o, e = two_by_two([[0, 5], [5, 5]]), two_by_two([[0, 5], [5, 5]])
        assert pearson_x2(o, e) == 0 and g2(o, e) == 0

    def test_degenerate(self):
        o, e = two_by_two([[1, 5], [5, 5]]), two_by_two([[0, 6], [5, 5]])
        with pytest.raises(DegenerateFitError):
            pearson_x2(o, e)
        with pytest.raises(DegenerateFitError):
            g2(o, e)

    def test_structure_mismatch(self, reinis):
        with pytest.raises(InputError):
            pearson_x2(reinis, two_by_two([[1, 1], [1, 1]]))


class TestDegreesOfFreedom:
    def test_fig2(self, reinis, fig2):
        assert degrees_of_freedom(reinis, graph_generators(fig2)) == 46

    def test_fig3(self, reinis, fig3):
        assert degrees_of_freedom(reinis, graph_generators(fig3)) == 49

    def test_saturated(self, reinis):
        assert degrees_of_freedom(reinis, [reinis.labels]) == 0

    def test_mutual_independence_binary(self):
        assert degrees_of_freedom({"a": 2, "b": 2, "c": 2}, [["a"], ["b"], ["c"]]) == 4

    def test_multilevel_independence(self):
        assert degrees_of_freedom({"a": 3, "b": 4}, [["a"], ["b"]]) == 6

    def test_no_generators(self):
        with pytest.raises(InputError):
            degrees_of_freedom({"a": 2}, [])


class TestMCIPFit:
    def test_against_brute_force(self, reinis):
        header, cells = read_counts("reinis.csv")
        brute = brute_mcip_fit(header, cells, BLOCKS, GIVEN)
        fitted = dict(fit_mcip(reinis, BLOCKS, GIVEN).fitted.cells())
        assert max(abs(fitted[c] - v) for c, v in brute.items()) <= 1e-9

    def test_reference_statistics(self, reinis):
        r = fit_mcip(reinis, BLOCKS, GIVEN)
        assert r.x2 == pytest.approx(35.01022, abs=1e-4)
        assert r.g2 == pytest.approx(35.47488, abs=1e-4)
        assert r.df == 32

    def test_marginals_preserved(self, reinis):
        f = fit_mcip(reinis, BLOCKS, GIVEN).fitted
        assert f.total == pytest.approx(reinis.total, rel=1e-12)
        for b in BLOCKS:
            keep = b + GIVEN
            assert np.allclose(marginal(f, keep).counts, marginal(reinis, keep).counts, atol=1e-9)

    def test_zero_conditioning_margin(self):
        t = ContingencyTable([("a", "01"), ("b", "01"), ("s", "01")],
                             np.array([[[3, 0], [1, 0]], [[2, 0], [4, 0]]]))
        r = fit_mcip(t, [["a"], ["b"]], ["s"])
        assert np.all(r.fitted.counts[:, :, 1] == 0)

    def test_star_of_cliques_matches_decomposable(self):
        rng = np.random.default_rng(5)
        g = UndirectedGraph(["a", "b", "c", "s1", "s2"],
                            [("s1", "s2"), ("a", "s1"), ("a", "s2"), ("b", "s1"),
                             ("b", "s2"), ("c", "s1"), ("c", "s2")])
        t = random_table(rng, g.vertices, low=1)
        a = fit_mcip(t, [["a"], ["b"], ["c"]], ["s1", "s2"])
        b = fit_decomposable(t, g)
        assert np.allclose(a.fitted.counts, b.fitted.counts, atol=1e-9)
        assert a.df == b.df

    @pytest.mark.parametrize("blocks,given", [
        ([["a"]], ["b"]),
        ([["a"], ["a"]], ["b"]),
        ([["a"], []], ["b"]),
        ([["a"], ["b"]], ["q"]),
    ])
    def test_bad_partitions(self, blocks, given):
        t = ContingencyTable([("a", "01"), ("b", "01"), ("c", "01")], np.ones((2, 2, 2)))
        with pytest.raises(InputError):
            fit_mcip(t, blocks, given)

    def test_partition_must_cover(self):
        t = ContingencyTable([("a", "01"), ("b", "01"), ("c", "01")], np.ones((2, 2, 2)))
        with pytest.raises(InputError, match="cover"):
            fit_mcip(t, [["a"], ["b"]], [])


class TestDecomposable:
    def test_reference_statistics(self, reinis, fig2):
        r = fit_decomposable(reinis, fig2)
        assert r.x2 == pytest.approx(51.11705, abs=1e-4)
        assert r.g2 == pytest.approx(51.35869, abs=1e-4)
        assert r.df == 46

    def test_saturated(self, reinis):
        g = UndirectedGraph.complete(reinis.labels)
        r = fit_decomposable(reinis, g)
        assert r.x2 == pytest.approx(0, abs=1e-9) and r.g2 == pytest.approx(0, abs=1e-9)
        assert r.df == 0 and r.p_value_x2 == 1.0

    def test_non_chordal_rejected(self, reinis, fig3):
        with pytest.raises(InputError, match="decomposable"):
            fit_decomposable(reinis, fig3)

    def test_vertex_mismatch(self, reinis):
        with pytest.raises(InputError):
            fit_decomposable(reinis, UndirectedGraph("ab"))

    def test_clique_marginals(self, reinis, fig2):
        f = fit_decomposable(reinis, fig2).fitted
        for c in graph_generators(fig2):
            assert np.allclose(marginal(f, c).counts, marginal(reinis, c).counts, atol=1e-9)


class TestIPF:
    def test_reference_statistics(self, reinis, fig3):
        r = fit_ipf(reinis, graph_generators(fig3))
        assert r.converged and r.iterations <= 50
        assert r.x2 == pytest.approx(61.87653, abs=1e-2)
        assert r.g2 == pytest.approx(62.84262, abs=1e-2)
        assert r.df == 49

    def test_agrees_with_decomposable(self, reinis, fig2):
        a = fit_ipf(reinis, graph_generators(fig2), tol=1e-10)
        b = fit_decomposable(reinis, fig2)
        assert np.max(np.abs(a.fitted.counts - b.fitted.counts)) < 1e-6

    def test_trace_non_increasing(self, reinis, fig3):
        trace = fit_ipf(reinis, graph_generators(fig3), tol=1e-12).trace
        assert all(b <= a * (1 + 1e-9) for a, b in zip(trace, trace[1:]))

    def test_independence_one_cycle(self):
        t = ContingencyTable([("a", "01"), ("b", "012")], np.outer([1, 3], [2, 2, 4]))
        r = fit_ipf(t, [["a"], ["b"]])
        assert r.iterations == 1 and r.converged
        assert np.allclose(r.fitted.counts, t.counts)

    def test_non_convergence_reported(self, reinis, fig3):
        r = fit_ipf(reinis, graph_generators(fig3), tol=0.0, max_iter=3)
        assert not r.converged and r.iterations == 3

    def test_fitted_generator_marginals(self, reinis, fig3):
        f = fit_ipf(reinis, graph_generators(fig3)).fitted
        for c in graph_generators(fig3):
            assert np.allclose(marginal(f, c).counts, marginal(reinis, c).counts, atol=1e-7)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(2, 5))
def test_decomposable_and_ipf_agree(seed, n):
    rng = np.random.default_rng(seed)
    g = random_chordal_graph(rng, n)
    assert is_decomposable(g)
    t = random_table(rng, g.vertices, low=1)
    a = fit_decomposable(t, g)
    b = fit_ipf(t, graph_generators(g), tol=1e-10)
    assert np.max(np.abs(a.fitted.counts - b.fitted.counts)) < 1e-6
    assert a.df == b.df


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_mcip_fit_total_and_nonnegative(seed):
    rng = np.random.default_rng(seed)
    t = random_table(rng, ["a", "b", "c", "d"])
    r = fit_mcip(t, [["a"], ["b", "c"]], ["d"])
    assert np.all(r.fitted.counts >= 0)
    assert r.fitted.total == pytest.approx(t.total, rel=1e-12)
    assert r.x2 >= 0 and r.g2 >= -1e-9
