import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcip.ci import (
    Axiom,
    CIStatement,
    MutualCIStatement,
    apply_axiom,
    format_statements,
    global_query,
    local_relations,
    mcip_relations,
    pairwise_from_mcip,
    pairwise_relations,
    parse_statement,
    separation_relations,
    weak_union_expand,
)
from mcip.exceptions import InputError
from mcip.graph import UndirectedGraph

from conftest import all_graphs, graphs, random_graphs

S = CIStatement


class TestStatements:
    def test_symmetric_canonical_form(self):
        assert S({"b"}, {"a"}, {"c"}) == S({"a"}, {"b"}, {"c"})
        assert S({"b"}, {"a"}).left == {"a"}

    def test_rejects_overlap_and_empty(self):
        with pytest.raises(InputError):
            S({"a"}, {"a"})
        with pytest.raises(InputError):
            S({"a"}, {"b"}, {"b"})
        with pytest.raises(InputError):
            S(set(), {"b"})

    def test_format_and_parse(self):
        s = S({"B", "A"}, {"C"}, {"E", "D"})
        assert str(s) == "A,B _||_ C | D,E"
        assert parse_statement(str(s)) == s
        m = MutualCIStatement([{"C"}, {"A"}, {"B"}], {"E", "D"})
        assert str(m) == "A _||_ B _||_ C | D,E"
        assert parse_statement(str(m)) == m

    def test_mutual_needs_two_blocks(self):
        with pytest.raises(InputError):
            MutualCIStatement([{"a"}], set())


class TestGenerators:
    def test_fig1_pairwise_contains_worked_example(self, fig1):
        assert S({"A"}, {"F"}, set("BCDEG")) in pairwise_relations(fig1)

    def test_complete_graph_empty(self):
        g = UndirectedGraph.complete("abcd")
        assert pairwise_relations(g) == local_relations(g) == mcip_relations(g) == []

    def test_fig2_pairwise_count(self, fig2):
        assert len(pairwise_relations(fig2)) == 15 - 8

    def test_local(self, fig1, fig2):
        assert S({"family"}, {"systol", "protein", "smoke", "phys"}, {"mental"}) in local_relations(fig2)
        assert S({"A"}, set("CEFG"), {"B", "D"}) in local_relations(fig1)

    def test_mcip(self, fig1, fig2):
        assert MutualCIStatement([{"A"}, {"C"}, {"F"}], set("BDEG")) in mcip_relations(fig1)
        assert MutualCIStatement([{"systol"}, {"phys"}, {"family"}],
                                 {"protein", "smoke", "mental"}) in mcip_relations(fig2)

    def test_mcip_fig1_listing(self, fig1):
        assert format_statements(mcip_relations(fig1)).splitlines()[0] == "A _||_ C _||_ F | B,D,E,G"

    def test_global_query(self, fig1, fig2):
        assert global_query(fig2, S({"family"}, {"systol"}, {"mental"}))
        assert global_query(fig1, S({"A"}, {"C"}, {"B", "D"}))
        assert not global_query(fig1, S({"D"}, {"E"}, set()))

    def test_global_query_unknown_vertex(self, fig1):
        with pytest.raises(InputError):
            global_query(fig1, S({"A"}, {"Z"}))


class TestWeakUnion:
    def test_fig1_three_relations(self):
        m = MutualCIStatement([{"A"}, {"C"}, {"F"}], set("BDEG"))
        assert set(weak_union_expand(m)) == {
            S({"A"}, {"F"}, set("BCDEG")), S({"C"}, {"F"}, set("ABDEG")), S({"A"}, {"C"}, set("BDEFG"))}

    def test_two_blocks_is_identity(self):
        m = MutualCIStatement([{"x"}, {"y"}], {"z"})
        assert weak_union_expand(m) == [S({"x"}, {"y"}, {"z"})]

    def test_four_blocks(self):
        m = MutualCIStatement([{"x"}, {"y"}, {"z"}, {"w"}], set())
        out = weak_union_expand(m)
        assert len(out) == 6
        for s in out:
            assert len(s.given) == 2 and s.variables == set("xyzw")


class TestAxioms:
    X, Y, W, Z = {"x"}, {"y"}, {"w"}, {"z"}

    def test_weak_union(self):
        s = S(self.X, self.Y | self.W, self.Z)
        assert apply_axiom("weak_union", s, self.W) == S(self.X, self.Y, self.Z | self.W)

    def test_decomposition(self):
        s = S(self.X, self.Y | self.W, self.Z)
        assert apply_axiom(Axiom.DECOMPOSITION, s, self.W) == S(self.X, self.Y, self.Z)

    def test_symmetry_twice(self):
        s = S({"a", "b"}, {"c"}, {"d"})
        assert apply_axiom("symmetry", apply_axiom("symmetry", s)) == s

    def test_empty_selection_is_identity(self):
        s = S(self.X, self.Y | self.W, self.Z)
        assert apply_axiom("weak_union", s, set()) == s

    def test_selection_consuming_whole_side_fails(self):
        assert apply_axiom("weak_union", S(self.X, self.Y, self.Z), self.Y) is None
        assert apply_axiom("weak_union", S(self.X, self.Y, self.Z), {"q"}) is None

    def test_contraction(self):
        a = S(self.X, self.Y, self.Z)
        b = S(self.X, self.W, self.Z | self.Y)
        assert apply_axiom("contraction", [a, b]) == S(self.X, self.Y | self.W, self.Z)
        assert apply_axiom("contraction", [b, a]) is None

    def test_intersection(self):
        a = S(self.X, self.Y, self.Z | self.W)
        b = S(self.X, self.W, self.Z | self.Y)
        assert apply_axiom("intersection", [a, b]) == S(self.X, self.Y | self.W, self.Z)

    def test_shape_mismatch_is_none(self):
        a = S(self.X, self.Y, self.Z)
        b = S({"q"}, self.W, self.Z)
        assert apply_axiom("intersection", [a, b]) is None

    def test_arity_and_name_errors(self):
        s = S(self.X, self.Y)
        with pytest.raises(InputError):
            apply_axiom("contraction", [s])
        with pytest.raises(InputError):
            apply_axiom("transitivity", s)
        with pytest.raises(InputError):
            apply_axiom("symmetry", ["not a statement"])

    def test_separation_satisfies_weak_union(self):
        # graph separation is a graphoid: rewrites of true statements stay true
        for g in random_graphs(30, 3, 6, seed=5):
            for s in separation_relations(g):
                for side in (s.left, s.right):
                    for v in side:
                        t = apply_axiom("weak_union", s, {v})
                        if t is not None:
                            assert global_query(g, t)


class TestPairwiseFromMutual:
    def test_fig1(self, fig1):
        assert pairwise_from_mcip(fig1) == pairwise_relations(fig1)

    def test_exhaustive_up_to_5(self):
        for g in all_graphs(5):
            assert pairwise_from_mcip(g) == pairwise_relations(g)

    @settings(max_examples=200, deadline=None)
    @given(graphs(max_vertices=7))
    def test_random_up_to_7(self, g):
        assert pairwise_from_mcip(g) == pairwise_relations(g)

    @settings(max_examples=80, deadline=None)
    @given(graphs(max_vertices=6))
    def test_generated_statements_hold_by_separation(self, g):
        stmts = pairwise_relations(g) + local_relations(g)
        for m in mcip_relations(g):
            stmts += weak_union_expand(m)
        assert all(global_query(g, s) for s in stmts)

    @given(st.sets(st.sampled_from("abcdef"), min_size=1, max_size=3),
           st.sets(st.sampled_from("uvw"), min_size=1, max_size=3))
    def test_swap_invariance(self, a, b):
        assert S(a, b) == S(b, a)
