import pytest
import sys
import os
from collections import Counter

import networkx as nx

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import CapExceededError, ParseError, UnknownNameError
from exact_kernel import Element, TruncationSpec
from h1_family import X, Y
from hopf import check_hopf_axioms
from trees import (
    VERTEX,
    RootedTreeAlgebra,
    build_hck,
    enumerate_trees,
    forest_from_literal,
    format_tree,
    get_tree_algebra,
    graft,
    make_tree,
    simple_cuts,
    size_histogram,
    tree_from_literal,
    tree_letter,
)

LADDER = make_tree([VERTEX])
CHERRY = make_tree([VERTEX, VERTEX])


def as_graph(tree):
    """Rooted tree as a networkx graph with the root flagged."""
    graph = nx.Graph()
    counter = [0]

    def add(node, parent):
        index = counter[0]
        counter[0] += 1
        graph.add_node(index, root=parent is None)
        if parent is not None:
            graph.add_edge(parent, index)
        for child in node.children:
            add(child, index)

    add(tree, None)
    return graph


class TestEnumeration:
    """Tests for the isomorphism-class enumeration."""

    def test_size_histogram(self):
        """Test the counts 1, 1, 2, 4, 9 of rooted trees by size."""
        assert size_histogram(5) == [1, 1, 2, 4, 9]

    def test_classes_are_pairwise_non_isomorphic(self):
        """Test enumerated trees against an independent rooted isomorphism check."""
        trees = enumerate_trees(5)
        graphs = [as_graph(t) for t in trees]

        def same_root(a, b):
            return a["root"] == b["root"]

        for i, g in enumerate(graphs):
            # Every literal is a tree on the right number of vertices
            assert nx.is_tree(g)
            assert g.number_of_nodes() == trees[i].size
            for h in graphs[i + 1:]:
                assert not nx.is_isomorphic(g, h, node_match=same_root)

    def test_children_order_is_irrelevant(self):
        """Test that make_tree canonicalizes children."""
        a = make_tree([LADDER, VERTEX])
        b = make_tree([VERTEX, LADDER])

        assert a == b


class TestLiterals:
    """Tests for bracket literals."""

    def test_format_and_parse(self):
        text = format_tree(make_tree([LADDER, VERTEX]))

        assert tree_from_literal(text) == make_tree([VERTEX, LADDER])

    def test_unbalanced(self):
        with pytest.raises(ParseError):
            tree_from_literal("[[]")

    def test_trailing_characters(self):
        """Test that text after the root bracket is rejected."""
        with pytest.raises(ParseError):
            tree_from_literal("[]]")

    def test_forest(self):
        """Test juxtaposed brackets read as a forest."""
        assert forest_from_literal("[][[]]") == [VERTEX, LADDER]

    @pytest.mark.parametrize("text", ["", "[][", "[]x"])
    def test_bad_forest(self, text):
        with pytest.raises(ParseError):
            forest_from_literal(text)

    def test_forest_generator(self):
        """Test dT[[]][] is the monomial of a vertex and a ladder, sorted."""
        F = RootedTreeAlgebra()

        result = F.generator_element("dT[[]][]")

        assert result == F.word((tree_letter(VERTEX), tree_letter(LADDER)))


class TestCutsAndGrafting:
    """Tests for simple cuts and the grafting operator."""

    def test_cuts_of_the_ladder(self):
        """Test the ladder has the empty cut and one leaf cut."""
        cuts = simple_cuts(LADDER)

        assert cuts == (((), LADDER), ((VERTEX,), VERTEX))

    def test_cuts_of_the_cherry(self):
        """Test each leaf cut of the cherry appears with multiplicity."""
        cuts = Counter(simple_cuts(CHERRY))

        assert cuts[((VERTEX,), LADDER)] == 2
        assert cuts[((VERTEX, VERTEX), VERTEX)] == 1

    def test_graft_ladder(self):
        """Test N([[]]) = [[][]] + [[[]]]."""
        result = graft(LADDER)

        assert result == Counter({CHERRY: 1, make_tree([LADDER]): 1})

    def test_graft_merges_isomorphic_results(self):
        """Test N([[][]]) = [[][][]] + 2 [[[]][]]."""
        result = graft(CHERRY)

        assert result[make_tree([VERTEX, VERTEX, VERTEX])] == 1
        assert result[make_tree([LADDER, VERTEX])] == 2

    def test_graft_cap(self):
        with pytest.raises(CapExceededError):
            graft(LADDER, max_size=2)


class TestTreeAlgebras:
    """Tests for H_rt and the Connes-Kreimer bicrossed product."""

    def test_rooted_tree_hopf_axioms(self):
        """Test the simple-cut coproduct is coassociative with antipode."""
        trunc = TruncationSpec(pbw_cap=2, tree_cap=3)

        assert check_hopf_axioms(RootedTreeAlgebra(), trunc)["status"] == "pass"

    def test_coproduct_of_ladder(self):
        """Test Delta(dT[[]]) has the primitive part and d1 # d1."""
        F = RootedTreeAlgebra()
        v = tree_letter(VERTEX)

        result = F.coproduct_word((tree_letter(LADDER),))

        assert result.coefficient(((v,), (v,))) == 1
        assert len(result) == 3

    def test_x_grafts(self):
        """Test dT[] acted on by X is minus the ladder."""
        hck = build_hck().product
        v = tree_letter(VERTEX)

        result = hck.act_word((v,), (X,))

        assert result == Element("hrt", {(tree_letter(LADDER),): -1})

    def test_y_scales_by_size(self):
        hck = build_hck().product
        ladder = (tree_letter(LADDER),)

        assert hck.act_word(ladder, (Y,)) == Element("hrt", {ladder: -2})

    def test_hck_hopf_axioms(self):
        trunc = TruncationSpec(pbw_cap=2, tree_cap=2)

        assert check_hopf_axioms(build_hck().product, trunc)["status"] == "pass"

    def test_cover_names(self):
        """Test the modulus of tree covers is validated."""
        assert get_tree_algebra("hckdagN:2").tag == "hckdagN:2"

        with pytest.raises(UnknownNameError):
            get_tree_algebra("hckdagN:1")


class TestTreeCap:
    """Tests for the configured tree-size cap on products and literals."""

    def test_product_grafts_past_cap(self):
        """Test dT[[]]*X raises when X would graft a third vertex under cap 2."""
        hck = get_tree_algebra("hck", max_tree_size=2)
        ladder = hck.generator_element("dT[[]]")

        with pytest.raises(CapExceededError):
            hck.multiply(ladder, hck.generator_element("X"))

    def test_product_within_cap(self):
        """Test dT[]*X = X*dT[] - dT[[]] under cap 2."""
        hck = get_tree_algebra("hck", max_tree_size=2)
        v, ladder = tree_letter(VERTEX), tree_letter(LADDER)

        result = hck.multiply(hck.generator_element("dT[]"), hck.generator_element("X"))

        assert result == Element("hck", {((X,), (v,)): 1, ((), (ladder,)): -1})

    def test_literal_past_cap(self):
        F = get_tree_algebra("hrt", max_tree_size=2)

        with pytest.raises(CapExceededError):
            F.generator_element("dT[[[]]]")

    def test_cover_keeps_the_cap(self):
        cover = get_tree_algebra("hckdagN:2", max_tree_size=1)

        with pytest.raises(CapExceededError):
            cover.generator_element("dT[[]]")
