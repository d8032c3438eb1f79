"""
Rooted trees and the Connes-Kreimer side of the family.

A tree is stored canonically as (size, sorted children); structural equality
is isomorphism. The Hopf algebra H_rt is free commutative on letters
("T", tree), with Δ(δ_T) = δ_T⊗1 + Σ over simple cuts P_c⊗R_c.
"""

import logging
from collections import Counter
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Tuple

from errors import CapExceededError, ParseError, UnknownNameError
from exact_kernel import Element, Tensor, TruncationSpec
from h1_family import (
    X,
    Y,
    BicrossedModel,
    CoverModel,
    EnvelopingAlgebra,
    GroupAlgebra,
)
from hopf import (
    LETTER_FORMATTERS,
    UNIT,
    BicrossedProduct,
    CocrossedProduct,
    PresentedAlgebra,
    grading_coaction,
    require_cap,
)

logger = logging.getLogger(__name__)

class RootedTree(NamedTuple):
    size: int
    children: Tuple["RootedTree", ...]


def make_tree(children=()) -> RootedTree:
    children = tuple(sorted(children))
    return RootedTree(1 + sum(c.size for c in children), children)


VERTEX = make_tree()


def tree_letter(tree: RootedTree):
    return ("T", tree)


def format_tree(tree: RootedTree) -> str:
    return "[" + "".join(format_tree(c) for c in tree.children) + "]"


def parse_tree(text: str, start: int = 0) -> Tuple[RootedTree, int]:
    """Parse one bracket literal starting at `start`; returns the tree and the end index."""
    if start >= len(text) or text[start] != "[":
        raise ParseError("expected '['", start)
    children = []
    i = start + 1
    while i < len(text) and text[i] == "[":
        child, i = parse_tree(text, i)
        children.append(child)
    if i >= len(text) or text[i] != "]":
        raise ParseError("unbalanced tree literal", i)
    return make_tree(children), i + 1


def tree_from_literal(text: str) -> RootedTree:
    tree, end = parse_tree(text.strip())
    if end != len(text.strip()):
        raise ParseError("trailing characters after tree literal", end)
    return tree


def forest_from_literal(text: str) -> List[RootedTree]:
    """Juxtaposed bracket groups, `[][[]]` being the forest of a vertex and a ladder."""
    text = text.strip()
    forest, i = [], 0
    while i < len(text):
        tree, i = parse_tree(text, i)
        forest.append(tree)
    if not forest:
        raise ParseError("empty forest literal", 0)
    return forest


LETTER_FORMATTERS["T"] = lambda letter: "dT" + format_tree(letter[1])


@lru_cache(maxsize=None)
def _trees_of_size(n: int) -> Tuple[RootedTree, ...]:
    if n == 1:
        return (VERTEX,)
    smaller = [t for m in range(1, n) for t in _trees_of_size(m)]
    found = set()

    def forests(total, start, acc):
        if total == 0:
            found.add(make_tree(acc))
            return
        for index in range(start, len(smaller)):
            tree = smaller[index]
            if tree.size <= total:
                forests(total - tree.size, index, acc + [tree])

    forests(n - 1, 0, [])
    return tuple(sorted(found))


def enumerate_trees(n: int) -> List[RootedTree]:
    """One representative per isomorphism class with size ≤ n, by size then structure."""
    return [t for m in range(1, n + 1) for t in _trees_of_size(m)]


@lru_cache(maxsize=None)
def simple_cuts(tree: RootedTree) -> Tuple[Tuple[Tuple[RootedTree, ...], RootedTree], ...]:
    """All simple cuts as (pruned forest, trunk), empty cut first, with multiplicity."""
    options_per_child = []
    for child in tree.children:
        options = [((child,), None)]
        options.extend(simple_cuts(child))
        options_per_child.append(options)
    results = [((), [])]
    for options in options_per_child:
        results = [(forest + pruned, trunks + ([trunk] if trunk is not None else []))
                   for forest, trunks in results for pruned, trunk in options]
    cuts = [(tuple(sorted(forest)), make_tree(trunks)) for forest, trunks in results]
    cuts.sort(key=lambda cut: len(cut[0]))
    return tuple(cuts)


@lru_cache(maxsize=None)
def _graft(tree: RootedTree) -> Tuple[Tuple[RootedTree, int], ...]:
    counts: Counter = Counter()
    counts[make_tree(tree.children + (VERTEX,))] += 1
    for i, child in enumerate(tree.children):
        rest = tree.children[:i] + tree.children[i + 1:]
        for grown, mult in _graft(child):
            counts[make_tree(rest + (grown,))] += mult
    return tuple(sorted(counts.items()))


def graft(tree: RootedTree, max_size: Optional[int] = None) -> Counter:
    """N(δ_T): one new leaf under every vertex, isomorphic results merged with multiplicity."""
    if max_size is not None and tree.size + 1 > max_size:
        raise CapExceededError(f"grafting a tree of size {tree.size} exceeds {max_size}")
    return Counter(dict(_graft(tree)))


class RootedTreeAlgebra(PresentedAlgebra):
    """H_rt: polynomial algebra on δ_T with the simple-cut coproduct."""

    tag = "hrt"
    is_commutative = True

    def __init__(self, max_tree_size: Optional[int] = None):
        super().__init__()
        self.max_tree_size = max_tree_size
        self._letter_coproducts: Dict = {}

    def letter_rank(self, letter):
        return (3, letter[1])

    def letter_weight(self, letter) -> int:
        return letter[1].size

    def letter_coproduct(self, letter) -> Tensor:
        cached = self._letter_coproducts.get(letter)
        if cached is not None:
            return cached
        tags = (self.tag, self.tag)
        out: Dict = {((letter,), UNIT): 1}
        for forest, trunk in simple_cuts(letter[1]):
            pruned = tuple(tree_letter(t) for t in forest)
            key = (pruned, (tree_letter(trunk),))
            out[key] = out.get(key, 0) + 1
        result = Tensor(tags, out)
        self._letter_coproducts[letter] = result
        return result

    def graft_word(self, w) -> Element:
        """N extended to monomials as a derivation."""
        out = Element(self.tag)
        for i, letter in enumerate(w):
            rest = w[:i] + w[i + 1:]
            for grown, mult in graft(letter[1], self.max_tree_size).items():
                out = out + self.normal_form(rest + (tree_letter(grown),)).scale(mult)
        return out

    def basis_letters(self, trunc: TruncationSpec) -> List:
        return [tree_letter(t) for t in enumerate_trees(trunc.tree_cap)]

    def generators(self) -> List:
        return [(tree_letter(VERTEX),)]

    def generator_element(self, name: str) -> Element:
        if name == "1":
            return self.one()
        if not name.startswith("dT"):
            raise UnknownNameError(f"generator {name!r} does not belong to {self.tag}")
        forest = forest_from_literal(name[2:])
        if self.max_tree_size is not None:
            for tree in forest:
                require_cap(tree.size, self.max_tree_size, "tree size")
        return self.normal_form(tuple(tree_letter(t) for t in forest))


def _tree_action(F: RootedTreeAlgebra):
    """δ_T◁Y = −|T|δ_T and ◁X = −N, both derivations on H_rt."""
    def act(f_word, u_letter) -> Element:
        if u_letter == Y:
            return F.word(f_word, -F.weight_word(f_word))
        return -F.graft_word(f_word)
    return act


def build_hck(n_cover=None, max_tree_size: Optional[int] = None):
    """H_CK = U⋈H_rt, or its σ-cover H_CK⋊K when `n_cover` is given.

    `n_cover` may be None (no cover), "inf" or 0 for the infinite cover, or N ≥ 2.
    With `max_tree_size`, products grafting past that size raise CapExceededError.
    """
    U, F = EnvelopingAlgebra(), RootedTreeAlgebra(max_tree_size)
    coaction_table = {
        X: Tensor((F.tag, U.tag), {(UNIT, (X,)): 1, ((tree_letter(VERTEX),), (Y,)): 1}),
        Y: Tensor.simple((F.tag, U.tag), (UNIT, (Y,))),
    }
    hck = BicrossedProduct(U, F, _tree_action(F), coaction_table, tag="hck")
    if n_cover is None:
        return BicrossedModel(
            direct=hck,
            product=hck,
            to_direct=hck.word,
            from_direct=hck.word,
            primitive=(tree_letter(VERTEX),),
        )
    modulus = None if n_cover in ("inf", 0) else int(n_cover)
    K = GroupAlgebra(modulus)
    coaction = grading_coaction(hck, K)
    tag = "hckdag" if modulus is None else f"hckdagN:{modulus}"
    product = CocrossedProduct(hck, K, coaction, tag=tag)
    model = CoverModel(direct=product, base=hck, K=K, coaction=coaction, product=product)
    logger.debug(f"built {tag} over {hck.tag}")
    return model


def get_tree_algebra(name: str, max_tree_size: Optional[int] = None):
    if name == "hrt":
        return RootedTreeAlgebra(max_tree_size)
    if name == "hck":
        return build_hck(max_tree_size=max_tree_size).product
    if name == "hckdag":
        return build_hck("inf", max_tree_size).product
    if name.startswith("hckdagN:"):
        try:
            modulus = int(name[len("hckdagN:"):])
        except ValueError:
            raise UnknownNameError(f"bad modulus in algebra name {name!r}")
        if modulus < 2:
            raise UnknownNameError(f"modulus in {name!r} must be at least 2")
        return build_hck(modulus, max_tree_size).product
    raise UnknownNameError(f"unknown tree algebra {name!r}")


def size_histogram(n: int) -> List[int]:
    """Number of isomorphism classes of each size 1..n."""
    return [len(_trees_of_size(m)) for m in range(1, n + 1)]
