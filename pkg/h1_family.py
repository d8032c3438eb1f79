"""
The Hopf algebras of codimension-one transverse symmetry.

H1 (generators Y, X, d_k), the Schwarzian quotient H1s (Y, X, Z), the
sigma-covers H1Dagger, the group algebra K, and the pieces U and F of the
bicrossed decomposition. Words are tuples of letters:

    ("Y",)  ("X",)  ("Z",)  ("d", k)  ("s", exponent)
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from errors import UnknownNameError
from exact_kernel import Element, Tensor, TruncationSpec
from hopf import (
    UNIT,
    BicrossedProduct,
    Character,
    Coaction,
    CocrossedProduct,
    HopfAlgebra,
    ModularPair,
    PresentedAlgebra,
    check_isomorphism,
    grading_coaction,
    multiply_tensors,
    require_cap,
)

logger = logging.getLogger(__name__)

Y = ("Y",)
X = ("X",)
Z = ("Z",)


def d(k: int):
    return ("d", k)


def sigma(e: int):
    return ("s", e)


_RANKS = {"s": 0, "Y": 1, "X": 2, "Z": 3, "d": 3}


def _rank(letter):
    return (_RANKS[letter[0]], letter[1] if letter[0] == "d" else 0)


def _primitive(tag: str, letter) -> Tensor:
    return Tensor(
        (tag, tag), {((letter,), UNIT): 1, (UNIT, (letter,)): 1}
    )


def _check_delta(max_delta_index: Optional[int], k: int):
    """[X, d_k] = d_{k+1} grows indices without bound; a capped algebra refuses past its cap."""
    if max_delta_index is not None:
        require_cap(k, max_delta_index, "delta index")


def _parse_generator(name: str):
    """Letter (or word) for a surface generator name, None if not a letter name."""
    if name in ("X", "Y", "Z"):
        return (name,)
    if name.startswith("d") and name[1:].isdigit() and int(name[1:]) >= 1:
        return d(int(name[1:]))
    return None


class H1(PresentedAlgebra):
    """H1 with relations [Y,X]=X, [Y,d_k]=k d_k, [X,d_k]=d_{k+1}, [d_k,d_l]=0."""

    tag = "h1"

    def __init__(self, max_delta_index: Optional[int] = None):
        super().__init__()
        self.max_delta_index = max_delta_index
        self._letter_coproducts: Dict = {}

    def letter_rank(self, letter):
        return _rank(letter)

    def commutator(self, a, b):
        if a == X and b == Y:
            return [(Fraction(-1), (X,))]
        if a[0] == "d" and b == Y:
            return [(Fraction(-a[1]), (a,))]
        if a[0] == "d" and b == X:
            _check_delta(self.max_delta_index, a[1] + 1)
            return [(Fraction(-1), (d(a[1] + 1),))]
        return []

    def letter_weight(self, letter) -> int:
        if letter == X:
            return 1
        if letter[0] == "d":
            return letter[1]
        return 0

    def coproduct_of_x(self) -> Tensor:
        return Tensor((self.tag, self.tag), {
            ((X,), UNIT): 1, (UNIT, (X,)): 1, ((d(1),), (Y,)): 1,
        })

    def coproduct_of_d1(self) -> Tensor:
        return _primitive(self.tag, d(1))

    def letter_coproduct(self, letter) -> Tensor:
        cached = self._letter_coproducts.get(letter)
        if cached is not None:
            return cached
        if letter == Y:
            result = _primitive(self.tag, Y)
        elif letter == X:
            result = self.coproduct_of_x()
        elif letter == d(1):
            result = self.coproduct_of_d1()
        elif letter[0] == "d":
            # Δ(d_{k+1}) = [Δ(X), Δ(d_k)]
            pair = [self, self]
            dx, dk = self.letter_coproduct(X), self.letter_coproduct(d(letter[1] - 1))
            result = multiply_tensors(pair, dx, dk) - multiply_tensors(pair, dk, dx)
        else:
            result = Tensor.simple((self.tag, self.tag), ((letter,), (letter,)))
        self._letter_coproducts[letter] = result
        return result

    def basis_letters(self, trunc: TruncationSpec) -> List:
        return [Y, X] + [d(k) for k in range(1, trunc.delta_cap + 1)]

    def generators(self) -> List:
        return [(Y,), (X,), (d(1),)]

    def generator_element(self, name: str) -> Element:
        if name == "1":
            return self.one()
        letter = _parse_generator(name)
        if letter is None or letter == Z:
            raise UnknownNameError(f"generator {name!r} does not belong to {self.tag}")
        if letter[0] == "d":
            _check_delta(self.max_delta_index, letter[1])
        return self.word((letter,))


class H1Dagger(H1):
    """H1 with a central group-like σ: Δ(X)=X⊗1+σ⊗X+d1⊗Y, Δ(d1)=d1⊗1+σ⊗d1.

    With a modulus N the relation σ^N = 1 holds and exponents live in [0, N).
    """

    def __init__(self, modulus: Optional[int] = None, max_delta_index: Optional[int] = None):
        super().__init__(max_delta_index)
        self.modulus = modulus
        self.tag = "h1dag" if modulus is None else f"h1dagN:{modulus}"

    def sigma_letters(self, exponent: int):
        if self.modulus is not None:
            exponent %= self.modulus
        return () if exponent == 0 else (sigma(exponent),)

    def sigma_word(self, exponent: int):
        return self.sigma_letters(exponent)

    def coproduct_of_x(self) -> Tensor:
        return Tensor((self.tag, self.tag), {
            ((X,), UNIT): 1, ((sigma(1),), (X,)): 1, ((d(1),), (Y,)): 1,
        })

    def coproduct_of_d1(self) -> Tensor:
        return Tensor((self.tag, self.tag), {((d(1),), UNIT): 1, ((sigma(1),), (d(1),)): 1})

    def letter_coproduct(self, letter) -> Tensor:
        if letter[0] == "s":
            word = (letter,)
            return Tensor.simple((self.tag, self.tag), (word, word))
        return super().letter_coproduct(letter)

    def grouplike_prefixes(self, trunc: TruncationSpec):
        prefixes = []
        for e in trunc.sigma_exponents():
            prefix = self.sigma_letters(e)
            if prefix not in prefixes:
                prefixes.append(prefix)
        return prefixes

    def generators(self) -> List:
        return super().generators() + [(sigma(1),)]

    def generator_element(self, name: str) -> Element:
        if name == "s":
            return self.word(self.sigma_letters(1))
        if name == "s^-1":
            return self.word(self.sigma_letters(-1))
        return super().generator_element(name)


class H1s(PresentedAlgebra):
    """Quotient of H1 by d2 = d1²/2 in the variable Z = d1: [X,Z]=Z²/2, [Y,Z]=Z."""

    tag = "h1s"

    def letter_rank(self, letter):
        return _rank(letter)

    def commutator(self, a, b):
        if a == X and b == Y:
            return [(Fraction(-1), (X,))]
        if a == Z and b == Y:
            return [(Fraction(-1), (Z,))]
        if a == Z and b == X:
            return [(Fraction(-1, 2), (Z, Z))]
        return []

    def letter_weight(self, letter) -> int:
        return 1 if letter in (X, Z) else 0

    def letter_coproduct(self, letter) -> Tensor:
        if letter == X:
            return Tensor((self.tag, self.tag), {
                ((X,), UNIT): 1, (UNIT, (X,)): 1, ((Z,), (Y,)): 1,
            })
        return _primitive(self.tag, letter)

    def basis_letters(self, trunc: TruncationSpec) -> List:
        return [Y, X, Z]

    def generators(self) -> List:
        return [(Y,), (X,), (Z,)]

    def generator_element(self, name: str) -> Element:
        if name == "1":
            return self.one()
        if name not in ("X", "Y", "Z"):
            raise UnknownNameError(f"generator {name!r} does not belong to {self.tag}")
        return self.word(((name,),))


class GroupAlgebra(PresentedAlgebra):
    """ℂ[σ, σ⁻¹], or ℂ[σ]/(σ^N − 1) with a modulus."""

    is_commutative = True

    def __init__(self, modulus: Optional[int] = None):
        super().__init__()
        self.modulus = modulus
        self.tag = "K" if modulus is None else f"KmodN:{modulus}"

    def letter_rank(self, letter):
        return _rank(letter)

    def sigma_letters(self, exponent: int):
        if self.modulus is not None:
            exponent %= self.modulus
        return () if exponent == 0 else (sigma(exponent),)

    def group_word(self, exponent: int):
        return self.sigma_letters(exponent)

    def exponent(self, w) -> int:
        return w[0][1] if w else 0

    def letter_coproduct(self, letter) -> Tensor:
        return Tensor.simple((self.tag, self.tag), ((letter,), (letter,)))

    def basis(self, trunc: TruncationSpec) -> List:
        words = []
        for e in trunc.sigma_exponents():
            w = self.group_word(e)
            if w not in words:
                words.append(w)
        return words

    def generators(self) -> List:
        return [(sigma(1),)]

    def generator_element(self, name: str) -> Element:
        if name == "1":
            return self.one()
        if name == "s":
            return self.word(self.group_word(1))
        if name == "s^-1":
            return self.word(self.group_word(-1))
        raise UnknownNameError(f"generator {name!r} does not belong to {self.tag}")


class EnvelopingAlgebra(PresentedAlgebra):
    """U(g₋): Y, X primitive with [Y, X] = X."""

    tag = "u"

    def letter_rank(self, letter):
        return _rank(letter)

    def commutator(self, a, b):
        if a == X and b == Y:
            return [(Fraction(-1), (X,))]
        return []

    def letter_weight(self, letter) -> int:
        return 1 if letter == X else 0

    def letter_coproduct(self, letter) -> Tensor:
        return _primitive(self.tag, letter)

    def basis_letters(self, trunc: TruncationSpec) -> List:
        return [Y, X]

    def generators(self) -> List:
        return [(Y,), (X,)]

    def generator_element(self, name: str) -> Element:
        if name == "1":
            return self.one()
        if name not in ("X", "Y"):
            raise UnknownNameError(f"generator {name!r} does not belong to {self.tag}")
        return self.word(((name,),))


class DeltaFunctions(PresentedAlgebra):
    """F: free commutative on d_k, with the derivation D(d_k) = d_{k+1}.

    Δ(d1) is primitive and Δ(d_{k+1}) = Σ D(a)⊗b + a⊗D(b) + |b| d1·a⊗b over Δ(d_k).
    """

    tag = "f"
    is_commutative = True

    def __init__(self, max_delta_index: Optional[int] = None):
        super().__init__()
        self.max_delta_index = max_delta_index
        self._letter_coproducts: Dict = {}

    def letter_rank(self, letter):
        return _rank(letter)

    def letter_weight(self, letter) -> int:
        return letter[1]

    def derivation_word(self, w) -> Element:
        """D extended by the Leibniz rule."""
        out = Element(self.tag)
        for i, letter in enumerate(w):
            k = letter[1] + 1
            _check_delta(self.max_delta_index, k)
            out = out + self.normal_form(w[:i] + (d(k),) + w[i + 1:])
        return out

    def derivation(self, x: Element) -> Element:
        out = Element(self.tag)
        for w, c in x.items():
            out = out + self.derivation_word(w).scale(c)
        return out

    def letter_coproduct(self, letter) -> Tensor:
        cached = self._letter_coproducts.get(letter)
        if cached is not None:
            return cached
        tags = (self.tag, self.tag)
        if letter[1] == 1:
            result = _primitive(self.tag, letter)
        else:
            previous = self.letter_coproduct(d(letter[1] - 1))
            out: Dict = {}
            d1 = (d(1),)
            for (a, b), c in previous.items():
                pieces = [
                    Tensor.from_element(self.derivation_word(a)).map_terms(
                        tags, lambda key, b=b: Tensor.simple(tags, (key[0], b))),
                    Tensor.from_element(self.derivation_word(b)).map_terms(
                        tags, lambda key, a=a: Tensor.simple(tags, (a, key[0]))),
                ]
                weight = self.weight_word(b)
                if weight:
                    pieces.append(Tensor.from_element(self.multiply_words(d1, a)).map_terms(
                        tags, lambda key, b=b: Tensor.simple(tags, (key[0], b))).scale(weight))
                for piece in pieces:
                    for key, c2 in piece.items():
                        out[key] = out.get(key, 0) + c * c2
            result = Tensor(tags, out)
        self._letter_coproducts[letter] = result
        return result

    def basis_letters(self, trunc: TruncationSpec) -> List:
        return [d(k) for k in range(1, trunc.delta_cap + 1)]

    def generators(self) -> List:
        return [(d(1),)]

    def generator_element(self, name: str) -> Element:
        if name == "1":
            return self.one()
        letter = _parse_generator(name)
        if letter is None or letter[0] != "d":
            raise UnknownNameError(f"generator {name!r} does not belong to {self.tag}")
        _check_delta(self.max_delta_index, letter[1])
        return self.word((letter,))


class ZPolynomials(PresentedAlgebra):
    """ℂ[Z] with Z primitive."""

    tag = "zpoly"
    is_commutative = True

    def letter_rank(self, letter):
        return _rank(letter)

    def letter_weight(self, letter) -> int:
        return 1

    def letter_coproduct(self, letter) -> Tensor:
        return _primitive(self.tag, letter)

    def basis_letters(self, trunc: TruncationSpec) -> List:
        return [Z]

    def generators(self) -> List:
        return [(Z,)]

    def generator_element(self, name: str) -> Element:
        if name == "1":
            return self.one()
        if name != "Z":
            raise UnknownNameError(f"generator {name!r} does not belong to {self.tag}")
        return self.word((Z,))


def _derivation_action(F: PresentedAlgebra, on_letter: Callable) -> Callable:
    """Right action of a primitive U-letter on a commutative F, as a derivation."""
    def act(f_word, u_letter) -> Element:
        out = Element(F.tag)
        for i, letter in enumerate(f_word):
            rest = f_word[:i] + f_word[i + 1:]
            image = on_letter(letter, u_letter)
            for w, c in image.items():
                out = out + F.normal_form(rest + w).scale(c)
        return out
    return act


@dataclass
class BicrossedModel:
    """A Hopf algebra together with its matched-pair model U⋈F and the identifying maps."""

    direct: HopfAlgebra
    product: BicrossedProduct
    to_direct: Callable
    from_direct: Callable
    primitive: tuple
    reports: List[dict] = field(default_factory=list)


def _split_word(direct: HopfAlgebra, w):
    u = tuple(letter for letter in w if letter in (X, Y))
    f = tuple(letter for letter in w if letter not in (X, Y))
    return u, f


def build_h1_as_bicrossed(trunc: Optional[TruncationSpec] = None) -> BicrossedModel:
    """H1 ≅ U⋈F with d_k◁Y = −k d_k, d_k◁X = −d_{k+1}, ρ(X) = 1⊗X + d1⊗Y."""
    direct, U, F = H1(), EnvelopingAlgebra(), DeltaFunctions()

    def on_letter(letter, u_letter):
        if u_letter == Y:
            return Element.monomial(F.tag, (letter,), -letter[1])
        return Element.monomial(F.tag, (d(letter[1] + 1),), -1)

    coaction_table = {
        X: Tensor((F.tag, U.tag), {(UNIT, (X,)): 1, ((d(1),), (Y,)): 1}),
        Y: Tensor.simple((F.tag, U.tag), (UNIT, (Y,))),
    }
    product = BicrossedProduct(U, F, _derivation_action(F, on_letter), coaction_table, tag="u#f")
    model = BicrossedModel(
        direct=direct,
        product=product,
        to_direct=lambda w: direct.word(w[0] + w[1]),
        from_direct=lambda w: product.word(_split_word(direct, w)),
        primitive=(d(1),),
    )
    if trunc is not None:
        model.reports.append(_check_model(model, trunc))
    return model


def build_h1s_as_bicrossed(trunc: Optional[TruncationSpec] = None) -> BicrossedModel:
    """H1s ≅ U⋈ℂ[Z] with Z◁X = −Z²/2, Z◁Y = −Z, ρ(X) = 1⊗X + Z⊗Y."""
    direct, U, F = H1s(), EnvelopingAlgebra(), ZPolynomials()

    def on_letter(letter, u_letter):
        if u_letter == Y:
            return Element.monomial(F.tag, (Z,), -1)
        return Element.monomial(F.tag, (Z, Z), Fraction(-1, 2))

    coaction_table = {
        X: Tensor((F.tag, U.tag), {(UNIT, (X,)): 1, ((Z,), (Y,)): 1}),
        Y: Tensor.simple((F.tag, U.tag), (UNIT, (Y,))),
    }
    product = BicrossedProduct(U, F, _derivation_action(F, on_letter), coaction_table, tag="u#zpoly")
    model = BicrossedModel(
        direct=direct,
        product=product,
        to_direct=lambda w: direct.word(w[0] + w[1]),
        from_direct=lambda w: product.word(_split_word(direct, w)),
        primitive=(Z,),
    )
    if trunc is not None:
        model.reports.append(_check_model(model, trunc))
    return model


def _check_model(model: BicrossedModel, trunc: TruncationSpec) -> dict:
    words = [w for w in model.product.basis(trunc) if model.product.pbw_degree(w) <= 2]
    report = check_isomorphism(model.product, model.direct, model.to_direct, words)
    logger.info(f"{model.product.tag} -> {model.direct.tag}: {report['status']}")
    return report


@dataclass
class CoverModel:
    """A sigma-cover with its cocrossed model H⋊K; for tree covers the model is the presentation."""

    direct: HopfAlgebra
    base: HopfAlgebra
    K: GroupAlgebra
    coaction: Coaction
    product: CocrossedProduct
    reports: List[dict] = field(default_factory=list)

    def phi(self, w) -> Element:
        """Φ(σ^m h) = h⋊σ^m."""
        if self.direct is self.product:
            return self.product.word(w)
        grouplike = tuple(letter for letter in w if letter[0] == "s")
        body = tuple(letter for letter in w if letter[0] != "s")
        return self.product.word((body, grouplike))


def build_h1dag(modulus: Optional[int] = None, trunc: Optional[TruncationSpec] = None) -> CoverModel:
    """Direct presentation of the cover and its cocrossed model via ρ(h) = σ^{|h|}⊗h."""
    direct = H1Dagger(modulus)
    base = H1()
    K = GroupAlgebra(modulus)
    coaction = grading_coaction(base, K)
    product = CocrossedProduct(base, K, coaction, tag=f"h1#{K.tag}")
    model = CoverModel(direct, base, K, coaction, product)
    if trunc is not None:
        words = [w for w in direct.basis(trunc) if direct.pbw_degree(w) <= 2]
        report = check_isomorphism(direct, product, model.phi, words)
        logger.info(f"{direct.tag} -> {product.tag}: {report['status']}")
        model.reports.append(report)
    return model


def modular_pair(H: HopfAlgebra, k: int = 0) -> ModularPair:
    """(δ, σ^k) with δ(Y) = 1; σ^k is ignored by algebras without σ."""
    delta = Character(H.tag, {"Y": 1}, name="delta")
    grouplike = H.unit_word()
    if k and hasattr(H, "sigma_word"):
        grouplike = H.sigma_word(k)
    elif isinstance(H, CocrossedProduct):
        grouplike = (H.H.unit_word(), H.K.group_word(k))
    label = "(delta, 1)" if not k else f"(delta, s^{k})"
    return ModularPair(delta, grouplike, label=label)


def _parse_modulus(name: str, prefix: str) -> int:
    try:
        value = int(name[len(prefix):])
    except ValueError:
        raise UnknownNameError(f"bad modulus in algebra name {name!r}")
    if value < 2:
        raise UnknownNameError(f"modulus in {name!r} must be at least 2")
    return value


_CACHE: Dict[Tuple, HopfAlgebra] = {}


def get_algebra(name: str, trunc: Optional[TruncationSpec] = None) -> HopfAlgebra:
    """Registered algebra by CLI name; instances are shared so memo tables persist.

    Without `trunc` the algebra is exact. With it, d_k past `trunc.delta_cap` and
    trees past `trunc.tree_cap` raise CapExceededError, whether typed or produced.
    """
    caps = (None, None) if trunc is None else (trunc.delta_cap, trunc.tree_cap)
    key = (name,) + caps
    if key in _CACHE:
        return _CACHE[key]
    max_delta_index, max_tree_size = caps
    if name == "h1":
        algebra = H1(max_delta_index)
    elif name == "h1s":
        algebra = H1s()
    elif name == "h1dag":
        algebra = H1Dagger(max_delta_index=max_delta_index)
    elif name.startswith("h1dagN:"):
        algebra = H1Dagger(_parse_modulus(name, "h1dagN:"), max_delta_index)
    elif name == "K":
        algebra = GroupAlgebra()
    elif name.startswith("KmodN:"):
        algebra = GroupAlgebra(_parse_modulus(name, "KmodN:"))
    elif name == "u":
        algebra = EnvelopingAlgebra()
    elif name == "f":
        algebra = DeltaFunctions(max_delta_index)
    elif name == "zpoly":
        algebra = ZPolynomials()
    elif name in ("hrt", "hck", "hckdag") or name.startswith("hckdagN:"):
        import trees
        algebra = trees.get_tree_algebra(name, max_tree_size)
    else:
        raise UnknownNameError(f"unknown algebra {name!r}")
    _CACHE[key] = algebra
    return algebra


ALGEBRA_NAMES = ["h1", "h1s", "h1dag", "h1dagN:<N>", "K", "KmodN:<N>", "u", "f", "zpoly",
                 "hrt", "hck", "hckdag", "hckdagN:<N>"]
