"""
Algebra-agnostic Hopf layer.

Concrete algebras subclass HopfAlgebra (or PresentedAlgebra when they are
given by generators and commutation rules). Composite algebras built from a
coaction (CocrossedProduct) or from an action and a coaction (BicrossedProduct)
live here too, together with the axiom checks that return report dicts.
"""

import itertools
import logging
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from errors import CapExceededError, TransverseError
from exact_kernel import Element, Tensor, TruncationSpec, splice, tensor_product

logger = logging.getLogger(__name__)

UNIT = ()

# Letter formatters by letter head; trees.py registers the tree formatter.
LETTER_FORMATTERS: Dict[str, Callable] = {
    "X": lambda letter: "X",
    "Y": lambda letter: "Y",
    "Z": lambda letter: "Z",
    "d": lambda letter: f"d{letter[1]}",
}


def letter_name(letter) -> Tuple[str, int]:
    """Name and exponent of a letter; sigma letters carry their exponent."""
    if letter[0] == "s":
        return "s", letter[1]
    return LETTER_FORMATTERS[letter[0]](letter), 1


def _accumulate(out: Dict, key, value):
    total = out.get(key, 0) + value
    if total:
        out[key] = total
    else:
        out.pop(key, None)


class HopfAlgebra:
    """Descriptor of a Hopf algebra with a canonical word basis."""

    tag = "hopf"
    is_commutative = False

    def unit_word(self):
        return UNIT

    def one(self) -> Element:
        return Element.monomial(self.tag, self.unit_word())

    def word(self, word, coeff=1) -> Element:
        return Element.monomial(self.tag, word, coeff)

    def multiply_words(self, u, v) -> Element:
        raise NotImplementedError

    def coproduct_word(self, w) -> Tensor:
        raise NotImplementedError

    def counit_word(self, w) -> Fraction:
        raise NotImplementedError

    def antipode_word(self, w) -> Element:
        raise NotImplementedError

    def weight_word(self, w) -> int:
        raise NotImplementedError

    def letters(self, w) -> List:
        raise NotImplementedError

    def pbw_degree(self, w) -> int:
        return sum(1 for letter in self.letters(w) if letter[0] != "s")

    def basis(self, trunc: TruncationSpec) -> List:
        raise NotImplementedError

    def generators(self) -> List:
        raise NotImplementedError

    def generator_element(self, name: str) -> Element:
        raise NotImplementedError

    def format_word(self, w) -> str:
        parts = []
        for letter, run in itertools.groupby(self.letters(w)):
            name, power = letter_name(letter)
            power *= len(list(run))
            parts.append(name if power == 1 else f"{name}^{power}")
        return "*".join(parts) if parts else "1"

    # linear extensions

    def multiply(self, a: Element, b: Element) -> Element:
        out: Dict = {}
        for u, cu in a.items():
            for v, cv in b.items():
                for w, cw in self.multiply_words(u, v).items():
                    _accumulate(out, w, cu * cv * cw)
        return Element(self.tag, out)

    def product(self, factors: Iterable[Element]) -> Element:
        result = self.one()
        for factor in factors:
            result = self.multiply(result, factor)
        return result

    def coproduct(self, x: Element) -> Tensor:
        out: Dict = {}
        for w, c in x.items():
            for key, c2 in self.coproduct_word(w).items():
                _accumulate(out, key, c * c2)
        return Tensor((self.tag, self.tag), out)

    def counit(self, x: Element) -> Fraction:
        return sum((c * self.counit_word(w) for w, c in x.items()), Fraction(0))

    def antipode(self, x: Element) -> Element:
        out: Dict = {}
        for w, c in x.items():
            for w2, c2 in self.antipode_word(w).items():
                _accumulate(out, w2, c * c2)
        return Element(self.tag, out)

    def weight(self, x: Element):
        """Common ad-Y eigenvalue of the terms, or INHOMOGENEOUS."""
        weights = {self.weight_word(w) for w in x}
        if len(weights) == 1:
            return weights.pop()
        if not weights:
            return 0
        return INHOMOGENEOUS

    def format_element(self, x: Element) -> str:
        from expressions import format_element
        return format_element(self, x)


INHOMOGENEOUS = "inhomogeneous"


def multiply_tensors(algebras: Sequence[HopfAlgebra], a: Tensor, b: Tensor) -> Tensor:
    """Slotwise product of two tensors over the same slot algebras."""
    out: Dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            pieces = [algebras[i].multiply_words(ka[i], kb[i]).terms for i in range(len(ka))]
            for combo in itertools.product(*(p.items() for p in pieces)):
                coeff = ca * cb
                for _w, c in combo:
                    coeff *= c
                _accumulate(out, tuple(w for w, _c in combo), coeff)
    return Tensor(a.slots, out)


def iterated_coproduct(H: HopfAlgebra, x: Element, legs: int) -> Tensor:
    """Δ^{(legs-1)}(x) with `legs` slots; zero legs gives the counit as a scalar."""
    if legs == 0:
        return Tensor.scalar(H.counit(x))
    result = Tensor.from_element(x)
    for position in range(legs - 1):
        result = splice(result, position, H.coproduct_word, (H.tag, H.tag))
    return result


def left_diagonal_action(H: HopfAlgebra, h: Element, tensor: Tensor) -> Tensor:
    """h·(t¹⊗…⊗tⁿ) = h₍₁₎t¹⊗…⊗h₍ₙ₎tⁿ."""
    legs = iterated_coproduct(H, h, tensor.degree)
    if tensor.degree == 0:
        return tensor.scale(legs.coefficient(()))
    return multiply_tensors([H] * tensor.degree, legs, tensor)


class PresentedAlgebra(HopfAlgebra):
    """Algebra given by letters, a letter order and commutation corrections.

    Words are tuples of letters in canonical (nondecreasing rank) order.
    Subclasses provide letter_rank, commutator, the letter tables for Δ, ε,
    weight, and the letters allowed in basis enumeration.
    """

    grouplike_heads = ("s",)

    def __init__(self):
        self._normal_cache: Dict[Tuple, Element] = {}
        self._coproduct_cache: Dict = {}
        self._antipode_cache: Dict = {}
        self._letter_antipode_cache: Dict = {}

    def letter_rank(self, letter):
        raise NotImplementedError

    def commutator(self, a, b) -> List[Tuple[Fraction, Tuple]]:
        """Correction terms c such that a·b = b·a + c when rank(a) > rank(b)."""
        return []

    def merge(self, a, b) -> Optional[Tuple]:
        """Merged letters for adjacent equal-rank letters that combine, else None."""
        if a[0] == "s" and b[0] == "s":
            return self.sigma_letters(a[1] + b[1])
        return None

    def sigma_letters(self, exponent: int) -> Tuple:
        if exponent == 0:
            return ()
        return (("s", exponent),)

    def letter_coproduct(self, letter) -> Tensor:
        raise NotImplementedError

    def letter_counit(self, letter) -> Fraction:
        return Fraction(1) if letter[0] in self.grouplike_heads else Fraction(0)

    def letter_weight(self, letter) -> int:
        return 0

    def is_grouplike(self, letter) -> bool:
        return letter[0] in self.grouplike_heads

    def letters(self, w) -> List:
        return list(w)

    def basis_letters(self, trunc: TruncationSpec) -> List:
        raise NotImplementedError

    def grouplike_prefixes(self, trunc: TruncationSpec) -> List[Tuple]:
        return [()]

    # normal form

    def _reduce_pair(self, a, b) -> Optional[List[Tuple[Fraction, Tuple]]]:
        ra, rb = self.letter_rank(a), self.letter_rank(b)
        if ra == rb:
            merged = self.merge(a, b)
            if merged is None:
                return None
            return [(Fraction(1), merged)]
        if ra < rb:
            return None
        return [(Fraction(1), (b, a))] + list(self.commutator(a, b))

    def normal_form(self, seq: Sequence) -> Element:
        """Canonical combination of an arbitrary letter sequence."""
        seq = tuple(seq)
        cached = self._normal_cache.get(seq)
        if cached is not None:
            return cached
        for i in range(len(seq) - 1):
            replacement = self._reduce_pair(seq[i], seq[i + 1])
            if replacement is None:
                continue
            out: Dict = {}
            for coeff, middle in replacement:
                for w, c in self.normal_form(seq[:i] + tuple(middle) + seq[i + 2:]).items():
                    _accumulate(out, w, coeff * c)
            result = Element(self.tag, out)
            break
        else:
            result = Element.monomial(self.tag, seq)
        self._normal_cache[seq] = result
        return result

    def multiply_words(self, u, v) -> Element:
        return self.normal_form(tuple(u) + tuple(v))

    # Hopf structure from letter tables

    def coproduct_word(self, w) -> Tensor:
        cached = self._coproduct_cache.get(w)
        if cached is not None:
            return cached
        if not w:
            result = Tensor.simple((self.tag, self.tag), (UNIT, UNIT))
        else:
            result = multiply_tensors([self, self], self.coproduct_word(w[:-1]),
                                      self.letter_coproduct(w[-1]))
        self._coproduct_cache[w] = result
        return result

    def counit_word(self, w) -> Fraction:
        value = Fraction(1)
        for letter in w:
            value *= self.letter_counit(letter)
        return value

    def letter_antipode(self, letter) -> Element:
        cached = self._letter_antipode_cache.get(letter)
        if cached is not None:
            return cached
        if self.is_grouplike(letter):
            result = self.normal_form(self.sigma_letters(-letter[1]))
        else:
            # m(S⊗id)Δ(l) = 0 with Δ(l) = l⊗1 + Σ a⊗b
            out: Dict = {}
            for (a, b), c in self.coproduct_word((letter,)).items():
                if a == (letter,) and b == UNIT:
                    continue
                for w, c2 in self.multiply(self.antipode_word(a), self.word(b)).items():
                    _accumulate(out, w, -c * c2)
            result = Element(self.tag, out)
        self._letter_antipode_cache[letter] = result
        return result

    def antipode_word(self, w) -> Element:
        cached = self._antipode_cache.get(w)
        if cached is not None:
            return cached
        if not w:
            result = self.one()
        else:
            result = self.multiply(self.antipode_word(w[1:]), self.letter_antipode(w[0]))
        self._antipode_cache[w] = result
        return result

    def weight_word(self, w) -> int:
        return sum(self.letter_weight(letter) for letter in w)

    def basis(self, trunc: TruncationSpec) -> List:
        letters = sorted(self.basis_letters(trunc), key=self.letter_rank)
        words = []
        for prefix in self.grouplike_prefixes(trunc):
            for size in range(trunc.pbw_cap + 1):
                for combo in itertools.combinations_with_replacement(letters, size):
                    word = tuple(prefix) + combo
                    if trunc.weight is not None and self.weight_word(word) != trunc.weight:
                        continue
                    words.append(word)
        words.sort(key=lambda w: (self.pbw_degree(w), [self.letter_rank(l) for l in w]))
        return words


class Character:
    """Algebra morphism to the rationals given by its values on generator names."""

    def __init__(self, tag: str, values: Optional[Dict[str, Fraction]] = None, name: str = "chi"):
        self.tag = tag
        self.values = {k: Fraction(v) for k, v in (values or {}).items()}
        self.name = name

    def letter_value(self, letter) -> Fraction:
        name, power = letter_name(letter)
        if name == "s":
            return self.values.get("s", Fraction(1)) ** power
        return self.values.get(name, Fraction(0))

    def word_value(self, H: HopfAlgebra, w) -> Fraction:
        value = Fraction(1)
        for letter in H.letters(w):
            value *= self.letter_value(letter)
        return value

    def __call__(self, H: HopfAlgebra, x: Element) -> Fraction:
        return sum((c * self.word_value(H, w) for w, c in x.items()), Fraction(0))


def counit_character(H: HopfAlgebra) -> Character:
    return Character(H.tag, {}, name="epsilon")


def modular_character(H: HopfAlgebra) -> Character:
    """δ(Y) = 1 and zero on the other non-grouplike generators."""
    return Character(H.tag, {"Y": 1}, name="delta")


class ModularPair:
    """Character and group-like element; an MPI when S_δ² = Ad σ."""

    def __init__(self, delta: Character, sigma, label: str = ""):
        self.delta = delta
        self.sigma = sigma
        self.label = label or f"({delta.name}, sigma)"


def twisted_antipode(H: HopfAlgebra, delta: Character, x: Element) -> Element:
    """S_δ(x) = Σ δ(x₍₁₎) S(x₍₂₎)."""
    out: Dict = {}
    for w, c in x.items():
        for (a, b), c2 in H.coproduct_word(w).items():
            value = delta.word_value(H, a)
            if value:
                for w2, c3 in H.antipode_word(b).items():
                    _accumulate(out, w2, c * c2 * value * c3)
    return Element(H.tag, out)


def _report(check: str, H: HopfAlgebra, checked: int, witness=None, **extra) -> dict:
    report = {
        "check": check,
        "algebra": H.tag,
        "status": "pass" if witness is None else "fail",
        "checked": checked,
        "witness": witness,
    }
    report.update(extra)
    if witness is None:
        logger.debug(f"{check} on {H.tag}: {checked} cases pass")
    else:
        logger.warning(f"{check} on {H.tag} fails at {witness}")
    return report


def check_hopf_axioms(H: HopfAlgebra, trunc: TruncationSpec, words: Optional[List] = None) -> dict:
    """Coassociativity, counit and antipode identities on basis words."""
    words = H.basis(trunc) if words is None else words
    tags2 = (H.tag, H.tag)
    for w in words:
        delta = H.coproduct_word(w)
        left = splice(delta, 0, H.coproduct_word, tags2)
        right = splice(delta, 1, H.coproduct_word, tags2)
        if left != right:
            return _report("coassociativity", H, len(words), H.format_word(w))
        x = H.word(w)
        counit_left = splice(delta, 0, lambda u: Tensor.scalar(H.counit_word(u)), ())
        counit_right = splice(delta, 1, lambda u: Tensor.scalar(H.counit_word(u)), ())
        if counit_left.to_element() != x or counit_right.to_element() != x:
            return _report("counit", H, len(words), H.format_word(w))
        unit_part = H.one().scale(H.counit_word(w))
        left_conv = Element(H.tag)
        right_conv = Element(H.tag)
        for (a, b), c in delta.items():
            left_conv = left_conv + H.multiply(H.antipode_word(a), H.word(b)).scale(c)
            right_conv = right_conv + H.multiply(H.word(a), H.antipode_word(b)).scale(c)
        if left_conv != unit_part or right_conv != unit_part:
            return _report("antipode", H, len(words), H.format_word(w))
    return _report("hopf-axioms", H, len(words))


def check_character(H: HopfAlgebra, chi: Character, trunc: TruncationSpec) -> dict:
    """χ(uv) = χ(u)χ(v) on pairs of basis words."""
    words = H.basis(trunc)
    for u in words:
        for v in words:
            if chi(H, H.multiply_words(u, v)) != chi.word_value(H, u) * chi.word_value(H, v):
                return _report("character", H, len(words) ** 2,
                               f"{H.format_word(u)} , {H.format_word(v)}")
    return _report("character", H, len(words) ** 2)


def check_mpi(H: HopfAlgebra, pair: ModularPair, trunc: TruncationSpec) -> dict:
    """S_δ²(w) = σ w σ⁻¹ on every basis word within the cap; first failure is the witness."""
    sigma = H.word(pair.sigma)
    sigma_inv = H.antipode(sigma)
    if H.coproduct(sigma) != tensor_product(sigma, sigma) or H.counit(sigma) != 1:
        return _report("mpi", H, 0, "sigma is not group-like", pair=pair.label)
    if pair.delta(H, sigma) != 1:
        return _report("mpi", H, 0, "delta(sigma) != 1", pair=pair.label)
    words = H.basis(trunc)
    for w in words:
        x = H.word(w)
        lhs = twisted_antipode(H, pair.delta, twisted_antipode(H, pair.delta, x))
        rhs = H.product([sigma, x, sigma_inv])
        if lhs != rhs:
            return _report("mpi", H, len(words), H.format_word(w), pair=pair.label,
                           difference=H.format_element(lhs - rhs))
    return _report("mpi", H, len(words), pair=pair.label)


class Coaction:
    """Left coaction ρ: H → K⊗H given on basis words, extended linearly."""

    def __init__(self, H: HopfAlgebra, K: HopfAlgebra, on_word: Callable, label: str = "rho"):
        self.H = H
        self.K = K
        self._on_word = on_word
        self._cache: Dict = {}
        self.label = label

    def apply_word(self, w) -> Tensor:
        cached = self._cache.get(w)
        if cached is None:
            cached = self._on_word(w)
            self._cache[w] = cached
        return cached

    def apply(self, x: Element) -> Tensor:
        out: Dict = {}
        for w, c in x.items():
            for key, c2 in self.apply_word(w).items():
                _accumulate(out, key, c * c2)
        return Tensor((self.K.tag, self.H.tag), out)

    def iterate_word(self, w, legs: int) -> Tensor:
        """w₍₋legs₎⊗…⊗w₍₋₁₎⊗w₍₀₎; the outermost leg comes first."""
        result = Tensor.simple((self.H.tag,), (w,))
        for position in range(legs):
            result = splice(result, position, self.apply_word, (self.K.tag, self.H.tag))
        return result

    def tensor_coaction(self, key: Tuple) -> Tensor:
        """(h¹⊗…⊗hⁿ)₍₋₁₎ ⊗ (h¹⊗…⊗hⁿ)₍₀₎ with the K-parts multiplied together."""
        result = Tensor.simple((self.K.tag,), (self.K.unit_word(),))
        for w in key:
            image = self.apply_word(w)
            out: Dict = {}
            for (k_word, *rest), c in result.items():
                for (k2, h2), c2 in image.items():
                    for k3, c3 in self.K.multiply_words(k_word, k2).items():
                        _accumulate(out, (k3, *rest, h2), c * c2 * c3)
            result = Tensor(result.slots + (self.H.tag,), out)
        return result


def grading_coaction(H: HopfAlgebra, K) -> Coaction:
    """ρ(h) = σ^{|h|}⊗h for weight-homogeneous basis words."""
    def on_word(w):
        return Tensor.simple((K.tag, H.tag), (K.group_word(H.weight_word(w)), w))
    return Coaction(H, K, on_word, label="sigma^weight")


def trivial_coaction(H: HopfAlgebra, K: HopfAlgebra) -> Coaction:
    return Coaction(H, K, lambda w: Tensor.simple((K.tag, H.tag), (K.unit_word(), w)), label="trivial")


def check_comodule_hopf(H: HopfAlgebra, K: HopfAlgebra, coaction: Coaction, trunc: TruncationSpec) -> dict:
    """Comodule-algebra and comodule-coalgebra identities, plus colinearity of S."""
    words = H.basis(trunc)
    kh = (K.tag, H.tag)
    one = coaction.apply_word(H.unit_word())
    if one != Tensor.simple(kh, (K.unit_word(), H.unit_word())):
        return _report("comodule-hopf", H, 0, "rho(1)", axiom="c-a-2")
    for w in words:
        rho = coaction.apply_word(w)
        # coassociativity and counit of the coaction itself
        if splice(rho, 0, K.coproduct_word, (K.tag, K.tag)) != splice(rho, 1, coaction.apply_word, kh):
            return _report("comodule-hopf", H, len(words), H.format_word(w), axiom="coaction-coassociativity")
        if splice(rho, 0, lambda k: Tensor.scalar(K.counit_word(k)), ()).to_element() != H.word(w):
            return _report("comodule-hopf", H, len(words), H.format_word(w), axiom="coaction-counit")
    for u in words:
        for v in words:
            lhs = coaction.apply(H.multiply_words(u, v))
            rhs = multiply_tensors([K, H], coaction.apply_word(u), coaction.apply_word(v))
            if lhs != rhs:
                return _report("comodule-hopf", H, len(words) ** 2,
                               f"{H.format_word(u)} , {H.format_word(v)}", axiom="c-a-1")
    for w in words:
        rho = coaction.apply_word(w)
        # c-c-1: h₍₋₁₎⊗Δ(h₍₀₎) = h₍₁₎₍₋₁₎h₍₂₎₍₋₁₎⊗h₍₁₎₍₀₎⊗h₍₂₎₍₀₎
        lhs = splice(rho, 1, H.coproduct_word, (H.tag, H.tag))
        rhs = H.coproduct_word(w).map_terms((K.tag, H.tag, H.tag), coaction.tensor_coaction)
        if lhs != rhs:
            return _report("comodule-hopf", H, len(words), H.format_word(w), axiom="c-c-1")
        # c-c-2: h₍₋₁₎ε(h₍₀₎) = ε(h)1
        k_part = splice(rho, 1, lambda h: Tensor.scalar(H.counit_word(h)), ()).to_element()
        if k_part != K.one().scale(H.counit_word(w)):
            return _report("comodule-hopf", H, len(words), H.format_word(w), axiom="c-c-2")
        # colinearity of the antipode
        lhs = coaction.apply(H.antipode_word(w))
        rhs = splice(rho, 1, lambda h: Tensor.from_element(H.antipode_word(h)), (H.tag,))
        if lhs != rhs:
            return _report("comodule-hopf", H, len(words), H.format_word(w), axiom="antipode-colinear")
    return _report("comodule-hopf", H, len(words) ** 2, coaction=coaction.label)


class CocrossedProduct(HopfAlgebra):
    """H⋊K for a K-comodule Hopf algebra H and commutative K.

    Multiplication is the tensor product one; Δ(h⋊k) = h₍₁₎⋊h₍₂₎₍₋₁₎k₍₁₎ ⊗ h₍₂₎₍₀₎⋊k₍₂₎
    and S(h⋊k) = S(h₍₀₎)⋊S(h₍₋₁₎k).
    """

    def __init__(self, H: HopfAlgebra, K: HopfAlgebra, coaction: Coaction, tag: Optional[str] = None):
        if not K.is_commutative:
            raise TransverseError(f"cocrossed product needs a commutative K, got {K.tag}")
        self.H = H
        self.K = K
        self.coaction = coaction
        self.tag = tag or f"{H.tag}#{K.tag}"
        self._coproduct_cache: Dict = {}
        self._antipode_cache: Dict = {}

    def unit_word(self):
        return (self.H.unit_word(), self.K.unit_word())

    def multiply_words(self, u, v) -> Element:
        out: Dict = {}
        for h, ch in self.H.multiply_words(u[0], v[0]).items():
            for k, ck in self.K.multiply_words(u[1], v[1]).items():
                _accumulate(out, (h, k), ch * ck)
        return Element(self.tag, out)

    def coproduct_word(self, w) -> Tensor:
        cached = self._coproduct_cache.get(w)
        if cached is not None:
            return cached
        h, k = w
        H, K = self.H, self.K
        out: Dict = {}
        k_split = K.coproduct_word(k)
        for (h1, h2), c in H.coproduct_word(h).items():
            for (kk, h20), c2 in self.coaction.apply_word(h2).items():
                for (k1, k2), c3 in k_split.items():
                    for k_left, c4 in K.multiply_words(kk, k1).items():
                        _accumulate(out, ((h1, k_left), (h20, k2)), c * c2 * c3 * c4)
        result = Tensor((self.tag, self.tag), out)
        self._coproduct_cache[w] = result
        return result

    def counit_word(self, w) -> Fraction:
        return self.H.counit_word(w[0]) * self.K.counit_word(w[1])

    def antipode_word(self, w) -> Element:
        cached = self._antipode_cache.get(w)
        if cached is not None:
            return cached
        h, k = w
        out: Dict = {}
        for (kk, h0), c in self.coaction.apply_word(h).items():
            s_k = self.K.antipode(self.K.multiply_words(kk, k))
            for h_s, c2 in self.H.antipode_word(h0).items():
                for k_s, c3 in s_k.items():
                    _accumulate(out, (h_s, k_s), c * c2 * c3)
        result = Element(self.tag, out)
        self._antipode_cache[w] = result
        return result

    def weight_word(self, w) -> int:
        return self.H.weight_word(w[0])

    def letters(self, w) -> List:
        return self.H.letters(w[0]) + self.K.letters(w[1])

    def pbw_degree(self, w) -> int:
        return self.H.pbw_degree(w[0])

    def basis(self, trunc: TruncationSpec) -> List:
        return [(h, k) for h in self.H.basis(trunc) for k in self.K.basis(trunc)]

    def generators(self) -> List:
        return [(g, self.K.unit_word()) for g in self.H.generators()] + \
               [(self.H.unit_word(), g) for g in self.K.generators()]

    def embed_h(self, x: Element) -> Element:
        return Element(self.tag, {(w, self.K.unit_word()): c for w, c in x.items()})

    def embed_k(self, x: Element) -> Element:
        return Element(self.tag, {(self.H.unit_word(), w): c for w, c in x.items()})

    def generator_element(self, name: str) -> Element:
        if name in ("s", "s^-1"):
            return self.embed_k(self.K.generator_element(name))
        return self.embed_h(self.H.generator_element(name))

    def format_word(self, w) -> str:
        h, k = w
        if not self.K.letters(k):
            return self.H.format_word(h)
        if not self.H.letters(h):
            return self.K.format_word(k)
        return f"{self.K.format_word(k)}*{self.H.format_word(h)}"


def tensor_character(H: CocrossedProduct, alpha: Character, beta: Character) -> Character:
    """α⊗β on H⋊K; letter names of H and K are disjoint."""
    values = dict(alpha.values)
    values.update(beta.values)
    return Character(H.tag, values, name=f"{alpha.name}x{beta.name}")


def combined_mpi(product: CocrossedProduct, alpha_mu: ModularPair, beta_nu: ModularPair,
                 trunc: TruncationSpec) -> Tuple[Optional[ModularPair], dict]:
    """(α⊗β, μ⋊ν) on H⋊K after checking α colinear, μ coinvariant and β stable."""
    H, K, rho = product.H, product.K, product.coaction
    alpha, beta = alpha_mu.delta, beta_nu.delta
    words = H.basis(trunc)
    for w in words:
        # α(h₍₀₎)h₍₋₁₎ = α(h)1
        k_part = Element(K.tag)
        for (k, h0), c in rho.apply_word(w).items():
            k_part = k_part + K.word(k).scale(c * alpha.word_value(H, h0))
        if k_part != K.one().scale(alpha.word_value(H, w)):
            return None, _report("combined-mpi", H, len(words), H.format_word(w), condition="alpha-colinear")
        # β(h₍₋₁₎)h₍₀₎ = h
        h_part = Element(H.tag)
        for (k, h0), c in rho.apply_word(w).items():
            h_part = h_part + H.word(h0).scale(c * beta.word_value(K, k))
        if h_part != H.word(w):
            return None, _report("combined-mpi", H, len(words), H.format_word(w), condition="beta-stable")
    mu = alpha_mu.sigma
    if rho.apply_word(mu) != Tensor.simple((K.tag, H.tag), (K.unit_word(), mu)):
        return None, _report("combined-mpi", H, len(words), H.format_word(mu), condition="mu-coinvariant")
    pair = ModularPair(tensor_character(product, alpha, beta), (mu, beta_nu.sigma),
                       label=f"({alpha.name}x{beta.name}, mu#nu)")
    return pair, _report("combined-mpi", H, len(words))


class SaydModule:
    """Right module, left comodule over H on a finite carrier basis.

    `act(m, h_word)` returns an Element over the carrier tag and
    `coact(m)` a Tensor with slots (H.tag, carrier tag).
    """

    def __init__(self, H: HopfAlgebra, tag: str, carrier: Sequence, act: Callable, coact: Callable):
        self.H = H
        self.tag = tag
        self.carrier = list(carrier)
        self._act = act
        self._coact = coact

    def act(self, m, h_word) -> Element:
        return self._act(m, h_word)

    def coact(self, m) -> Tensor:
        return self._coact(m)

    def act_element(self, x: Element, h: Element) -> Element:
        out: Dict = {}
        for m, c in x.items():
            for w, c2 in h.items():
                for m2, c3 in self.act(m, w).items():
                    _accumulate(out, m2, c * c2 * c3)
        return Element(self.tag, out)


def modular_pair_module(H: HopfAlgebra, pair: ModularPair) -> SaydModule:
    """The one-dimensional SAYD module ^σℂ_δ."""
    tag = f"C[{H.tag}]"
    return SaydModule(
        H, tag, [UNIT],
        act=lambda m, w: Element.monomial(tag, UNIT, pair.delta.word_value(H, w)),
        coact=lambda m: Tensor.simple((H.tag, tag), (pair.sigma, UNIT)),
    )


def tensor_power_module(H: HopfAlgebra, K: HopfAlgebra, coaction: Coaction, beta_nu: ModularPair,
                        carrier: Sequence) -> SaydModule:
    """H^{⊗q} over K: h̃·k = β(k)h̃ and ρ̄(h̃) = h̃₍₋₁₎ν ⊗ h̃₍₀₎.

    `carrier` is a finite list of q-tuples of H-words closed under the coaction.
    """
    q = len(carrier[0]) if carrier else 0
    tag = f"{H.tag}^{q}"
    beta, nu = beta_nu.delta, beta_nu.sigma

    def act(m, k_word) -> Element:
        return Element.monomial(tag, m, beta.word_value(K, k_word))

    def coact(m) -> Tensor:
        out: Dict = {}
        for (k, *hs), c in coaction.tensor_coaction(m).items():
            for k2, c2 in K.multiply_words(k, nu).items():
                _accumulate(out, (k2, tuple(hs)), c * c2)
        return Tensor((K.tag, tag), out)

    return SaydModule(K, tag, carrier, act, coact)


def check_sayd(M: SaydModule, words: Optional[List] = None) -> dict:
    """Anti-Yetter-Drinfeld condition on carrier × words, and stability."""
    H = M.H
    words = H.generators() if words is None else words
    pair_tags = (H.tag, M.tag)
    for m in M.carrier:
        coact = M.coact(m)
        # m₍₀₎m₍₋₁₎ = m
        stable = Element(M.tag)
        for (h, m0), c in coact.items():
            stable = stable + M.act(m0, h).scale(c)
        if stable != Element.monomial(M.tag, m):
            return _report("sayd", H, len(M.carrier), f"stability at {m!r}")
        for w in words:
            lhs_out: Dict = {}
            for m1, c in M.act(m, w).items():
                for key, c2 in M.coact(m1).items():
                    _accumulate(lhs_out, key, c * c2)
            lhs = Tensor(pair_tags, lhs_out)
            delta2 = iterated_coproduct(H, H.word(w), 3)
            rhs_out: Dict = {}
            for (h1, h2, h3), c in delta2.items():
                s3 = H.antipode_word(h3)
                for (hm, m0), c2 in coact.items():
                    left = H.multiply(H.multiply(s3, H.word(hm)), H.word(h1))
                    right = M.act(m0, h2)
                    for lw, c3 in left.items():
                        for rw, c4 in right.items():
                            _accumulate(rhs_out, (lw, rw), c * c2 * c3 * c4)
            rhs = Tensor(pair_tags, rhs_out)
            if lhs != rhs:
                return _report("sayd", H, len(M.carrier) * len(words), H.format_word(w),
                               carrier=repr(m))
    return _report("sayd", H, len(M.carrier) * len(words))


class BicrossedProduct(HopfAlgebra):
    """U⋈F from a matched pair: F acted on from the right by U, U coacted on by F.

    U is an enveloping algebra with primitive letters, F is commutative.
    `letter_action(f_word, u_letter)` gives f◁l and `letter_coaction` gives ρ on
    the letters of U; ρ is extended to words by
    ρ(u¹u²) = (u¹₍₋₁₎◁u²₍₁₎)u²₍₂₎₍₋₁₎ ⊗ u¹₍₀₎u²₍₂₎₍₀₎.
    """

    def __init__(self, U: PresentedAlgebra, F: PresentedAlgebra, letter_action: Callable,
                 letter_coaction: Dict, tag: str):
        self.U = U
        self.F = F
        self.tag = tag
        self._letter_action = letter_action
        self._letter_coaction = letter_coaction
        self._action_cache: Dict = {}
        self._rho_cache: Dict = {}
        self._coproduct_cache: Dict = {}
        self._antipode_cache: Dict = {}
        self._product_cache: Dict = {}
        self.coaction = Coaction(U, F, self.rho_word, label="matched-pair")

    def unit_word(self):
        return (UNIT, UNIT)

    # matched-pair data

    def act_word(self, f_word, u_word) -> Element:
        """f◁u for basis words, letter by letter."""
        key = (f_word, u_word)
        cached = self._action_cache.get(key)
        if cached is not None:
            return cached
        result = self.F.word(f_word)
        for letter in u_word:
            out: Dict = {}
            for f, c in result.items():
                for f2, c2 in self._letter_action(f, letter).items():
                    _accumulate(out, f2, c * c2)
            result = Element(self.F.tag, out)
        self._action_cache[key] = result
        return result

    def act(self, f: Element, u_word) -> Element:
        out: Dict = {}
        for w, c in f.items():
            for w2, c2 in self.act_word(w, u_word).items():
                _accumulate(out, w2, c * c2)
        return Element(self.F.tag, out)

    def rho_sequence(self, seq: Tuple) -> Tensor:
        """ρ on an arbitrary letter sequence by recursion on the last letter."""
        F, U = self.F, self.U
        fu = (F.tag, U.tag)
        if not seq:
            return Tensor.simple(fu, (UNIT, UNIT))
        head = self.rho_sequence(seq[:-1])
        letter = seq[-1]
        out: Dict = {}
        for (a, b), c in head.items():
            # (a◁l)⊗b
            for a2, c2 in self._letter_action(a, letter).items():
                _accumulate(out, (a2, b), c * c2)
            # a·l₍₋₁₎ ⊗ b·l₍₀₎
            for (f, u), c2 in self._letter_coaction[letter].items():
                for a3, c3 in F.multiply_words(a, f).items():
                    for b3, c4 in U.multiply_words(b, u).items():
                        _accumulate(out, (a3, b3), c * c2 * c3 * c4)
        return Tensor(fu, out)

    def rho_word(self, u_word) -> Tensor:
        cached = self._rho_cache.get(u_word)
        if cached is None:
            cached = self.rho_sequence(tuple(u_word))
            self._rho_cache[u_word] = cached
        return cached

    # Hopf structure

    def multiply_words(self, a, b) -> Element:
        """(u⋊f)(v⋊g) = u v₍₁₎ ⋊ (f◁v₍₂₎) g."""
        key = (a, b)
        cached = self._product_cache.get(key)
        if cached is not None:
            return cached
        (u, f), (v, g) = a, b
        out: Dict = {}
        for (v1, v2), c in self.U.coproduct_word(v).items():
            uv = self.U.multiply_words(u, v1)
            moved = self.act_word(f, v2)
            for fm, c2 in moved.items():
                for fg, c3 in self.F.multiply_words(fm, g).items():
                    for w, c4 in uv.items():
                        _accumulate(out, (w, fg), c * c2 * c3 * c4)
        result = Element(self.tag, out)
        self._product_cache[key] = result
        return result

    def coproduct_word(self, w) -> Tensor:
        """Δ(u⋊f) = u₍₁₎⋊u₍₂₎₍₋₁₎f₍₁₎ ⊗ u₍₂₎₍₀₎⋊f₍₂₎."""
        cached = self._coproduct_cache.get(w)
        if cached is not None:
            return cached
        u, f = w
        out: Dict = {}
        f_split = self.F.coproduct_word(f)
        for (u1, u2), c in self.U.coproduct_word(u).items():
            for (g, u20), c2 in self.rho_word(u2).items():
                for (f1, f2), c3 in f_split.items():
                    for gf, c4 in self.F.multiply_words(g, f1).items():
                        _accumulate(out, ((u1, gf), (u20, f2)), c * c2 * c3 * c4)
        result = Tensor((self.tag, self.tag), out)
        self._coproduct_cache[w] = result
        return result

    def counit_word(self, w) -> Fraction:
        return self.U.counit_word(w[0]) * self.F.counit_word(w[1])

    def antipode_word(self, w) -> Element:
        """S(u⋊f) = (1⋊S_F(u₍₋₁₎f))(S_U(u₍₀₎)⋊1)."""
        cached = self._antipode_cache.get(w)
        if cached is not None:
            return cached
        u, f = w
        result = Element(self.tag)
        for (g, u0), c in self.rho_word(u).items():
            left = Element(self.tag, {(UNIT, k): v for k, v in
                                      self.F.antipode(self.F.multiply_words(g, f)).items()})
            right = Element(self.tag, {(k, UNIT): v for k, v in self.U.antipode_word(u0).items()})
            result = result + self.multiply(left, right).scale(c)
        self._antipode_cache[w] = result
        return result

    def weight_word(self, w) -> int:
        return self.U.weight_word(w[0]) + self.F.weight_word(w[1])

    def letters(self, w) -> List:
        return self.U.letters(w[0]) + self.F.letters(w[1])

    def pbw_degree(self, w) -> int:
        return self.U.pbw_degree(w[0]) + self.F.pbw_degree(w[1])

    def basis(self, trunc: TruncationSpec) -> List:
        open_trunc = replace(trunc, weight=None)
        words = []
        for u in self.U.basis(open_trunc):
            for f in self.F.basis(open_trunc):
                w = (u, f)
                if self.pbw_degree(w) > trunc.pbw_cap:
                    continue
                if trunc.weight is not None and self.weight_word(w) != trunc.weight:
                    continue
                words.append(w)
        words.sort(key=lambda w: (self.pbw_degree(w), [self.U.letter_rank(l) for l in w[0]],
                                  [self.F.letter_rank(l) for l in w[1]]))
        return words

    def generators(self) -> List:
        return [(g, UNIT) for g in self.U.generators()] + [(UNIT, g) for g in self.F.generators()]

    def generator_element(self, name: str) -> Element:
        if name in ("X", "Y", "1"):
            return Element(self.tag, {(w, UNIT): c for w, c in self.U.generator_element(name).items()})
        return Element(self.tag, {(UNIT, w): c for w, c in self.F.generator_element(name).items()})

    def format_word(self, w) -> str:
        parts = [p for p in (self.U.format_word(w[0]), self.F.format_word(w[1])) if p != "1"]
        return "*".join(parts) if parts else "1"


def check_isomorphism(source: HopfAlgebra, target: HopfAlgebra, phi: Callable, words: Sequence) -> dict:
    """phi (word → Element of target) respects multiplication, Δ, ε and S on the given words."""
    def phi_el(x: Element) -> Element:
        out = Element(target.tag)
        for w, c in x.items():
            out = out + phi(w).scale(c)
        return out

    def phi_tensor(t: Tensor) -> Tensor:
        out = Tensor((target.tag, target.tag))
        for (a, b), c in t.items():
            out = out + tensor_product(phi(a), phi(b)).scale(c)
        return out

    for u in words:
        if phi_tensor(source.coproduct_word(u)) != target.coproduct(phi(u)):
            return _report("isomorphism", source, len(words), source.format_word(u), operation="coproduct")
        if phi_el(source.antipode_word(u)) != target.antipode(phi(u)):
            return _report("isomorphism", source, len(words), source.format_word(u), operation="antipode")
        if source.counit_word(u) != target.counit(phi(u)):
            return _report("isomorphism", source, len(words), source.format_word(u), operation="counit")
        for v in words:
            if phi_el(source.multiply_words(u, v)) != target.multiply(phi(u), phi(v)):
                return _report("isomorphism", source, len(words) ** 2,
                               f"{source.format_word(u)} , {source.format_word(v)}", operation="product")
    return _report("isomorphism", source, len(words) ** 2, target=target.tag)


def require_cap(value: int, cap: int, what: str):
    if value > cap:
        raise CapExceededError(f"{what} {value} exceeds cap {cap}")
