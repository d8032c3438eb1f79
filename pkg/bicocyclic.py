"""
Bicocyclic modules of a cocrossed product and their diagonals.

BicocyclicModule is 𝔠^{p,q} = K^{⊗p}⊗H^{⊗q} for a K-comodule Hopf algebra H;
a tensor in it carries its bidegree in its slot tags (K-slots first).
GeneralizedBicocyclic is 𝔛^{p,q} = N⊗_K K^{⊗p+1}⊗M⊗_H H^{⊗q+1} with SAYD
coefficients M over H and N over K. Rows, columns and the diagonal of
either are exposed as CocyclicModule views, so the identity suite of
cyclic.py applies to them unchanged.
"""

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from cyclic import (
    DEFAULT_COEFFICIENTS,
    CocyclicModule,
    CoefficientModule,
    StandardModule,
    random_tensor,
)
from errors import DimensionMismatchError, UnknownNameError
from exact_kernel import Element, Tensor, TruncationSpec, splice, tensor_product
from hopf import (
    Coaction,
    HopfAlgebra,
    ModularPair,
    SaydModule,
    _accumulate,
    _report,
    counit_character,
    left_diagonal_action,
    modular_pair_module,
)

logger = logging.getLogger(__name__)

Cochain = Dict[int, Tensor]


def _apply_block(x: Tensor, start: int, stop: int, fn: Callable, block_slots: Sequence[str]) -> Tensor:
    """Apply `fn` (Tensor → Tensor with `block_slots`) to slots [start, stop) of every term."""
    inner = x.slots[start:stop]
    slots = x.slots[:start] + tuple(block_slots) + x.slots[stop:]

    def on_key(key):
        image = fn(Tensor.simple(inner, key[start:stop]))
        head = Tensor.simple(x.slots[:start], key[:start])
        tail = Tensor.simple(x.slots[stop:], key[stop:])
        return tensor_product(tensor_product(head, image), tail)

    return x.map_terms(slots, on_key)


def _counit_slot(H: HopfAlgebra):
    return lambda w: Tensor.scalar(H.counit_word(w))


def _multiply_all(A: HopfAlgebra, words: Sequence) -> Element:
    result = A.one()
    for w in words:
        result = A.multiply(result, A.word(w))
    return result


def _elements_tensor(elements: Sequence[Element]) -> Tensor:
    result = Tensor.scalar()
    for element in elements:
        result = tensor_product(result, element)
    return result


def staircase_up(coaction: Coaction, hs: Sequence, ks: Sequence) -> Tensor:
    """⊤-staircase: slot j of K gets h¹…hʲ at leg −(n−j+1) times kʲ, then h¹₍₀₎⊗…⊗hⁿ₍₀₎."""
    H, K = coaction.H, coaction.K
    n = len(hs)
    legs = [coaction.iterate_word(h, n - i) for i, h in enumerate(hs)]
    slots = (K.tag,) * n + (H.tag,) * n
    out = Tensor(slots)
    for combo in itertools.product(*(leg.items() for leg in legs)):
        coeff = 1
        for _key, c in combo:
            coeff *= c
        k_parts = []
        for j in range(n):
            factors = [combo[i][0][j - i] for i in range(j + 1)] + [ks[j]]
            k_parts.append(_multiply_all(K, factors))
        h_parts = [H.word(combo[i][0][-1]) for i in range(n)]
        out = out + _elements_tensor(k_parts + h_parts).scale(coeff)
    return out


def staircase_down(coaction: Coaction, hs: Sequence, ks: Sequence) -> Tensor:
    """⊥-staircase: slot j gets hʲ₍₀₎ and S(h¹…hʲ at leg −(j−i+1))·kʲ; slots K^n then H^n."""
    H, K = coaction.H, coaction.K
    n = len(hs)
    legs = [coaction.iterate_word(h, n - i) for i, h in enumerate(hs)]
    slots = (K.tag,) * n + (H.tag,) * n
    out = Tensor(slots)
    for combo in itertools.product(*(leg.items() for leg in legs)):
        coeff = 1
        for _key, c in combo:
            coeff *= c
        k_parts = []
        for j in range(n):
            grouped = _multiply_all(K, [combo[i][0][n - 1 - j] for i in range(j + 1)])
            k_parts.append(K.multiply(K.antipode(grouped), K.word(ks[j])))
        h_parts = [H.word(combo[i][0][-1]) for i in range(n)]
        out = out + _elements_tensor(k_parts + h_parts).scale(coeff)
    return out


class BigradedModule:
    """Shared machinery of 𝔠 and 𝔛: views, commutation and the Alexander-Whitney map."""

    name = "bicocyclic"
    # False for a bicosimplicial module whose τ operators are not compatible
    cyclic = True

    def slots(self, p: int, q: int) -> tuple:
        raise NotImplementedError

    def bidegree(self, x: Tensor) -> Tuple[int, int]:
        raise NotImplementedError

    def h_face(self, i: int, x: Tensor) -> Tensor:
        raise NotImplementedError

    def h_degeneracy(self, j: int, x: Tensor) -> Tensor:
        raise NotImplementedError

    def h_cyclic(self, x: Tensor) -> Tensor:
        raise NotImplementedError

    def v_face(self, i: int, x: Tensor) -> Tensor:
        raise NotImplementedError

    def v_degeneracy(self, j: int, x: Tensor) -> Tensor:
        raise NotImplementedError

    def v_cyclic(self, x: Tensor) -> Tensor:
        raise NotImplementedError

    def h_normalized(self, p: int, q: int) -> List[int]:
        raise NotImplementedError

    def v_normalized(self, p: int, q: int) -> List[int]:
        raise NotImplementedError

    def slot_algebra(self, position: int, p: int, q: int) -> HopfAlgebra:
        raise NotImplementedError

    def slot_bases(self, p: int, q: int, trunc: TruncationSpec) -> List[List]:
        raise NotImplementedError

    def canonical(self, x: Tensor) -> Tensor:
        return x

    def zero(self, p: int, q: int) -> Tensor:
        return Tensor(self.slots(p, q))

    def _check_index(self, index: int, low: int, high: int, what: str):
        if not low <= index <= high:
            raise DimensionMismatchError(f"{what} index {index} outside [{low}, {high}]")

    # views

    def _view(self, key, factory):
        views = self.__dict__.setdefault("_views", {})
        if key not in views:
            views[key] = factory()
        return views[key]

    def row(self, q: int) -> "RowModule":
        return self._view(("row", q), lambda: RowModule(self, q))

    def column(self, p: int) -> "ColumnModule":
        return self._view(("column", p), lambda: ColumnModule(self, p))

    def diagonal(self) -> "DiagonalModule":
        return self._view("diagonal", lambda: DiagonalModule(self))

    def total(self) -> "TotalComplex":
        return self._view("total", lambda: TotalComplex(self))

    def sample(self, p: int, q: int, rng: random.Random, trunc: TruncationSpec, terms: int = 4,
               coefficients: Sequence[int] = DEFAULT_COEFFICIENTS, normalized: bool = False) -> Tensor:
        x = random_tensor(self.slot_bases(p, q, trunc), self.slots(p, q), rng, terms, coefficients)
        return self.normalize(x) if normalized else x

    def normalize(self, x: Tensor) -> Tensor:
        p, q = self.bidegree(x)
        x = self.row(q).normalize(x)
        return self.column(p).normalize(x)

    # horizontal/vertical commutation

    def commutation_failures(self, x: Tensor) -> List[str]:
        p, q = self.bidegree(x)
        horizontal = [(f"hd{i}", lambda y, i=i: self.h_face(i, y)) for i in range(p + 2)]
        horizontal += [(f"hs{j}", lambda y, j=j: self.h_degeneracy(j, y)) for j in range(p)]
        vertical = [(f"vd{i}", lambda y, i=i: self.v_face(i, y)) for i in range(q + 2)]
        vertical += [(f"vs{j}", lambda y, j=j: self.v_degeneracy(j, y)) for j in range(q)]
        if self.cyclic:
            horizontal.append(("ht", self.h_cyclic))
            vertical.append(("vt", self.v_cyclic))
        failures = []
        for h_name, h_op in horizontal:
            for v_name, v_op in vertical:
                if self.canonical(h_op(v_op(x))) != self.canonical(v_op(h_op(x))):
                    failures.append(f"[{h_name},{v_name}]")
        return failures

    # Alexander-Whitney

    def alexander_whitney(self, x: Tensor) -> Tensor:
        """(−1)^{p+q}(↑∂₀)^p →∂_n…→∂_{p+1}, bidegree (p, q) → diagonal level p+q."""
        p, q = self.bidegree(x)
        n = p + q
        y = x
        for i in range(p + 1, n + 1):
            y = self.h_face(i, y)
        for _ in range(p):
            y = self.v_face(0, y)
        return y.scale(-1 if n % 2 else 1)

    def aw(self, cochain: Cochain) -> Tensor:
        """AW summed over the components of a total cochain."""
        result = None
        for p in sorted(cochain):
            image = self.alexander_whitney(cochain[p])
            result = image if result is None else result + image
        if result is None:
            raise DimensionMismatchError("empty total cochain")
        return result


class BicocyclicModule(BigradedModule):
    """𝔠 for a K-comodule Hopf algebra H with MPIs (α, μ) on H and (β, ν) on K.

    →∂_{p+1}(k̃⊗h̃) = k̃⊗h̃₍₋₁₎ν⊗h̃₍₀₎ and →τ(k̃⊗h̃) = S_β(k¹)·(k²⊗…⊗kᵖ⊗νh̃₍₋₁₎)⊗h̃₍₀₎;
    the vertical operators are those of the standard module of (H, α, μ).
    """

    def __init__(self, H: HopfAlgebra, K: HopfAlgebra, coaction: Coaction, alpha_mu: ModularPair,
                 beta_nu: ModularPair, name: Optional[str] = None, cyclic: bool = True):
        if H.tag == K.tag:
            raise UnknownNameError(f"bicocyclic module needs distinct tags, got {H.tag} twice")
        self.H = H
        self.K = K
        self.coaction = coaction
        self.alpha_mu = alpha_mu
        self.beta_nu = beta_nu
        self.vertical = StandardModule(H, alpha_mu)
        self.horizontal = StandardModule(K, beta_nu)
        self.cyclic = cyclic
        self.name = name or f"C({K.tag}, {H.tag})"

    def slots(self, p: int, q: int) -> tuple:
        return (self.K.tag,) * p + (self.H.tag,) * q

    def bidegree(self, x: Tensor) -> Tuple[int, int]:
        p = sum(1 for tag in x.slots if tag == self.K.tag)
        return p, x.degree - p

    def slot_algebra(self, position: int, p: int, q: int) -> HopfAlgebra:
        return self.K if position < p else self.H

    def slot_bases(self, p: int, q: int, trunc: TruncationSpec) -> List[List]:
        return [self.K.basis(trunc)] * p + [self.H.basis(trunc)] * q

    def h_normalized(self, p: int, q: int) -> List[int]:
        return list(range(p))

    def v_normalized(self, p: int, q: int) -> List[int]:
        return list(range(p, p + q))

    # horizontal

    def _coact_tail(self, h_key) -> Tensor:
        """h̃₍₋₁₎ν ⊗ h̃₍₀₎ with slots (K, H^q)."""
        K, nu = self.K, self.beta_nu.sigma
        rho = self.coaction.tensor_coaction(h_key)
        out: Dict = {}
        for (k, *hs), c in rho.items():
            for k2, c2 in K.multiply_words(k, nu).items():
                _accumulate(out, (k2, *hs), c * c2)
        return Tensor(rho.slots, out)

    def h_face(self, i: int, x: Tensor) -> Tensor:
        p, q = self.bidegree(x)
        self._check_index(i, 0, p + 1, "horizontal face")
        K = self.K
        if i == 0:
            return tensor_product(K.one(), x)
        if i <= p:
            return splice(x, i - 1, K.coproduct_word, (K.tag, K.tag))
        slots = self.slots(p + 1, q)

        def on_key(key):
            head = Tensor.simple(self.slots(p, 0), key[:p])
            return tensor_product(head, self._coact_tail(key[p:]))

        return x.map_terms(slots, on_key)

    def h_degeneracy(self, j: int, x: Tensor) -> Tensor:
        p, _q = self.bidegree(x)
        self._check_index(j, 0, p - 1, "horizontal degeneracy")
        return splice(x, j, _counit_slot(self.K), ())

    def h_cyclic(self, x: Tensor) -> Tensor:
        p, q = self.bidegree(x)
        if p == 0:
            return x
        K = self.K
        slots = self.slots(p, q)

        def on_key(key):
            out = Tensor(slots)
            twisted = self.horizontal.twisted(key[0])
            for (k, *hs), c in self._coact_tail(key[p:]).items():
                tail = Tensor.simple((K.tag,) * p, key[1:p] + (k,))
                moved = left_diagonal_action(K, twisted, tail)
                out = out + tensor_product(moved, Tensor.simple((self.H.tag,) * q, hs)).scale(c)
            return out

        return x.map_terms(slots, on_key)

    # vertical

    def _vertical(self, x: Tensor, op: Callable, q_out: int) -> Tensor:
        p, q = self.bidegree(x)
        return _apply_block(x, p, p + q, op, (self.H.tag,) * q_out)

    def v_face(self, i: int, x: Tensor) -> Tensor:
        _p, q = self.bidegree(x)
        self._check_index(i, 0, q + 1, "vertical face")
        return self._vertical(x, lambda y: self.vertical.face(i, y), q + 1)

    def v_degeneracy(self, j: int, x: Tensor) -> Tensor:
        p, q = self.bidegree(x)
        self._check_index(j, 0, q - 1, "vertical degeneracy")
        return splice(x, p + j, _counit_slot(self.H), ())

    def v_cyclic(self, x: Tensor) -> Tensor:
        _p, q = self.bidegree(x)
        return self._vertical(x, self.vertical.cyclic, q)


class _View(CocyclicModule):
    def __init__(self, bico: BigradedModule):
        self.bico = bico

    def canonical(self, x: Tensor) -> Tensor:
        return self.bico.canonical(x)

    @property
    def cosimplicial_only(self) -> bool:
        return not self.bico.cyclic

    def identity_failures(self, x: Tensor) -> List[str]:
        failures = super().identity_failures(x)
        if self.cosimplicial_only:
            failures = [name for name in failures if not name.startswith("t")]
        return failures

    def mixed_failures(self, x: Tensor) -> List[str]:
        failures = super().mixed_failures(x)
        if self.cosimplicial_only:
            failures = [name for name in failures if name == "bb"]
        return failures


class RowModule(_View):
    """Row q: level p, horizontal operators."""

    def __init__(self, bico: BigradedModule, q: int):
        super().__init__(bico)
        self.q = q
        self.name = f"{bico.name} row {q}"

    def slots(self, level: int) -> tuple:
        return self.bico.slots(level, self.q)

    def level_of(self, x: Tensor) -> int:
        return self.bico.bidegree(x)[0]

    def face(self, i, x):
        return self.bico.h_face(i, x)

    def degeneracy(self, j, x):
        return self.bico.h_degeneracy(j, x)

    def cyclic(self, x):
        return self.bico.h_cyclic(x)

    def slot_bases(self, level, trunc):
        return self.bico.slot_bases(level, self.q, trunc)

    def normalized_slots(self, level):
        return self.bico.h_normalized(level, self.q)

    def slot_algebra(self, position, level):
        return self.bico.slot_algebra(position, level, self.q)


class ColumnModule(_View):
    """Column p: level q, vertical operators; columns are always cocyclic."""

    cosimplicial_only = False

    def __init__(self, bico: BigradedModule, p: int):
        super().__init__(bico)
        self.p = p
        self.name = f"{bico.name} column {p}"

    def slots(self, level: int) -> tuple:
        return self.bico.slots(self.p, level)

    def level_of(self, x: Tensor) -> int:
        return self.bico.bidegree(x)[1]

    def face(self, i, x):
        return self.bico.v_face(i, x)

    def degeneracy(self, j, x):
        return self.bico.v_degeneracy(j, x)

    def cyclic(self, x):
        return self.bico.v_cyclic(x)

    def slot_bases(self, level, trunc):
        return self.bico.slot_bases(self.p, level, trunc)

    def normalized_slots(self, level):
        return self.bico.v_normalized(self.p, level)

    def slot_algebra(self, position, level):
        return self.bico.slot_algebra(position, self.p, level)


class DiagonalModule(_View):
    """d_i = →∂_i↑∂_i, s_j = →σ_j↑σ_j, t = →τ↑τ at bidegree (n, n)."""

    def __init__(self, bico: BigradedModule):
        super().__init__(bico)
        self.name = f"{bico.name} diagonal"

    def slots(self, level: int) -> tuple:
        return self.bico.slots(level, level)

    def level_of(self, x: Tensor) -> int:
        return self.bico.bidegree(x)[0]

    def face(self, i, x):
        return self.bico.h_face(i, self.bico.v_face(i, x))

    def degeneracy(self, j, x):
        return self.bico.h_degeneracy(j, self.bico.v_degeneracy(j, x))

    def cyclic(self, x):
        return self.bico.h_cyclic(self.bico.v_cyclic(x))

    def slot_bases(self, level, trunc):
        return self.bico.slot_bases(level, level, trunc)

    def normalized_slots(self, level):
        return self.bico.h_normalized(level, level) + self.bico.v_normalized(level, level)

    def slot_algebra(self, position, level):
        return self.bico.slot_algebra(position, level, level)


class TotalComplex:
    """Tot_n = ⊕_{p+q=n} with b_T = →b + (−1)^p↑b and B_T = →B + (−1)^p↑B.

    Cochains are dicts p → Tensor at bidegree (p, n−p).
    """

    def __init__(self, bico: BigradedModule):
        self.bico = bico

    def degree(self, cochain: Cochain) -> int:
        degrees = {sum(self.bico.bidegree(x)) for x in cochain.values()}
        if len(degrees) != 1:
            raise DimensionMismatchError(f"total cochain mixes degrees {sorted(degrees)}")
        return degrees.pop()

    def _add(self, out: Cochain, p: int, value: Tensor):
        out[p] = out[p] + value if p in out else value

    def _clean(self, out: Cochain) -> Cochain:
        return {p: x for p, x in sorted(out.items()) if not self.bico.canonical(x).is_zero()}

    def b(self, cochain: Cochain) -> Cochain:
        out: Cochain = {}
        for p, x in cochain.items():
            _p, q = self.bico.bidegree(x)
            self._add(out, p + 1, self.bico.row(q).b(x))
            vertical = self.bico.column(p).b(x)
            self._add(out, p, -vertical if p % 2 else vertical)
        return self._clean(out)

    def B(self, cochain: Cochain) -> Cochain:
        out: Cochain = {}
        for p, x in cochain.items():
            _p, q = self.bico.bidegree(x)
            if p > 0:
                self._add(out, p - 1, self.bico.row(q).B(x))
            if q > 0:
                vertical = self.bico.column(p).B(x)
                self._add(out, p, -vertical if p % 2 else vertical)
        return self._clean(out)

    def normalize(self, cochain: Cochain) -> Cochain:
        return {p: self.bico.normalize(x) for p, x in cochain.items()}

    def sample(self, n: int, rng: random.Random, trunc: TruncationSpec, terms: int = 3,
               coefficients: Sequence[int] = DEFAULT_COEFFICIENTS) -> Cochain:
        return {p: self.bico.sample(p, n - p, rng, trunc, terms, coefficients, normalized=True)
                for p in range(n + 1)}

    def is_zero(self, cochain: Cochain) -> bool:
        return not self._clean(dict(cochain))

    def mixed_failures(self, cochain: Cochain) -> List[str]:
        failures = []
        if not self.is_zero(self.b(self.b(cochain))):
            failures.append("bTbT")
        if self.bico.cyclic:
            if not self.is_zero(self.B(self.B(cochain))):
                failures.append("BTBT")
            anti: Cochain = {}
            for p, x in self.b(self.B(cochain)).items():
                self._add(anti, p, x)
            for p, x in self.B(self.b(cochain)).items():
                self._add(anti, p, x)
            if not self.is_zero(anti):
                failures.append("bTBT+BTbT")
        return failures

    def aw_failures(self, cochain: Cochain) -> List[str]:
        """b∘AW = −AW∘b_T."""
        diagonal = self.bico.diagonal()
        lhs = diagonal.b(self.bico.aw(cochain))
        image = self.b(cochain)
        n = self.degree(cochain)
        rhs = self.bico.aw(image) if image else diagonal.zero(n + 1)
        if not self.bico.canonical(lhs + rhs).is_zero():
            return ["b AW + AW bT"]
        return []


# generalized coefficients


def product_sayd(product, M: SaydModule, N: SaydModule) -> SaydModule:
    """M⊗N over H⋊K: (m⊗n)(h⋊k) = mh⊗nk, coaction m₍₋₁₎⋊n₍₋₁₎ ⊗ (m₍₀₎⊗n₍₀₎)."""
    tag = f"{M.tag}x{N.tag}"
    carrier = [(m, n) for m in M.carrier for n in N.carrier]

    def act(mn, w) -> Element:
        out: Dict = {}
        for m2, c in M.act(mn[0], w[0]).items():
            for n2, c2 in N.act(mn[1], w[1]).items():
                _accumulate(out, (m2, n2), c * c2)
        return Element(tag, out)

    def coact(mn) -> Tensor:
        out: Dict = {}
        for (hm, m0), c in M.coact(mn[0]).items():
            for (kn, n0), c2 in N.coact(mn[1]).items():
                _accumulate(out, ((hm, kn), (m0, n0)), c * c2)
        return Tensor((product.tag, tag), out)

    return SaydModule(product, tag, carrier, act, coact)


class GeneralizedBicocyclic(BigradedModule):
    """𝔛 with C = H and D = K acting on themselves, slots N, d⁰…dᵖ, M, c⁰…c^q.

    →∂_{p+1} = n₍₀₎⊗d⁰₍₂₎⊗…⊗dᵖ⊗c̃₍₋₁₎n₍₋₁₎d⁰₍₁₎⊗m⊗c̃₍₀₎,
    →τ = n₍₀₎⊗d¹⊗…⊗dᵖ⊗c̃₍₋₁₎n₍₋₁₎d⁰⊗m⊗c̃₍₀₎, columns are M⊗_H H^{⊗q+1}.
    """

    def __init__(self, H: HopfAlgebra, K: HopfAlgebra, coaction: Coaction, M: SaydModule,
                 N: SaydModule, product=None, name: Optional[str] = None):
        self.H = H
        self.K = K
        self.coaction = coaction
        self.M = M
        self.N = N
        self.product = product
        self.vertical = CoefficientModule(H, M)
        self.horizontal_block = CoefficientModule(K, N)
        self.name = name or f"X({N.tag}, {M.tag})"

    def slots(self, p: int, q: int) -> tuple:
        return (self.N.tag,) + (self.K.tag,) * (p + 1) + (self.M.tag,) + (self.H.tag,) * (q + 1)

    def bidegree(self, x: Tensor) -> Tuple[int, int]:
        p = sum(1 for tag in x.slots if tag == self.K.tag) - 1
        q = sum(1 for tag in x.slots if tag == self.H.tag) - 1
        return p, q

    def slot_algebra(self, position: int, p: int, q: int) -> HopfAlgebra:
        return self.K if position <= p + 1 else self.H

    def slot_bases(self, p: int, q: int, trunc: TruncationSpec) -> List[List]:
        return ([self.N.carrier] + [self.K.basis(trunc)] * (p + 1)
                + [self.M.carrier] + [self.H.basis(trunc)] * (q + 1))

    def h_normalized(self, p: int, q: int) -> List[int]:
        return list(range(2, p + 2))

    def v_normalized(self, p: int, q: int) -> List[int]:
        return list(range(p + 4, p + q + 4))

    def canonical(self, x: Tensor) -> Tensor:
        p, q = self.bidegree(x)
        x = _apply_block(x, 0, p + 2, self.horizontal_block.canonical, self.slots(p, q)[:p + 2])
        return _apply_block(x, p + 2, p + q + 4, self.vertical.canonical, self.slots(p, q)[p + 2:])

    def _rotate(self, x: Tensor, split: bool) -> Tensor:
        """Shared body of →∂_{p+1} (split d⁰) and →τ (move d⁰)."""
        p, q = self.bidegree(x)
        K, N = self.K, self.N
        slots = self.slots(p + 1, q) if split else self.slots(p, q)

        def on_key(key):
            n, d0, rest = key[0], key[1], key[2:p + 2]
            m, c_key = key[p + 2], key[p + 3:]
            rho = self.coaction.tensor_coaction(c_key)
            pieces = [((d0,), 1)] if not split else [((a, b), c) for (a, b), c in K.coproduct_word(d0).items()]
            out: Dict = {}
            for (kn, n0), c in N.coact(n).items():
                for parts, c2 in pieces:
                    for (kc, *cs), c3 in rho.items():
                        moved = K.multiply(K.multiply(K.word(kc), K.word(kn)), K.word(parts[0]))
                        front = (n0,) + ((parts[1],) if split else ()) + rest
                        for k_word, c4 in moved.items():
                            _accumulate(out, front + (k_word, m) + tuple(cs), c * c2 * c3 * c4)
            return Tensor(slots, out)

        return x.map_terms(slots, on_key)

    def h_face(self, i: int, x: Tensor) -> Tensor:
        p, _q = self.bidegree(x)
        self._check_index(i, 0, p + 1, "horizontal face")
        if i <= p:
            return splice(x, i + 1, self.K.coproduct_word, (self.K.tag, self.K.tag))
        return self._rotate(x, split=True)

    def h_degeneracy(self, j: int, x: Tensor) -> Tensor:
        p, _q = self.bidegree(x)
        self._check_index(j, 0, p - 1, "horizontal degeneracy")
        return splice(x, j + 2, _counit_slot(self.K), ())

    def h_cyclic(self, x: Tensor) -> Tensor:
        return self._rotate(x, split=False)

    def _vertical(self, x: Tensor, op: Callable, q_out: int) -> Tensor:
        p, q = self.bidegree(x)
        block = (self.M.tag,) + (self.H.tag,) * (q_out + 1)
        return _apply_block(x, p + 2, p + q + 4, op, block)

    def v_face(self, i: int, x: Tensor) -> Tensor:
        _p, q = self.bidegree(x)
        self._check_index(i, 0, q + 1, "vertical face")
        return self._vertical(x, lambda y: self.vertical.face(i, y), q + 1)

    def v_degeneracy(self, j: int, x: Tensor) -> Tensor:
        _p, q = self.bidegree(x)
        self._check_index(j, 0, q - 1, "vertical degeneracy")
        return self._vertical(x, lambda y: self.vertical.degeneracy(j, y), q - 1)

    def v_cyclic(self, x: Tensor) -> Tensor:
        _p, q = self.bidegree(x)
        return self._vertical(x, self.vertical.cyclic, q)

    # Ψ between C_{H⋊K}(H⋊K, M⊗N) and the diagonal

    def source_module(self) -> CoefficientModule:
        MN = product_sayd(self.product, self.M, self.N)
        return CoefficientModule(self.product, MN, name=f"{MN.tag} (x)_{self.product.tag}")

    def psi(self, x: Tensor) -> Tensor:
        """m⊗n⊗c⁰⋊d⁰⊗… ↦ n⊗d⁰⊗(⊤-staircase of c¹…cⁿ, d¹…dⁿ)⊗m⊗c⁰⊗c¹₍₀₎…cⁿ₍₀₎."""
        n = x.degree - 2
        slots = self.slots(n, n)

        def on_key(key):
            (m, nn), (c0, d0) = key[0], key[1]
            hs = [w[0] for w in key[2:]]
            ks = [w[1] for w in key[2:]]
            stairs = staircase_up(self.coaction, hs, ks)
            out: Dict = {}
            for stair, c in stairs.items():
                _accumulate(out, (nn, d0) + stair[:n] + (m, c0) + stair[n:], c)
            return Tensor(slots, out)

        return x.map_terms(slots, on_key)

    def psi_inv(self, y: Tensor) -> Tensor:
        p, q = self.bidegree(y)
        if p != q:
            raise DimensionMismatchError(f"psi_inv needs a diagonal element, got bidegree ({p}, {q})")
        n = p
        source = self.source_module()
        slots = source.slots(n)

        def on_key(key):
            nn, d0, ds = key[0], key[1], key[2:n + 2]
            m, c0, cs = key[n + 2], key[n + 3], key[n + 4:]
            stairs = staircase_down(self.coaction, cs, ds)
            out: Dict = {}
            for stair, c in stairs.items():
                pairs = tuple((stair[n + j], stair[j]) for j in range(n))
                _accumulate(out, ((m, nn), (c0, d0)) + pairs, c)
            return Tensor(slots, out)

        return y.map_terms(slots, on_key)

    def check_coefficients(self, trunc: TruncationSpec) -> dict:
        """M K-coinvariant and N H-stable on basis words within the cap."""
        H, K, M, N = self.H, self.K, self.M, self.N
        words = H.basis(trunc)
        for w in words:
            rho = self.coaction.apply_word(w)
            for m in M.carrier:
                # h₍₋₁₎ ⊗ m·h₍₀₎ = 1 ⊗ m·h
                lhs: Dict = {}
                for (k, h0), c in rho.items():
                    for m2, c2 in M.act(m, h0).items():
                        _accumulate(lhs, (k, m2), c * c2)
                rhs = {(K.unit_word(), m2): c for m2, c in M.act(m, w).items()}
                if Tensor((K.tag, M.tag), lhs) != Tensor((K.tag, M.tag), rhs):
                    return _report("sayd-compatibility", H, len(words), H.format_word(w),
                                   condition="coinvariant")
            for n in N.carrier:
                # n·h₍₋₁₎ ⊗ h₍₀₎ = n ⊗ h
                lhs = {}
                for (k, h0), c in rho.items():
                    for n2, c2 in N.act(n, k).items():
                        _accumulate(lhs, (n2, h0), c * c2)
                if Tensor((N.tag, H.tag), lhs) != Tensor.simple((N.tag, H.tag), (n, w)):
                    return _report("sayd-compatibility", H, len(words), H.format_word(w),
                                   condition="stable")
        for m in M.carrier:
            for (hm, _m0), _c in M.coact(m).items():
                if self.coaction.apply_word(hm) != Tensor.simple((K.tag, H.tag), (K.unit_word(), hm)):
                    return _report("sayd-compatibility", H, len(words), repr(m), condition="coinvariant-coaction")
        return _report("sayd-compatibility", H, len(words))


# settings


def map_slots(tensor: Tensor, fn: Callable, tag: str) -> Tensor:
    """Apply a word → Element map slotwise; every output slot gets `tag`."""
    slots = (tag,) * tensor.degree
    return tensor.map_terms(slots, lambda key: _elements_tensor([fn(w) for w in key])
                            if key else Tensor.scalar())


@dataclass
class CrossedSetting:
    """A Hopf algebra, its crossed model H⋊K (or U⋈F) and the bicocyclic module of the model."""

    name: str
    k: int
    bicomplex: BicocyclicModule
    product: HopfAlgebra
    direct: HopfAlgebra
    to_direct: Callable
    from_direct: Callable

    @property
    def cyclic(self) -> bool:
        return self.bicomplex.cyclic

    def psi(self, x: Tensor) -> Tensor:
        """Ψ on a product-tagged tensor of degree n, into bidegree (n, n)."""
        bico = self.bicomplex
        n = x.degree
        slots = bico.slots(n, n)

        def on_key(key):
            return staircase_up(bico.coaction, [w[0] for w in key], [w[1] for w in key])

        return x.map_terms(slots, on_key)

    def psi_inv(self, y: Tensor) -> Tensor:
        bico = self.bicomplex
        p, q = bico.bidegree(y)
        if p != q:
            raise DimensionMismatchError(f"psi_inv needs a diagonal element, got bidegree ({p}, {q})")
        slots = (self.product.tag,) * p

        def on_key(key):
            stairs = staircase_down(bico.coaction, key[p:], key[:p])
            out: Dict = {}
            for stair, c in stairs.items():
                _accumulate(out, tuple((stair[p + j], stair[j]) for j in range(p)), c)
            return Tensor(slots, out)

        return y.map_terms(slots, on_key)

    def to_direct_tensor(self, x: Tensor) -> Tensor:
        return map_slots(x, self.to_direct, self.direct.tag)

    def from_direct_tensor(self, x: Tensor) -> Tensor:
        return map_slots(x, self.from_direct, self.product.tag)

    def product_module(self) -> StandardModule:
        from h1_family import modular_pair
        return StandardModule(self.product, modular_pair(self.product, self.k))

    def psi_failures(self, x: Tensor) -> List[str]:
        """Ψ⁻¹Ψ = id; for cocrossed settings also Ψ∘∂_i = d_i∘Ψ, Ψ∘σ_j = s_j∘Ψ, Ψ∘τ = t∘Ψ."""
        failures = []
        y = self.psi(x)
        if self.psi_inv(y) != x:
            failures.append("psi_inv psi")
        if not self.cyclic:
            return failures
        source = self.product_module()
        diagonal = self.bicomplex.diagonal()
        n = x.degree
        for i in range(n + 2):
            if self.psi(source.face(i, x)) != diagonal.face(i, y):
                failures.append(f"psi d{i}")
        for j in range(n):
            if self.psi(source.degeneracy(j, x)) != diagonal.degeneracy(j, y):
                failures.append(f"psi s{j}")
        if self.psi(source.cyclic(x)) != diagonal.cyclic(y):
            failures.append("psi t")
        return failures


def _bicrossed_setting(name: str) -> CrossedSetting:
    from h1_family import build_h1_as_bicrossed, build_h1s_as_bicrossed, modular_pair
    if name == "h1":
        model = build_h1_as_bicrossed()
    elif name == "h1s":
        model = build_h1s_as_bicrossed()
    else:
        import trees
        model = trees.build_hck()
    product = model.product
    U, F = product.U, product.F
    beta_nu = ModularPair(counit_character(F), F.unit_word(), label="(epsilon, 1)")
    bico = BicocyclicModule(U, F, product.coaction, modular_pair(U, 0), beta_nu,
                            name=f"C({F.tag}, {U.tag})", cyclic=False)
    return CrossedSetting(name, 0, bico, product, model.direct, model.to_direct, model.from_direct)


def _cover_setting(name: str, k: int) -> CrossedSetting:
    from h1_family import build_h1dag, modular_pair
    if name.startswith("h1dag"):
        modulus = int(name.split(":")[1]) if ":" in name else None
        model = build_h1dag(modulus)
        direct = model.direct

        def to_direct(w):
            return direct.normal_form(tuple(w[1]) + tuple(w[0]))
    else:
        import trees
        model = trees.build_hck(int(name.split(":")[1]) if ":" in name else "inf")
        direct = model.direct
        to_direct = model.product.word
    K = model.K
    beta_nu = ModularPair(counit_character(K), K.group_word(k), label=f"(epsilon, s^{k})")
    bico = BicocyclicModule(model.base, K, model.coaction, modular_pair(model.base, 0), beta_nu,
                            name=f"C({K.tag}, {model.base.tag}) k={k}")
    return CrossedSetting(name, k, bico, model.product, direct, to_direct, model.phi)


BICROSSED_NAMES = ("h1", "h1s", "hck")

_SETTINGS: Dict[Tuple[str, int], CrossedSetting] = {}


def setting_for(algebra_name: str, k: int = 0) -> CrossedSetting:
    """Bicocyclic setting of a registered algebra: U⋈F for h1/h1s/hck, H⋊K for the covers."""
    key = (algebra_name, k)
    if key in _SETTINGS:
        return _SETTINGS[key]
    if algebra_name in BICROSSED_NAMES:
        setting = _bicrossed_setting(algebra_name)
    elif algebra_name.startswith(("h1dag", "hckdag")):
        setting = _cover_setting(algebra_name, k)
    else:
        raise UnknownNameError(f"no bicocyclic decomposition registered for {algebra_name!r}")
    logger.debug(f"built bicocyclic setting {setting.bicomplex.name}")
    _SETTINGS[key] = setting
    return setting


def coefficient_bicocyclic(algebra_name: str = "h1dag", k: int = 0) -> GeneralizedBicocyclic:
    """𝔛 for a cover with M = ℂ_δ over the base and N = ^{σ^k}ℂ_ε over K."""
    setting = setting_for(algebra_name, k)
    if not setting.cyclic:
        raise UnknownNameError(f"{algebra_name} has no cocrossed decomposition")
    bico = setting.bicomplex
    M = modular_pair_module(bico.H, bico.alpha_mu)
    N = modular_pair_module(bico.K, bico.beta_nu)
    return GeneralizedBicocyclic(bico.H, bico.K, bico.coaction, M, N, product=setting.product,
                                 name=f"X({bico.K.tag}, {bico.H.tag}) k={k}")


# verification


def check_bicocyclic(bico: BigradedModule, pmax: int, qmax: int, samples: int, seed: int,
                     trunc: TruncationSpec, setting: Optional[CrossedSetting] = None,
                     terms: int = 3) -> List[dict]:
    """Rows, columns, commutation, diagonal, total complex, AW and (with a setting) Ψ."""
    reports = []
    for q in range(qmax + 1):
        reports.append(bico.row(q).check_identities(range(pmax + 1), samples, seed, trunc, terms))
    for p in range(pmax + 1):
        reports.append(bico.column(p).check_identities(range(qmax + 1), samples, seed, trunc, terms))
    reports.append(bico.diagonal().check_identities(range(min(pmax, qmax) + 1), samples, seed, trunc, terms))

    rng = random.Random(seed)
    checked, witness = 0, None
    for p in range(pmax + 1):
        for q in range(qmax + 1):
            for _ in range(samples):
                failures = bico.commutation_failures(bico.sample(p, q, rng, trunc, terms))
                checked += 1
                if failures:
                    witness = {"bidegree": [p, q], "identities": failures}
                    break
            if witness:
                break
        if witness:
            break
    reports.append(_bicocyclic_report("commutation", bico, checked, witness))

    total = bico.total()
    checked, witness = 0, None
    for n in range(min(pmax, qmax) + 1):
        for _ in range(samples):
            cochain = total.sample(n, rng, trunc, terms)
            failures = total.mixed_failures(cochain) + total.aw_failures(cochain)
            checked += 1
            if failures:
                witness = {"degree": n, "identities": failures}
                break
        if witness:
            break
    reports.append(_bicocyclic_report("total-complex", bico, checked, witness))

    if setting is not None:
        source = setting.product_module()
        checked, witness = 0, None
        for n in range(min(pmax, qmax) + 1):
            for _ in range(samples):
                failures = setting.psi_failures(source.sample(n, rng, trunc, terms))
                checked += 1
                if failures:
                    witness = {"level": n, "identities": failures}
                    break
            if witness:
                break
        reports.append(_bicocyclic_report("psi", bico, checked, witness))
    return reports


def _bicocyclic_report(check: str, bico: BigradedModule, checked: int, witness) -> dict:
    if witness is None:
        logger.debug(f"{check} on {bico.name}: {checked} samples pass")
    else:
        logger.warning(f"{check} on {bico.name} fails: {witness}")
    return {"check": check, "module": bico.name, "status": "pass" if witness is None else "fail",
            "checked": checked, "witness": witness}
