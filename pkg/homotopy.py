"""
Cartan homotopy for Hopf cyclic cohomology with coefficients.

For an H-linear coderivation D of H, the operators e_D, E_D and L_D act on
the coefficient module M⊗_H H^{⊗n+1} and satisfy

    [e_D + E_D, b + B] = L_D.

With D = D_Z(h) = hZ for a primitive Z, L_Z transported to H^{⊗n} is
δ(Z)Id − ad Z, so on a weight-k component with k ≠ 1 the operator
(1−k)⁻¹(e_Z + E_Z) contracts every (b+B)-cocycle.
"""

import itertools
import logging
import random
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from cyclic import CoefficientModule, b_plus_B, standard_module_for
from errors import ConfigError, DimensionMismatchError, NotACocycleError, WeightError
from exact_kernel import Element, Tensor, TruncationSpec, splice
from hopf import INHOMOGENEOUS, HopfAlgebra, modular_pair_module

logger = logging.getLogger(__name__)

Cochain = Dict[int, Tensor]


class Coderivation:
    """Linear map D: H → H given on basis words."""

    def __init__(self, H: HopfAlgebra, on_word: Callable, label: str = "D"):
        self.H = H
        self._on_word = on_word
        self.label = label
        self._cache: Dict = {}

    def apply_word(self, w) -> Element:
        cached = self._cache.get(w)
        if cached is None:
            cached = self._on_word(w)
            self._cache[w] = cached
        return cached

    def apply(self, x: Element) -> Element:
        out = Element.zero(self.H.tag)
        for w, c in x.items():
            out = out + self.apply_word(w).scale(c)
        return out

    def law_failures(self, words) -> List[str]:
        """Words on which H-linearity or Δ∘D = (D⊗id + id⊗D)∘Δ fails."""
        H = self.H
        tags = (H.tag, H.tag)
        failures = []
        for w in words:
            lhs = Tensor(tags)
            for v, c in self.apply_word(w).items():
                lhs = lhs + H.coproduct_word(v).scale(c)
            delta = H.coproduct_word(w)
            rhs = splice(delta, 0, lambda v: Tensor.from_element(self.apply_word(v)), (H.tag,))
            rhs = rhs + splice(delta, 1, lambda v: Tensor.from_element(self.apply_word(v)), (H.tag,))
            if lhs != rhs:
                failures.append(f"coderivation at {H.format_word(w)}")
            for g in H.generators():
                left = self.apply(H.multiply_words(g, w))
                right = H.multiply(H.word(g), self.apply_word(w))
                if left != right:
                    failures.append(f"linearity at {H.format_word(g)}*{H.format_word(w)}")
                    break
        return failures


def right_multiplication(H: HopfAlgebra, name: str) -> Coderivation:
    """D_Z(h) = hZ for a primitive generator Z."""
    Z = H.generator_element(name)
    tags, unit = (H.tag, H.tag), H.unit_word()
    primitive = Tensor(tags)
    for w, c in Z.items():
        primitive = primitive + Tensor.simple(tags, (w, unit), c) + Tensor.simple(tags, (unit, w), c)
    if H.coproduct(Z) != primitive or H.counit(Z):
        raise ConfigError(f"{name} is not primitive in {H.tag}")
    return Coderivation(H, lambda w: H.multiply(H.word(w), Z), label=f"D_{name}")


def zero_coderivation(H: HopfAlgebra) -> Coderivation:
    return Coderivation(H, lambda w: Element.zero(H.tag), label="0")


def delta_module(H: HopfAlgebra) -> CoefficientModule:
    """M⊗_H H^{⊗n+1} with M = ℂ_δ, identified with H_(δ,1) through theta."""
    from h1_family import modular_pair
    M = modular_pair_module(H, modular_pair(H, 0))
    return CoefficientModule(H, M, name=f"C_delta ({H.tag})")


class CartanHomotopy:
    """ψ_j, L_D, e_D and E_D on a coefficient module."""

    def __init__(self, module: CoefficientModule, D: Coderivation):
        self.module = module
        self.D = D

    def psi(self, j: int, x: Tensor) -> Tensor:
        """Apply D to c^j."""
        n = self.module.level_of(x)
        self.module._check_index(j, 0, n, "psi")
        H = self.module.H
        return splice(x, j + 1, lambda w: Tensor.from_element(self.D.apply_word(w)), (H.tag,))

    def lie_derivative(self, x: Tensor) -> Tensor:
        n = self.module.level_of(x)
        result = self.module.zero(n)
        for j in range(n + 1):
            result = result + self.psi(j, x)
        return result

    def e(self, x: Tensor) -> Tensor:
        """e_D = (−1)ⁿψ_{n+1}∂_{n+1}, level n → n+1."""
        n = self.module.level_of(x)
        y = self.psi(n + 1, self.module.face(n + 1, x))
        return -y if n % 2 else y

    def E(self, x: Tensor) -> Tensor:
        """E_D = Σ_{1≤i≤j≤n} (−1)^{n(i+1)} ψ_j τ^{−i} s_extra, level n+1 → n.

        s_extra = σ_n∘τ on level n+1 drops c⁰ through ε; τ^{−i} is τ^{n+1−i}.
        """
        module = self.module
        m = module.level_of(x)
        if m == 0:
            raise DimensionMismatchError("E_D is not defined on level 0")
        n = m - 1
        result = module.zero(n)
        if n == 0:
            return result
        y = module.degeneracy(n, module.cyclic(x))
        powers = [y]
        for _ in range(n):
            powers.append(module.cyclic(powers[-1]))
        for i in range(1, n + 1):
            rotated = powers[n + 1 - i]
            sign = -1 if (n * (i + 1)) % 2 else 1
            for j in range(i, n + 1):
                result = result + self.psi(j, rotated).scale(sign)
        return result

    # identities

    def _same(self, a: Tensor, b: Tensor) -> bool:
        return self.module.canonical(a - b).is_zero()

    def commutator_failures(self, x: Tensor) -> List[str]:
        """[e+E, b+B] = L on a normalized level-n x, component by component."""
        module = self.module
        n = module.level_of(x)
        failures = []
        ex = self.e(x)
        bx = module.b(x)
        middle = module.B(ex) + self.E(bx)
        if n >= 1:
            middle = middle + self.e(module.B(x)) + module.b(self.E(x))
        if not self._same(middle, self.lie_derivative(x)):
            failures.append("[e+E,b+B]=L")
        if not module.canonical(module.b(ex) + self.e(bx)).is_zero():
            failures.append("[b,e]=0")
        if n >= 2 and not module.canonical(module.B(self.E(x)) + self.E(module.B(x))).is_zero():
            failures.append("[B,E]=0")
        return failures

    def lemma_failures(self, x: Tensor) -> List[str]:
        """B e_D = Σ(−1)^{n+ni}ψ_{n−i}τ^{i+1} and L_D = Be_D + E_D∂_0 + (−1)^{n+1}E_D∂_{n+1}."""
        module = self.module
        n = module.level_of(x)
        failures = []
        be = module.B(self.e(x))
        expected = module.zero(n)
        rotated = module.cyclic(x)
        for i in range(n + 1):
            sign = -1 if (n + n * i) % 2 else 1
            expected = expected + self.psi(n - i, rotated).scale(sign)
            rotated = module.cyclic(rotated)
        if not self._same(be, expected):
            failures.append("Be=sum psi tau")
        last = self.E(module.face(n + 1, x))
        rhs = be + self.E(module.face(0, x)) + (last if n % 2 else -last)
        if not self._same(rhs, self.lie_derivative(x)):
            failures.append("L=Be+Ed0+Ed(n+1)")
        if not module.is_normalized(self.e(x)):
            failures.append("e normalized")
        return failures

    def theta_lie_fails(self, H_tensor: Tensor, delta_z: Fraction, z: Element) -> bool:
        """Θ∘L∘Θ⁻¹ = δ(Z)Id − ad Z on a tensor of H^{⊗n}."""
        module = self.module
        lhs = module.theta(self.lie_derivative(module.theta_inv(H_tensor)))
        rhs = H_tensor.scale(delta_z) - adjoint(module.H, z, H_tensor)
        return lhs != rhs


def adjoint(H: HopfAlgebra, z: Element, x: Tensor) -> Tensor:
    """ad Z extended slotwise: Σ_i h¹⊗…⊗[Z, hⁱ]⊗…⊗hⁿ."""
    result = Tensor(x.slots)
    for position in range(x.degree):
        result = result + splice(
            x, position,
            lambda w: Tensor.from_element(H.multiply(z, H.word(w)) - H.multiply(H.word(w), z)),
            (H.tag,),
        )
    return result


def tensor_weight(H: HopfAlgebra, x: Tensor):
    """Common total weight of the terms, 0 for the zero tensor, else INHOMOGENEOUS."""
    weights = {sum(H.weight_word(w) for w in key) for key in x}
    if not weights:
        return 0
    if len(weights) > 1:
        return INHOMOGENEOUS
    return weights.pop()


def homotopy_for(algebra_name: str, z_name: Optional[str] = "Y") -> CartanHomotopy:
    from h1_family import get_algebra
    H = get_algebra(algebra_name)
    D = zero_coderivation(H) if z_name in (None, "0") else right_multiplication(H, z_name)
    return CartanHomotopy(delta_module(H), D)


def _basis_tensors(H: HopfAlgebra, level: int, trunc: TruncationSpec, limit: int) -> List[Tensor]:
    words = [w for w in H.basis(trunc) if H.pbw_degree(w) <= 2]
    tensors = []
    for key in itertools.islice(itertools.product(words, repeat=level), limit):
        tensors.append(Tensor.simple((H.tag,) * level, key))
    return tensors


def verify_homotopy_formula(algebra_name: str, z_name: Optional[str], n: int, samples: int, seed: int,
                            trunc: TruncationSpec, terms: int = 3, basis_limit: int = 60) -> List[dict]:
    """Homotopy formula, its auxiliary lemmas, the coderivation law and Θ∘L∘Θ⁻¹ = δ(Z)Id − ad Z."""
    homotopy = homotopy_for(algebra_name, z_name)
    module, D, H = homotopy.module, homotopy.D, homotopy.module.H
    label = f"{H.tag} {D.label}"
    reports = []

    words = [w for w in H.basis(trunc) if H.pbw_degree(w) <= 2]
    failures = D.law_failures(words)
    reports.append(_homotopy_report("coderivation", label, len(words), failures[0] if failures else None))

    rng = random.Random(seed)
    for check, run in (("homotopy-formula", homotopy.commutator_failures),
                       ("homotopy-lemmas", homotopy.lemma_failures)):
        checked, witness = 0, None
        for level in range(n + 1):
            for _ in range(samples):
                x = module.sample(level, rng, trunc, terms, normalized=True)
                failures = run(x)
                checked += 1
                if failures:
                    witness = {"level": level, "identities": failures}
                    break
            if witness:
                break
        reports.append(_homotopy_report(check, label, checked, witness))

    if z_name not in (None, "0"):
        from h1_family import modular_pair
        z = H.generator_element(z_name)
        delta_z = modular_pair(H, 0).delta(H, z)
        checked, witness = 0, None
        for level in range(1, n + 1):
            for h in _basis_tensors(H, level, trunc, basis_limit):
                checked += 1
                if homotopy.theta_lie_fails(h, delta_z, z):
                    from expressions import format_tensor
                    witness = format_tensor(H, h)
                    break
            if witness:
                break
        reports.append(_homotopy_report("lie-derivative", label, checked, witness))
    return reports


def _homotopy_report(check: str, label: str, checked: int, witness) -> dict:
    if witness is None:
        logger.debug(f"{check} on {label}: {checked} cases pass")
    else:
        logger.warning(f"{check} on {label} fails: {witness}")
    return {"check": check, "module": label, "status": "pass" if witness is None else "fail",
            "checked": checked, "witness": witness}


def contract_offweight_cocycle(x, algebra_name: str = "h1", z_name: str = "Y") -> Tuple[Cochain, bool]:
    """Primitive y = (1−k)⁻¹(e_Z + E_Z)x of a weight-k (b+B)-cocycle, k ≠ 1.

    `x` is a Tensor or a level → Tensor mapping in the standard module of
    (H, δ, 1). Returns the primitive and whether (b+B)y = x was confirmed.
    """
    standard = standard_module_for(algebra_name, 0)
    H = standard.H
    cochain: Cochain = {x.degree: x} if isinstance(x, Tensor) else dict(x)
    cochain = {level: t for level, t in cochain.items() if not t.is_zero()}
    if not cochain:
        return {}, True

    weights = {tensor_weight(H, t) for t in cochain.values()}
    if INHOMOGENEOUS in weights or len(weights) != 1:
        raise WeightError("cochain is not weight-homogeneous")
    k = weights.pop()
    if k == 1:
        raise WeightError("weight 1 is not contractible")
    for level, t in cochain.items():
        if not standard.is_normalized(t):
            logger.info(f"level {level} component was not normalized, projecting")
            cochain[level] = standard.normalize(t)
    if b_plus_B(standard, cochain):
        raise NotACocycleError(f"weight-{k} input is not a (b+B)-cocycle")

    homotopy = CartanHomotopy(delta_module(H), right_multiplication(H, z_name))
    module = homotopy.module
    factor = Fraction(1, 1 - k)
    primitive: Cochain = {}
    for level, t in cochain.items():
        lifted = module.theta_inv(t)
        pieces = [(level + 1, homotopy.e(lifted))]
        if level >= 1:
            pieces.append((level - 1, homotopy.E(lifted)))
        for target, value in pieces:
            image = module.theta(value).scale(factor)
            primitive[target] = primitive[target] + image if target in primitive else image
    primitive = {level: t for level, t in primitive.items() if not t.is_zero()}

    verified = b_plus_B(standard, primitive) == cochain
    if verified:
        logger.debug(f"contracted a weight-{k} cocycle in {H.tag}")
    else:
        logger.warning(f"contraction of a weight-{k} cocycle in {H.tag} did not reproduce it")
    return primitive, verified
