"""
Cocyclic modules and their normalized (b, B) mixed complexes.

StandardModule is the Hopf cocyclic module of (H, δ, σ) on H^{⊗n}.
CoefficientModule is M⊗_H H^{⊗n+1} for a SAYD module M; its elements are
tensor representatives and are compared through `canonical`.
"""

import logging
import random
from typing import Dict, List, Optional, Sequence

from errors import DimensionMismatchError, NotACocycleError, UnknownNameError
from exact_kernel import Element, Tensor, TruncationSpec, splice, tensor_product
from hopf import (
    HopfAlgebra,
    ModularPair,
    SaydModule,
    left_diagonal_action,
    twisted_antipode,
)

logger = logging.getLogger(__name__)

DEFAULT_COEFFICIENTS = (-2, -1, 1, 2)


def random_tensor(slot_bases: Sequence[Sequence], slots: Sequence[str], rng: random.Random,
                  terms: int = 4, coefficients: Sequence[int] = DEFAULT_COEFFICIENTS) -> Tensor:
    """Random combination of at most `terms` basis tuples drawn slot by slot."""
    out: Dict = {}
    for _ in range(rng.randint(1, terms)):
        key = tuple(rng.choice(list(basis)) for basis in slot_bases)
        out[key] = out.get(key, 0) + rng.choice(list(coefficients))
    return Tensor(tuple(slots), out)


class CocyclicModule:
    """Faces, degeneracies and the cyclic operator on Tensor carriers.

    Subclasses implement slots, level_of, face, degeneracy, cyclic and the
    per-slot sampling bases; b, B and the identity suite are derived here.
    """

    name = "cocyclic"

    def slots(self, level: int) -> tuple:
        raise NotImplementedError

    def level_of(self, x: Tensor) -> int:
        raise NotImplementedError

    def face(self, i: int, x: Tensor) -> Tensor:
        raise NotImplementedError

    def degeneracy(self, j: int, x: Tensor) -> Tensor:
        raise NotImplementedError

    def cyclic(self, x: Tensor) -> Tensor:
        raise NotImplementedError

    def slot_bases(self, level: int, trunc: TruncationSpec) -> List[List]:
        raise NotImplementedError

    def normalized_slots(self, level: int) -> List[int]:
        """Slot positions annihilated by (id − ηε) in the normalized subcomplex."""
        return []

    def slot_algebra(self, position: int, level: int) -> HopfAlgebra:
        raise NotImplementedError

    def canonical(self, x: Tensor) -> Tensor:
        return x

    def zero(self, level: int) -> Tensor:
        return Tensor(self.slots(level))

    def equal(self, x: Tensor, y: Tensor) -> bool:
        return self.canonical(x) == self.canonical(y)

    def check_level(self, x: Tensor, level: int):
        if self.level_of(x) != level:
            raise DimensionMismatchError(f"expected a level-{level} cochain, got level {self.level_of(x)}")

    def _check_index(self, index: int, low: int, high: int, what: str):
        if not low <= index <= high:
            raise DimensionMismatchError(f"{what} index {index} outside [{low}, {high}]")

    # derived operators

    def tau_power(self, x: Tensor, k: int) -> Tensor:
        for _ in range(k):
            x = self.cyclic(x)
        return x

    def b(self, x: Tensor) -> Tensor:
        """Hochschild coboundary Σ(−1)^i ∂_i, level n → n+1."""
        n = self.level_of(x)
        result = self.zero(n + 1)
        for i in range(n + 2):
            face = self.face(i, x)
            result = result + (face if i % 2 == 0 else -face)
        return result

    def B(self, x: Tensor) -> Tensor:
        """Connes operator Σ_{i=0}^{N−1}(−1)^{(N−1)i}τ^i σ_{N−1}τ, level N → N−1; zero on level 0."""
        n = self.level_of(x)
        if n == 0:
            return self.zero(0)
        y = self.degeneracy(n - 1, self.cyclic(x))
        result = self.zero(n - 1)
        for i in range(n):
            sign = -1 if ((n - 1) * i) % 2 else 1
            result = result + y.scale(sign)
            y = self.cyclic(y)
        return result

    def normalize(self, x: Tensor) -> Tensor:
        """Project onto the slotwise kernel of the counit."""
        n = self.level_of(x)
        for position in self.normalized_slots(n):
            H = self.slot_algebra(position, n)
            unit = H.unit_word()

            def project(w, H=H, unit=unit):
                out = Tensor.simple((H.tag,), (w,))
                counit = H.counit_word(w)
                if counit:
                    out = out - Tensor.simple((H.tag,), (unit,), counit)
                return out

            x = splice(x, position, project, (x.slots[position],))
        return x

    def is_normalized(self, x: Tensor) -> bool:
        n = self.level_of(x)
        return all(self.degeneracy(j, x).is_zero() for j in range(n))

    def connes_B(self, x: Tensor) -> Tensor:
        """B on the normalized complex; non-normalized input is projected first."""
        if not self.is_normalized(x):
            logger.info(f"{self.name}: input to B was not normalized, projecting")
            x = self.normalize(x)
        return self.B(x)

    def sample(self, level: int, rng: random.Random, trunc: TruncationSpec, terms: int = 4,
               coefficients: Sequence[int] = DEFAULT_COEFFICIENTS, normalized: bool = False) -> Tensor:
        x = random_tensor(self.slot_bases(level, trunc), self.slots(level), rng, terms, coefficients)
        return self.normalize(x) if normalized else x

    # identity suite

    def identity_failures(self, x: Tensor) -> List[str]:
        """Names of the cocyclic identities failing on x."""
        n = self.level_of(x)
        eq = self.equal
        failures = []
        face, degen, tau = self.face, self.degeneracy, self.cyclic
        for j in range(n + 3):
            for i in range(j):
                if not eq(face(j, face(i, x)), face(i, face(j - 1, x))):
                    failures.append(f"d{j}d{i}")
        for j in range(n - 1):
            for i in range(j + 1):
                if not eq(degen(j, degen(i, x)), degen(i, degen(j + 1, x))):
                    failures.append(f"s{j}s{i}")
        for j in range(n + 1):
            for i in range(n + 2):
                lhs = degen(j, face(i, x))
                if i < j:
                    rhs = face(i, degen(j - 1, x))
                elif i in (j, j + 1):
                    rhs = x
                else:
                    rhs = face(i - 1, degen(j, x))
                if not eq(lhs, rhs):
                    failures.append(f"s{j}d{i}")
        tx = tau(x)
        if not eq(tau(face(0, x)), face(n + 1, x)):
            failures.append("t d0")
        for i in range(1, n + 2):
            if not eq(tau(face(i, x)), face(i - 1, tx)):
                failures.append(f"t d{i}")
        if n >= 1:
            if not eq(tau(degen(0, x)), degen(n - 1, tau(tx))):
                failures.append("t s0")
            for i in range(1, n):
                if not eq(tau(degen(i, x)), degen(i - 1, tx)):
                    failures.append(f"t s{i}")
        if not eq(self.tau_power(x, n + 1), x):
            failures.append("t^(n+1)")
        return failures

    def mixed_failures(self, x: Tensor) -> List[str]:
        """b² = 0, B² = 0, bB + Bb = 0 on a normalized x."""
        failures = []
        n = self.level_of(x)
        if not self.canonical(self.b(self.b(x))).is_zero():
            failures.append("bb")
        if n >= 2 and not self.canonical(self.B(self.B(x))).is_zero():
            failures.append("BB")
        if n >= 1:
            anti = self.b(self.B(x)) + self.B(self.b(x))
        else:
            anti = self.B(self.b(x))
        if not self.canonical(anti).is_zero():
            failures.append("bB+Bb")
        return failures

    def check_identities(self, levels: Sequence[int], samples: int, seed: int, trunc: TruncationSpec,
                         terms: int = 4, coefficients: Sequence[int] = DEFAULT_COEFFICIENTS) -> dict:
        rng = random.Random(seed)
        checked = 0
        for level in levels:
            for _ in range(samples):
                x = self.sample(level, rng, trunc, terms, coefficients)
                failures = self.identity_failures(x)
                failures += self.mixed_failures(self.normalize(x))
                checked += 1
                if failures:
                    logger.warning(f"{self.name}: {failures[0]} fails at level {level}")
                    return {
                        "check": "cocyclic-identities", "module": self.name, "status": "fail",
                        "checked": checked, "witness": {"level": level, "identities": failures},
                    }
            logger.debug(f"{self.name}: level {level} passes on {samples} samples")
        return {"check": "cocyclic-identities", "module": self.name, "status": "pass",
                "checked": checked, "witness": None, "levels": list(levels)}


class StandardModule(CocyclicModule):
    """H^{⊗n} with ∂_0 = 1⊗·, ∂_i = Δ on slot i, ∂_{n+1} = ·⊗σ, σ_j = ε on slot j,
    τ(h¹⊗…⊗hⁿ) = S_δ(h¹)·(h²⊗…⊗hⁿ⊗σ)."""

    def __init__(self, H: HopfAlgebra, pair: ModularPair):
        self.H = H
        self.pair = pair
        self.name = f"{H.tag} {pair.label}"
        self._twisted: Dict = {}

    def slots(self, level: int) -> tuple:
        return (self.H.tag,) * level

    def level_of(self, x: Tensor) -> int:
        return x.degree

    def slot_algebra(self, position: int, level: int) -> HopfAlgebra:
        return self.H

    def normalized_slots(self, level: int) -> List[int]:
        return list(range(level))

    def slot_bases(self, level: int, trunc: TruncationSpec) -> List[List]:
        basis = self.H.basis(trunc)
        return [basis] * level

    def twisted(self, w) -> Element:
        cached = self._twisted.get(w)
        if cached is None:
            cached = twisted_antipode(self.H, self.pair.delta, self.H.word(w))
            self._twisted[w] = cached
        return cached

    def face(self, i: int, x: Tensor) -> Tensor:
        n = self.level_of(x)
        self._check_index(i, 0, n + 1, "face")
        H = self.H
        if i == 0:
            return tensor_product(H.one(), x)
        if i == n + 1:
            return tensor_product(x, H.word(self.pair.sigma))
        return splice(x, i - 1, H.coproduct_word, (H.tag, H.tag))

    def degeneracy(self, j: int, x: Tensor) -> Tensor:
        n = self.level_of(x)
        self._check_index(j, 0, n - 1, "degeneracy")
        return splice(x, j, lambda w: Tensor.scalar(self.H.counit_word(w)), ())

    def cyclic(self, x: Tensor) -> Tensor:
        n = self.level_of(x)
        if n == 0:
            return x
        H = self.H
        sigma = self.pair.sigma

        def on_key(key):
            tail = Tensor.simple(self.slots(n), key[1:] + (sigma,))
            return left_diagonal_action(H, self.twisted(key[0]), tail)

        return x.map_terms(self.slots(n), on_key)


class CoefficientModule(CocyclicModule):
    """M⊗_H H^{⊗n+1}: slot 0 carries M, slots 1.. carry c⁰…cⁿ."""

    def __init__(self, H: HopfAlgebra, M: SaydModule, name: Optional[str] = None):
        self.H = H
        self.M = M
        self.name = name or f"{M.tag} (x)_{H.tag} {H.tag}^(n+1)"

    def slots(self, level: int) -> tuple:
        return (self.M.tag,) + (self.H.tag,) * (level + 1)

    def level_of(self, x: Tensor) -> int:
        return x.degree - 2

    def slot_algebra(self, position: int, level: int) -> HopfAlgebra:
        return self.H

    def normalized_slots(self, level: int) -> List[int]:
        return list(range(2, level + 2))

    def slot_bases(self, level: int, trunc: TruncationSpec) -> List[List]:
        basis = self.H.basis(trunc)
        return [self.M.carrier] + [basis] * (level + 1)

    def face(self, i: int, x: Tensor) -> Tensor:
        n = self.level_of(x)
        self._check_index(i, 0, n + 1, "face")
        H, M = self.H, self.M
        if i <= n:
            return splice(x, i + 1, H.coproduct_word, (H.tag, H.tag))
        slots = self.slots(n + 1)

        def on_key(key):
            m, c0, rest = key[0], key[1], key[2:]
            out: Dict = {}
            for (hm, m0), c in M.coact(m).items():
                for (a, b), c2 in H.coproduct_word(c0).items():
                    for w, c3 in H.multiply_words(hm, a).items():
                        new_key = (m0, b) + rest + (w,)
                        out[new_key] = out.get(new_key, 0) + c * c2 * c3
            return Tensor(slots, out)

        return x.map_terms(slots, on_key)

    def degeneracy(self, j: int, x: Tensor) -> Tensor:
        n = self.level_of(x)
        self._check_index(j, 0, n - 1, "degeneracy")
        return splice(x, j + 2, lambda w: Tensor.scalar(self.H.counit_word(w)), ())

    def cyclic(self, x: Tensor) -> Tensor:
        n = self.level_of(x)
        H, M = self.H, self.M
        slots = self.slots(n)

        def on_key(key):
            m, c0, rest = key[0], key[1], key[2:]
            out: Dict = {}
            for (hm, m0), c in M.coact(m).items():
                for w, c2 in H.multiply_words(hm, c0).items():
                    new_key = (m0,) + rest + (w,)
                    out[new_key] = out.get(new_key, 0) + c * c2
            return Tensor(slots, out)

        return x.map_terms(slots, on_key)

    def canonical(self, x: Tensor) -> Tensor:
        """m⊗c⁰⊗c̃ ↦ Σ m·c⁰₍₁₎ ⊗ 1 ⊗ S(c⁰₍₂₎)·c̃."""
        n = self.level_of(x)
        H, M = self.H, self.M
        slots = self.slots(n)
        unit = H.unit_word()

        def on_key(key):
            m, c0, rest = key[0], key[1], key[2:]
            tail = Tensor.simple((H.tag,) * n, rest)
            out = Tensor(slots)
            for (a, b), c in H.coproduct_word(c0).items():
                moved = left_diagonal_action(H, H.antipode_word(b), tail)
                for m2, c2 in M.act(m, a).items():
                    head = Tensor.simple((M.tag, H.tag), (m2, unit), c * c2)
                    out = out + tensor_product(head, moved)
            return out

        return x.map_terms(slots, on_key)

    def theta(self, x: Tensor) -> Tensor:
        """Θ onto the standard module when M is one-dimensional: S_δ(c⁰)·c̃."""
        if len(self.M.carrier) != 1:
            raise DimensionMismatchError("theta needs a one-dimensional coefficient module")
        n = self.level_of(x)
        return self.canonical(x).map_terms((self.H.tag,) * n,
                                           lambda key: Tensor.simple((self.H.tag,) * n, key[2:]))

    def theta_inv(self, h: Tensor) -> Tensor:
        m = self.M.carrier[0]
        unit = self.H.unit_word()
        return Tensor(self.slots(h.degree), {(m, unit) + key: c for key, c in h.items()})


def b_plus_B(module: CocyclicModule, cochain: Dict[int, Tensor]) -> Dict[int, Tensor]:
    """(b+B) on a mixed cochain given as level → Tensor; zero levels are dropped."""
    out: Dict[int, Tensor] = {}
    for level, x in cochain.items():
        pieces = [(level + 1, module.b(x))]
        if level > 0:
            pieces.append((level - 1, module.B(x)))
        for target, value in pieces:
            out[target] = out[target] + value if target in out else value
    return {level: x for level, x in out.items() if not module.canonical(x).is_zero()}


# name -> (algebra, k, expression)
NAMED_COCYCLES = {
    "GV": ("h1", 0, "-d1"),
    "TF": ("h1", 0, "X # Y - Y # X - d1*Y # Y"),
    "GVdag": ("h1dag", -1, "-s^-1*d1"),
    "TFdag": ("h1dag", -1, "s^-1*X # s^-1*Y - Y # s^-1*X - s^-1*d1*Y # s^-1*Y"),
    "Z": ("h1s", 0, "Z"),
    "TFs": ("h1s", 0, "X # Y - Y # X - Z*Y # Y"),
    "deltaStar": ("hck", 0, "dT[]"),
    "TFck": ("hck", 0, "X # Y - Y # X - dT[]*Y # Y"),
    "deltaStarDag": ("hckdag", -1, "-s^-1*dT[]"),
    "TFckdag": ("hckdag", -1, "s^-1*X # s^-1*Y - Y # s^-1*X - s^-1*dT[]*Y # s^-1*Y"),
}


def standard_module_for(algebra_name: str, k: int = 0) -> StandardModule:
    from h1_family import get_algebra, modular_pair
    H = get_algebra(algebra_name)
    return StandardModule(H, modular_pair(H, k))


def resolve_cocycle(name_or_expression: str, algebra_name: Optional[str] = None,
                    k: Optional[int] = None):
    """(module, cochain, label) for a registered name or an expression in `algebra_name`."""
    from expressions import parse
    if name_or_expression in NAMED_COCYCLES:
        default_algebra, default_k, text = NAMED_COCYCLES[name_or_expression]
        algebra_name = algebra_name or default_algebra
        k = default_k if k is None else k
    else:
        if algebra_name is None:
            raise UnknownNameError(f"unknown cocycle {name_or_expression!r} and no algebra given")
        text = name_or_expression
        k = 0 if k is None else k
    module = standard_module_for(algebra_name, k)
    return module, parse(text, module.H), name_or_expression


def verify_cocycle(name_or_expression: str, algebra_name: Optional[str] = None,
                   k: Optional[int] = None) -> dict:
    """b(x) = 0 and τ(x) = (−1)ⁿx in the standard module of the algebra with (δ, σ^k)."""
    module, x, label = resolve_cocycle(name_or_expression, algebra_name, k)
    return verify_cochain(module, x, label)


def verify_cochain(module: StandardModule, x: Tensor, label: str) -> dict:
    n = module.level_of(x)
    b_is_zero = module.b(x).is_zero()
    sign = -1 if n % 2 else 1
    tau_eigen_ok = module.cyclic(x) == x.scale(sign)
    status = "pass" if b_is_zero and tau_eigen_ok else "fail"
    report = {
        "check": "cocycle",
        "name": label,
        "algebra": module.H.tag,
        "mpi": module.pair.label,
        "degree": n,
        "b_is_zero": b_is_zero,
        "tau_eigen_ok": tau_eigen_ok,
        "status": status,
        "witness": None,
    }
    if status == "fail":
        from expressions import format_tensor
        report["witness"] = format_tensor(module.H, module.b(x)) if not b_is_zero else \
            format_tensor(module.H, module.cyclic(x) - x.scale(sign))
        logger.warning(f"{label} is not a cyclic cocycle in {module.name}")
    return report


def require_cocycle(module: CocyclicModule, cochain: Dict[int, Tensor]):
    if b_plus_B(module, cochain):
        raise NotACocycleError("input is not a (b+B)-cocycle")
