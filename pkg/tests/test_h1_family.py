import pytest
import sys
import os
import random
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import CapExceededError, UnknownNameError
from exact_kernel import Element, Tensor, TruncationSpec
from h1_family import (
    X,
    Y,
    Z,
    H1,
    DeltaFunctions,
    H1Dagger,
    H1s,
    build_h1_as_bicrossed,
    build_h1dag,
    build_h1s_as_bicrossed,
    d,
    get_algebra,
    modular_pair,
    sigma,
)
from hopf import UNIT, check_hopf_axioms, check_mpi


@pytest.fixture
def trunc():
    """Window for the axiom checks."""
    return TruncationSpec(pbw_cap=2, delta_cap=2, sigma_range=(-1, 1))


class TestH1:
    """Tests for H1 and its relations."""

    def test_hopf_axioms(self, trunc):
        """Test coassociativity, counit and antipode on H1."""
        assert check_hopf_axioms(H1(), trunc)["status"] == "pass"

    def test_commutator_x_delta(self):
        """Test [X, d1] = d2, so d1*X = X*d1 - d2."""
        H = H1()

        result = H.multiply_words((d(1),), (X,))

        assert result == Element("h1", {(X, d(1)): 1, (d(2),): -1})

    def test_coproduct_of_d2(self):
        """Test Delta(d2) = d2 # 1 + 1 # d2 + d1 # d1."""
        H = H1()

        result = H.coproduct_word((d(2),))

        expected = Tensor(("h1", "h1"), {
            ((d(2),), UNIT): 1, (UNIT, (d(2),)): 1, ((d(1),), (d(1),)): 1,
        })
        assert result == expected

    def test_antipode_of_x(self):
        """Test S(X) = -X + d1*Y."""
        H = H1()

        result = H.antipode_word((X,))

        # d1*Y rewrites to Y*d1 - d1
        assert result == Element("h1", {(X,): -1, (Y, d(1)): 1, (d(1),): -1})

    def test_weights(self):
        """Test the ad-Y grading of words."""
        H = H1()

        assert H.weight_word((Y, X, d(2))) == 3
        assert H.weight_word((Y, Y)) == 0

    def test_unknown_generator(self):
        """Test that Z is rejected in H1."""
        with pytest.raises(UnknownNameError):
            H1().generator_element("Z")


class TestH1s:
    """Tests for the Schwarzian quotient."""

    def test_hopf_axioms(self, trunc):
        assert check_hopf_axioms(H1s(), trunc)["status"] == "pass"

    def test_z_times_x(self):
        """Test Z*X = X*Z - Z^2/2."""
        H = H1s()

        result = H.multiply_words((Z,), (X,))

        assert result == Element("h1s", {(X, Z): 1, (Z, Z): Fraction(-1, 2)})

    def test_mpi(self, trunc):
        H = H1s()

        assert check_mpi(H, modular_pair(H, 0), trunc)["status"] == "pass"


class TestCovers:
    """Tests for the sigma-covers of H1."""

    def test_hopf_axioms_modulo_two(self, trunc):
        """Test the Hopf axioms of H1 dagger with sigma^2 = 1."""
        assert check_hopf_axioms(H1Dagger(2), trunc)["status"] == "pass"

    def test_sigma_is_central(self):
        """Test sigma commutes with X."""
        H = H1Dagger()

        left = H.multiply_words((sigma(1),), (X,))
        right = H.multiply_words((X,), (sigma(1),))

        assert left == right

    def test_sigma_inverse(self):
        """Test sigma * sigma^-1 = 1."""
        H = H1Dagger()

        assert H.multiply_words(H.sigma_word(1), H.sigma_word(-1)) == H.one()

    @pytest.mark.parametrize("k", [-1, 0, 1])
    def test_every_sigma_power_is_an_mpi(self, trunc, k):
        """Test (delta, sigma^k) is an MPI since S_delta^2 = Id and sigma is central."""
        H = H1Dagger()

        assert check_mpi(H, modular_pair(H, k), trunc)["status"] == "pass"

    def test_cover_isomorphism(self, trunc):
        """Test the direct presentation against H1 x K."""
        model = build_h1dag(trunc=trunc)

        assert model.reports[0]["status"] == "pass"

    def test_phi_splits_sigma(self):
        """Test Phi(sigma h) = h # sigma."""
        model = build_h1dag()

        result = model.phi((sigma(1), X))

        assert result == model.product.word(((X,), (sigma(1),)))


class TestBicrossedModels:
    """Tests for the matched-pair decompositions."""

    def test_h1_model(self, trunc):
        """Test U x F is isomorphic to H1 on low-degree words."""
        model = build_h1_as_bicrossed(trunc)

        assert model.reports[0]["status"] == "pass"

    def test_h1s_model(self, trunc):
        model = build_h1s_as_bicrossed(trunc)

        assert model.reports[0]["status"] == "pass"

    def test_delta_functions_coproduct(self):
        """Test Delta(d2) in F matches the one in H1."""
        F = DeltaFunctions()

        result = F.coproduct_word((d(2),))

        assert result.coefficient(((d(1),), (d(1),))) == 1
        assert len(result) == 3


class TestRegistry:
    """Tests for algebra lookup by name."""

    def test_instances_are_shared(self):
        assert get_algebra("h1") is get_algebra("h1")

    def test_cover_modulus(self):
        """Test the N-cover name parses its modulus."""
        H = get_algebra("h1dagN:3")

        assert H.modulus == 3
        assert H.tag == "h1dagN:3"

    def test_unknown_name(self):
        with pytest.raises(UnknownNameError):
            get_algebra("h2")

    def test_capped_instances_are_separate(self):
        """Test caps are part of the registry key."""
        capped = get_algebra("h1", TruncationSpec(delta_cap=2))

        assert capped is not get_algebra("h1")
        assert capped is get_algebra("h1", TruncationSpec(delta_cap=2, pbw_cap=3))
        assert capped.max_delta_index == 2
        assert get_algebra("h1").max_delta_index is None


class TestDeltaCap:
    """Tests for the configured bound on delta indices."""

    @pytest.fixture
    def capped(self):
        return get_algebra("h1", TruncationSpec(delta_cap=2))

    def test_within_cap(self, capped):
        """Test d1*X = X d1 - d2 stays inside cap 2."""
        result = capped.multiply_words((d(1),), (X,))

        assert result == Element("h1", {(X, d(1)): 1, (d(2),): -1})

    def test_product_past_cap(self, capped):
        """Test d2*X would create d3."""
        with pytest.raises(CapExceededError):
            capped.multiply_words((d(2),), (X,))

    def test_literal_past_cap(self, capped):
        with pytest.raises(CapExceededError):
            capped.generator_element("d3")

    def test_cover_and_delta_functions(self):
        """Test the cover and F honour the same cap."""
        trunc = TruncationSpec(delta_cap=1)
        cover = get_algebra("h1dagN:2", trunc)
        F = get_algebra("f", trunc)

        with pytest.raises(CapExceededError):
            cover.multiply_words((d(1),), (X,))
        with pytest.raises(CapExceededError):
            F.derivation_word((d(1),))

    def test_uncapped_algebra_grows(self):
        result = get_algebra("h1").multiply_words((d(9),), (X,))

        assert result.coefficient((d(10),)) == -1


def random_word(letters, rng, max_length=6):
    return tuple(rng.choice(letters) for _ in range(rng.randint(0, max_length)))


class TestConfluence:
    """Tests that rewriting reaches one normal form whatever the association order."""

    LETTERS = {
        "h1": [Y, X, d(1), d(2)],
        "h1s": [Y, X, Z],
        "h1dagN:2": [Y, X, d(1), sigma(1)],
    }

    @pytest.mark.parametrize("name", sorted(LETTERS))
    def test_association_order(self, name):
        """Test (ab)c = a(bc) = normal_form(abc) on 200 seeded random strings of length at most 6."""
        H = get_algebra(name)
        rng = random.Random(0)

        for _ in range(200):
            word = random_word(self.LETTERS[name], rng)
            i = rng.randint(0, len(word))
            j = rng.randint(i, len(word))
            a, b, c = (H.normal_form(part) for part in (word[:i], word[i:j], word[j:]))

            left = H.multiply(H.multiply(a, b), c)
            right = H.multiply(a, H.multiply(b, c))

            assert left == right, H.format_word(word)
            assert left == H.normal_form(word), H.format_word(word)
