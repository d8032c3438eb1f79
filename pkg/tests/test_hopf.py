import pytest
import sys
import os
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import CapExceededError
from exact_kernel import Element, Tensor, TruncationSpec
from h1_family import X, Y, EnvelopingAlgebra, GroupAlgebra, H1, build_h1dag, d, get_algebra, modular_pair
from hopf import (
    UNIT,
    Character,
    ModularPair,
    check_character,
    check_comodule_hopf,
    check_hopf_axioms,
    check_mpi,
    check_sayd,
    combined_mpi,
    counit_character,
    grading_coaction,
    iterated_coproduct,
    modular_pair_module,
    require_cap,
    twisted_antipode,
)


@pytest.fixture
def trunc():
    """Window small enough for pairwise product checks."""
    return TruncationSpec(pbw_cap=2, delta_cap=2, sigma_range=(-1, 1))


class TestPresentedAlgebra:
    """Tests for the rewriting and letter-table Hopf structure."""

    def test_enveloping_algebra_axioms(self, trunc):
        """Test coassociativity, counit and antipode on U."""
        report = check_hopf_axioms(EnvelopingAlgebra(), trunc)

        assert report["status"] == "pass"
        assert report["witness"] is None

    def test_normal_form_rewrites_xy(self):
        """Test X*Y = Y*X - X."""
        U = EnvelopingAlgebra()

        result = U.multiply_words((X,), (Y,))

        assert result == Element("u", {(Y, X): 1, (X,): -1})

    def test_primitive_antipode(self):
        """Test S(Y) = -Y for a primitive letter."""
        U = EnvelopingAlgebra()

        assert U.antipode_word((Y,)) == U.word((Y,), -1)

    def test_iterated_coproduct_of_primitive(self):
        """Test the three-leg coproduct of a primitive letter."""
        U = EnvelopingAlgebra()

        result = iterated_coproduct(U, U.word((Y,)), 3)

        assert len(result) == 3
        assert result.coefficient(((Y,), UNIT, UNIT)) == 1

    def test_group_algebra_with_modulus(self):
        """Test sigma^3 = 1 modulo 3."""
        K = GroupAlgebra(3)

        result = K.multiply_words(K.group_word(2), K.group_word(1))

        assert result == K.one()

    def test_require_cap(self):
        with pytest.raises(CapExceededError):
            require_cap(5, 4, "PBW degree")


class TestCharacters:
    """Tests for characters and modular pairs."""

    def test_twisted_antipode_of_y(self):
        """Test S_delta(Y) = 1 - Y."""
        H = H1()
        delta = modular_pair(H, 0).delta

        result = twisted_antipode(H, delta, H.word((Y,)))

        assert result == Element("h1", {UNIT: 1, (Y,): -1})

    def test_twisted_antipode_of_x_on_cover(self, trunc):
        """Test S_delta(X) = -s^-1 (X - d1 Y) on the 2-cover, and S_delta^2 = Id there."""
        H = get_algebra("h1dagN:2")
        delta = modular_pair(H, 0).delta
        s_inv = H.word(H.sigma_word(-1))
        x = H.word((X,))

        result = twisted_antipode(H, delta, x)

        expected = -H.multiply(s_inv, x - H.multiply(H.word((d(1),)), H.word((Y,))))
        assert result == expected
        assert twisted_antipode(H, delta, result) == x
        assert check_mpi(H, modular_pair(H, 0), trunc)["status"] == "pass"

    def test_delta_is_a_character(self, trunc):
        """Test multiplicativity of delta on H1."""
        H = H1()

        report = check_character(H, modular_pair(H, 0).delta, trunc)

        assert report["status"] == "pass"

    def test_mpi_on_h1(self, trunc):
        """Test (delta, 1) is a modular pair in involution."""
        H = H1()

        report = check_mpi(H, modular_pair(H, 0), trunc)

        assert report["status"] == "pass"

    def test_counit_pair_fails_on_x(self, trunc):
        """Test (epsilon, 1) is not an MPI; the first failing word is X."""
        H = H1()
        pair = ModularPair(counit_character(H), H.unit_word(), label="(epsilon, 1)")

        report = check_mpi(H, pair, trunc)

        assert report["status"] == "fail"
        assert report["witness"] == "X"

    def test_character_value_on_sigma(self):
        """Test characters default to 1 on group-likes."""
        H = get_algebra("h1dag")
        delta = Character(H.tag, {"Y": 1})

        assert delta.word_value(H, H.sigma_word(-1)) == 1
        assert delta.word_value(H, (Y, Y)) == 1
        assert delta.word_value(H, (X,)) == 0


class TestComoduleAlgebras:
    """Tests for the sigma-grading coaction and the cocrossed product."""

    def test_grading_coaction_axioms(self, trunc):
        """Test H1 is a K-comodule Hopf algebra under rho(h) = sigma^|h| h."""
        H, K = H1(), GroupAlgebra()

        report = check_comodule_hopf(H, K, grading_coaction(H, K), trunc)

        assert report["status"] == "pass"

    def test_coaction_on_delta(self):
        """Test rho(d2) = sigma^2 # d2."""
        H, K = H1(), GroupAlgebra()

        result = grading_coaction(H, K).apply_word((d(2),))

        assert result == Tensor.simple(("K", "h1"), (K.group_word(2), (d(2),)))

    def test_cocrossed_product_axioms(self, trunc):
        """Test the Hopf axioms of H1 x K modulo 2."""
        model = build_h1dag(2)

        report = check_hopf_axioms(model.product, trunc)

        assert report["status"] == "pass"

    def test_combined_mpi(self, trunc):
        """Test (delta x epsilon, 1 # sigma^-1) is assembled from its parts."""
        model = build_h1dag()
        H, K = model.base, model.K
        beta_nu = ModularPair(counit_character(K), K.group_word(-1))

        pair, report = combined_mpi(model.product, modular_pair(H, 0), beta_nu, trunc)

        assert report["status"] == "pass"
        assert pair.sigma == (UNIT, K.group_word(-1))


class TestSayd:
    """Tests for SAYD coefficient modules."""

    def test_delta_module_is_sayd(self):
        """Test C_delta over H1 is stable anti-Yetter-Drinfeld."""
        H = H1()

        report = check_sayd(modular_pair_module(H, modular_pair(H, 0)))

        assert report["status"] == "pass"

    def test_module_action(self):
        """Test 1 . Y = delta(Y) 1."""
        H = H1()
        M = modular_pair_module(H, modular_pair(H, 0))

        assert M.act(UNIT, (Y,)) == Element(M.tag, {UNIT: Fraction(1)})
        assert M.act(UNIT, (X,)).is_zero()
