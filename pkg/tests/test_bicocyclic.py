import pytest
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import DimensionMismatchError, UnknownNameError
from exact_kernel import Tensor
from expressions import parse
from h1_family import X, get_algebra
from bicocyclic import check_bicocyclic, coefficient_bicocyclic, setting_for


@pytest.fixture
def cover():
    """Two-fold cover of H1 with (epsilon, sigma^-1) on K."""
    return setting_for("h1dagN:2", -1)


class TestSettings:
    """Tests for the crossed-product settings."""

    def test_settings_are_cached(self):
        assert setting_for("h1dag", -1) is setting_for("h1dag", -1)

    def test_bicrossed_setting_is_not_cyclic(self):
        """Test U x F only carries the cosimplicial structure."""
        setting = setting_for("h1")

        assert not setting.cyclic
        assert setting.bicomplex.slots(1, 1) == ("f", "u")

    def test_unknown_decomposition(self):
        with pytest.raises(UnknownNameError):
            setting_for("u")

    def test_coefficients_need_a_cover(self):
        with pytest.raises(UnknownNameError):
            coefficient_bicocyclic("h1")


class TestPsi:
    """Tests for the map onto the diagonal."""

    def test_inverse_on_cover(self, cover):
        """Test psi_inv(psi(x)) = x for sigma-graded slots."""
        direct = get_algebra("h1dagN:2")
        x = cover.from_direct_tensor(parse("s*X # d1 - Y # s*d2", direct))

        y = cover.psi(x)

        assert cover.bicomplex.bidegree(y) == (2, 2)
        assert cover.psi_inv(y) == x

    def test_inverse_on_bicrossed(self):
        setting = setting_for("h1")
        x = setting.from_direct_tensor(parse("X # Y - d1*Y # Y", get_algebra("h1")))

        assert setting.psi_inv(setting.psi(x)) == x

    def test_psi_commutes_with_faces(self, cover):
        """Test psi intertwines the standard module with the diagonal."""
        direct = get_algebra("h1dagN:2")
        x = cover.from_direct_tensor(parse("X # s*Y", direct))

        assert cover.psi_failures(x) == []

    def test_psi_inv_needs_diagonal(self, cover):
        bico = cover.bicomplex
        y = Tensor.simple(bico.slots(1, 0), (bico.K.group_word(1),))

        with pytest.raises(DimensionMismatchError):
            cover.psi_inv(y)


class TestBicocyclicModule:
    """Tests for the bicocyclic identities and Alexander-Whitney."""

    def test_cover_suite(self, cover, small_trunc):
        """Test rows, columns, commutation, total complex and psi on the cover."""
        reports = check_bicocyclic(cover.bicomplex, 1, 1, samples=2, seed=0, trunc=small_trunc,
                                   setting=cover, terms=2)

        failing = [r for r in reports if r["status"] != "pass"]
        assert failing == []
        assert reports[-1]["check"] == "psi"

    def test_bicrossed_suite(self, small_trunc):
        setting = setting_for("h1")

        reports = check_bicocyclic(setting.bicomplex, 1, 1, samples=2, seed=0, trunc=small_trunc,
                                   setting=setting, terms=2)

        assert all(r["status"] == "pass" for r in reports)

    def test_views_are_memoized(self, cover):
        """Test rows, columns, the diagonal and the total complex are built once per module."""
        bico = cover.bicomplex

        assert bico.row(1) is bico.row(1)
        assert bico.column(0) is bico.column(0)
        assert bico.row(1) is not bico.row(0)
        assert bico.diagonal() is bico.diagonal()
        assert bico.total() is bico.total()

    def test_alexander_whitney_lands_on_diagonal(self, cover):
        """Test AW takes bidegree (1, 1) to (2, 2)."""
        bico = cover.bicomplex
        x = Tensor.simple(bico.slots(1, 1), (bico.K.group_word(1), (X,)))

        y = bico.alexander_whitney(x)

        assert bico.bidegree(y) == (2, 2)

    def test_aw_of_empty_cochain(self, cover):
        with pytest.raises(DimensionMismatchError):
            cover.bicomplex.aw({})

    def test_coefficient_compatibility(self, small_trunc):
        """Test C_delta is K-coinvariant and the sigma^k module is H-stable."""
        bico = coefficient_bicocyclic("h1dagN:2", -1)

        assert bico.check_coefficients(small_trunc)["status"] == "pass"
