import pytest
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import DimensionMismatchError, NotACocycleError, UnknownNameError
from exact_kernel import Tensor
from expressions import parse
from h1_family import X, Y, d, get_algebra, modular_pair
from hopf import UNIT, modular_pair_module
from cyclic import (
    NAMED_COCYCLES,
    CoefficientModule,
    StandardModule,
    b_plus_B,
    require_cocycle,
    standard_module_for,
    verify_cocycle,
)


@pytest.fixture
def h1_module():
    """Standard module of H1 with (delta, 1)."""
    return standard_module_for("h1", 0)


class TestStandardModule:
    """Tests for the Hopf cocyclic module of (H, delta, sigma)."""

    def test_coboundary_of_x(self, h1_module):
        """Test b(X) = -d1 # Y."""
        x = Tensor.simple(("h1",), ((X,),))

        result = h1_module.b(x)

        assert result == Tensor.simple(("h1", "h1"), ((d(1),), (Y,)), -1)

    def test_coboundary_of_d2(self, h1_module):
        """Test b(d2) = -d1 # d1."""
        x = Tensor.simple(("h1",), ((d(2),),))

        result = h1_module.b(x)

        assert result == Tensor.simple(("h1", "h1"), ((d(1),), (d(1),)), -1)

    def test_cyclic_operator_order(self, h1_module):
        """Test tau^(n+1) = id on a 2-cochain."""
        x = parse("X # Y - d1 # X", h1_module.H)

        assert h1_module.tau_power(x, 3) == x

    def test_b_squared_vanishes(self, h1_module):
        x = parse("X*Y # d1 + d2 # Y", h1_module.H)

        assert h1_module.b(h1_module.b(x)).is_zero()

    def test_b_on_level_zero(self, h1_module):
        """Test b(1) = 1 - sigma vanishes for sigma = 1."""
        assert h1_module.b(Tensor.scalar(1)).is_zero()

    def test_bad_face_index(self, h1_module):
        x = Tensor.simple(("h1",), ((X,),))

        with pytest.raises(DimensionMismatchError):
            h1_module.face(3, x)

    def test_identity_suite(self, small_trunc):
        """Test the cocyclic and mixed identities on random cochains."""
        H = get_algebra("h1")
        module = StandardModule(H, modular_pair(H, 0))

        report = module.check_identities([0, 1, 2], samples=3, seed=0, trunc=small_trunc, terms=2)

        assert report["status"] == "pass"
        assert report["checked"] == 9

    def test_identity_suite_on_cover(self, small_trunc):
        """Test the identities on the 2-fold cover with (delta, sigma^-1)."""
        H = get_algebra("h1dagN:2")
        module = StandardModule(H, modular_pair(H, -1))

        report = module.check_identities([1, 2], samples=2, seed=1, trunc=small_trunc, terms=2)

        assert report["status"] == "pass"


class TestNamedCocycles:
    """Tests for the registered cyclic cocycles."""

    @pytest.mark.parametrize("name", sorted(NAMED_COCYCLES))
    def test_registered_cocycle(self, name):
        """Test b(x) = 0 and tau x = (-1)^n x."""
        report = verify_cocycle(name)

        assert report["status"] == "pass", report["witness"]
        assert report["b_is_zero"]
        assert report["tau_eigen_ok"]

    def test_transverse_fundamental_class_degree(self):
        report = verify_cocycle("TF")

        assert report["degree"] == 2
        assert report["mpi"] == "(delta, 1)"

    def test_expression_that_is_not_a_cocycle(self):
        """Test X fails with b(X) as the witness."""
        report = verify_cocycle("X", "h1")

        assert report["status"] == "fail"
        assert report["witness"] == "-d1 # Y"

    def test_unknown_name_without_algebra(self):
        with pytest.raises(UnknownNameError):
            verify_cocycle("nothing")


class TestMixedComplex:
    """Tests for (b+B) cochains."""

    def test_godbillon_vey_is_a_cocycle(self, h1_module):
        """Test that the level-1 class -d1 is (b+B)-closed."""
        gv = parse("-d1", h1_module.H)

        assert b_plus_B(h1_module, {1: gv}) == {}
        require_cocycle(h1_module, {1: gv})

    def test_require_cocycle_raises(self, h1_module):
        x = parse("X", h1_module.H)

        with pytest.raises(NotACocycleError):
            require_cocycle(h1_module, {1: x})


class TestCoefficientModule:
    """Tests for M (x)_H H^(n+1) with a SAYD coefficient."""

    @pytest.fixture
    def module(self):
        H = get_algebra("h1")
        M = modular_pair_module(H, modular_pair(H, 0))
        return CoefficientModule(H, M)

    def test_identity_suite(self, module, small_trunc):
        report = module.check_identities([0, 1], samples=2, seed=0, trunc=small_trunc, terms=2)

        assert report["status"] == "pass"

    def test_theta_recovers_standard_cochain(self, module):
        """Test Theta undoes its inverse on a 2-cochain."""
        h = parse("X # Y - Y # X", module.H)

        assert module.theta(module.theta_inv(h)) == h

    def test_canonical_moves_c0_into_the_coefficient(self, module):
        """Test m (x) Y is identified with delta(Y) m (x) 1 at level 0."""
        m = module.M.carrier[0]
        x = Tensor.simple(module.slots(0), (m, (Y,)))

        result = module.canonical(x)

        assert result == Tensor.simple(module.slots(0), (m, UNIT))
