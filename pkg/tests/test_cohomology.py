import pytest
import sys
import os
from dataclasses import replace

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import NotACocycleError, UnknownNameError
from exact_kernel import Tensor
from expressions import parse
from h1_family import get_algebra
from cohomology import (
    coboundary_membership,
    column_cohomology,
    cotor_pages,
    transfer_class,
    transfer_tensor,
    truncated_complex,
    weight1_pages,
)


def nonzero(report):
    """Entries of a page report with positive dimension, as {(p, q): dim}."""
    return {(e["p"], e["q"]): e["dim"] for e in report["entries"] if e["dim"]}


class TestWeightOnePages:
    """Tests for the spectral pages of the bicrossed decompositions."""

    def test_h1_first_page(self, page_trunc):
        """Test E_1 in weight 1 is one-dimensional at (1,0), (0,1), (1,1), (0,2)."""
        reports = weight1_pages("h1", page_trunc)

        assert [r["page"] for r in reports] == [1, 2, 3]
        assert reports[0]["filtration"] == "columns"
        assert nonzero(reports[0]) == {(1, 0): 1, (0, 1): 1, (1, 1): 1, (0, 2): 1}

    def test_h1_d1_cancels_the_middle(self, page_trunc):
        """Test d_1 pairs (0,1) with (1,1) on the second display."""
        page = weight1_pages("h1", page_trunc)[1]

        ranks = {(e["p"], e["q"]): e.get("d_rank") for e in page["entries"]}
        assert ranks[(0, 1)] == 1
        assert ranks[(1, 0)] == 0

    def test_h1_third_page(self, page_trunc):
        """Test only GV at (1,0) and X^Y at (0,2) survive."""
        page = weight1_pages("h1", page_trunc)[2]

        assert page["status"] == "pass"
        assert nonzero(page) == {(1, 0): 1, (0, 2): 1}

    @pytest.mark.parametrize("cap", [2, 3, 4])
    def test_pages_stable_under_cap(self, page_trunc, cap):
        """Test the third page does not depend on the PBW cap."""
        trunc = replace(page_trunc, pbw_cap=cap)

        page = weight1_pages("h1", trunc)[2]

        assert nonzero(page) == {(1, 0): 1, (0, 2): 1}

    def test_hck_has_the_same_shape(self, page_trunc):
        page = weight1_pages("hck", page_trunc)[2]

        assert nonzero(page) == {(1, 0): 1, (0, 2): 1}

    def test_representatives_are_printed(self, page_trunc):
        page = weight1_pages("h1", page_trunc)[2]

        entry = next(e for e in page["entries"] if (e["p"], e["q"]) == (1, 0))
        assert entry["representatives"] == ["d1"]

    def test_only_bicrossed_names(self, page_trunc):
        with pytest.raises(UnknownNameError):
            weight1_pages("h1dag", page_trunc)

    def test_blocks_form_a_bicomplex(self, page_trunc):
        complex_ = truncated_complex("h1", 1, page_trunc)

        assert complex_.square_failures() == []

    def test_total_complex_is_memoized_per_instance(self, page_trunc):
        """Test the total coboundary is built once per truncated complex, not shared across them."""
        first = truncated_complex("h1", 1, page_trunc)
        second = truncated_complex("h1", 1, page_trunc)

        columns = first.total_columns(1)

        assert first.total_columns(1) is columns
        assert first.total_index(1) is first.total_index(1)
        assert second.total_columns(1) == columns
        assert second.total_columns(1) is not columns

    def test_column_cohomology(self, page_trunc):
        """Test the column p = 0 is the Lie algebra cohomology of U in weight 1."""
        assert column_cohomology("h1", 0, 1, page_trunc) == {0: 0, 1: 1, 2: 1, 3: 0}


class TestCotor:
    """Tests for the 2-periodic complexes of the sigma-covers."""

    @pytest.mark.parametrize("modulus", [2, 3])
    @pytest.mark.parametrize("k", [-1, 0, 1])
    def test_only_k_minus_one_carries_cohomology(self, small_trunc, modulus, k):
        """Test weight 1 survives exactly when k = -1 modulo N."""
        report = cotor_pages(f"h1dagN:{modulus}", k, small_trunc)

        assert report["status"] == "pass"
        assert report["carries_hp"] == ((k + 1) % modulus == 0)

    def test_surviving_weights(self, small_trunc):
        """Test the weights congruent to -k survive."""
        report = cotor_pages("h1dagN:2", 0, small_trunc)

        assert report["surviving_weights"] == [0, 2]
        assert report["note"] == "contractible weight"

    def test_positive_columns_vanish(self, small_trunc):
        report = cotor_pages("h1dagN:3", -1, small_trunc)

        assert all(e["dim"] == 0 for e in report["entries"] if e["p"] > 0)

    def test_tree_cover(self, small_trunc):
        report = cotor_pages("hckdagN:2", -1, small_trunc)

        assert report["carries_hp"]

    def test_bicrossed_is_not_a_cover(self, small_trunc):
        with pytest.raises(UnknownNameError):
            cotor_pages("h1", 0, small_trunc)


class TestTransfer:
    """Tests for transferring page classes to the direct presentation."""

    def test_x_wedge_y(self, page_trunc):
        """Test X^Y transfers to TF up to b(X)."""
        report = transfer_class("XwedgeY", "h1", trunc=page_trunc)

        assert report["status"] == "pass"
        assert report["b_is_zero"]
        assert report["compared_with"] == "TF"
        assert report["relation"] == "cohomologous"

    def test_x_wedge_y_differs_from_tf_by_b_of_x(self):
        h1 = get_algebra("h1")

        result = transfer_tensor("XwedgeY", "h1")

        # TF + b(X)
        assert result == parse("X # Y - Y # X - d1*Y # Y - d1 # Y", h1)

    def test_delta_one_is_godbillon_vey(self, page_trunc):
        report = transfer_class("delta1", "h1", trunc=page_trunc)

        assert report["result"] == "-d1"
        assert report["relation"] == "equal"

    def test_cover_fundamental_class(self):
        """Test the cover TF transfers exactly to TFdag at k = -1."""
        report = transfer_class("TF", "h1dag", k=-1)

        assert report["relation"] == "equal"
        assert report["tau_eigen_ok"]

    def test_cover_delta_one(self):
        report = transfer_class("GV", "h1dag", k=-1)

        assert report["result"] == "-s^-1*d1"
        assert report["status"] == "pass"

    def test_comparison_needs_matching_k(self):
        """Test no comparison is attempted away from the named k."""
        report = transfer_class("TF", "h1dagN:2", k=0)

        assert report["compared_with"] == "TFdag"
        assert report["relation"] is None

    def test_unknown_class(self):
        with pytest.raises(UnknownNameError):
            transfer_class("nothing", "h1")


class TestCoboundaries:
    """Tests for membership in the image of b + B."""

    def test_b_of_x(self, page_trunc):
        h1 = get_algebra("h1")

        report = coboundary_membership(parse("-d1 # Y", h1), "h1", trunc=page_trunc)

        assert report["member"]
        assert report["preimage"]

    def test_fundamental_class_is_not_a_coboundary(self, page_trunc):
        """Test TF is not hit by capped cochains."""
        h1 = get_algebra("h1")

        report = coboundary_membership(parse("X # Y - Y # X - d1*Y # Y", h1), "h1", trunc=page_trunc)

        assert not report["member"]
        assert report["status"] == "evidence-at-cap"

    def test_zero(self):
        report = coboundary_membership(Tensor(("h1", "h1")), "h1")

        assert report["member"]
        assert report["preimage"] == {}

    def test_needs_a_cocycle(self, page_trunc):
        with pytest.raises(NotACocycleError):
            coboundary_membership(parse("X", get_algebra("h1")), "h1", trunc=page_trunc)
