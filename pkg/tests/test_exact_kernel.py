import pytest
import sys
import os
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import CapExceededError, ConfigError, DimensionMismatchError, TagMismatchError
from exact_kernel import (
    BasisIndex,
    Element,
    SparseMatrix,
    Tensor,
    TruncationSpec,
    format_rational,
    linear_combination,
    span_rank,
    splice,
    tensor_product,
)


class TestCombinations:
    """Tests for formal linear combinations."""

    def test_cancellation_drops_terms(self):
        """Test that terms summing to zero disappear."""
        a = Element("h1", {("Y",): 1, ("X",): Fraction(1, 2)})
        b = Element("h1", {("Y",): -1})

        total = a + b

        # Only the X term survives
        assert total.terms == {("X",): Fraction(1, 2)}

    def test_scale_by_zero(self):
        """Test scaling by zero gives the zero element."""
        a = Element("h1", {("Y",): 3})

        assert a.scale(0).is_zero()

    def test_tag_mismatch(self):
        """Test that different algebras cannot be added."""
        with pytest.raises(TagMismatchError):
            Element("h1", {("Y",): 1}) + Element("u", {("Y",): 1})

    def test_tensor_product_concatenates(self):
        """Test the bilinear concatenation of elements."""
        a = Element("h1", {("X",): 1, ("Y",): 2})
        b = Element("h1", {("Y",): 1})

        t = tensor_product(a, b)

        assert t.slots == ("h1", "h1")
        assert t.terms == {(("X",), ("Y",)): 1, (("Y",), ("Y",)): 2}

    def test_tensor_product_across_algebras(self):
        """Test factors over different algebras concatenate their slot tags."""
        k = Element("K", {(("s", 1),): 1})
        h = Element("h1", {("X",): 2})

        t = tensor_product(k, h)

        assert t.slots == ("K", "h1")
        assert t.terms == {((("s", 1),), ("X",)): 2}

    def test_to_element_needs_degree_one(self):
        """Test conversion of a degree-2 tensor is rejected."""
        t = Tensor.simple(("h1", "h1"), (("X",), ("Y",)))

        with pytest.raises(DimensionMismatchError):
            t.to_element()

    def test_linear_combination(self):
        """Test weighted sums without intermediates."""
        x = Tensor.simple(("h1",), (("X",),))
        y = Tensor.simple(("h1",), (("Y",),))

        total = linear_combination(("h1",), [(2, x), (-1, y), (1, x)])

        assert total.terms == {(("X",),): 3, (("Y",),): -1}

    def test_splice_replaces_one_slot(self):
        """Test that splice expands one slot into several."""
        t = Tensor.simple(("h1", "h1"), (("X",), ("Y",)))

        def double(w):
            return Tensor.simple(("h1", "h1"), (w, w))

        result = splice(t, 0, double, ("h1", "h1"))

        assert result.slots == ("h1", "h1", "h1")
        assert result.terms == {(("X",), ("X",), ("Y",)): 1}

    def test_format_rational(self):
        """Test the canonical rational text form."""
        assert format_rational(Fraction(3)) == "3"
        assert format_rational(Fraction(-1, 2)) == "-1/2"


class TestTruncation:
    """Tests for truncation windows."""

    def test_negative_cap_rejected(self):
        """Test that negative caps raise ConfigError."""
        with pytest.raises(ConfigError):
            TruncationSpec(pbw_cap=-1)

    def test_empty_sigma_range_rejected(self):
        with pytest.raises(ConfigError):
            TruncationSpec(sigma_range=(2, -2))

    def test_sigma_exponents_with_modulus(self):
        """Test that a modulus replaces the sigma range."""
        assert TruncationSpec(modulus=3).sigma_exponents() == [0, 1, 2]
        assert TruncationSpec().sigma_exponents() == [-2, -1, 0, 1, 2]


class TestSparseMatrix:
    """Tests for exact sparse linear algebra."""

    def test_rank_of_dependent_rows(self):
        """Test rank of a rank-one matrix."""
        m = SparseMatrix.from_dense([[1, 2], [2, 4]])

        assert m.rank() == 1

    def test_kernel_vector(self):
        """Test the null space of a rank-one matrix."""
        m = SparseMatrix.from_dense([[1, 2], [2, 4]])

        kernel = m.kernel()

        # One free column, vector (-2, 1)
        assert kernel == [{1: Fraction(1), 0: Fraction(-2)}]
        assert m.apply(kernel[0]) == {}

    def test_kernel_with_no_rows(self):
        """Test that a matrix without rows has every unit vector in its kernel."""
        m = SparseMatrix(0, 2)

        assert m.kernel() == [{0: Fraction(1)}, {1: Fraction(1)}]

    def test_rational_entries(self):
        """Test elimination with fractional entries."""
        m = SparseMatrix.from_dense([[Fraction(1, 2), Fraction(1, 3)], [1, Fraction(2, 3)]])

        assert m.rank() == 1

    def test_mixed_denominators(self):
        """Test rows over 1/6, 1/4 and 1/10 keep their rank and null space once cleared."""
        m = SparseMatrix.from_dense([[Fraction(1, 6), Fraction(1, 4), 0], [0, 0, Fraction(1, 10)]])

        kernel = m.kernel()

        assert m.rank() == 2
        assert kernel == [{1: Fraction(1), 0: Fraction(-3, 2)}]
        assert m.apply(kernel[0]) == {}

    def test_in_image_with_witness(self):
        """Test image membership returns a preimage."""
        m = SparseMatrix.from_dense([[1, 1], [0, 2]])

        member, witness = m.in_image({0: 3, 1: 4})

        assert member
        assert m.apply(witness) == {0: Fraction(3), 1: Fraction(4)}

    def test_not_in_image(self):
        """Test a vector outside the column span."""
        m = SparseMatrix.from_dense([[1, 0], [0, 0]])

        member, witness = m.in_image({1: 1})

        assert not member
        assert witness is None

    def test_in_image_wrong_length(self):
        m = SparseMatrix.from_dense([[1, 0], [0, 1]])

        with pytest.raises(DimensionMismatchError):
            m.in_image([1, 2, 3])

    def test_from_columns_strict(self):
        """Test that strict assembly refuses keys outside the row basis."""
        rows = BasisIndex(["a"])

        with pytest.raises(CapExceededError):
            SparseMatrix.from_columns([{"a": 1}, {"b": 1}], rows, strict=True)

    def test_from_columns_registers_rows(self):
        """Test that lenient assembly grows the row basis."""
        rows = BasisIndex(["a"])

        m = SparseMatrix.from_columns([{"a": 1}, {"b": 2}], rows)

        assert m.nrows == 2
        assert rows.keys == ["a", "b"]
        assert m.entry(1, 1) == 2

    def test_span_rank(self):
        """Test rank of sparse vectors."""
        vectors = [{0: 1, 1: 1}, {1: 1}, {0: 2, 1: 3}]

        assert span_rank(vectors, 2) == 2
        assert span_rank([], 4) == 0
