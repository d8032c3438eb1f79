# Test configuration
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from exact_kernel import TruncationSpec

pytest_plugins = []


@pytest.fixture
def small_trunc():
    """Two PBW letters, two deltas and tensor degree 2: enough for the sampled suites."""
    return TruncationSpec(max_tensor_degree=2, pbw_cap=2, delta_cap=2, tree_cap=3)


@pytest.fixture
def page_trunc():
    """Window of the weight-1 page computations."""
    return TruncationSpec(max_tensor_degree=3, pbw_cap=3, delta_cap=3, tree_cap=3)
