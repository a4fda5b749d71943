import numpy as np
import pytest

# reference material, not part of the package
collect_ignore = ["examples"]


@pytest.fixture
def rng():
    return np.random.default_rng(20200417)
