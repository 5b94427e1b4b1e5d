"""Shared fixtures: a small fake handwritten-digit dataset directory."""

import numpy as np
import pytest

from qmvk.data import MFEAT_VIEWS


@pytest.fixture(scope="session")
def fake_mfeat_dir(tmp_path_factory):
    """Write six view files with the canonical 2000-row layout.

    Values are seeded random but class-dependent so downstream splits and
    kernels see real structure; rows follow the digit = row // 200 rule.
    """
    root = tmp_path_factory.mktemp("mfeat")
    rng = np.random.default_rng(20260815)
    digits = np.repeat(np.arange(10), 200)
    for name, dim in MFEAT_VIEWS:
        centers = rng.normal(scale=3.0, size=(10, dim))
        rows = centers[digits] + rng.normal(scale=1.0, size=(2000, dim))
        # Mix filename conventions: half with the mfeat- prefix, half bare.
        fname = f"mfeat-{name}" if name in ("fou", "kar", "zer") else name
        np.savetxt(root / fname, rows, fmt="%.10g")
    return root
