"""Shared test fixtures: array-to-Image shorthand and prebuilt suites."""

import numpy as np
import pytest

from spacelab_iqa import Image, write_background_suite, write_exposure_suite


def im(data) -> Image:
    """Wrap a nested list or ndarray as a luma-only Image."""
    return Image(luma=np.asarray(data, dtype=np.float64))


@pytest.fixture(scope="session")
def background_suite(tmp_path_factory):
    """Manifest path of a freshly written synthetic background suite."""
    root = tmp_path_factory.mktemp("bg_suite")
    return write_background_suite(root)


@pytest.fixture(scope="session")
def exposure_suite(tmp_path_factory):
    """Manifest path of a freshly written synthetic exposure suite."""
    root = tmp_path_factory.mktemp("ex_suite")
    return write_exposure_suite(root)
