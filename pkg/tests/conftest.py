"""Pytest configuration file for pindex tests."""

import json
import os
import shutil
import tempfile

import numpy as np
import pytest

from pindex.config import ConfigManager
from pindex.core.symplectic import Dim
from pindex.geometry import EllipsoidSurface


@pytest.fixture
def temp_directory():
    """Create a temporary directory for testing."""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir)


@pytest.fixture(autouse=True)
def isolated_config(temp_directory, monkeypatch):
    """Point the configuration at an empty directory and drop the cached config."""
    monkeypatch.setenv("PINDEX_CONFIG_DIR", temp_directory)
    ConfigManager._config = None
    ConfigManager._instance = None
    yield temp_directory
    ConfigManager._config = None
    ConfigManager._instance = None


@pytest.fixture
def rng():
    """Seeded generator for randomized checks."""
    return np.random.default_rng(20240611)


@pytest.fixture
def dim20():
    return Dim(2, 0)


@pytest.fixture
def dim21():
    return Dim(2, 1)


@pytest.fixture
def sphere():
    """Round sphere S^3 of radius 1."""
    return EllipsoidSurface(Dim(2, 0), [1.0, 1.0])


@pytest.fixture
def ellipsoid():
    """Ellipsoid with radii (1, 1.2), inside the sqrt(5/3) pinching window."""
    return EllipsoidSurface(Dim(2, 0), [1.0, 1.2])


@pytest.fixture
def surface_file(temp_directory):
    """Factory writing a surface file and returning its path."""

    def write(radii, n=2, kappa=0, alpha=1.5):
        path = os.path.join(temp_directory, f"surface_{len(os.listdir(temp_directory))}.json")
        with open(path, "w") as f:
            json.dump({"n": n, "kappa": kappa, "radii": list(radii), "alpha": alpha}, f)
        return path

    return write
