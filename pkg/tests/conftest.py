"""Test configuration and fixtures for fracsob tests."""

import pytest

from fracsob.catalog import Gaussian, Linear
from fracsob.models.domain import DomainSpec
from tests.helpers.model_factories import (create_test_config, create_test_function,
                                           create_test_gaussian, create_test_indicator,
                                           create_test_params)


@pytest.fixture
def params_1d():
    """(n, s, p) = (1, 1/4, 2): sp = 1/2 and p* = 4."""
    return create_test_params(1, 0.25, 2.0)


@pytest.fixture
def params_2d():
    return create_test_params(2, 0.5, 2.0)


@pytest.fixture
def default_config():
    return create_test_config()


@pytest.fixture
def unit_indicator():
    """chi_[0,1] on the grid [0, 1] with 257 points."""
    return create_test_indicator(0.0, 1.0, 257)


@pytest.fixture
def unit_linear():
    """f(x) = x on [0, 1] with 257 points."""
    return create_test_function(Linear(), 0.0, 1.0, 257)


@pytest.fixture
def gaussian_1d():
    return create_test_gaussian(1, 8.0, 257)


@pytest.fixture
def standard_gaussian():
    return Gaussian()


@pytest.fixture
def unit_interval():
    return DomainSpec.interval(0.0, 1.0)


@pytest.fixture
def clean_env(monkeypatch):
    """Environment without fracsob settings."""
    monkeypatch.delenv("FRACSOB_THREADS", raising=False)
    monkeypatch.delenv("FRACSOB_LOG_LEVEL", raising=False)
    return monkeypatch
