import dataclasses

import pytest

from beamadapt import (
    AngularCovariance,
    Direction,
    ElementPattern,
    IntegrationGrid,
    LinkBudget,
    PlanarArrayGeometry,
)
from beamadapt.config import ExperimentConfig


@pytest.fixture(scope="session")
def geom16():
    return PlanarArrayGeometry(rows=16, cols=16, spacing=0.5, carrier_frequency=28e9)


@pytest.fixture(scope="session")
def pattern():
    return ElementPattern()


@pytest.fixture(scope="session")
def table1():
    """Link parameters used throughout the simulation studies."""
    return LinkBudget()


@pytest.fixture(scope="session")
def cov_study():
    """2 degree sigmas with correlation 0.5."""
    return AngularCovariance(sigma_theta=2.0, sigma_psi=2.0, rho=0.5)


@pytest.fixture(scope="session")
def boresight():
    return Direction(0.0, 0.0)


@pytest.fixture(scope="session")
def default_grid(boresight):
    return IntegrationGrid(center=boresight)


@pytest.fixture()
def fast_cfg(tmp_path):
    """Small, coarse configuration for quick end-to-end sweep tests."""
    return dataclasses.replace(
        ExperimentConfig(),
        rows=8,
        cols=8,
        grid_resolution_deg=0.2,
        distance_points=8,
        distance_min_m=100.0,
        distance_max_m=3500.0,
        correlation_points=3,
        orientation_points=3,
        fixed_distance_m=1500.0,
        output_dir=str(tmp_path / "out"),
    )
