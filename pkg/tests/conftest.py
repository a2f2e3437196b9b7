import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from surfsc import (
    DiscParams,
    coefficient_row,
    make_grid,
    optimize_alpha_halfplane,
    reference_theta0,
    solve_disc,
)

# Coarser grid for unit tests where the spec does not pin default tolerances;
# acceptance runs at the package defaults.
UNIT_GRID = make_grid(20.0, 20000)


@pytest.fixture(scope="session")
def theta():
    return reference_theta0()


@pytest.fixture(scope="session")
def sol_b15():
    """Flat-boundary solution at b = 1.5 on the default grid."""
    return optimize_alpha_halfplane(1.5)


@pytest.fixture(scope="session")
def sol_b15_unit():
    """Flat-boundary solution at b = 1.5 on the cheaper unit-test grid."""
    return optimize_alpha_halfplane(1.5, UNIT_GRID)


@pytest.fixture(scope="session")
def coeff_b15():
    return coefficient_row(1.5)


@pytest.fixture(scope="session")
def disc_b15_eps005():
    return solve_disc(DiscParams(eps=0.05, b=1.5))
