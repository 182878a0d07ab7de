import pytest

from nash_sharp import ball_eigen, constants


@pytest.fixture(scope="session")
def eig_by_dim():
    """Shared eigenvalue solutions; solving is the slow part of setup."""
    cache = {}

    def get(dim, grid_size=4096):
        key = (dim, grid_size)
        if key not in cache:
            cache[key] = ball_eigen.solve_lambda1(dim, grid_size=grid_size)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def consts_by_dim(eig_by_dim):
    cache = {}

    def get(dim):
        if dim not in cache:
            cache[dim] = constants.compute_constants(dim, eig_by_dim(dim))
        return cache[dim]

    return get
