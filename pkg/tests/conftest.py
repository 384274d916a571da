import pytest

from cantornet.fibodelta import compute_delta
from cantornet.netcore import build_network
from cantornet.spectral import gen_weight_matrix

# (n, seed, sum target, mode). Row-mode generated matrices have equal row
# sums and hence a uniform eigenvector; column mode gives a non-uniform one.
INSTANCES = [
    (1, 0, 0.8, "row"),
    (2, 1, 0.76, "column"),
    (4, 3, 0.875, "column"),
    (8, 5, 0.9, "row"),
    (16, 2, 0.99, "column"),
    (64, 9, 0.875, "column"),
]


@pytest.fixture(scope="session")
def dp():
    return compute_delta(64)


@pytest.fixture(scope="session")
def networks():
    return {n: build_network(gen_weight_matrix(n, seed, s, mode)) for n, seed, s, mode in INSTANCES}


@pytest.fixture(scope="session")
def net4(networks):
    return networks[4]


ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one result line per acceptance criterion for the terminal summary."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE_KEY, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(log):
        terminalreporter.write_line(log[number])
