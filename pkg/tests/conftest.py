import pytest

from fadebound.channel import build_rayleigh, exponential_correlation

# One line per acceptance criterion, echoed in the terminal summary so
# they are visible even with output capture on.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
from fadebound.sweep import SweepConfig, build_spectrum

# The standard evaluation grid: every signalling scheme crossed with every
# exponential-correlation channel.
GRID_SCHEMES = (
    {"kind": "qpsk"},
    {"kind": "orthogonal", "M": 16},
    {"kind": "orthogonal", "M": 512},
    {"kind": "permutation", "L": 3},
    {"kind": "permutation", "L": 6},
    {"kind": "permutation", "L": 9},
    {"kind": "gaussian", "K": 9, "M": 10, "seed": 1},
    {"kind": "gaussian", "K": 9, "M": 300, "seed": 1},
)
GRID_CHANNELS = tuple((N, rho) for N in (1, 2, 4) for rho in (0.1, 0.5))


def scheme_id(scheme: dict) -> str:
    kind = scheme["kind"]
    if kind == "orthogonal":
        return f"orthogonal-M{scheme['M']}"
    if kind == "permutation":
        return f"permutation-L{scheme['L']}"
    if kind == "gaussian":
        return f"gaussian-K{scheme['K']}-M{scheme['M']}"
    return kind


@pytest.fixture(scope="session")
def channel_for():
    cache = {}

    def get(N: int, rho: float):
        key = (N, rho)
        if key not in cache:
            cache[key] = build_rayleigh(exponential_correlation(N, rho))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def spectrum_for():
    cache = {}

    def get(scheme: dict):
        key = scheme_id(scheme)
        if key not in cache:
            cfg = SweepConfig(
                scheme=scheme, channel={"model": "rayleigh-exp", "N": 1, "rho": 0.0}
            )
            cache[key] = build_spectrum(cfg.scheme)
        return cache[key]

    return get
