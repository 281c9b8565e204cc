import numpy as np
import pytest

from quadloc.bem import GridSpec, IntensityField, ModeSolution, find_eigenvalues
from quadloc.geometry import ShapeParams, discretize_boundary
from quadloc.metrics import ProbabilityVector, report
from quadloc.sweep import SolvedStep, SweepResult, detect_gap_minimum, track

DISK_J01 = 2.404825557695773
DISK_J11 = 3.831705970207512
DISK_J21 = 5.135622301840683
DISK_J02 = 5.520078110286311

_criteria = []


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    ok = call.excinfo is None
    _criteria.append((mark.args[0], mark.args[1], ok))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for tag, text, ok in sorted(_criteria, key=lambda c: c[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {tag}: {text}")


@pytest.fixture(scope="session")
def circle_mesh_200():
    return discretize_boundary(ShapeParams(0.0), 200)


@pytest.fixture(scope="session")
def disk_grid():
    return GridSpec.for_shape(ShapeParams(0.0), 201)


@pytest.fixture(scope="session")
def circle_modes(circle_mesh_200):
    """Ground mode and the first m=2 pair of the disk (narrow windows)."""
    ground = find_eigenvalues(circle_mesh_200, (2.39, 2.42))
    m2 = find_eigenvalues(circle_mesh_200, (5.12, 5.15))
    return ground, m2


def random_probabilities(rng, n):
    v = rng.random(n) ** 3
    return v / v.sum()


GRID = GridSpec.covering(1.0, 1.0, 41)


def _patterns():
    X, Y = GRID.mesh()
    a = np.exp(-((X + 0.4) ** 2 + Y ** 2) / 0.02)
    b = np.exp(-((X - 0.3) ** 2 + (Y - 0.2) ** 2) / 0.15) * np.cos(3 * Y)
    a = a.ravel() / np.linalg.norm(a)
    b = b.ravel() - np.dot(a, b.ravel()) * a
    return a, b / np.linalg.norm(b)


def _field(psi):
    mask = np.ones((GRID.ny, GRID.nx), dtype=bool)
    psi = psi / np.linalg.norm(psi)
    rho = np.abs(psi) ** 2
    return IntensityField(GRID, mask, rho / rho.sum(), psi.astype(complex))


def two_level_steps(eps, center=0.09, coupling=0.002, slope=1.0, k0=10.0, shuffle_seed=None):
    """Adiabatic eigenpairs of [[d/2, g], [g, -d/2]], d = slope * (eps - center)."""
    a, b = _patterns()
    rng = np.random.default_rng(shuffle_seed)
    steps = []
    for e in eps:
        d = slope * (e - center)
        theta = 0.5 * np.arctan2(2 * coupling, d)
        half = 0.5 * np.hypot(d, 2 * coupling)
        lower = -np.sin(theta) * a + np.cos(theta) * b
        upper = np.cos(theta) * a + np.sin(theta) * b
        pairs = [(k0 - half, lower), (k0 + half, upper)]
        if shuffle_seed is not None and rng.random() < 0.5:
            pairs.reverse()
        modes = [ModeSolution(e, k, 0.0, np.ones(4) / 2) for k, _ in pairs]
        fields = [_field(v) for _, v in pairs]
        reports = [report(ProbabilityVector(f.values)) for f in fields]
        steps.append(SolvedStep(float(e), modes, fields, reports))
    return steps


def synthetic_result(steps=13):
    pair = track(two_level_steps(np.linspace(0.085, 0.097, steps), center=0.091))
    e_ac, gap = detect_gap_minimum(zip(pair.epsilons, pair.gaps))
    return SweepResult(pair, e_ac, gap)
