import numpy as np
import pytest

from srvshape.curve import Curve, knots, normalize_length, to_srvf
from srvshape.synthetic import SynthConfig, generate_synthetic

ACCEPTANCE_RESULTS = {}


def smooth_curve(rng, m, n=2, modes=3, scale=0.3):
    """A random smooth open curve: a line plus a few low Fourier modes."""
    t = knots(m)
    pts = np.outer(t, rng.normal(size=n))
    for h in range(1, modes + 1):
        pts += scale / h * (np.outer(np.sin(h * t), rng.normal(size=n)) + np.outer(np.cos(h * t), rng.normal(size=n)))
    return Curve(pts)


def random_srvf(rng, m=100, n=2, **kw):
    return normalize_length(to_srvf(smooth_curve(rng, m, n, **kw)))


def random_rotation(rng, n):
    Q, R = np.linalg.qr(rng.normal(size=(n, n)))
    Q = Q @ np.diag(np.sign(np.diag(R)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def smooth_warp(m, a=0.4):
    """gamma(t) = t + a sin(t)/2, a diffeomorphism of [0, 2*pi] for |a| < 2."""
    t = knots(m)
    g = t + 0.5 * a * np.sin(t)
    g[0], g[-1] = 0.0, 2 * np.pi
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_synthetic():
    return generate_synthetic(SynthConfig(n_per_class=20, m=100, seed=3))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    # criteria whose test raised before recording
    recorded = {k.split()[0] for k in ACCEPTANCE_RESULTS}
    for rep in terminalreporter.stats.get("failed", []):
        name = rep.nodeid.rsplit("::", 1)[-1]
        if name.startswith("test_criterion_"):
            num = str(int(name.split("_")[2]))
            if num not in recorded:
                ACCEPTANCE_RESULTS[f"{num} {name}"] = (False, "raised before recording a result")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        status = "N/A " if ok is None else ("PASS" if ok else "FAIL")
        terminalreporter.write_line(f"{status}  {key}: {detail}")
