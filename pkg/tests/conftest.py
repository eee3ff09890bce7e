"""Shared hypothesis profile and instance generators."""
import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def separated_points(rng, n, lo=-1.0, hi=1.0, gap=0.1):
    """``n`` sorted points in ``[lo, hi]`` with pairwise gaps at least ``gap``."""
    slack = (hi - lo) - gap * (n - 1)
    u = np.sort(rng.uniform(0, slack, n))
    return lo + u + gap * np.arange(n)


def random_amplitudes(rng, n, lo=0.5, hi=2.0):
    return rng.choice([-1.0, 1.0], n) * rng.uniform(lo, hi, n)


@st.composite
def prony_instances(draw, max_n=6, gap=0.1):
    """Real nodes in [-1, 1] with gaps >= ``gap`` and 0.5 <= |a| <= 2."""
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    return separated_points(rng, n, gap=gap), random_amplitudes(rng, n)


@st.composite
def complex_prony_instances(draw, max_n=4):
    """Nodes inside the unit disc, well separated, complex amplitudes."""
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    while True:
        r = rng.uniform(0.2, 0.95, n)
        t = rng.uniform(-np.pi, np.pi, n)
        x = r * np.exp(1j * t)
        d = np.abs(x[:, None] - x[None, :]) + np.eye(n) * 9
        if d.min() >= 0.2:
            break
    a = rng.uniform(0.5, 2.0, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
    return x, a


def match_error(truth, est):
    """Largest distance after optimally pairing two point sets."""
    from scipy.optimize import linear_sum_assignment
    truth, est = np.asarray(truth), np.asarray(est)
    cost = np.abs(truth[:, None] - est[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if r.size else 0.0
