import numpy as np
import pytest

from magnify.metric import MetricKind, PointCloud, pairwise_distances


def random_cloud(rng, n, dim=3, spread=1.0):
    return PointCloud(spread * rng.standard_normal((n, dim)))


def random_distances(rng, n, dim=3, spread=1.0):
    return pairwise_distances(random_cloud(rng, n, dim, spread), MetricKind.EUCLIDEAN)


def random_rotation(rng, dim):
    """A Haar-ish random orthogonal matrix via QR."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diagonal(r))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
