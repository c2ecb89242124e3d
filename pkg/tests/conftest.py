from functools import lru_cache

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from quadrisecant.knot import PolygonalKnot, builtin_knot, perturb_to_generic
from quadrisecant.secants import enumerate_quadrisecants

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@lru_cache(maxsize=None)
def generic_builtin(family, params=None, n=None, seed=0, rel=1e-3):
    """Builtin knot nudged into general position (cached across tests)."""
    K = builtin_knot(family, params, n)
    return perturb_to_generic(K, rel * K.edge_lengths.min(), seed=seed)


@lru_cache(maxsize=None)
def quads(family, params=None, n=None, seed=0):
    return tuple(enumerate_quadrisecants(generic_builtin(family, params, n, seed)))


def convex_polygon(n, seed=0, radius=1.0, nudge=1e-2):
    """Convex planar n-gon nudged by ``nudge`` times its shortest edge
    (a generic unknot); ``nudge=0`` keeps it planar."""
    rng = np.random.default_rng(seed)
    ang = np.sort(rng.uniform(0, 2 * np.pi, n))
    ang = 2 * np.pi * np.arange(n) / n + 0.3 * (ang - ang.mean()) / n
    P = np.stack([radius * np.cos(ang), radius * np.sin(ang), np.zeros(n)], axis=1)
    K = PolygonalKnot(P, f"convex{n}", 0)
    return perturb_to_generic(K, nudge * K.edge_lengths.min(), seed=seed) if nudge else K


@pytest.fixture(scope="session")
def hex_trefoil():
    return builtin_knot("hexagonal_trefoil")


@pytest.fixture(scope="session")
def hex_quads(hex_trefoil):
    return enumerate_quadrisecants(hex_trefoil)


def random_rigid(rng):
    Q, R = np.linalg.qr(rng.normal(size=(3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q, rng.normal(size=3)
