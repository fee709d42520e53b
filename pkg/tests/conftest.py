import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from gentlecm.corpus import load_algebra  # noqa: E402
from gentlecm.linalg import GF  # noqa: E402

import oracles  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
ALGEBRAS = ROOT / "algebras"

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def a0():
    return load_algebra(str(ALGEBRAS / "a0.alg"))


@pytest.fixture(scope="session")
def cycle3():
    return load_algebra(str(ALGEBRAS / "cycle3.alg"))


@pytest.fixture(scope="session")
def F5():
    return GF(5)


def oracle_data(M):
    """``(RegularModel, phi matrix)`` of a differential module, built by the oracle."""
    A = M.algebra
    arrows = {a.name: (a.source, a.target) for a in A.arrows.values()}
    relations = {tuple(r) for r in A.relations}
    P = oracles.RegularModel(A.vertices, arrows, relations, M.mult)
    coeffs = []
    for k, mat in M.coeffs.items():
        path = A.paths[k]
        coeffs.append((path.source, path.target, tuple(path.arrows), [[int(x) for x in row] for row in mat]))
    return P, P.path_map(coeffs, p=M.field.p)
