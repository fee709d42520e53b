"""Bounded complexes of projectives and folding them into differential modules.

A :class:`ProjComplex` is stored in folded coordinates: the multiplicity space of
each vertex is a list of copies, each carrying a degree, and a single
:class:`PathMap` holds all differentials.  A nonzero entry may only join a copy
in degree ``n`` to one in degree ``n + 1``.  Folding forgets the degrees.
"""
from __future__ import annotations

from collections import Counter

import numpy as np

from .diffmod import DifferentialModule, PathMap, SquareNonzeroError
from .linalg import Field, is_invertible
from .quiver import GentlePresentation
from .strings import (HomotopyBand, HomotopyString, _copy_layout, _place, grading,
                      winding)

__all__ = [
    "ProjComplex",
    "GradingError",
    "fold",
    "string_complex",
    "band_complex",
    "stalk",
    "cone_of_identity",
    "dump_complex",
]


class GradingError(ValueError):
    pass


class ProjComplex:
    def __init__(self, algebra: GentlePresentation, field: Field, degrees, coeffs=None,
                 *, check: bool = True):
        A = algebra
        self.algebra = A
        self.field = field
        self.degrees = tuple(tuple(int(x) for x in ds) for ds in degrees)
        if len(self.degrees) != len(A.vertices):
            raise ValueError("one degree list per vertex expected")
        self.mult = tuple(len(ds) for ds in self.degrees)
        if isinstance(coeffs, PathMap):
            d = coeffs
        else:
            d = PathMap(A, field, self.mult, self.mult, dict(coeffs or {}))
        self.d = d
        if check:
            self._check()

    def _check(self) -> None:
        A = self.algebra
        for k, mat in self.d.coeffs.items():
            s, t = A.path_ends[k]
            rows, cols = np.nonzero(mat)
            for i, j in zip(rows, cols):
                # entry (i, j) maps copy j at t into copy i at s
                if self.degrees[s][i] != self.degrees[t][j] + 1:
                    raise GradingError(f"component along {A.paths[k]} does not raise degree by one")
        if not (self.d @ self.d).is_zero():
            raise SquareNonzeroError("d^2 != 0")

    @property
    def support(self) -> list[int]:
        return sorted({x for ds in self.degrees for x in ds})

    def terms(self) -> dict[int, tuple[int, ...]]:
        """Multiplicities per vertex in each degree."""
        out = {}
        for n in self.support:
            out[n] = tuple(sum(1 for x in ds if x == n) for ds in self.degrees)
        return out

    def _copies(self, n: int) -> list[list[int]]:
        return [[i for i, x in enumerate(ds) if x == n] for ds in self.degrees]

    def differential(self, n: int) -> PathMap:
        """``d^n: P^n -> P^(n+1)`` in the copy order of each term."""
        return self.d.restrict(self._copies(n), self._copies(n + 1))

    def term_dimension(self, n: int) -> int:
        A = self.algebra
        return sum(d * A.dim_projective(v) for v, d in zip(A.vertices, self.terms().get(n, ())))

    @property
    def dimension(self) -> int:
        A = self.algebra
        return sum(d * A.dim_projective(v) for v, d in zip(A.vertices, self.mult))

    def shift(self, n: int = 1) -> "ProjComplex":
        """``P[n]``: degrees move down by ``n``, the differential picks up ``(-1)^n``."""
        d = self.d.scale(-1) if n % 2 else self.d
        return ProjComplex(self.algebra, self.field,
                           [[x - n for x in ds] for ds in self.degrees], d, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjComplex):
            return NotImplemented
        return self.degrees == other.degrees and self.d == other.d

    def __repr__(self):
        return f"ProjComplex(terms={self.terms()})"

    @classmethod
    def from_terms(cls, A: GentlePresentation, F: Field, terms: dict, differentials: dict):
        """Build from ``terms[n]`` (multiplicities) and ``differentials[n]: P^n -> P^(n+1)``."""
        degs = sorted(terms)
        degrees = [[] for _ in A.vertices]
        where: dict[int, list[list[int]]] = {}
        for n in degs:
            where[n] = []
            for v, d in enumerate(terms[n]):
                start = len(degrees[v])
                degrees[v].extend([n] * d)
                where[n].append(list(range(start, start + d)))
        mult = tuple(len(x) for x in degrees)
        coeffs: dict[int, np.ndarray] = {}
        for n, f in differentials.items():
            if n not in terms or n + 1 not in terms:
                raise ValueError(f"differential {n} leaves the support")
            for k, mat in f.coeffs.items():
                s, t = A.path_ends[k]
                block = coeffs.setdefault(k, F.zeros(mult[s], mult[t]))
                block[np.ix_(where[n + 1][s], where[n][t])] = mat
        return cls(A, F, degrees, coeffs)


def fold(P: ProjComplex) -> DifferentialModule:
    """Sum of the terms with the sum of the differentials; no contractible part is removed."""
    return DifferentialModule(P.algebra, P.field, P.mult, P.d, check=False)


def stalk(A: GentlePresentation, F: Field, mult, degree: int = 0) -> ProjComplex:
    return ProjComplex(A, F, [[degree] * d for d in mult])


def cone_of_identity(A: GentlePresentation, F: Field, vertex: str, degree: int = 0) -> ProjComplex:
    """``P_v -> P_v`` with identity differential, starting in ``degree``."""
    v = A.vertex_index[vertex]
    degrees = [[] for _ in A.vertices]
    degrees[v] = [degree + 1, degree]
    return ProjComplex(A, F, degrees, {A.trivial_index[v]: [[0, 1], [0, 0]]})


def string_complex(A: GentlePresentation, F: Field, w: HomotopyString, anchor: int = 0,
                   mu=None) -> ProjComplex:
    """Complex of a graded string; ``mu`` overrides the grading anchored at ``anchor``."""
    expected = grading(w, anchor)
    if mu is not None:
        mu = [int(x) for x in mu]
        if len(mu) != len(expected) or any(a - b != mu[0] - expected[0] for a, b in zip(mu, expected)):
            raise GradingError("grading inconsistent with the letters")
        expected = mu
    crossings = w.crossings()
    mult, copies = _copy_layout(A, crossings)
    degrees = _degrees(A, mult, crossings, expected, 1)
    coeffs: dict[int, np.ndarray] = {}
    for i, x in enumerate(w.letters, start=1):
        _place(A, F, coeffs, mult, x, copies[i - 1], copies[i], F.eye(1))
    return ProjComplex(A, F, degrees, coeffs)


def band_complex(A: GentlePresentation, F: Field, w: HomotopyBand, J, anchor: int = 0,
                 start: int = 0) -> ProjComplex:
    if start:
        w = w.rotate(start)
    mu = grading(w, anchor)
    if mu is None:
        raise GradingError(f"band has winding number {winding(w)} and admits no grading")
    J = F.array(np.atleast_2d(J))
    if not is_invertible(F, J):
        raise ValueError("band parameter must be invertible")
    n = J.shape[0]
    crossings = w.crossings()
    mult, copies = _copy_layout(A, crossings, n)
    degrees = _degrees(A, mult, crossings, mu, n)
    coeffs: dict[int, np.ndarray] = {}
    r = len(w)
    for i, x in enumerate(w.letters, start=1):
        block = J if i == r else F.eye(n)
        _place(A, F, coeffs, mult, x, copies[i - 1], copies[i % r], block)
    return ProjComplex(A, F, degrees, coeffs)


def _degrees(A, mult, crossings, mu, n):
    degrees = [[None] * d for d in mult]
    seen = Counter()
    for v, deg in zip(crossings, mu):
        k = A.vertex_index[v]
        for _ in range(n):
            degrees[k][seen[k]] = deg
            seen[k] += 1
    return degrees


def dump_complex(P: ProjComplex) -> str:
    """Module dump of the folded differential plus one ``deg`` line per vertex."""
    from .diffmod import dump_module
    lines = dump_module(fold(P)).splitlines()
    out = []
    for line in lines:
        out.append(line)
        if line.startswith("dim "):
            name = line[4:].split("=")[0]
            ds = P.degrees[P.algebra.vertex_index[name]]
            out.append(" ".join(["deg", name, *map(str, ds)]))
    return "\n".join(out) + "\n"
