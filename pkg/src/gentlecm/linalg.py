"""Exact dense linear algebra over prime fields and the rationals.

Matrices are numpy arrays: ``int64`` holding canonical residues for F_p,
``object`` holding :class:`fractions.Fraction` for Q.  Every function takes the
field explicitly.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy

__all__ = [
    "Field",
    "PrimeField",
    "RationalField",
    "GF",
    "QQ",
    "rref",
    "rank",
    "kernel_basis",
    "solve",
    "inverse",
    "is_invertible",
    "minimal_polynomial",
    "poly_eval_matrix",
    "jordan_block",
    "companion",
    "char_poly_cyclic",
    "SpanBuilder",
]


class Field:
    dtype: object
    characteristic: int

    def array(self, data) -> np.ndarray:
        raise NotImplementedError

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return self.array(np.zeros((rows, cols), dtype=np.int64))

    def eye(self, n: int) -> np.ndarray:
        return self.array(np.eye(n, dtype=np.int64))

    def matmul(self, a, b) -> np.ndarray:
        raise NotImplementedError

    def reduce(self, a) -> np.ndarray:
        return a

    def neg(self, x):
        return self.reduce(-x)

    def inv(self, x):
        raise NotImplementedError

    def scalar(self, x):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return not np.any(a != 0)

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        raise NotImplementedError

    def format(self, x) -> str:
        return str(x)


class PrimeField(Field):
    """F_p with small p; residues live in int64 arrays."""

    dtype = np.int64

    def __init__(self, p: int):
        if not sympy.isprime(p):
            raise ValueError(f"{p} is not prime")
        if p > 46337:
            raise ValueError("prime too large for int64 products")
        self.p = p
        self.characteristic = p

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def scalar(self, x) -> int:
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def array(self, data) -> np.ndarray:
        arr = np.asarray(data)
        if arr.dtype == object:
            flat = [self.scalar(x) for x in arr.ravel()]
            return np.array(flat, dtype=np.int64).reshape(arr.shape)
        return np.asarray(arr, dtype=np.int64) % self.p

    def matmul(self, a, b) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % self.p

    def reduce(self, a) -> np.ndarray:
        return np.asarray(a, dtype=np.int64) % self.p

    def inv(self, x) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(x, -1, self.p)

    def random(self, rng, shape) -> np.ndarray:
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def elements(self):
        return range(self.p)


class RationalField(Field):
    dtype = object
    characteristic = 0

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def scalar(self, x) -> Fraction:
        return Fraction(x)

    def array(self, data) -> np.ndarray:
        arr = np.asarray(data, dtype=object)
        out = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(arr):
            out[idx] = Fraction(x)
        return out

    def zeros(self, rows, cols):
        out = np.empty((rows, cols), dtype=object)
        out.fill(Fraction(0))
        return out

    def matmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=object)
        b = np.asarray(b, dtype=object)
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return self.array(a @ b)

    def inv(self, x) -> Fraction:
        return 1 / Fraction(x)

    def random(self, rng, shape) -> np.ndarray:
        return self.array(rng.integers(-3, 4, size=shape))


QQ = RationalField()
_FIELDS: dict[int, PrimeField] = {}


def GF(p: int) -> PrimeField:
    if p not in _FIELDS:
        _FIELDS[p] = PrimeField(p)
    return _FIELDS[p]


def rref(F: Field, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    A = F.array(M).copy()
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c] != 0)[0]
        if len(nz) == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = F.reduce(A[r] * F.inv(A[r, c]))
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col != 0)[0]
        if len(nzr):
            A[nzr] = F.reduce(A[nzr] - np.outer(col[nzr], A[r]))
        pivots.append(c)
        r += 1
    return A, pivots


def rank(F: Field, M) -> int:
    M = F.array(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def kernel_basis(F: Field, M) -> np.ndarray:
    """Rows form a basis of ``{x : M x = 0}``."""
    M = F.array(M)
    rows, cols = M.shape
    if rows == 0:
        return F.eye(cols)
    R, pivots = rref(F, M)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = F.zeros(len(free), cols)
    if not free:
        return basis
    basis[np.arange(len(free)), free] = F.scalar(1)
    if pivots:
        basis[:, pivots] = F.reduce(-R[:len(pivots)][:, free].T)
    return basis


def solve(F: Field, M, rhs):
    """One solution ``x`` of ``M x = rhs`` or None; ``rhs`` may be a vector or matrix."""
    M = F.array(M)
    b = F.array(rhs)
    vec = b.ndim == 1
    if vec:
        b = b.reshape(-1, 1)
    if M.shape[0] != b.shape[0]:
        raise ValueError("shape mismatch")
    aug = np.concatenate([M, b], axis=1)
    R, pivots = rref(F, aug)
    n = M.shape[1]
    if any(p >= n for p in pivots):
        return None
    x = F.zeros(n, b.shape[1])
    for i, pc in enumerate(pivots):
        x[pc] = R[i, n:]
    return x[:, 0] if vec else x


def inverse(F: Field, M) -> np.ndarray:
    M = F.array(M)
    n, m = M.shape
    if n != m:
        raise ValueError("shape mismatch")
    aug = np.concatenate([M, F.eye(n)], axis=1)
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


def is_invertible(F: Field, M) -> bool:
    M = F.array(M)
    return M.shape[0] == M.shape[1] and rank(F, M) == M.shape[0]


class SpanBuilder:
    """Incrementally maintained echelon basis; reports whether vectors are new."""

    def __init__(self, F: Field, dim: int):
        self.F = F
        self.dim = dim
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    def reduce(self, v) -> np.ndarray:
        F = self.F
        v = F.array(v).copy()
        for row, pc in zip(self.rows, self.pivots):
            if v[pc] != 0:
                v = F.reduce(v - v[pc] * row)
        return v

    def coordinates(self, v):
        """Coordinates of ``v`` in the stored rows, or None if outside the span."""
        F = self.F
        v = F.array(v).copy()
        coords = []
        for row, pc in zip(self.rows, self.pivots):
            c = v[pc]
            coords.append(c)
            if c != 0:
                v = F.reduce(v - c * row)
        return None if np.any(v != 0) else coords

    def add(self, v) -> bool:
        F = self.F
        v = self.reduce(v)
        nz = np.nonzero(v != 0)[0]
        if len(nz) == 0:
            return False
        pc = int(nz[0])
        v = F.reduce(v * F.inv(v[pc]))
        for i, row in enumerate(self.rows):
            if row[pc] != 0:
                self.rows[i] = F.reduce(row - row[pc] * v)
        self.rows.append(v)
        self.pivots.append(pc)
        return True

    def __len__(self):
        return len(self.rows)


def minimal_polynomial(F: Field, M) -> list:
    """Coefficients ``[c0, ..., 1]`` of the minimal polynomial of a square matrix."""
    M = F.array(M)
    n = M.shape[0]
    powers = [F.eye(n)]
    vecs = [powers[0].ravel()]
    while True:
        nxt = F.matmul(powers[-1], M)
        basis = np.stack(vecs, axis=1)
        sol = solve(F, basis, nxt.ravel())
        if sol is not None:
            return [F.scalar(F.neg(c)) for c in sol] + [F.scalar(1)]
        powers.append(nxt)
        vecs.append(nxt.ravel())


def poly_eval_matrix(F: Field, coeffs, M) -> np.ndarray:
    """Evaluate ``sum coeffs[k] M^k`` by Horner's rule."""
    M = F.array(M)
    n = M.shape[0]
    acc = F.zeros(n, n)
    for c in reversed(list(coeffs)):
        acc = F.reduce(F.matmul(acc, M) + F.scalar(c) * F.eye(n))
    return acc


def jordan_block(F: Field, lam, n: int) -> np.ndarray:
    lam = F.scalar(lam)
    if lam == 0:
        raise ValueError("eigenvalue must be nonzero: x has to act invertibly")
    if n < 1:
        raise ValueError("block size must be positive")
    J = F.zeros(n, n)
    for i in range(n):
        J[i, i] = lam
        if i + 1 < n:
            J[i, i + 1] = F.scalar(1)
    return J


def companion(F: Field, coeffs) -> np.ndarray:
    """Companion matrix of the monic polynomial ``x^d + a_{d-1} x^{d-1} + ... + a_0``.

    ``coeffs`` lists ``[a_0, ..., a_{d-1}]`` without the leading 1.
    Column ``j`` is the image of the basis vector ``e_j``: ``e_j -> e_{j+1}``
    and ``e_{d-1} -> -sum a_r e_r``.
    """
    coeffs = [F.scalar(c) for c in coeffs]
    d = len(coeffs)
    if d == 0:
        raise ValueError("empty polynomial")
    if coeffs[0] == 0:
        raise ValueError("constant term is zero: x would act non-invertibly")
    C = F.zeros(d, d)
    for j in range(d - 1):
        C[j + 1, j] = F.scalar(1)
    for r in range(d):
        C[r, d - 1] = F.neg(coeffs[r])
    return C


def char_poly_cyclic(F: Field, J) -> list:
    """Characteristic polynomial of a cyclic matrix (minimal = characteristic)."""
    mp = minimal_polynomial(F, J)
    if len(mp) - 1 != F.array(J).shape[0]:
        raise ValueError("matrix is not cyclic")
    return mp
